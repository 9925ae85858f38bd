"""End-to-end command-line pipeline on small grids."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from s5surf import cli


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Catalog pair and its bipolar surface, produced once via the CLI."""
    d = tmp_path_factory.mktemp("cli")
    runner = CliRunner()
    r = runner.invoke(
        cli.main,
        ["catalog", "lawson-2-1", "--grid", "48x48", "--output", str(d / "law.json")],
    )
    assert r.exit_code == 0, r.output
    r = runner.invoke(
        cli.main,
        ["bipolar", "--input", str(d / "law.json"), "--output", str(d / "bip")],
    )
    assert r.exit_code == 0, r.output
    return d


def test_catalog_rejects_bad_names(tmp_path):
    runner = CliRunner()
    for name in ("lawson-2-4", "lawson-4-2", "nonsense"):
        r = runner.invoke(
            cli.main, ["catalog", name, "--output", str(tmp_path / "x.json")]
        )
        assert r.exit_code != 0, name


def test_catalog_rejects_tiny_grid(tmp_path):
    runner = CliRunner()
    r = runner.invoke(
        cli.main,
        ["catalog", "clifford", "--grid", "8x8", "--output", str(tmp_path / "x.json")],
    )
    assert r.exit_code != 0


def test_analyze_report_structure(workspace, tmp_path):
    runner = CliRunner()
    out = tmp_path / "an"
    r = runner.invoke(
        cli.main,
        ["analyze", "--input", str(workspace / "bip_surface.json"),
         "--output", str(out)],
    )
    assert r.exit_code == 0, r.output
    report = json.loads((tmp_path / "an.json").read_text())
    assert report["ellipse_class"] == "nondegenerate_noncircular"
    for check in report["checks"].values():
        assert set(check) == {"residual", "tolerance", "pass"}
        assert check["pass"]
    assert (tmp_path / "an.csv").exists()
    assert (tmp_path / "an_invariants.png").exists()
    assert (tmp_path / "an_residuals.png").exists()


def test_check_suite_passes_and_is_deterministic(workspace, tmp_path):
    runner = CliRunner()
    outputs = []
    for tag in ("a", "b"):
        out = tmp_path / f"chk_{tag}"
        r = runner.invoke(
            cli.main,
            ["check", "--catalog", "lawson-2-1", "--grid", "48x48",
             "--output", str(out)],
        )
        assert r.exit_code == 0, r.output
        outputs.append((tmp_path / f"chk_{tag}.json").read_bytes())
    assert outputs[0] == outputs[1]


def test_check_exit_code_on_failure(workspace, tmp_path):
    runner = CliRunner()
    r = runner.invoke(
        cli.main,
        ["check", "--catalog", "lawson-2-1", "--grid", "48x48",
         "--tolerance", "1e-9", "--output", str(tmp_path / "bad")],
    )
    assert r.exit_code == 1
    assert "FAILED" in r.output or "FAILED" in (r.stderr or "")


def test_transform_and_sequence_commands(workspace, tmp_path):
    runner = CliRunner()
    r = runner.invoke(
        cli.main,
        ["transform", "--input", str(workspace / "bip_surface.json"),
         "--eps", "-1", "--output", str(tmp_path / "tr")],
    )
    assert r.exit_code == 0, r.output
    assert (tmp_path / "tr_surface.json").exists()
    r = runner.invoke(
        cli.main,
        ["sequence", "--input", str(workspace / "bip_surface.json"),
         "--steps", "-1..1", "--output", str(tmp_path / "seq")],
    )
    assert r.exit_code == 0, r.output
    for p in (-1, 0, 1):
        assert (tmp_path / f"seq_p{p}.json").exists()


def test_lift_command(workspace, tmp_path):
    runner = CliRunner()
    r = runner.invoke(
        cli.main,
        ["lift", "--input", str(workspace / "bip_surface.json"),
         "--output", str(tmp_path / "lf")],
    )
    assert r.exit_code == 0, r.output
    report = json.loads((tmp_path / "lf.json").read_text())
    assert report["admissible_interval"] == [0.0, pytest.approx(np.pi)]
    assert all(c["pass"] for c in report["checks"].values())


def test_export_csv_and_obj(workspace, tmp_path):
    runner = CliRunner()
    src = str(workspace / "bip_surface.json")
    r = runner.invoke(
        cli.main,
        ["export", "--input", src, "--export", "csv",
         "--output", str(tmp_path / "surf.csv")],
    )
    assert r.exit_code == 0, r.output
    header = (tmp_path / "surf.csv").read_text().splitlines()[0]
    assert header == "x,y,v0,v1,v2,v3,v4,v5"

    r = runner.invoke(
        cli.main,
        ["export", "--input", src, "--export", "obj",
         "--output", str(tmp_path / "surf.obj")],
    )
    assert r.exit_code == 0, r.output
    lines = (tmp_path / "surf.obj").read_text().splitlines()
    assert lines[0].startswith("v ")
    assert any(l.startswith("f ") for l in lines)
    proj = json.loads((tmp_path / "surf.obj.proj.json").read_text())
    Q = np.array(proj["projection"])
    np.testing.assert_allclose(Q @ Q.T, np.eye(3), atol=1e-12)


def test_degenerate_bipolar_reported(workspace, tmp_path):
    runner = CliRunner()
    r = runner.invoke(
        cli.main,
        ["catalog", "clifford", "--grid", "32x32",
         "--output", str(tmp_path / "cl.json")],
    )
    assert r.exit_code == 0
    r = runner.invoke(
        cli.main,
        ["bipolar", "--input", str(tmp_path / "cl.json"),
         "--output", str(tmp_path / "bcl")],
    )
    assert r.exit_code == 0, r.output
    report = json.loads((tmp_path / "bcl.json").read_text())
    assert report["degenerate"] is True
