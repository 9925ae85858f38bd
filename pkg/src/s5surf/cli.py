"""Command-line front end.

Subcommands cover catalog generation, surface analysis, the two
transforms and their sequences, the bipolar and lift pipelines, the
check suites with optional convergence ratios, and mesh/table exports.
Reports are deterministic JSON (plus a CSV table and PNG figures for
the human reader); exit status is nonzero iff a check fails.
"""

import csv
import json
import math
import os
import re

import click
import numpy as np

from s5surf import (
    algebra6,
    bipolar as bipolar_mod,
    frames,
    grids,
    integrability,
    lift as lift_mod,
    plots,
    transforms,
)
from s5surf.errors import CircularEllipse, DegenerateEllipse, S5SurfError


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------


def _check(residual, tolerance):
    residual = float(residual)
    tolerance = float(tolerance)
    return {"residual": residual, "tolerance": tolerance, "pass": residual <= tolerance}


def _write_report(report, path):
    with open(path, "w") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_csv(checks, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["check", "residual", "tolerance", "pass"])
        for name in sorted(checks):
            c = checks[name]
            w.writerow([name, f"{c['residual']:.12e}", f"{c['tolerance']:.12e}",
                        int(c["pass"])])


def _finish(report, out_prefix, figures=()):
    """Write the JSON/CSV pair, list artifacts, and set the exit code."""
    _write_report(report, out_prefix + ".json")
    _write_csv(report["checks"], out_prefix + ".csv")
    failures = [n for n, c in sorted(report["checks"].items()) if not c["pass"]]
    for p in [out_prefix + ".json", out_prefix + ".csv", *figures]:
        click.echo(p)
    if failures:
        click.echo(f"FAILED: {failures[0]}", err=True)
        raise SystemExit(1)


def _parse_grid(text):
    m = re.fullmatch(r"(\d+)x(\d+)", text)
    if not m:
        raise click.BadParameter("grid must look like 64x64")
    nx, ny = int(m.group(1)), int(m.group(2))
    if nx < 16 or ny < 16:
        raise click.BadParameter("resolution must be at least 16")
    if nx != ny:
        raise click.BadParameter("only square grids are supported")
    return nx


def _sign_eps(ctx, param, value):
    if value not in (1, -1):
        raise click.BadParameter("eps must be +1 or -1")
    return value


def _even_order(ctx, param, value):
    if value not in (2, 4):
        raise click.BadParameter("order must be 2 or 4")
    return value


def _parse_steps(text):
    m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", text)
    if not m:
        raise click.BadParameter("steps must look like -2..2")
    lo, hi = int(m.group(1)), int(m.group(2))
    if not lo <= 0 <= hi:
        raise click.BadParameter("step range must contain 0")
    return lo, hi


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def make_catalog(name, n):
    """Build a named catalog object: ('s3', S3Surface) or ('s5', surface)."""
    if name == "clifford":
        return "s3", grids.clifford_torus(n)
    m = re.fullmatch(r"lawson-(\d+)-(\d+)", name)
    if m:
        mm, kk = int(m.group(1)), int(m.group(2))
        if mm <= kk or kk < 1 or math.gcd(mm, kk) != 1:
            raise click.BadParameter(
                f"lawson-{mm}-{kk}: need m > k >= 1 with gcd(m, k) = 1"
            )
        return "s3", grids.lawson_torus(mm, kk, n)
    m = re.fullmatch(r"sinhgordon-1d:([0-9.]+)", name)
    if m:
        E = float(m.group(1))
        grid = grids.Grid2(n, n, 1.2, 1.2, periodic_x=False, periodic_y=False)
        x, _ = grid.axes()
        eta = np.tile(integrability.sinh_gordon_1d(E, x)[:, None], (1, n))
        return "s3", integrability.integrate_s3_frame(eta, grid)
    raise click.BadParameter(f"unknown catalog name: {name}")


@click.group()
def main():
    """Minimal surfaces in the 5-sphere: transforms, lifts, bipolar pipeline."""


@main.command()
@click.argument("name")
@click.option("--grid", "grid_text", default="64x64", show_default=True)
@click.option("--output", required=True, type=click.Path())
def catalog(name, grid_text, output):
    """Write a catalog surface (S3 pair or S5 surface) as JSON."""
    n = _parse_grid(grid_text)
    kind, obj = make_catalog(name, n)
    if kind == "s3":
        grids.write_s3(output, obj)
    else:
        grids.write_surface(output, obj)
    click.echo(output)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _load_s5(path, order):
    f, _ = grids.read_surface(path)
    if f.ambient_dim == 4:
        raise click.BadParameter(f"{path} holds an S^3 surface; expected S^5")
    fa, mu = grids.adapt_coordinate(f, order)
    return fa, mu


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "out_prefix", required=True, type=click.Path())
@click.option("--order", default=2, callback=_even_order, type=int, show_default=True)
@click.option("--tolerance", "C", default=1.0, show_default=True,
              help="global scale on all check tolerances")
def analyze(input_path, out_prefix, order, C):
    """Frame invariants, residual checks, and figures for an S5 surface."""
    fa, mu = _load_s5(input_path, order)
    F = frames.build_frame(fa, order)
    h2 = F.grid.h**2
    checks = {
        "gram": _check(frames.gram_residual(F), 10 * C * h2),
        "volume_identity": _check(frames.volume_identity_residual(F), 10 * C * h2),
        "orthogonality": _check(frames.orthogonality_residual(F), 1e-10),
        "minimality": _check(
            frames.minimality_report(fa, order).residual, 10 * C * h2
        ),
    }
    for name, r in frames.frame_equation_residuals(F).items():
        checks[f"frame_eq_{name}"] = _check(r, 10 * C * h2)
    ellipse = frames.classify_ellipse(F)
    report = {
        "input": os.path.basename(input_path),
        "grid": {"nx": F.grid.nx, "ny": F.grid.ny, "h": F.grid.h},
        "order": order,
        "coordinate_scale_mu": [float(np.real(mu)), float(np.imag(mu))],
        "ellipse_class": ellipse.classification.value,
        "checks": checks,
    }
    figures = [
        plots.field_heatmaps(
            {
                "omega": F.omega,
                "phi": F.phi,
                "|alpha|": np.abs(F.alpha),
            },
            F.grid,
            out_prefix + "_invariants.png",
        ),
        plots.residual_bars(checks, out_prefix + "_residuals.png"),
    ]
    _finish(report, out_prefix, figures)


# ---------------------------------------------------------------------------
# transform / sequence
# ---------------------------------------------------------------------------


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "out_prefix", required=True, type=click.Path())
@click.option("--eps", default=1, type=int, show_default=True,
              callback=_sign_eps)
@click.option("--order", default=2, callback=_even_order, type=int, show_default=True)
@click.option("--tolerance", "C", default=1.0, show_default=True)
def transform(input_path, out_prefix, eps, order, C):
    """Apply one transform; write the surface and its minimality checks."""
    fa, _ = _load_s5(input_path, order)
    F = frames.build_frame(fa, order)
    jet = transforms.epsilon_jet(F, eps)
    h2 = F.grid.h**2
    g = F.grid
    surf = grids.SampledSurface(g, jet.f_eps)
    grids.write_surface(out_prefix + "_surface.json", surf)
    back = transforms.transform(frames.build_frame(surf, order), -eps)
    checks = {
        "conformality": _check(
            grids.field_max(np.abs(algebra6.cbilinear(jet.f1_eps, jet.f1_eps)), g),
            10 * C * h2,
        ),
        "adaptedness": _check(
            grids.field_max(
                np.abs(algebra6.cbilinear(jet.f2_eps, jet.f2_eps) + 1.0), g
            ),
            10 * C * h2,
        ),
        "minimality": _check(
            frames.minimality_report(surf, order).residual, 10 * C * h2
        ),
        "round_trip": _check(
            grids.field_max(np.linalg.norm(back.values - F.f0, axis=-1), g),
            10 * C * h2,
        ),
    }
    report = {
        "input": os.path.basename(input_path),
        "eps": eps,
        "grid": {"nx": g.nx, "ny": g.ny, "h": g.h},
        "checks": checks,
    }
    figures = [plots.residual_bars(checks, out_prefix + "_residuals.png")]
    _finish(report, out_prefix, figures)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "out_prefix", required=True, type=click.Path())
@click.option("--steps", "steps_text", default="-2..2", show_default=True)
@click.option("--order", default=2, callback=_even_order, type=int, show_default=True)
@click.option("--tolerance", "C", default=1.0, show_default=True)
def sequence(input_path, out_prefix, steps_text, order, C):
    """Generate the transform sequence and verify its coupling identity."""
    lo, hi = _parse_steps(steps_text)
    fa, _ = _load_s5(input_path, order)
    entries = transforms.sequence(fa, lo, hi, order)
    h2 = entries[0].frame.grid.h**2
    g = entries[0].frame.grid
    checks = {}
    for e in entries:
        grids.write_surface(f"{out_prefix}_p{e.p}.json", e.surface)
    for (plo, pup), r in transforms.sequence_coupling_residuals(entries).items():
        checks[f"coupling_p{plo}_p{pup}"] = _check(r, 10 * C * h2)
    report = {
        "input": os.path.basename(input_path),
        "steps": [lo, hi],
        "grid": {"nx": g.nx, "ny": g.ny, "h": g.h},
        "checks": checks,
    }
    figures = [plots.residual_bars(checks, out_prefix + "_residuals.png")]
    _finish(report, out_prefix, figures)


# ---------------------------------------------------------------------------
# bipolar / lift
# ---------------------------------------------------------------------------


@main.command("bipolar")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "out_prefix", required=True, type=click.Path())
@click.option("--order", default=2, callback=_even_order, type=int, show_default=True)
@click.option("--tolerance", "C", default=1.0, show_default=True)
def bipolar_cmd(input_path, out_prefix, order, C):
    """Bipolar surface of an S3 pair, with the reflection equivalence checks."""
    s3 = grids.read_s3(input_path)
    h2 = s3.grid.h**2
    f = bipolar_mod.bipolar(s3)
    grids.write_surface(out_prefix + "_surface.json", f)
    checks = {
        "s3_minimal_system": _check(bipolar_mod.check_s3_minimal(s3), 20 * C * h2),
        "complex_form": _check(
            bipolar_mod.bipolar_complex_check(s3).residual, 10 * C * h2
        ),
    }
    degenerate = False
    try:
        fa, _ = grids.adapt_coordinate(f, order)
        rep = bipolar_mod.verify_theorem7(fa, order)
        checks["gamma_plus"] = _check(rep.gamma_max, 20 * C * h2)
        checks["reflection_fit"] = _check(rep.reflection.fit_residual, 10 * C * h2)
        checks["reflection_involution"] = _check(rep.reflection.involution_defect, 1e-8)
        checks["reflection_det"] = _check(abs(rep.reflection.det + 1.0), 1e-8)
        checks["omega_match"] = _check(rep.omega_match, 10 * C * h2)
        checks["equivalence_consistent"] = _check(0.0 if rep.consistent else 1.0, 0.5)
    except (DegenerateEllipse, CircularEllipse) as exc:
        degenerate = True
        checks["degenerate_rejection"] = _check(0.0, 0.5)
        click.echo(f"note: frame rejected ({exc})", err=True)
    report = {
        "input": os.path.basename(input_path),
        "grid": {"nx": s3.grid.nx, "ny": s3.grid.ny, "h": s3.grid.h},
        "degenerate": degenerate,
        "checks": checks,
    }
    figures = [plots.residual_bars(checks, out_prefix + "_residuals.png")]
    _finish(report, out_prefix, figures)


@main.command("lift")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "out_prefix", required=True, type=click.Path())
@click.option("--t", "t_value", default=None, type=float,
              help="single t sample; default is a 9-sample grid in (0, pi)")
@click.option("--order", default=2, callback=_even_order, type=int, show_default=True)
@click.option("--tolerance", "C", default=1.0, show_default=True)
def lift_cmd(input_path, out_prefix, t_value, order, C):
    """Frame over I x S from an S5 surface and its (+) transform."""
    fa, _ = _load_s5(input_path, order)
    F = frames.build_frame(fa, order)
    jet = transforms.epsilon_jet(F, +1)
    Fp = frames.build_frame(grids.SampledSurface(F.grid, jet.f_eps), order)
    g = F.grid
    h2 = g.h**2
    tgrid = lift_mod.default_t_grid() if t_value is None else None
    checks = {}
    if t_value is not None:
        L = lift_mod.build_U(F, Fp, t_value)
        checks["gram_U"] = _check(L.gram_residual(), 10 * C * h2)
        checks["volume_U"] = _check(L.volume_residual(), 10 * C * h2)
        checks["coefficient_closure"] = _check(
            lift_mod.lift_coefficients(F.omega, Fp.omega, t_value).identity_residual,
            1e-12,
        )
    else:
        gmax = vmax = 0.0
        for t in tgrid:
            L = lift_mod.build_U(F, Fp, t)
            gmax = max(gmax, L.gram_residual())
            vmax = max(vmax, L.volume_residual())
        checks["gram_U"] = _check(gmax, 10 * C * h2)
        checks["volume_U"] = _check(vmax, 10 * C * h2)
        rep = lift_mod.omega_forms_and_Omega(F, Fp, tgrid)
        # t-identities are limited by the 9-sample stencil, not by h
        dt4 = (tgrid[1] - tgrid[0]) ** 4
        checks["identity_dU13_U56_dt"] = _check(
            rep.identity_residuals["dU13_U56_dt"], C * (dt4 + 10 * g.h)
        )
        checks["identity_z12_3"] = _check(
            rep.identity_residuals["z12_3_relation"], C * (dt4 + 10 * g.h)
        )
        checks["identity_dU13_U56_dbar"] = _check(
            rep.identity_residuals["dU13_U56_dbar"], 10 * C * g.h
        )
        checks["dU2_dt"] = _check(rep.dU2_dt_residual, C * g.h)
        checks["antisymmetry"] = _check(
            rep.antisymmetry_residual, C * (dt4 + 10 * g.h)
        )
    report = {
        "input": os.path.basename(input_path),
        "grid": {"nx": g.nx, "ny": g.ny, "h": g.h},
        "t": t_value if t_value is not None else list(map(float, tgrid)),
        "admissible_interval": [0.0, float(np.pi)],
        "checks": checks,
    }
    figures = [plots.residual_bars(checks, out_prefix + "_residuals.png")]
    _finish(report, out_prefix, figures)


# ---------------------------------------------------------------------------
# check suites
# ---------------------------------------------------------------------------


def _s5_suite(fa, order, C):
    """Residual checks for an adapted S5 surface; returns (checks, fields)."""
    F = frames.build_frame(fa, order)
    g = F.grid
    h, h2 = g.h, g.h**2
    checks = {
        "gram": _check(frames.gram_residual(F), 10 * C * h2),
        "volume_identity": _check(frames.volume_identity_residual(F), 10 * C * h2),
        "minimality": _check(frames.minimality_report(fa, order).residual, 10 * C * h2),
        "frame_equations": _check(frames.frame_equation_residual(F), 10 * C * h2),
    }
    t = integrability.InvariantTriple.from_frame(F)
    checks["system_first_order"] = _check(integrability.residual_system_F(t), C * h)
    jet = transforms.epsilon_jet(F, +1)
    Fp = frames.build_frame(grids.SampledSurface(g, jet.f_eps), order)
    s = integrability.SymmetricInvariants.from_pair(F, Fp)
    checks["system_symmetric"] = _check(integrability.residual_system_B(s), C * h)
    for eps in (+1, -1):
        j = transforms.epsilon_jet(F, eps)
        tag = "plus" if eps > 0 else "minus"
        checks[f"conformality_{tag}"] = _check(
            grids.field_max(np.abs(algebra6.cbilinear(j.f1_eps, j.f1_eps)), g),
            10 * C * h2,
        )
        checks[f"adaptedness_{tag}"] = _check(
            grids.field_max(np.abs(algebra6.cbilinear(j.f2_eps, j.f2_eps) + 1.0), g),
            10 * C * h2,
        )
        surf = grids.SampledSurface(g, j.f_eps)
        checks[f"minimality_{tag}"] = _check(
            frames.minimality_report(surf, order).residual, 10 * C * h2
        )
        back = transforms.transform(frames.build_frame(surf, order), -eps)
        checks[f"round_trip_{tag}"] = _check(
            grids.field_max(np.linalg.norm(back.values - F.f0, axis=-1), g),
            10 * C * h2,
        )
        sym = transforms.symmetric_frame_report(F, j)
        checks[f"volume_symmetric_{tag}"] = _check(sym.volume_residual, 10 * C * h2)
    rep7 = bipolar_mod.verify_theorem7(fa, order)
    checks["equivalence_consistent"] = _check(0.0 if rep7.consistent else 1.0, 0.5)
    fields = {"omega": F.omega, "phi": F.phi, "|alpha|": np.abs(F.alpha)}
    return checks, fields


def _s3_suite(s3, C):
    g = s3.grid
    h2 = g.h**2
    checks = {}
    struct = bipolar_mod.s3_structure_report(s3)
    checks["unit_G1"] = _check(struct["unit_G1"], 1e-7)
    checks["unit_G2"] = _check(struct["unit_G2"], 1e-7)
    checks["orthogonal"] = _check(struct["orthogonal"], 1e-7)
    for k in ("metric_x", "metric_y", "metric_cross", "quartic"):
        checks[k] = _check(struct[k], 20 * C * h2)
    checks["minimal_system"] = _check(bipolar_mod.check_s3_minimal(s3), 20 * C * h2)
    checks["sinh_gordon"] = _check(
        integrability.residual_sinh_gordon(s3.eta, g), 10 * C * h2
    )
    checks["complex_form"] = _check(
        bipolar_mod.bipolar_complex_check(s3).residual, 10 * C * h2
    )
    _, res = lift_mod.bipolar_lift(s3)
    checks["lift_F_tt"] = _check(res["F_tt"], 1e-10)
    checks["lift_unit_F"] = _check(res["unit_F"], 1e-10)
    for k in ("F_tx", "F_ty", "F_xx", "F_xy", "F_yy", "G2_x", "G2_y"):
        checks[f"lift_{k}"] = _check(res[k], 20 * C * h2)
    checks["lift_wedge_formula"] = _check(res["wedge_formula"], 10 * C * h2)
    fields = {"eta": s3.eta}
    return checks, fields


def _run_suite(kind, obj, order, C):
    if kind == "s3":
        return _s3_suite(obj, C)
    fa, _ = grids.adapt_coordinate(obj, order)
    return _s5_suite(fa, order, C)


@main.command()
@click.option("--input", "input_path", default=None, type=click.Path(exists=True))
@click.option("--catalog", "catalog_name", default=None,
              help="run the suite on a catalog object instead of a file")
@click.option("--grid", "grid_text", default="64x64", show_default=True)
@click.option("--output", "out_prefix", required=True, type=click.Path())
@click.option("--order", default=2, callback=_even_order, type=int, show_default=True)
@click.option("--tolerance", "C", default=1.0, show_default=True)
@click.option("--convergence", is_flag=True,
              help="repeat at doubled resolution and report residual ratios")
def check(input_path, catalog_name, grid_text, out_prefix, order, C, convergence):
    """Run the full residual suite for a surface or S3 pair."""
    if (input_path is None) == (catalog_name is None):
        raise click.UsageError("give exactly one of --input or --catalog")
    if catalog_name is not None:
        n = _parse_grid(grid_text)
        kind, obj = make_catalog(catalog_name, n)
    else:
        with open(input_path) as fh:
            doc = json.load(fh)
        if "G1" in doc:
            kind, obj = "s3", grids.s3_from_dict(doc)
        else:
            obj, _ = grids.surface_from_dict(doc)
            kind = "s3" if obj.ambient_dim == 4 else "s5"
            if kind == "s3":
                raise click.BadParameter("bare S^3 surface without G2/eta")
    checks, fields = _run_suite(kind, obj, order, C)
    report = {
        "catalog": catalog_name,
        "input": os.path.basename(input_path) if input_path else None,
        "kind": kind,
        "order": order,
        "checks": checks,
    }
    figures = []
    if convergence:
        if catalog_name is None:
            raise click.UsageError("--convergence requires --catalog")
        n = _parse_grid(grid_text)
        n2 = 2 * n if _grid_of(obj).periodic_x else 2 * n - 1
        _, obj2 = make_catalog(catalog_name, n2)
        checks2, _ = _run_suite(kind, obj2, order, C)
        ratios = {
            k: (checks[k]["residual"] / checks2[k]["residual"])
            if checks2[k]["residual"] > 0
            else float("inf")
            for k in checks
        }
        report["fine_checks"] = checks2
        report["convergence_ratios"] = {k: float(v) for k, v in ratios.items()}
        figures.append(
            plots.convergence_plot(ratios, out_prefix + "_convergence.png")
        )
    grid = _grid_of(obj)
    figures.append(plots.field_heatmaps(fields, grid, out_prefix + "_fields.png"))
    figures.append(plots.residual_bars(checks, out_prefix + "_residuals.png"))
    _finish(report, out_prefix, figures)


def _grid_of(obj):
    return obj.grid


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--output", "output", required=True, type=click.Path())
@click.option("--export", "fmt", required=True, type=click.Choice(["csv", "obj"]))
def export(input_path, output, fmt):
    """Export a surface as a CSV sample table or a PCA-projected OBJ mesh."""
    f, _ = grids.read_surface(input_path)
    g = f.grid
    X, Y = g.meshgrid()
    if fmt == "csv":
        with open(output, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y"] + [f"v{k}" for k in range(f.ambient_dim)])
            for i in range(g.nx):
                for j in range(g.ny):
                    w.writerow(
                        [f"{X[i, j]:.12e}", f"{Y[i, j]:.12e}"]
                        + [f"{v:.12e}" for v in f.values[i, j]]
                    )
    else:
        cloud = f.values.reshape(-1, f.ambient_dim)
        center = cloud.mean(axis=0)
        _, _, Vt = np.linalg.svd(cloud - center, full_matrices=False)
        Q = Vt[:3]
        with open(output + ".proj.json", "w") as fh:
            json.dump(
                {"center": [float(v) for v in center],
                 "projection": [[float(v) for v in row] for row in Q]},
                fh, sort_keys=True, indent=2,
            )
        P = (cloud - center) @ Q.T
        idx = lambda i, j: (i % g.nx) * g.ny + (j % g.ny) + 1
        with open(output, "w") as fh:
            for p in P:
                fh.write(f"v {p[0]:.9f} {p[1]:.9f} {p[2]:.9f}\n")
            imax = g.nx if g.periodic_x else g.nx - 1
            jmax = g.ny if g.periodic_y else g.ny - 1
            for i in range(imax):
                for j in range(jmax):
                    fh.write(
                        f"f {idx(i, j)} {idx(i + 1, j)} "
                        f"{idx(i + 1, j + 1)} {idx(i, j + 1)}\n"
                    )
    click.echo(output)


if __name__ == "__main__":
    main()
