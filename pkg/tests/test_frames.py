"""Moving-frame construction and its residual diagnostics."""

import numpy as np
import pytest

import s5surf.bipolar as bipolar_mod
from s5surf import frames, grids
from s5surf.errors import DegenerateEllipse


def test_gram_matches_target(pipe64):
    assert frames.gram_residual(pipe64.frame) < 10 * pipe64.h**2


def test_frame_equations(pipe64):
    parts = frames.frame_equation_residuals(pipe64.frame)
    for name, r in parts.items():
        assert r < 10 * pipe64.h**2, name


def test_volume_identity(pipe64):
    assert frames.volume_identity_residual(pipe64.frame) < 10 * pipe64.h**2


def test_orthogonality_of_real_vectors(pipe64):
    assert frames.orthogonality_residual(pipe64.frame) < 1e-10


def test_minimality_takahashi(pipe64):
    rep = frames.minimality_report(pipe64.surface)
    assert rep.residual < 10 * pipe64.h**2
    # quarter-Laplacian of a minimal immersion in the unit sphere is a
    # strictly negative multiple of the position (Takahashi)
    assert np.max(rep.mu) < 0.0


def test_minimality_detects_planted_defect(pipe64, rng):
    vals = pipe64.surface.values.copy()
    g = pipe64.grid
    X, Y = g.meshgrid()
    bump = 1e-3 * np.sin(2 * np.pi * X / g.lx) * np.sin(2 * np.pi * Y / g.ly)
    vals[..., 3] += bump
    vals /= np.linalg.norm(vals, axis=-1, keepdims=True)
    broken = grids.SampledSurface(g, vals)
    rep = frames.minimality_report(broken)
    assert rep.residual > 20 * frames.minimality_report(pipe64.surface).residual


def test_gram_detects_planted_defect(pipe64):
    F = pipe64.frame
    from dataclasses import replace

    bad = replace(F, f1=F.f1 * 1.001)
    assert frames.gram_residual(bad) > 100 * frames.gram_residual(F)


def test_ellipse_classification_nondegenerate(pipe64):
    rep = frames.classify_ellipse(pipe64.frame)
    assert rep.classification == frames.EllipseClass.NONDEGENERATE_NONCIRCULAR
    # minor over major axis: strictly between 0 (segment) and 1 (circle)
    assert np.all(rep.axis_ratio > 0.0)
    assert np.all(rep.axis_ratio < 1.0)
    assert np.all(rep.eccentricity < 1.0)


def test_phi_positive_and_invariant_consistency(pipe64):
    F = pipe64.frame
    assert np.min(F.phi) > 0.0
    # |f1|^2 = e^omega, |minor| = sinh(phi), |major| = cosh(phi)
    np.testing.assert_allclose(
        np.sum(np.abs(F.f1) ** 2, axis=-1), np.exp(F.omega), atol=1e-12
    )
    h2 = np.sum(np.abs(F.f2) ** 2, axis=-1)
    assert grids.field_max(h2 - np.cosh(2 * F.phi), F.grid) < 10 * F.grid.h**2


def test_clifford_bipolar_rejected(clifford64):
    f = bipolar_mod.bipolar(clifford64)
    fa, _ = grids.adapt_coordinate(f)
    with pytest.raises(DegenerateEllipse):
        frames.build_frame(fa)
