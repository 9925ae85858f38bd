"""The two normal-rotation transforms, their jets, and sequences.

Closed-form derivative expressions are cross-checked against finite
differences of the transformed samples, which is the independent oracle
for every jet component.
"""

import numpy as np
import pytest

import s5surf.bipolar as bipolar_mod
from s5surf import algebra6, frames, grids, transforms
from s5surf.errors import SequenceBreak


@pytest.mark.parametrize("eps", [+1, -1])
def test_jet_matches_finite_differences(pipe64, eps):
    jet = pipe64.jet(eps)
    g = pipe64.grid
    tol = 20 * pipe64.h**2
    fd1 = grids.wirtinger_d(jet.f_eps, g)
    assert grids.field_max(np.linalg.norm(fd1 - jet.f1_eps, axis=-1), g) < tol
    fd2 = grids.wirtinger_d(jet.f1_eps, g)
    assert grids.field_max(np.linalg.norm(fd2 - jet.df1_eps, axis=-1), g) < tol
    # exp(omega_eps) is the Hermitian norm of the transformed derivative
    assert grids.field_max(
        np.exp(jet.omega_eps) - algebra6.hnorm2(jet.f1_eps), g
    ) < tol


@pytest.mark.parametrize("eps", [+1, -1])
def test_transform_is_minimal_conformal_adapted(pipe64, eps):
    jet = pipe64.jet(eps)
    g = pipe64.grid
    tol = 10 * pipe64.h**2
    assert grids.field_max(np.abs(algebra6.cbilinear(jet.f1_eps, jet.f1_eps)), g) < tol
    assert grids.field_max(
        np.abs(algebra6.cbilinear(jet.f2_eps, jet.f2_eps) + 1.0), g
    ) < tol
    surf = grids.SampledSurface(g, jet.f_eps)
    assert frames.minimality_report(surf).residual < tol


@pytest.mark.parametrize("eps", [+1, -1])
def test_mutual_inverse(pipe64, eps):
    g = pipe64.grid
    surf = grids.SampledSurface(g, pipe64.jet(eps).f_eps)
    F_eps = frames.build_frame(surf)
    back = transforms.transform(F_eps, -eps)
    dev = grids.field_max(
        np.linalg.norm(back.values - pipe64.frame.f0, axis=-1), g
    )
    assert dev < 10 * pipe64.h**2
    # same-sign composition is a control: it must move the surface
    ahead = transforms.transform(F_eps, eps)
    assert grids.field_max(
        np.linalg.norm(ahead.values - pipe64.frame.f0, axis=-1), g
    ) > 0.1


def test_symmetric_frame_identities(pipe64):
    for eps in (+1, -1):
        rep = transforms.symmetric_frame_report(pipe64.frame, pipe64.jet(eps))
        assert rep.gram_residual < 10 * pipe64.h**2
        assert rep.det_residual < 10 * pipe64.h**2
        assert rep.volume_residual < 10 * pipe64.h**2
        assert transforms.sinh_identity_residual(
            pipe64.frame, pipe64.jet(eps)
        ) < 10 * pipe64.h**2


def test_gamma_vanishes_for_bipolar(pipe64):
    gamma = transforms.gamma_invariant(pipe64.frame, pipe64.jet(+1))
    assert grids.field_max(np.abs(gamma), pipe64.grid) < 20 * pipe64.h**2


def test_gamma_reflection_detected(pipe64):
    rep = transforms.detect_gamma_reflection(pipe64.frame, pipe64.jet(+1))
    assert rep is not None
    assert rep.involution_defect < 1e-8
    assert abs(rep.det + 1.0) < 1e-8
    assert rep.fit_residual < 10 * pipe64.h**2
    assert rep.omega_match < 10 * pipe64.h**2


def test_gamma_reflection_skipped_when_gamma_large(pipe64):
    # a tight gamma threshold must report "no reflection expected"
    assert transforms.detect_gamma_reflection(
        pipe64.frame, pipe64.jet(+1), gamma_tol=1e-9
    ) is None


def test_not_full_reflection_swaps_transforms(pipe64):
    rep = transforms.detect_not_full(pipe64.surface, pipe64.frame)
    assert rep.rank == 5
    assert rep.alpha_max < 1e-6
    R = rep.reflection
    np.testing.assert_allclose(R @ R, np.eye(6), atol=1e-12)
    # the hyperplane reflection fixes f and exchanges the two transforms
    g = pipe64.grid
    assert np.max(np.abs(pipe64.frame.f0 @ R.T - pipe64.frame.f0)) < 1e-9
    swap = grids.field_max(
        np.linalg.norm(pipe64.jet(+1).f_eps @ R.T - pipe64.jet(-1).f_eps, axis=-1), g
    )
    assert swap < 10 * pipe64.h**2


def test_full_surface_has_no_reflection(pipe64, rng):
    # generic unit samples are linearly full
    vals = rng.normal(size=(pipe64.grid.nx, pipe64.grid.ny, 6))
    vals /= np.linalg.norm(vals, axis=-1, keepdims=True)
    rep = transforms.detect_not_full(grids.SampledSurface(pipe64.grid, vals))
    assert rep.rank == 6
    assert rep.reflection is None


def test_congruence_equivariance(pipe64, rng):
    # ambient rotations commute with each transform; an ambient
    # reflection conjugates (+) into (-)
    Q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    g = pipe64.grid
    FQ = frames.build_frame(grids.SampledSurface(g, pipe64.frame.f0 @ Q.T))
    plus_rot = transforms.epsilon_jet(FQ, +1).f_eps
    assert grids.field_max(
        np.linalg.norm(plus_rot - pipe64.jet(+1).f_eps @ Q.T, axis=-1), g
    ) < 10 * pipe64.h**2

    A = Q.copy()
    A[:, 0] *= -1
    FA = frames.build_frame(grids.SampledSurface(g, pipe64.frame.f0 @ A.T))
    plus_refl = transforms.epsilon_jet(FA, +1).f_eps
    assert grids.field_max(
        np.linalg.norm(plus_refl - pipe64.jet(-1).f_eps @ A.T, axis=-1), g
    ) < 10 * pipe64.h**2


def test_sequence_coupling_identity(pipe64):
    entries = transforms.sequence(pipe64.surface, -2, 2)
    assert [e.p for e in entries] == [-2, -1, 0, 1, 2]
    g = pipe64.grid
    for pair, r in transforms.sequence_coupling_residuals(entries).items():
        assert r < 20 * pipe64.h**2, pair
    # consecutive members pair to a constant of unit modulus
    for lower, upper in zip(entries, entries[1:]):
        prod = algebra6.cbilinear(lower.frame.f1, upper.frame.f1)
        assert grids.field_max(np.abs(prod) - 1.0, g) < 20 * pipe64.h**2
    # the jet-based couplings agree for the inner pairs, where the
    # finite-difference depth stays shallow
    inner = [e for e in entries if abs(e.p) <= 1]
    for lower, upper in zip(inner, inner[1:]):
        r = grids.field_max(np.abs(upper.delta_prev + lower.gamma_next), g)
        assert r < 20 * pipe64.h**2, (lower.p, upper.p)


def test_sequence_break_carries_index(clifford64):
    f = bipolar_mod.bipolar(clifford64)
    fa, _ = grids.adapt_coordinate(f)
    with pytest.raises(SequenceBreak) as exc:
        transforms.sequence(fa, 0, 1)
    assert exc.value.index == 0


def test_fit_orthogonal_map_recovers_known_rotation(rng):
    Q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    src = rng.normal(size=(400, 6))
    A, dev = transforms.fit_orthogonal_map(src, src @ Q.T)
    np.testing.assert_allclose(A, Q, atol=1e-10)
    assert dev < 1e-10
