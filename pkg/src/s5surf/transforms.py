"""The two normal-rotation transforms, their jets, invariants, and sequences.

The (+)/(-) transform of a surface rotates +-N about the minor axis of
the ellipse of curvature through the angle with cosine tanh(phi):

    f^eps = -b / cosh(phi)^2 + eps tanh(phi) N,   eps = +-1.

Also provides the closed-form first/second derivative jet of the
transform, the coupling invariant gamma = (d f1, f1^eps), the symmetric
frame checks, sequence generation, and the congruence detectors.
"""

from dataclasses import dataclass, field

import numpy as np

from s5surf import algebra6, frames, grids
from s5surf.errors import SequenceBreak
from s5surf.grids import field_max


@dataclass(frozen=True)
class EpsilonJet:
    """Closed-form first and second derivative data of a transform."""

    eps: int
    f_eps: np.ndarray  # transformed surface samples, real unit
    f1_eps: np.ndarray  # d(f^eps), closed form
    omega_eps: np.ndarray  # log |f1^eps|^2, closed form
    df1_eps: np.ndarray  # d(f1^eps), closed form
    f2_eps: np.ndarray  # df1_eps - d(omega_eps) f1_eps
    nu: np.ndarray


def transform(F, eps):
    """Apply the (+) or (-) transform to a framed surface."""
    if eps not in (+1, -1):
        raise ValueError("eps must be +1 or -1")
    cosh2 = np.cosh(F.phi) ** 2
    vals = -F.b / cosh2[..., None] + eps * np.tanh(F.phi)[..., None] * F.N
    vals = vals / np.linalg.norm(vals, axis=-1, keepdims=True)
    return grids.SampledSurface(F.grid, vals)


def epsilon_jet(F, eps):
    """Closed-form jet of the transform from the frame invariants."""
    if eps not in (+1, -1):
        raise ValueError("eps must be +1 or -1")
    g, order = F.grid, F.order
    d = lambda X: grids.wirtinger_d(X, g, order)
    dphi = d(F.phi)
    dalpha = d(F.alpha)
    ddphi = d(dphi)
    domega = d(F.omega)

    sech2 = 1.0 / np.cosh(F.phi) ** 2
    tanh = np.tanh(F.phi)
    s2 = np.sinh(2.0 * F.phi)
    c2 = np.cosh(2.0 * F.phi)
    csch2 = 1.0 / s2
    coth2 = c2 / s2
    emw = np.exp(-F.omega)
    cf1 = np.conj(F.f1)
    cf2 = np.conj(F.f2)

    kappa = F.alpha * eps + 2j * dphi
    f_eps = transform(F, eps).values

    f1_eps = (
        -1j * emw[..., None] * cf1
        - 0.5
        * (kappa * sech2)[..., None]
        * (csch2[..., None] * F.f2 + coth2[..., None] * cf2 + eps * 1j * F.N)
    )
    omega_eps = np.log(emw + 0.5 * np.abs(kappa) ** 2 * sech2)

    nu = (
        2.0 * F.alpha * eps * dphi * (-2.0 + c2)
        + 8j * np.sinh(F.phi) ** 2 * dphi**2
        - eps * dalpha * s2
        + 1j * F.alpha**2
        - 2j * s2 * ddphi
    )
    df1_eps = (
        1j * F.f0
        + (emw * (1j * domega + tanh * kappa))[..., None] * cf1
        + (2.0 * nu * csch2**4 * np.sinh(F.phi) ** 2)[..., None] * F.f2
        + (0.5 * nu * coth2 * csch2 * sech2)[..., None] * cf2
        + (1j * eps * nu * csch2**2 * tanh)[..., None] * F.N
    )
    domega_eps = d(omega_eps)
    f2_eps = df1_eps - domega_eps[..., None] * f1_eps
    return EpsilonJet(
        eps=eps, f_eps=f_eps, f1_eps=f1_eps, omega_eps=omega_eps,
        df1_eps=df1_eps, f2_eps=f2_eps, nu=nu,
    )


def gamma_invariant(F, jet_or_f1_eps):
    """Coupling invariant gamma^eps = (d f1, f1^eps)."""
    f1e = (
        jet_or_f1_eps.f1_eps
        if isinstance(jet_or_f1_eps, EpsilonJet)
        else jet_or_f1_eps
    )
    df1 = grids.wirtinger_d(F.f1, F.grid, F.order)
    return algebra6.cbilinear(df1, f1e)


# ---------------------------------------------------------------------------
# symmetric frame {f0, f1, cf1, cf1^eps, f1^eps, f0^eps}
# ---------------------------------------------------------------------------


def symmetric_frame_vectors(F, jet):
    return [
        F.f0,
        F.f1,
        np.conj(F.f1),
        np.conj(jet.f1_eps),
        jet.f1_eps,
        jet.f_eps,
    ]


def gram_B_target(F, jet):
    """Exact bilinear Gram matrix of the symmetric frame."""
    shape = F.grid.shape
    B = np.zeros(shape + (6, 6), dtype=complex)
    ew = np.exp(F.omega)
    ewe = np.exp(jet.omega_eps)
    B[..., 0, 0] = 1.0
    B[..., 1, 2] = B[..., 2, 1] = ew
    B[..., 1, 4] = B[..., 4, 1] = -1j
    B[..., 2, 3] = B[..., 3, 2] = 1j
    B[..., 3, 4] = B[..., 4, 3] = ewe
    B[..., 5, 5] = 1.0
    return B


@dataclass(frozen=True)
class SymmetricFrameReport:
    gram_residual: float
    det_residual: float
    volume_residual: float


def symmetric_frame_report(F, jet, margin=None):
    """Gram, determinant, and signed-volume identities of the B-frame."""
    vecs = symmetric_frame_vectors(F, jet)
    M = np.stack(vecs, axis=-2)
    gram = np.einsum("...ik,...jk->...ij", M, M)
    target = gram_B_target(F, jet)
    gram_res = field_max(np.max(np.abs(gram - target), axis=(-2, -1)), F.grid, margin)

    excess = np.exp(F.omega + jet.omega_eps) - 1.0
    det_res = field_max(np.abs(np.linalg.det(gram) - excess**2), F.grid, margin)

    vol = algebra6.volume6(*vecs)
    vol_res = field_max(np.abs(vol + jet.eps * excess), F.grid, margin)
    return SymmetricFrameReport(gram_res, det_res, vol_res)


def sinh_identity_residual(F, jet, margin=None):
    """exp(om^e) |gamma^e - i d om^e|^2 / (exp(om+om^e)-1) = 2 sinh^2 phi^e."""
    gam = gamma_invariant(F, jet)
    domega_eps = grids.wirtinger_d(jet.omega_eps, F.grid, F.order)
    excess = np.exp(F.omega + jet.omega_eps) - 1.0
    lhs = np.exp(jet.omega_eps) * np.abs(gam - 1j * domega_eps) ** 2 / excess
    Feps = frames.build_frame(grids.SampledSurface(F.grid, jet.f_eps), F.order)
    rhs = 2.0 * np.sinh(Feps.phi) ** 2
    return field_max(lhs - rhs, F.grid, margin)


# ---------------------------------------------------------------------------
# congruence detection
# ---------------------------------------------------------------------------


def fit_orthogonal_map(src, dst):
    """Best-fit constant orthogonal A with A src ~ dst over all grid points.

    Orthogonal Procrustes on the raw (uncentered) point clouds; returns
    (A, max pointwise deviation |A src - dst|).
    """
    X = src.reshape(-1, src.shape[-1])
    Y = dst.reshape(-1, dst.shape[-1])
    M = Y.T @ X
    U, _, Vt = np.linalg.svd(M)
    A = U @ Vt
    dev = np.linalg.norm(X @ A.T - Y, axis=-1).max()
    return A, float(dev)


@dataclass(frozen=True)
class ReflectionReport:
    A: np.ndarray
    pointwise_deviation: float  # z-independence of the frame-built map
    fit_residual: float  # |A f - f^eps| for the global fit
    involution_defect: float  # ||A^2 - I||
    det: float
    omega_match: float  # max |omega - omega^eps|


def detect_gamma_reflection(F, jet, gamma_tol=None, margin=None):
    """Reflection with f^eps = A f, present iff gamma^eps vanishes.

    Returns None when max |gamma^eps| exceeds the tolerance (defaults to
    sqrt(h), far above the h^2 noise floor of a true zero and far below
    the O(1) values of a generic surface).
    """
    g = F.grid
    if gamma_tol is None:
        gamma_tol = np.sqrt(g.h)
    gmax = field_max(np.abs(gamma_invariant(F, jet)), g, margin)
    if gmax > gamma_tol:
        return None
    return reflection_fit(F, jet, margin)


def reflection_fit(F, jet, margin=None):
    """Best constant orthogonal A swapping the frames of f and f^eps.

    Always returns a report; a genuine congruence shows a small
    ``fit_residual``, a generic pair a large one.
    """
    g = F.grid
    # pointwise map sending the frame of f to the frame of f^eps and back
    cols_src = np.stack(symmetric_frame_vectors(F, jet), axis=-1)
    targets = [
        jet.f_eps,
        jet.f1_eps,
        np.conj(jet.f1_eps),
        np.conj(F.f1),
        F.f1,
        F.f0,
    ]
    cols_dst = np.stack(targets, axis=-1)
    # A cols_src = cols_dst  =>  cols_src^T A^T = cols_dst^T
    At = np.linalg.solve(np.swapaxes(cols_src, -1, -2), np.swapaxes(cols_dst, -1, -2))
    A_pointwise = np.real(np.swapaxes(At, -1, -2))

    # global fit over the full frame correspondence (f0 alone spans only a
    # hyperplane, leaving the normal component of A undetermined); interior
    # points only, since edge stencils pollute the jet fields
    m = grids.OPEN_GRID_MARGIN if margin is None else margin
    sx = slice(None) if g.periodic_x else slice(m, g.nx - m)
    sy = slice(None) if g.periodic_y else slice(m, g.ny - m)
    cut = lambda X: X[sx, sy].reshape(-1, 6)
    src = np.concatenate(
        [cut(F.f0), cut(np.real(F.f1)), cut(np.imag(F.f1)), cut(jet.f_eps),
         cut(np.real(jet.f1_eps)), cut(np.imag(jet.f1_eps))], axis=0
    )
    dst = np.concatenate(
        [cut(jet.f_eps), cut(np.real(jet.f1_eps)), cut(np.imag(jet.f1_eps)),
         cut(F.f0), cut(np.real(F.f1)), cut(np.imag(F.f1))], axis=0
    )
    A_fit, _ = fit_orthogonal_map(src, dst)
    fit_res = field_max(
        np.linalg.norm(F.f0 @ A_fit.T - jet.f_eps, axis=-1), g, margin
    )
    dev = field_max(
        np.max(np.abs(A_pointwise - A_fit), axis=(-2, -1)), g, margin
    )
    invol = float(np.max(np.abs(A_fit @ A_fit - np.eye(6))))
    om_match = field_max(F.omega - jet.omega_eps, g, margin)
    return ReflectionReport(
        A=A_fit,
        pointwise_deviation=dev,
        fit_residual=fit_res,
        involution_defect=invol,
        det=float(np.linalg.det(A_fit)),
        omega_match=om_match,
    )


@dataclass(frozen=True)
class FullnessReport:
    alpha_max: float
    singular_values: np.ndarray
    rank: int
    reflection: np.ndarray | None  # reflection in the containing hyperplane


def detect_not_full(surface, F=None, rel_tol=1e-6):
    """Detect containment in a proper great subsphere via singular values.

    Returns a FullnessReport; `reflection` is None when the surface is
    linearly full.
    """
    X = surface.values.reshape(-1, 6)
    _, s, Vt = np.linalg.svd(X, full_matrices=False)
    rank = int(np.sum(s > rel_tol * s[0]))
    refl = None
    if rank < 6:
        n = Vt[-1]
        refl = np.eye(6) - 2.0 * np.outer(n, n)
    alpha_max = float(np.max(np.abs(F.alpha))) if F is not None else float("nan")
    return FullnessReport(alpha_max, s, rank, refl)


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------


@dataclass
class SequenceEntry:
    p: int
    surface: "grids.SampledSurface"
    frame: "frames.FrameField"
    jets: dict = field(default_factory=dict)  # eps -> EpsilonJet, memoized

    def jet(self, eps):
        if eps not in self.jets:
            self.jets[eps] = epsilon_jet(self.frame, eps)
        return self.jets[eps]

    @property
    def gamma_next(self):
        """gamma^{p+1} = (d f1^p, f1^{p+1})."""
        return gamma_invariant(self.frame, self.jet(+1))

    @property
    def delta_prev(self):
        """delta^{p-1} = (d f1^p, f1^{p-1})."""
        return gamma_invariant(self.frame, self.jet(-1))


def sequence_coupling_residuals(entries):
    """Residuals |delta + gamma| for each consecutive pair of entries.

    The derivative pairings of neighbouring members must cancel because
    their bilinear product (f1^p, f1^{p+1}) is the constant -i.  Both
    sides are evaluated from the built frames of the two members, which
    keeps the finite-difference depth (and hence the roundoff floor) low
    for the outer members of a sequence.
    """
    out = {}
    for lo, up in zip(entries, entries[1:]):
        g = lo.frame.grid
        gamma = gamma_invariant(lo.frame, up.frame.f1)
        delta = gamma_invariant(up.frame, lo.frame.f1)
        out[(lo.p, up.p)] = field_max(np.abs(gamma + delta), g)
    return out


def sequence(f, pmin, pmax, order=2):
    """Entries f^p for pmin <= p <= pmax, with f^0 = f.

    Each step applies the (+) transform upward and the (-) transform
    downward; raises SequenceBreak (carrying the failing index) when an
    intermediate surface loses the nondegenerate noncircular ellipse.
    """
    if not (pmin <= 0 <= pmax):
        raise ValueError("need pmin <= 0 <= pmax")

    def entry(p, surf):
        try:
            return SequenceEntry(p, surf, frames.build_frame(surf, order))
        except (frames.DegenerateEllipse, frames.CircularEllipse) as exc:
            raise SequenceBreak(p, exc) from exc

    entries = {0: entry(0, f)}
    for p in range(1, pmax + 1):
        entries[p] = entry(p, transform(entries[p - 1].frame, +1))
    for p in range(-1, pmin - 1, -1):
        entries[p] = entry(p, transform(entries[p + 1].frame, -1))
    return [entries[p] for p in range(pmin, pmax + 1)]
