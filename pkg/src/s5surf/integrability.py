"""Residual evaluators for the integrability systems and frame integrators.

Covers the first-order system for (omega, phi, alpha), the symmetric
system for (omega, omega_eps, gamma_eps), the reduced scalar equation
for omega, the sinh-Gordon equation with its cosh substitution, and the
linear moving-frame integrations reconstructing a surface from its
invariants (in the 5-sphere and in the 3-sphere).
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RectBivariateSpline

from s5surf import algebra6, grids
from s5surf.errors import GramDrift, PositivityViolation, SubstitutionDomain
from s5surf.grids import field_max

#: frame Gram residual above this aborts an integration
GRAM_DRIFT_LIMIT = 1e-3
#: full orthonormal reprojection period, in integration steps
REPROJECT_EVERY = 16


@dataclass(frozen=True)
class InvariantTriple:
    """The differential invariants (omega, phi, alpha) on a common grid."""

    grid: "grids.Grid2"
    omega: np.ndarray
    phi: np.ndarray
    alpha: np.ndarray  # complex
    order: int = 2

    def __post_init__(self):
        if np.min(self.phi) <= 0.0:
            raise ValueError("phi must be positive everywhere")

    @classmethod
    def from_frame(cls, F):
        return cls(F.grid, F.omega, F.phi, F.alpha, F.order)


@dataclass(frozen=True)
class SymmetricInvariants:
    """Invariants (omega, omega_eps, gamma_eps) of a transform pair."""

    grid: "grids.Grid2"
    omega: np.ndarray
    omega_eps: np.ndarray
    gamma_eps: np.ndarray  # complex
    order: int = 2

    @classmethod
    def from_jet(cls, F, jet):
        from s5surf import transforms

        gam = transforms.gamma_invariant(F, jet)
        return cls(F.grid, F.omega, jet.omega_eps, gam, F.order)

    @classmethod
    def from_pair(cls, F, F_eps):
        """Build from the frames of a surface and its transform.

        Preferable for residual evaluation: the transformed frame's
        omega sits one derivative above the sampled surface, while the
        closed-form jet value stacks several, so second-derivative
        residuals of the latter amplify roundoff at fine resolution.
        """
        df1 = grids.wirtinger_d(F.f1, F.grid, F.order)
        gam = algebra6.cbilinear(df1, F_eps.f1)
        return cls(F.grid, F.omega, F_eps.omega, gam, F.order)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------


def residual_system_F_parts(t, margin=None):
    """Named residuals of the three-equation system for (omega, phi, alpha)."""
    g, order = t.grid, t.order
    d = lambda X: grids.wirtinger_d(X, g, order)
    db = lambda X: grids.wirtinger_dbar(X, g, order)
    dphi = d(t.phi)
    csch2 = 1.0 / np.sinh(2.0 * t.phi)
    r_alpha = db(t.alpha) + 2.0 * np.conj(t.alpha) * dphi * csch2
    r_omega = db(d(t.omega)) + np.exp(t.omega) - np.exp(-t.omega) * np.cosh(2.0 * t.phi)
    r_phi = (
        2.0 * db(dphi)
        - t.alpha * np.conj(t.alpha) * csch2
        + np.exp(-t.omega) * np.sinh(2.0 * t.phi)
    )
    return {
        "alpha": field_max(np.abs(r_alpha), g, margin),
        "omega": field_max(np.abs(r_omega), g, margin),
        "phi": field_max(np.abs(r_phi), g, margin),
    }


def residual_system_F(t, margin=None):
    return max(residual_system_F_parts(t, margin).values())


def residual_system_B_parts(s, margin=None):
    """Named residuals of the symmetric three-equation system."""
    g, order = s.grid, s.order
    excess = np.exp(s.omega + s.omega_eps) - 1.0
    if np.any(_interior(excess, g, margin) <= 0.0):
        raise PositivityViolation("omega + omega_eps must be positive")
    d = lambda X: grids.wirtinger_d(X, g, order)
    db = lambda X: grids.wirtinger_dbar(X, g, order)
    r_gamma = db(s.gamma_eps) - 1j * (np.exp(s.omega) - np.exp(s.omega_eps))
    r_omega = (
        d(db(s.omega))
        + 2.0 * np.sinh(s.omega)
        - np.abs(s.gamma_eps + 1j * d(s.omega)) ** 2 / excess
    )
    r_omega_eps = (
        d(db(s.omega_eps))
        + 2.0 * np.sinh(s.omega_eps)
        - np.abs(s.gamma_eps - 1j * d(s.omega_eps)) ** 2 / excess
    )
    return {
        "gamma": field_max(np.abs(r_gamma), g, margin),
        "omega": field_max(np.abs(r_omega), g, margin),
        "omega_eps": field_max(np.abs(r_omega_eps), g, margin),
    }


def residual_system_B(s, margin=None):
    return max(residual_system_B_parts(s, margin).values())


def residual_omega_reduced(omega, grid, order=2, margin=None):
    """Residual of the scalar equation obeyed by omega when gamma vanishes.

    d dbar omega = -2 sinh omega + |d omega|^2 / (exp(2 omega) - 1).
    """
    d = lambda X: grids.wirtinger_d(X, grid, order)
    db = lambda X: grids.wirtinger_dbar(X, grid, order)
    excess = np.exp(2.0 * omega) - 1.0
    if np.any(_interior(excess, grid, margin) <= 0.0):
        raise PositivityViolation("omega must be positive")
    r = d(db(omega)) + 2.0 * np.sinh(omega) - np.abs(d(omega)) ** 2 / excess
    return field_max(np.abs(r), grid, margin)


def residual_sinh_gordon(eta, grid, order=2, margin=None):
    """Max of |d dbar eta + sinh eta| (d dbar is a quarter Laplacian)."""
    ddb = 0.25 * grids.laplacian(eta, grid, order)
    return field_max(np.abs(ddb + np.sinh(eta)), grid, margin)


def substitute(omega, tol=1e-9):
    """The eta >= 0 branch of exp(omega) = cosh(eta)."""
    ew = np.exp(np.asarray(omega))
    if np.min(ew) < 1.0 - tol:
        raise SubstitutionDomain(
            f"exp(omega) dips to {np.min(ew):.6f}; cosh substitution needs >= 1"
        )
    return np.arccosh(np.maximum(ew, 1.0))


def unsubstitute(eta):
    """Inverse substitution omega = log cosh eta."""
    return np.log(np.cosh(np.asarray(eta)))


def _interior(F, grid, margin=None):
    m = grids.OPEN_GRID_MARGIN if margin is None else margin
    sx = slice(None) if grid.periodic_x else slice(m, F.shape[0] - m)
    sy = slice(None) if grid.periodic_y else slice(m, F.shape[1] - m)
    return F[sx, sy]


# ---------------------------------------------------------------------------
# one-dimensional sinh-Gordon solutions (pendulum reduction)
# ---------------------------------------------------------------------------


def sinh_gordon_1d(E, x, energy_tol=1e-8):
    """Solve eta'' = -4 sinh eta with eta(0) = acosh(E/4), eta'(0) = 0.

    ``E = eta'^2 / 2 + 4 cosh eta`` is conserved; the solver (classical
    4th-order steps with fine substepping) verifies conservation to
    ``energy_tol`` at every requested sample.  Requires E > 4.
    """
    if E <= 4.0:
        raise ValueError("need E > 4 for a nonconstant solution")
    x = np.asarray(x, dtype=float)
    eta0 = float(np.arccosh(E / 4.0))

    def rhs(y):
        return np.array([y[1], -4.0 * np.sinh(y[0])])

    def march(xs):
        out = np.empty((len(xs), 2))
        y = np.array([eta0, 0.0])
        out[0] = y
        for i in range(1, len(xs)):
            span = xs[i] - xs[i - 1]
            nsub = max(1, int(np.ceil(abs(span) / 1e-3)))
            hh = span / nsub
            for _ in range(nsub):
                k1 = rhs(y)
                k2 = rhs(y + 0.5 * hh * k1)
                k3 = rhs(y + 0.5 * hh * k2)
                k4 = rhs(y + hh * k3)
                y = y + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            out[i] = y
        return out

    order = np.argsort(x)
    xs = x[order]
    res = np.empty((len(xs), 2))
    neg = xs < 0.0
    if np.any(neg):
        res[neg] = march(np.concatenate([[0.0], xs[neg][::-1]]))[1:][::-1]
    if np.any(~neg):
        res[~neg] = march(np.concatenate([[0.0], xs[~neg]]))[1:]
    eta = np.empty_like(x)
    eta[order] = res[:, 0]
    energy = 0.5 * res[:, 1] ** 2 + 4.0 * np.cosh(res[:, 0])
    drift = float(np.max(np.abs(energy - E)))
    if drift > energy_tol:
        raise RuntimeError(f"energy drift {drift:.3e} exceeds {energy_tol:.1e}")
    return eta


# ---------------------------------------------------------------------------
# moving-frame integration in the 5-sphere
# ---------------------------------------------------------------------------

# row order of the frame state: f0, f1, conj f1, f2, conj f2, N
_CONJ_PERM = np.array([0, 2, 1, 4, 3, 5])


def standard_seed(omega0, phi0):
    """Orthonormal-position seed frame matching the target Gram matrix.

    Rows (f0, f1, conj f1, f2, conj f2, N) built on the standard basis;
    the N sign realizes vol(frame) = -exp(omega) sinh(2 phi).
    """
    e = np.eye(6)
    f0 = e[0].astype(complex)
    f1 = np.sqrt(np.exp(omega0) / 2.0) * (e[1] + 1j * e[2])
    f2 = np.sinh(phi0) * e[3] - 1j * np.cosh(phi0) * e[4]
    N = -e[5].astype(complex)
    return np.stack([f0, f1, np.conj(f1), f2, np.conj(f2), N], axis=0)


def _coefficient_matrix(omega, phi, alpha, domega, dphi):
    """L with (d row_i) = sum_j L[i, j] row_j from the frame equations."""
    shp = np.shape(omega)
    L = np.zeros(shp + (6, 6), dtype=complex)
    s2 = np.sinh(2.0 * phi)
    c2 = np.cosh(2.0 * phi)
    L[..., 0, 1] = 1.0
    L[..., 1, 1] = domega
    L[..., 1, 3] = 1.0
    L[..., 2, 0] = -np.exp(omega)
    L[..., 3, 2] = np.exp(-omega)
    L[..., 3, 3] = 2.0 * dphi * c2 / s2
    L[..., 3, 4] = 2.0 * dphi / s2
    L[..., 3, 5] = alpha
    L[..., 4, 2] = -np.exp(-omega) * c2
    L[..., 5, 3] = -alpha / s2**2
    L[..., 5, 4] = -alpha * c2 / s2**2
    return L


def _dbar_from_d(L):
    """The conjugate coefficient matrix: dbar M = (P conj(L) P) M."""
    return np.conj(L)[..., _CONJ_PERM[:, None], _CONJ_PERM[None, :]]


class _InvariantSplines:
    """Smooth samplers for the invariant fields and their derivatives."""

    def __init__(self, t):
        g = t.grid
        x, y = g.axes()
        mk = lambda F: RectBivariateSpline(x, y, F, kx=3, ky=3)
        self.omega = mk(t.omega)
        self.phi = mk(t.phi)
        self.alpha_re = mk(np.real(t.alpha))
        self.alpha_im = mk(np.imag(t.alpha))

    def at(self, x, y):
        om = self.omega(x, y, grid=False)
        ph = self.phi(x, y, grid=False)
        al = self.alpha_re(x, y, grid=False) + 1j * self.alpha_im(x, y, grid=False)
        dom = 0.5 * (
            self.omega(x, y, dx=1, grid=False) - 1j * self.omega(x, y, dy=1, grid=False)
        )
        dph = 0.5 * (
            self.phi(x, y, dx=1, grid=False) - 1j * self.phi(x, y, dy=1, grid=False)
        )
        return om, ph, al, dom, dph


def _gram_target_point(omega, phi):
    shp = np.shape(omega)
    A = np.zeros(shp + (6, 6), dtype=complex)
    ew = np.exp(omega)
    c2 = np.cosh(2.0 * phi)
    A[..., 0, 0] = 1.0
    A[..., 1, 2] = A[..., 2, 1] = ew
    A[..., 3, 3] = A[..., 4, 4] = -1.0
    A[..., 3, 4] = A[..., 4, 3] = c2
    A[..., 5, 5] = 1.0
    return A


def _gram_residual_point(M, omega, phi):
    gram = np.einsum("...ik,...jk->...ij", M, M)
    return np.max(np.abs(gram - _gram_target_point(omega, phi)), axis=(-2, -1))


def _reproject(M, omega, phi):
    """Snap the frame back onto the exact Gram structure.

    Rescales the frame rows to the orthonormal candidate basis, replaces
    it by the nearest real orthogonal matrix, and rebuilds the rows.
    """
    sh = np.sqrt(np.exp(omega) / 2.0)
    cand = np.stack(
        [
            np.real(M[..., 0, :]),
            np.real(M[..., 1, :]) / sh[..., None],
            np.imag(M[..., 1, :]) / sh[..., None],
            np.real(M[..., 3, :]) / np.sinh(phi)[..., None],
            -np.imag(M[..., 3, :]) / np.cosh(phi)[..., None],
            np.real(M[..., 5, :]),
        ],
        axis=-2,
    )
    U, _, Vt = np.linalg.svd(cand)
    Q = U @ Vt
    f0 = Q[..., 0, :].astype(complex)
    f1 = sh[..., None] * (Q[..., 1, :] + 1j * Q[..., 2, :])
    f2 = np.sinh(phi)[..., None] * Q[..., 3, :] - 1j * np.cosh(phi)[..., None] * Q[..., 4, :]
    N = Q[..., 5, :].astype(complex)
    return np.stack([f0, f1, np.conj(f1), f2, np.conj(f2), N], axis=-2)


def _rk4_linear(M, coeff, h):
    """One classical step of M' = L M with L sampled at 0, h/2, h."""
    L0, Lh, L1 = coeff
    k1 = L0 @ M
    k2 = Lh @ (M + 0.5 * h * k1)
    k3 = Lh @ (M + 0.5 * h * k2)
    k4 = L1 @ (M + h * k3)
    return M + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _march(M0, vals, start, L_of, renorm, project, store):
    """March a state outward from ``vals[start]`` in both axis directions.

    ``L_of(a0, am, a1)`` supplies the stepper coefficients, ``renorm``
    runs every step, ``project`` every REPROJECT_EVERY steps, and
    ``store(k, M)`` receives the state at each index.
    """
    store(start, M0)
    for rng in (range(start + 1, len(vals)), range(start - 1, -1, -1)):
        M = M0
        prev = start
        steps = 0
        for k in rng:
            a0, a1 = vals[prev], vals[k]
            M = _rk4_linear(M, L_of(a0, 0.5 * (a0 + a1), a1), a1 - a0)
            M = renorm(M)
            steps += 1
            if steps % REPROJECT_EVERY == 0:
                M = project(M, a1)
            store(k, M)
            prev = k


def integrate_frame_F(
    t, seed=None, base=None, column_first=False, drift_limit=GRAM_DRIFT_LIMIT
):
    """Reconstruct a surface from its invariants by frame integration.

    Integrates the linear moving-frame system outward from a base point
    (default: the grid center, keeping the seed clear of edge-stencil
    noise in the invariant fields) along one base line and then along
    every transverse line, renormalizing |f0| each step and reprojecting
    the frame onto its exact Gram structure every few steps.  Returns
    the f0 track as a surface; congruence with the source is up to a
    global O(6) motion.
    """
    g = t.grid
    spl = _InvariantSplines(t)
    x, y = g.axes()
    i0, j0 = (g.nx // 2, g.ny // 2) if base is None else base

    def L_at(px, py, direction):
        om, ph, al, dom, dph = spl.at(px, py)
        L = _coefficient_matrix(om, ph, al, dom, dph)
        Lb = _dbar_from_d(L)
        return L + Lb if direction == "x" else 1j * (L - Lb)

    def renorm(M):
        M = M.copy()
        M[..., 0, :] /= np.linalg.norm(np.real(M[..., 0, :]), axis=-1)[..., None]
        return M

    def project(M, px, py):
        om = np.asarray(spl.omega(px, py, grid=False))
        ph = np.asarray(spl.phi(px, py, grid=False))
        res = np.max(_gram_residual_point(M, om, ph))
        if res > drift_limit:
            raise GramDrift(f"Gram residual {res:.3e} exceeds {drift_limit:.1e}")
        return _reproject(M, om, ph)

    if seed is None:
        seed = standard_seed(t.omega[i0, j0], t.phi[i0, j0])
    track = np.empty(g.shape + (6, 6), dtype=complex)

    if not column_first:
        _march(
            seed, x, i0,
            lambda a0, am, a1: [L_at(a, y[j0], "x") for a in (a0, am, a1)],
            renorm, lambda M, a1: project(M, a1, y[j0]),
            lambda k, M: track.__setitem__((k, j0), M),
        )
        _march(
            track[:, j0].copy(), y, j0,
            lambda a0, am, a1: [L_at(x, np.full_like(x, a), "y") for a in (a0, am, a1)],
            renorm, lambda M, a1: project(M, x, np.full_like(x, a1)),
            lambda k, M: track.__setitem__((slice(None), k), M),
        )
    else:
        _march(
            seed, y, j0,
            lambda a0, am, a1: [L_at(x[i0], a, "y") for a in (a0, am, a1)],
            renorm, lambda M, a1: project(M, x[i0], a1),
            lambda k, M: track.__setitem__((i0, k), M),
        )
        _march(
            track[i0, :].copy(), x, i0,
            lambda a0, am, a1: [L_at(np.full_like(y, a), y, "x") for a in (a0, am, a1)],
            renorm, lambda M, a1: project(M, np.full_like(y, a1), y),
            lambda k, M: track.__setitem__((k, slice(None)), M),
        )

    f0 = np.real(track[..., 0, :])
    f0 = f0 / np.linalg.norm(f0, axis=-1, keepdims=True)
    return grids.SampledSurface(g, f0)


# ---------------------------------------------------------------------------
# moving-frame integration in the 3-sphere
# ---------------------------------------------------------------------------


def standard_s3_seed(eta0):
    """Orthogonal seed (G1, G2, G1x, G1y) with metric factor exp(eta0)."""
    e = np.eye(4)
    r = np.exp(eta0 / 2.0)
    return np.stack([e[0], e[1], r * e[2], r * e[3]], axis=0)


def _s3_coeff(eta, etax, etay, direction):
    """Coefficients of the linear system for rows (G1, G2, G1x, G1y)."""
    shp = np.shape(eta)
    L = np.zeros(shp + (4, 4))
    if direction == "x":
        L[..., 0, 2] = 1.0
        L[..., 1, 2] = -np.exp(-eta)
        L[..., 2, 0] = -np.exp(eta)
        L[..., 2, 1] = 1.0
        L[..., 2, 2] = 0.5 * etax
        L[..., 2, 3] = -0.5 * etay
        L[..., 3, 2] = 0.5 * etay
        L[..., 3, 3] = 0.5 * etax
    else:
        L[..., 0, 3] = 1.0
        L[..., 1, 3] = np.exp(-eta)
        L[..., 2, 2] = 0.5 * etay
        L[..., 2, 3] = 0.5 * etax
        L[..., 3, 0] = -np.exp(eta)
        L[..., 3, 1] = -1.0
        L[..., 3, 2] = -0.5 * etax
        L[..., 3, 3] = 0.5 * etay
    return L


def _s3_reproject(M, eta):
    r = np.exp(eta / 2.0)[..., None]
    cand = np.stack(
        [M[..., 0, :], M[..., 1, :], M[..., 2, :] / r, M[..., 3, :] / r], axis=-2
    )
    U, _, Vt = np.linalg.svd(cand)
    Q = U @ Vt
    return np.stack(
        [Q[..., 0, :], Q[..., 1, :], r * Q[..., 2, :], r * Q[..., 3, :]], axis=-2
    )


def integrate_s3_frame(eta, grid, seed=None, base=None, drift_limit=GRAM_DRIFT_LIMIT):
    """Reconstruct a surface in the 3-sphere from its metric exponent eta.

    Integrates the linear system for (G1, G2, G1x, G1y) outward from a
    base point (default: the grid center) along the base row and then
    along every column; returns an S3Surface with unit G1, unit normal
    G2, and metric exp(eta) |dz|^2.
    """
    eta = np.asarray(eta, dtype=float)
    x, y = grid.axes()
    i0, j0 = (grid.nx // 2, grid.ny // 2) if base is None else base
    s_eta = RectBivariateSpline(x, y, eta, kx=3, ky=3)

    def L_at(px, py, direction):
        e = s_eta(px, py, grid=False)
        ex = s_eta(px, py, dx=1, grid=False)
        ey = s_eta(px, py, dy=1, grid=False)
        return _s3_coeff(e, ex, ey, direction)

    def renorm(M):
        M = M.copy()
        M[..., 0, :] /= np.linalg.norm(M[..., 0, :], axis=-1)[..., None]
        M[..., 1, :] /= np.linalg.norm(M[..., 1, :], axis=-1)[..., None]
        return M

    def project(M, px, py):
        e = np.asarray(s_eta(px, py, grid=False))
        return _s3_check_and_project(M, e, drift_limit)

    if seed is None:
        seed = standard_s3_seed(float(eta[i0, j0]))
    track = np.empty(grid.shape + (4, 4))

    _march(
        seed, x, i0,
        lambda a0, am, a1: [L_at(a, y[j0], "x") for a in (a0, am, a1)],
        renorm, lambda M, a1: project(M, a1, y[j0]),
        lambda k, M: track.__setitem__((k, j0), M),
    )
    _march(
        track[:, j0].copy(), y, j0,
        lambda a0, am, a1: [L_at(x, np.full_like(x, a), "y") for a in (a0, am, a1)],
        renorm, lambda M, a1: project(M, x, np.full_like(x, a1)),
        lambda k, M: track.__setitem__((slice(None), k), M),
    )

    G1 = grids.SampledSurface(grid, track[..., 0, :])
    G2 = grids.SampledSurface(grid, track[..., 1, :])
    return grids.S3Surface(G1, G2, eta.copy())


def _s3_check_and_project(M, eta, drift_limit):
    r = np.exp(np.asarray(eta) / 2.0)[..., None]
    cand = np.stack(
        [M[..., 0, :], M[..., 1, :], M[..., 2, :] / r, M[..., 3, :] / r], axis=-2
    )
    gram = np.einsum("...ik,...jk->...ij", cand, cand)
    res = np.max(np.abs(gram - np.eye(4)))
    if res > drift_limit:
        raise GramDrift(f"frame Gram residual {res:.3e} exceeds {drift_limit:.1e}")
    return _s3_reproject(M, np.asarray(eta))


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------


def invariants_to_dict(t):
    g = t.grid
    return {
        "nx": g.nx, "ny": g.ny, "lx": g.lx, "ly": g.ly,
        "periodic_x": g.periodic_x, "periodic_y": g.periodic_y,
        "omega": [float(v) for v in t.omega.reshape(-1)],
        "phi": [float(v) for v in t.phi.reshape(-1)],
        "alpha_re": [float(v) for v in np.real(t.alpha).reshape(-1)],
        "alpha_im": [float(v) for v in np.imag(t.alpha).reshape(-1)],
    }


def invariants_from_dict(doc):
    g = grids.Grid2(
        doc["nx"], doc["ny"], doc["lx"], doc["ly"],
        doc.get("periodic_x", True), doc.get("periodic_y", True),
    )
    shp = g.shape
    omega = np.asarray(doc["omega"], dtype=float).reshape(shp)
    phi = np.asarray(doc["phi"], dtype=float).reshape(shp)
    alpha = (
        np.asarray(doc["alpha_re"], dtype=float)
        + 1j * np.asarray(doc["alpha_im"], dtype=float)
    ).reshape(shp)
    return InvariantTriple(g, omega, phi, alpha)
