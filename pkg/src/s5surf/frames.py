"""Adapted moving frames for minimal surfaces in the 5-sphere.

From a surface sampled in an adapted coordinate this builds, per grid
point, the frame {f0, f1, conj f1, f2, conj f2, N} together with the
invariants omega = log |f1|^2, phi (|a| = sinh phi, |b| = cosh phi for
f2 = a - i b) and alpha = (d f2, N), and provides the residual checks
for the Gram matrix, the moving-frame equations, minimality, and the
ellipse-of-curvature classification.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from s5surf import algebra6, grids
from s5surf.errors import CircularEllipse, DegenerateEllipse
from s5surf.grids import field_max

#: sinh(phi) below 10 h^2 times the f2 scale marks a segment/point ellipse
DEGENERATE_FACTOR = 10.0


class EllipseClass(Enum):
    NONDEGENERATE_NONCIRCULAR = "nondegenerate_noncircular"
    CIRCLE = "circle"
    SEGMENT = "segment"
    POINT = "point"


@dataclass(frozen=True)
class FrameField:
    """Per-point adapted frame and invariants of a surface in S^5."""

    grid: "grids.Grid2"
    f0: np.ndarray  # (nx, ny, 6) real
    f1: np.ndarray  # complex
    f2: np.ndarray  # complex
    a: np.ndarray  # real part of f2
    b: np.ndarray  # minus imaginary part of f2
    N: np.ndarray  # real unit normal completing the frame
    omega: np.ndarray
    phi: np.ndarray
    alpha: np.ndarray  # complex
    order: int = 2

    @property
    def theta(self):
        """Rotation angle of the transform construction, cos theta = tanh phi."""
        return np.arccos(np.tanh(self.phi))

    @property
    def eccentricity(self):
        return 1.0 / np.cosh(self.phi)

    def surface(self):
        return grids.SampledSurface(self.grid, self.f0)


@dataclass(frozen=True)
class MinimalityReport:
    residual: float
    mu: np.ndarray  # Takahashi multiplier field


@dataclass(frozen=True)
class EllipseReport:
    classification: EllipseClass
    eccentricity: np.ndarray
    minor_axis: np.ndarray  # unit field along a
    major_axis: np.ndarray  # unit field along b
    axis_ratio: np.ndarray


def build_frame(f, order=2):
    """Construct the adapted moving frame of a surface sampled in S^5.

    The surface must already be in an adapted coordinate (run
    adapt_coordinate first); raises DegenerateEllipse / CircularEllipse
    when the ellipse of curvature collapses.
    """
    if f.ambient_dim != 6:
        raise ValueError("frames require an S^5 surface (ambient_dim 6)")
    grid = f.grid
    f0 = f.values
    f1, f2 = grids.second_fundamental_d2(f, grid, order)
    ew = algebra6.hnorm2(f1)
    omega = np.log(ew)

    Q = algebra6.cbilinear(f2, f2)
    m = grids.OPEN_GRID_MARGIN
    sx = slice(None) if grid.periodic_x else slice(m, grid.nx - m)
    sy = slice(None) if grid.periodic_y else slice(m, grid.ny - m)
    # median over the trusted interior: edge stencils and isolated
    # near-degenerate corners must not set the comparison scale
    f2scale = float(np.median(algebra6.hnorm2(f2)[sx, sy]))
    if np.min(np.abs(Q)) < grids.CIRCULAR_Q_THRESHOLD * f2scale:
        raise CircularEllipse(
            f"min |Q| = {np.min(np.abs(Q)):.3e} against scale {f2scale:.3e}"
        )

    a = np.real(f2)
    b = -np.imag(f2)
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    h2 = grid.h**2
    floor = DEGENERATE_FACTOR * h2 * np.sqrt(f2scale)
    if np.min(na) < floor or np.min(nb) < floor:
        raise DegenerateEllipse(
            f"ellipse axis below resolution floor {floor:.3e} "
            f"(min |a| = {np.min(na):.3e}, min |b| = {np.min(nb):.3e})"
        )
    phi = np.arcsinh(na)

    n_raw = algebra6.cross5(f0, np.real(f1), np.imag(f1), a, b)
    n_norm = np.linalg.norm(n_raw, axis=-1)
    if np.min(n_norm) < floor:
        raise DegenerateEllipse("frame vectors nearly dependent; cross product vanishes")
    N = n_raw / n_norm[..., None]
    # orientation: vol(f0, f1, conj f1, f2, conj f2, N) = -exp(omega) sinh(2 phi)
    vol = np.real(algebra6.volume6(f0, f1, np.conj(f1), f2, np.conj(f2), N))
    N = N * np.where(vol > 0, -1.0, 1.0)[..., None]

    df2 = grids.wirtinger_d(f2, grid, order)
    alpha = algebra6.cbilinear(df2, N)
    return FrameField(
        grid=grid, f0=f0, f1=f1, f2=f2, a=a, b=b, N=N,
        omega=omega, phi=phi, alpha=alpha, order=order,
    )


def gram_matrix_target(F):
    """The exact bilinear Gram matrix A of the adapted frame."""
    shape = F.grid.shape
    A = np.zeros(shape + (6, 6), dtype=complex)
    ew = np.exp(F.omega)
    c2 = np.cosh(2.0 * F.phi)
    A[..., 0, 0] = 1.0
    A[..., 1, 2] = A[..., 2, 1] = ew
    A[..., 3, 3] = A[..., 4, 4] = -1.0
    A[..., 3, 4] = A[..., 4, 3] = c2
    A[..., 5, 5] = 1.0
    return A


def gram_residual(F, margin=None):
    """Max entrywise deviation of the measured frame Gram matrix from A."""
    vecs = [F.f0, F.f1, np.conj(F.f1), F.f2, np.conj(F.f2), F.N]
    M = np.stack(vecs, axis=-2)  # (..., 6, 6): rows are frame vectors
    gram = np.einsum("...ik,...jk->...ij", M, M)
    dev = np.max(np.abs(gram - gram_matrix_target(F)), axis=(-2, -1))
    return field_max(dev, F.grid, margin)


def frame_equation_residuals(F, margin=None):
    """Residuals of the six moving-frame d-equations, by name."""
    g, order = F.grid, F.order
    d = lambda X: grids.wirtinger_d(X, g, order)
    ew = np.exp(F.omega)[..., None]
    emw = np.exp(-F.omega)[..., None]
    dom = d(F.omega)[..., None]
    dphi = d(F.phi)[..., None]
    coth2 = 1.0 / np.tanh(2.0 * F.phi)[..., None]
    csch2 = 1.0 / np.sinh(2.0 * F.phi)[..., None]
    cosh2 = np.cosh(2.0 * F.phi)[..., None]
    al = F.alpha[..., None]
    cf1 = np.conj(F.f1)
    cf2 = np.conj(F.f2)
    eqs = {
        "d_f0": d(F.f0) - F.f1,
        "d_f1": d(F.f1) - F.f2 - dom * F.f1,
        "d_cf1": d(cf1) + ew * F.f0,
        "d_f2": d(F.f2) - emw * cf1 - 2.0 * dphi * coth2 * F.f2
        - 2.0 * dphi * csch2 * cf2 - al * F.N,
        "d_cf2": d(cf2) + emw * cosh2 * cf1,
        "d_N": d(F.N) + al * csch2**2 * (F.f2 + cosh2 * cf2),
    }
    return {
        name: field_max(np.linalg.norm(r, axis=-1), g, margin)
        for name, r in eqs.items()
    }


def frame_equation_residual(F, margin=None):
    """Max residual over all six moving-frame equations."""
    return max(frame_equation_residuals(F, margin).values())


def volume_identity_residual(F, margin=None):
    """|vol(frame) + exp(omega) sinh(2 phi)|, testing the orientation convention."""
    vol = algebra6.volume6(F.f0, F.f1, np.conj(F.f1), F.f2, np.conj(F.f2), F.N)
    target = -np.exp(F.omega) * np.sinh(2.0 * F.phi)
    return field_max(np.abs(vol - target), F.grid, margin)


def orthogonality_residual(F, margin=None):
    """Max |(N, v)| over the five real spanning vectors (pure linear algebra)."""
    worst = 0.0
    for v in (F.f0, np.real(F.f1), np.imag(F.f1), F.a, F.b):
        worst = max(worst, field_max(np.abs(algebra6.cbilinear(F.N, v)), F.grid, margin))
    return worst


def minimality_report(f, order=2, margin=None):
    """Takahashi check: d dbar f0 = mu f0 with mu = (d dbar f0, f0)."""
    ddb = grids.wirtinger_d(grids.wirtinger_dbar(f.values, f.grid, order), f.grid, order)
    mu = np.real(algebra6.cbilinear(ddb, f.values))
    res = np.linalg.norm(ddb - mu[..., None] * f.values, axis=-1)
    return MinimalityReport(field_max(res, f.grid, margin), mu)


def classify_ellipse(f_or_frame, order=2, n_psi=64):
    """Classify the ellipse of curvature by sampling 2(a cos 2psi + b sin 2psi)."""
    if isinstance(f_or_frame, FrameField):
        grid = f_or_frame.grid
        f2 = f_or_frame.f2
    else:
        grid = f_or_frame.grid
        _, f2 = grids.second_fundamental_d2(f_or_frame, grid, order)
    a = np.real(f2)
    b = -np.imag(f2)
    psi = np.linspace(0.0, np.pi, n_psi, endpoint=False)
    ell = 2.0 * (
        a[..., None, :] * np.cos(2.0 * psi)[:, None]
        + b[..., None, :] * np.sin(2.0 * psi)[:, None]
    )
    radii = np.linalg.norm(ell, axis=-1)
    major = np.max(radii, axis=-1) / 2.0
    minor = np.min(radii, axis=-1) / 2.0
    scale = np.sqrt(np.max(algebra6.hnorm2(f2)))
    floor = DEGENERATE_FACTOR * grid.h**2 * scale
    ratio = minor / np.maximum(major, 1e-300)
    if np.max(major) < floor:
        cls = EllipseClass.POINT
    elif np.min(minor) < floor:
        cls = EllipseClass.SEGMENT
    elif np.min(ratio) > 1.0 - grids.CIRCULAR_Q_THRESHOLD ** 0.5:
        cls = EllipseClass.CIRCLE
    else:
        cls = EllipseClass.NONDEGENERATE_NONCIRCULAR
    na = np.linalg.norm(a, axis=-1, keepdims=True)
    nb = np.linalg.norm(b, axis=-1, keepdims=True)
    phi = np.arcsinh(np.squeeze(na, -1))
    return EllipseReport(
        classification=cls,
        eccentricity=1.0 / np.cosh(phi),
        minor_axis=a / np.maximum(na, 1e-300),
        major_axis=b / np.maximum(nb, 1e-300),
        axis_ratio=ratio,
    )


def frame_to_dict(F):
    """JSON-friendly frame sub-object (appended to the surface document)."""
    return {
        "omega": [float(v) for v in F.omega.reshape(-1)],
        "phi": [float(v) for v in F.phi.reshape(-1)],
        "alpha_re": [float(v) for v in np.real(F.alpha).reshape(-1)],
        "alpha_im": [float(v) for v in np.imag(F.alpha).reshape(-1)],
        "N": [[float(c) for c in row] for row in F.N.reshape(-1, 6)],
    }
