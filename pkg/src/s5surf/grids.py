"""Uniform 2-D grids, sampled surfaces, and finite-difference Wirtinger calculus.

Fields are numpy arrays indexed ``[i, j]`` with ``x = i*hx`` along axis 0
and ``y = j*hy`` along axis 1; vector fields carry the ambient dimension
on a trailing axis.  Periodic directions use wraparound centered stencils,
open directions fall back to second-order one-sided stencils at the edges.
"""

import json
from dataclasses import dataclass, replace

import numpy as np

from s5surf import algebra6
from s5surf.errors import CircularEllipse, NonconstantQ

#: relative spread of Q above which coordinate adaptation is refused
NONCONSTANT_Q_THRESHOLD = 1e-3
#: |Q| below this (relative to max |f2|^2) marks a circular ellipse
CIRCULAR_Q_THRESHOLD = 1e-4


@dataclass(frozen=True)
class Grid2:
    """Uniform doubly-indexed parameter grid."""

    nx: int
    ny: int
    lx: float
    ly: float
    periodic_x: bool = True
    periodic_y: bool = True

    def __post_init__(self):
        if self.nx < 5 or self.ny < 5:
            raise ValueError("grid needs at least 5 points per direction")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("grid extents must be positive")

    @property
    def hx(self):
        return self.lx / self.nx if self.periodic_x else self.lx / (self.nx - 1)

    @property
    def hy(self):
        return self.ly / self.ny if self.periodic_y else self.ly / (self.ny - 1)

    @property
    def h(self):
        return max(self.hx, self.hy)

    @property
    def shape(self):
        return (self.nx, self.ny)

    def axes(self):
        x = np.arange(self.nx) * self.hx
        y = np.arange(self.ny) * self.hy
        return x, y

    def meshgrid(self):
        x, y = self.axes()
        return np.meshgrid(x, y, indexing="ij")

    def scaled(self, factor):
        """Relabel the parameter extents by a positive factor (samples unchanged)."""
        return replace(self, lx=self.lx * factor, ly=self.ly * factor)


@dataclass(frozen=True)
class SampledSurface:
    """Grid of unit vectors in R^6 (ambient 5-sphere) or R^4 (3-sphere)."""

    grid: Grid2
    values: np.ndarray  # (nx, ny, ambient_dim), real

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape[:2] != self.grid.shape or vals.shape[2] not in (4, 6):
            raise ValueError(f"bad surface value shape {vals.shape}")
        norms = np.linalg.norm(vals, axis=-1)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ValueError("surface samples must have unit norm")
        object.__setattr__(self, "values", vals)

    @property
    def ambient_dim(self):
        return self.values.shape[2]


def _diff(F, h, axis, periodic, order=2):
    """Finite-difference first derivative along one axis."""
    F = np.asarray(F)
    if periodic:
        if order == 2:
            return (np.roll(F, -1, axis) - np.roll(F, 1, axis)) / (2.0 * h)
        if order == 4:
            return (
                -np.roll(F, -2, axis)
                + 8.0 * np.roll(F, -1, axis)
                - 8.0 * np.roll(F, 1, axis)
                + np.roll(F, 2, axis)
            ) / (12.0 * h)
        raise ValueError("stencil order must be 2 or 4")
    # open direction: second-order interior + one-sided edges (np.gradient)
    return np.gradient(F, h, axis=axis, edge_order=2)


def diff_x(F, grid, order=2):
    return _diff(F, grid.hx, 0, grid.periodic_x, order)


def diff_y(F, grid, order=2):
    return _diff(F, grid.hy, 1, grid.periodic_y, order)


def wirtinger_d(F, grid, order=2):
    """d/dz = (d/dx - i d/dy)/2 by centered differences."""
    return 0.5 * (diff_x(F, grid, order) - 1j * diff_y(F, grid, order))


def wirtinger_dbar(F, grid, order=2):
    """d/dzbar = (d/dx + i d/dy)/2 by centered differences."""
    return 0.5 * (diff_x(F, grid, order) + 1j * diff_y(F, grid, order))


def laplacian(F, grid, order=2):
    """Flat Laplacian; note d dbar = Laplacian/4 on real fields."""
    F = np.asarray(F)
    if order == 2 and grid.periodic_x and grid.periodic_y:
        ddx = (np.roll(F, -1, 0) - 2.0 * F + np.roll(F, 1, 0)) / grid.hx**2
        ddy = (np.roll(F, -1, 1) - 2.0 * F + np.roll(F, 1, 1)) / grid.hy**2
        return ddx + ddy
    return diff_x(diff_x(F, grid, order), grid, order) + diff_y(
        diff_y(F, grid, order), grid, order
    )


def d_dbar(F, grid, order=2):
    """Composite d dbar operator (= Laplacian/4 up to stencil composition)."""
    return 0.25 * laplacian(F, grid, order)


def second_fundamental_d2(f, grid, order=2):
    """II(d,d): component of d(df) orthogonal to f0, f1, conj f1.

    Works for either ambient dimension; uses the bilinear Gram structure
    of the adapted frame (f0 unit, f1 isotropic up to discretization).
    """
    f0 = f.values
    f1 = wirtinger_d(f0, grid, order)
    df1 = wirtinger_d(f1, grid, order)
    ew = algebra6.hnorm2(f1)
    c0 = algebra6.cbilinear(df1, f0)
    c1 = algebra6.cbilinear(df1, np.conj(f1)) / ew
    c2 = algebra6.cbilinear(df1, f1) / ew
    f2 = (
        df1
        - c0[..., None] * f0
        - c1[..., None] * f1
        - c2[..., None] * np.conj(f1)
    )
    return f1, f2


def conformal_defect(f, order=2):
    """Pointwise |(df, df)|; near zero iff the parametrization is isothermal."""
    f1 = wirtinger_d(f.values, f.grid, order)
    return np.abs(algebra6.cbilinear(f1, f1))


def quartic_differential(f, order=2):
    """The holomorphic quartic quantity Q = (II(d,d), II(d,d)) per grid point."""
    _, f2 = second_fundamental_d2(f, f.grid, order)
    return algebra6.cbilinear(f2, f2)


def adapt_coordinate(f, order=2, nonconst_tol=None):
    """Rescale the coordinate so the measured (f2, f2) becomes -1.

    Returns ``(surface, mu)`` where the new coordinate is ``w = mu * z``.
    Only real positive ``mu`` (principal quartic root of -Q with argument
    in (-pi/4, pi/4], up to discretization) can be realised on an
    axis-aligned grid; a genuinely rotated root is reported as an error.
    """
    if nonconst_tol is None:
        # the measured Q carries O(h^2) stencil error even when exactly constant
        nonconst_tol = max(NONCONSTANT_Q_THRESHOLD, f.grid.h**2)
    Q = quartic_differential(f, order)
    _, f2 = second_fundamental_d2(f, f.grid, order)
    g = f.grid
    m = OPEN_GRID_MARGIN
    sx = slice(None) if g.periodic_x else slice(m, g.nx - m)
    sy = slice(None) if g.periodic_y else slice(m, g.ny - m)
    # median, not max: a single near-degenerate corner must not inflate
    # the circularity scale for the whole patch
    scale = np.median(algebra6.hnorm2(f2)[sx, sy])
    Q = Q[sx, sy]
    qmean = np.mean(Q)
    if np.abs(qmean) < CIRCULAR_Q_THRESHOLD * scale:
        raise CircularEllipse(
            f"|Q| ~ {np.abs(qmean):.3e} below threshold; ellipse is a circle "
            "or the quartic differential degenerates"
        )
    spread = np.std(Q) / np.abs(qmean)
    if spread > nonconst_tol:
        raise NonconstantQ(
            f"relative spread of Q is {spread:.3e} (limit {nonconst_tol:.1e})"
        )
    mu = (-qmean) ** 0.25  # principal branch, arg in (-pi/4, pi/4]
    if abs(np.angle(mu)) > 0.05:
        raise NonconstantQ(
            f"adaptation needs a coordinate rotation by {np.angle(mu):.3f} rad; "
            "only real rescalings are supported on axis-aligned grids"
        )
    mu = float(np.real(mu))
    adapted = SampledSurface(f.grid.scaled(mu), f.values)
    return adapted, mu


#: margin (cells) stripped from open grid edges when taking residual maxima;
#: one-sided edge stencils lose an order under composition, interior does not
OPEN_GRID_MARGIN = 8


def field_max(F, grid, margin=None):
    """Max of |F| over the grid, skipping a margin along open directions."""
    F = np.abs(np.asarray(F))
    if margin is None:
        margin = OPEN_GRID_MARGIN
    sx = slice(None) if grid.periodic_x else slice(margin, F.shape[0] - margin)
    sy = slice(None) if grid.periodic_y else slice(margin, F.shape[1] - margin)
    return float(np.max(F[sx, sy]))


# ---------------------------------------------------------------------------
# catalog surfaces in the 3-sphere
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class S3Surface:
    """Minimal surface in S^3 with unit normal and conformal factor exp(eta)."""

    G1: SampledSurface
    G2: SampledSurface
    eta: np.ndarray

    @property
    def grid(self):
        return self.G1.grid


def clifford_torus(n):
    """The square torus in S^3 with eta = 0 and unit Hopf-type normal.

    Parametrized so the coordinate is conformal and the normalization
    (II(d,d), II(d,d)) = 1/4 holds exactly.  The sign of the last
    component picks the orientation class with
    det(G1, G2, G1x, G1y) > 0, matching the 2-form conventions of the
    bipolar construction.
    """
    period = 2.0 * np.pi / np.sqrt(2.0)
    grid = Grid2(n, n, period, period)
    X, Y = grid.meshgrid()
    u = np.sqrt(2.0) * X
    v = np.sqrt(2.0) * Y
    s = 1.0 / np.sqrt(2.0)
    G1 = np.stack([np.cos(u), np.sin(u), np.cos(v), -np.sin(v)], axis=-1) * s
    G2 = np.stack([-np.cos(u), -np.sin(u), np.cos(v), -np.sin(v)], axis=-1) * s
    eta = np.zeros(grid.shape)
    return S3Surface(SampledSurface(grid, G1), SampledSurface(grid, G2), eta)


def _tau_point(m, k, x, y):
    """Closed-form torus sample and partial derivatives at parameter (x, y)."""
    cmx, smx = np.cos(m * x), np.sin(m * x)
    ckx, skx = np.cos(k * x), np.sin(k * x)
    cy, sy = np.cos(y), np.sin(y)
    psi = np.stack([cmx * cy, smx * cy, ckx * sy, skx * sy], axis=-1)
    psi_x = np.stack([-m * smx * cy, m * cmx * cy, -k * skx * sy, k * ckx * sy], axis=-1)
    psi_y = np.stack([-cmx * sy, -smx * sy, ckx * cy, skx * cy], axis=-1)
    return psi, psi_x, psi_y


def _tau_normal(m, k, x, y):
    """Unit normal of the torus in S^3 with a fixed sign convention."""
    psi, psi_x, psi_y = _tau_point(m, k, x, y)
    n_raw = algebra6.cross3_r4(psi, psi_x, psi_y)
    return psi, psi_x, psi_y, n_raw / np.linalg.norm(n_raw, axis=-1, keepdims=True)


def _tau_hopf(m, k):
    """Hopf coefficient h = (II(d,d), G2) of the torus in (x, ytilde) coords.

    Constant over the surface; purely imaginary because the parameter
    curves are asymptotic lines.  Evaluated from closed-form partials.
    """
    x = np.array([0.3, 1.1, 2.0])
    y = np.array([0.4, 1.3, 2.5])
    psi, psi_x, psi_y, g2 = _tau_normal(m, k, x, y)
    s = np.sqrt(m**2 * np.cos(y) ** 2 + k**2 * np.sin(y) ** 2)
    cmx, smx = np.cos(m * x), np.sin(m * x)
    ckx, skx = np.cos(k * x), np.sin(k * x)
    cy, sy = np.cos(y), np.sin(y)
    psi_xx = np.stack(
        [-(m**2) * cmx * cy, -(m**2) * smx * cy, -(k**2) * ckx * sy, -(k**2) * skx * sy],
        axis=-1,
    )
    psi_xy = np.stack(
        [m * smx * sy, -m * cmx * sy, -k * skx * cy, k * ckx * cy], axis=-1
    )
    # normal parts of psi_yy and of the reparametrization terms vanish
    h = 0.25 * (
        algebra6.cbilinear(psi_xx, g2) - 2j * s * algebra6.cbilinear(psi_xy, g2)
    )
    if np.max(np.abs(h - h[0])) > 1e-10 or abs(np.real(h[0])) > 1e-10:
        raise AssertionError("Hopf coefficient not constant imaginary as expected")
    return complex(h[0])


def _ytilde_inverse(m, k):
    """Global inverse of ytilde(y) = int_0^y dt / speed(t), speed > 0.

    Returns (period T of ytilde, callable y(ytilde) valid for all reals).
    """
    from scipy.integrate import quad
    from scipy.interpolate import CubicSpline

    def speed(t):
        return np.sqrt(m**2 * np.cos(t) ** 2 + k**2 * np.sin(t) ** 2)

    ys = np.linspace(0.0, 2.0 * np.pi, 2049)
    vals = np.empty_like(ys)
    vals[0] = 0.0
    for i in range(1, len(ys)):
        seg, _ = quad(lambda t: 1.0 / speed(t), ys[i - 1], ys[i], epsabs=1e-13, epsrel=1e-13)
        vals[i] = vals[i - 1] + seg
    total = vals[-1]
    forward = CubicSpline(ys, vals)
    guess = CubicSpline(vals, ys)

    def inverse(ytil):
        ytil = np.asarray(ytil, dtype=float)
        wraps = np.floor(ytil / total)
        frac = ytil - wraps * total
        y = guess(frac)
        for _ in range(3):  # Newton polish against the forward spline
            y = y - (forward(y) - frac) * speed(y)
        return y + wraps * 2.0 * np.pi

    return total, inverse


def lawson_torus(m, k, n, band=(0.10, 0.62)):
    """Sampled patch of the torus tau_{m,k} in adapted conformal coordinates.

    The raw conformal parametrization (x, ytilde) runs along asymptotic
    lines: its Hopf coefficient is purely imaginary, so no real rescale
    can normalize the quartic form.  We therefore sample in the rotated
    and scaled coordinate w = mu (x + i ytilde) with mu = rho exp(+-i pi/4)
    chosen so the measured (II(d,d), II(d,d)) equals 1/4, putting the
    coordinate curves along the lines of curvature.  The rotated lattice
    is incommensurate with the torus periods, so the grid is open: a
    square patch sampled from closed forms (no integration drift; edge
    stencils are the only boundary cost).

    The conformal factor exp(eta) of the bipolar theory has critical
    lines (where the bipolar's ellipse of curvature degenerates to a
    segment) and zero lines (where the symmetric frame of the surface
    and its transform degenerates).  Both are lines of constant y; the
    default patch is inscribed in the band strictly between a critical
    line and the adjacent zero line, selected by `band` as fractions of
    that strip.
    """
    import math

    if m <= 0 or k <= 0 or math.gcd(m, k) != 1:
        raise ValueError("m, k must be coprime positive integers")
    h = _tau_hopf(m, k)
    rho = np.sqrt(2.0 * abs(h))
    psi_rot = np.pi / 4.0 if h.imag > 0 else -np.pi / 4.0
    mu = rho * np.exp(1j * psi_rot)
    _, inv = _ytilde_inverse(m, k)

    # y0: zero line of eta (where m^2 cos^2 y + k^2 sin^2 y = rho^2)
    lo2, hi2 = min(m, k) ** 2, max(m, k) ** 2
    if lo2 < rho**2 < hi2:
        c2 = (rho**2 - k**2) / (m**2 - k**2)
        y0 = float(np.arccos(np.sqrt(np.clip(c2, 0.0, 1.0))))
    else:
        y0 = np.pi / 2.0
    yt0 = _ytilde_forward(m, k, y0)

    f_lo, f_hi = band
    width_w = rho * (f_hi - f_lo) * yt0
    side = width_w / np.sqrt(2.0)
    center_zeta = 0.0 + 1j * 0.5 * (f_lo + f_hi) * yt0

    grid = Grid2(n, n, side, side, periodic_x=False, periodic_y=False)
    U, V = grid.meshgrid()
    w = (U - 0.5 * side) + 1j * (V - 0.5 * side)
    zeta = w / mu + center_zeta
    x = np.real(zeta)
    y = inv(np.imag(zeta))
    psi, _, _, g2 = _tau_normal(m, k, x, y)
    eta = np.log(m**2 * np.cos(y) ** 2 + k**2 * np.sin(y) ** 2) - 2.0 * np.log(rho)
    return S3Surface(SampledSurface(grid, psi), SampledSurface(grid, g2), eta)


def _ytilde_forward(m, k, y):
    """ytilde(y) by adaptive quadrature."""
    from scipy.integrate import quad

    val, _ = quad(
        lambda t: 1.0 / np.sqrt(m**2 * np.cos(t) ** 2 + k**2 * np.sin(t) ** 2),
        0.0,
        y,
        epsabs=1e-13,
        epsrel=1e-13,
    )
    return val


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def surface_to_dict(f, extra=None):
    g = f.grid
    doc = {
        "nx": g.nx,
        "ny": g.ny,
        "lx": g.lx,
        "ly": g.ly,
        "periodic_x": g.periodic_x,
        "periodic_y": g.periodic_y,
        "ambient_dim": f.ambient_dim,
        "values": [
            [round(float(v), 17) for v in row]
            for row in f.values.reshape(-1, f.ambient_dim)
        ],
    }
    if extra:
        doc.update(extra)
    return doc


def surface_from_dict(doc):
    grid = Grid2(
        doc["nx"],
        doc["ny"],
        doc["lx"],
        doc["ly"],
        doc.get("periodic_x", True),
        doc.get("periodic_y", True),
    )
    vals = np.asarray(doc["values"], dtype=float).reshape(
        grid.nx, grid.ny, doc["ambient_dim"]
    )
    return SampledSurface(grid, vals), doc


def write_surface(path, f, extra=None):
    with open(path, "w") as fh:
        json.dump(surface_to_dict(f, extra), fh, sort_keys=True)


def read_surface(path):
    with open(path) as fh:
        doc = json.load(fh)
    return surface_from_dict(doc)


def s3_to_dict(s3):
    return {
        "G1": surface_to_dict(s3.G1),
        "G2": surface_to_dict(s3.G2),
        "eta": [float(v) for v in s3.eta.reshape(-1)],
    }


def s3_from_dict(doc):
    G1, _ = surface_from_dict(doc["G1"])
    G2, _ = surface_from_dict(doc["G2"])
    eta = np.asarray(doc["eta"], dtype=float).reshape(G1.grid.shape)
    return S3Surface(G1, G2, eta)


def write_s3(path, s3):
    with open(path, "w") as fh:
        json.dump(s3_to_dict(s3), fh, sort_keys=True)


def read_s3(path):
    with open(path) as fh:
        return s3_from_dict(json.load(fh))
