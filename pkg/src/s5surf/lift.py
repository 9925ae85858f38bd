"""The frame over I x S associated to a surface and its (+) transform.

From the invariants (omega, omega_plus, gamma_plus) of a surface f and
its transform g this builds, for each admissible parameter t, the
orthonormal frame (U1..U6) with U2 = g and U4 = f, the connection
1-forms, and the remaining connection coefficients, verifying the
structural identities along the way.  For bipolar surfaces it also
builds the horizontal lift F = G1 cos(t/2) + i G2 sin(t/2) and checks
its second-order system.
"""

from dataclasses import dataclass, field

import numpy as np

from s5surf import algebra6, grids
from s5surf.errors import InadmissibleT, PositivityViolation, StructureViolation
from s5surf.grids import field_max


@dataclass(frozen=True)
class LiftCoefficients:
    t: float
    lambda_: np.ndarray
    z21_2: np.ndarray
    z12_3: np.ndarray
    identity_residual: float  # algebraic closure of the defining relations
    t_interval: tuple  # admissible open interval for t


def lift_coefficients(omega, omega_plus, t):
    """The scalar coefficients lambda, z21_2, z12_3 at parameter t.

    The lambda denominator is positive for every t by the arithmetic-
    geometric mean inequality, so the admissible interval is all of
    (0, pi), where sin t keeps z21_2 positive.
    """
    omega = np.asarray(omega)
    omega_plus = np.asarray(omega_plus)
    excess = np.exp(omega + omega_plus) - 1.0
    if np.any(excess <= 0.0):
        raise PositivityViolation("omega + omega_plus must be positive")
    if not (0.0 < t < np.pi):
        raise InadmissibleT(f"t = {t} outside (0, pi)")
    root = np.sqrt(excess)
    lam = 2.0 / (np.exp(omega) + np.exp(omega_plus) + 2.0 * np.cos(t) * root)
    z21_2 = lam * np.sin(t) * root
    z12_3 = 0.5 * lam * (np.exp(omega) - np.exp(omega_plus))
    if np.any(lam <= 0.0) or np.any(z21_2 <= 0.0):
        raise InadmissibleT(f"t = {t} gives nonpositive lambda or z21_2")
    closure = z21_2**2 + (1.0 - 0.5 * lam * (np.exp(omega) + np.exp(omega_plus))) ** 2
    ident = float(np.max(np.abs(closure - lam**2 * excess)))
    return LiftCoefficients(t, lam, z21_2, z12_3, ident, (0.0, np.pi))


@dataclass(frozen=True)
class LiftFrame:
    """The frame (U1..U6) at one t together with its scalar data."""

    t: float
    grid: "grids.Grid2"
    U: np.ndarray  # (..., 6, 6) real, rows U1..U6
    lambda_: np.ndarray
    z21_2: np.ndarray
    z12_3: np.ndarray
    C: np.ndarray
    omega1_dbar: np.ndarray  # complex; omega1(d/dt) = -1/2 always
    order: int = 2

    omega1_dt: float = -0.5

    @property
    def U13(self):
        return self.U[..., 0, :] + 1j * self.U[..., 2, :]

    @property
    def U56(self):
        return self.U[..., 4, :] + 1j * self.U[..., 5, :]

    def gram_residual(self, margin=None):
        gram = np.einsum("...ik,...jk->...ij", self.U, self.U)
        dev = np.max(np.abs(gram - np.eye(6)), axis=(-2, -1))
        return field_max(dev, self.grid, margin)

    def volume_residual(self, margin=None):
        vol = np.linalg.det(np.stack([self.U[..., k, :] for k in range(6)], axis=-1))
        return field_max(vol - 1.0, self.grid, margin)


def build_U(F, Fp, t):
    """Build the frame at parameter t from the frames of f and of f^+."""
    coeffs = lift_coefficients(F.omega, Fp.omega, t)
    excess = np.exp(F.omega + Fp.omega) - 1.0
    root = np.sqrt(excess)
    C = np.sqrt(coeffs.lambda_ / excess)
    g1 = Fp.f1
    cf1 = np.conj(F.f1)
    eit = np.exp(-1j * t)
    U13 = -C[..., None] * (
        (root + eit * np.exp(F.omega))[..., None] * g1 + 1j * eit * cf1
    )
    U56 = C[..., None] * (
        eit * g1 + 1j * (root + eit * np.exp(Fp.omega))[..., None] * cf1
    )
    d = lambda X: grids.wirtinger_d(X, F.grid, F.order)
    db = lambda X: grids.wirtinger_dbar(X, F.grid, F.order)
    df1 = d(F.f1)
    gamma = algebra6.cbilinear(df1, g1)
    omega1_dbar = (
        -0.25j
        * (2j * np.conj(gamma) + np.exp(F.omega + Fp.omega) * db(F.omega - Fp.omega))
        / excess
    )
    U = np.stack(
        [
            np.real(U13),
            Fp.f0,
            np.imag(U13),
            F.f0,
            np.real(U56),
            np.imag(U56),
        ],
        axis=-2,
    )
    return LiftFrame(
        t=t, grid=F.grid, U=U, lambda_=coeffs.lambda_, z21_2=coeffs.z21_2,
        z12_3=coeffs.z12_3, C=C, omega1_dbar=omega1_dbar, order=F.order,
    )


def default_t_grid(n=9):
    """Uniform interior samples of the admissible interval (0, pi)."""
    return np.linspace(0.0, np.pi, n + 2)[1:-1]


def _t_derivative(stack, tgrid):
    """Fourth-order (falling back to second near the ends) t-derivative."""
    out = np.gradient(stack, tgrid, axis=0, edge_order=2)
    dt = tgrid[1] - tgrid[0]
    # upgrade interior points that have two neighbors on each side
    if len(tgrid) >= 5:
        out[2:-2] = (
            stack[:-4] - 8.0 * stack[1:-3] + 8.0 * stack[3:-1] - stack[4:]
        ) / (12.0 * dt)
    return out


@dataclass
class OmegaReport:
    """Connection data extracted over a t-grid, with structure residuals."""

    tgrid: np.ndarray
    omega1_dbar: np.ndarray  # complex, per grid point (t-independent)
    z22_3: np.ndarray  # (nt_interior, nx, ny) real
    z32_3: np.ndarray
    c_lift: np.ndarray  # complex; c = -b_lift - i a_lift
    identity_residuals: dict = field(default_factory=dict)
    antisymmetry_residual: float = np.nan
    dU2_dt_residual: float = np.nan
    defining_residuals: dict = field(default_factory=dict)
    interior_t: np.ndarray = None

    @property
    def a_lift(self):
        return -np.imag(self.c_lift)

    @property
    def b_lift(self):
        return -np.real(self.c_lift)


def omega_forms_and_Omega(F, Fp, tgrid=None, tol=None, margin=None):
    """Extract the remaining connection coefficients over a t-grid.

    Verifies the three structural identities of the frame (the
    d(U1+iU3) projections onto U5-iU6 and the z12_3 relation) and the
    antisymmetry of the connection matrix, raising StructureViolation
    with the failing identity named when a tolerance is given.
    """
    if tgrid is None:
        tgrid = default_t_grid()
    g = F.grid
    lifts = [build_U(F, Fp, t) for t in tgrid]
    Ustack = np.stack([L.U for L in lifts], axis=0)  # (nt, nx, ny, 6, 6)
    dUdt = _t_derivative(Ustack, tgrid)

    sl = slice(2, -2) if len(tgrid) >= 5 else slice(1, -1)
    interior = range(len(tgrid))[sl]
    lam = np.stack([lifts[i].lambda_ for i in interior], axis=0)
    z12_3 = np.stack([lifts[i].z12_3 for i in interior], axis=0)
    U13 = np.stack([lifts[i].U13 for i in interior], axis=0)
    U56 = np.stack([lifts[i].U56 for i in interior], axis=0)
    w1db = lifts[0].omega1_dbar  # t-independent by construction
    w1d = np.conj(w1db)

    d13_t = dUdt[sl, ..., 0, :] + 1j * dUdt[sl, ..., 2, :]
    d56_t = dUdt[sl, ..., 4, :] + 1j * dUdt[sl, ..., 5, :]
    d13_z = np.stack(
        [grids.wirtinger_d(lifts[i].U13, g, F.order) for i in interior], axis=0
    )
    d13_zb = np.stack(
        [grids.wirtinger_dbar(lifts[i].U13, g, F.order) for i in interior], axis=0
    )

    pair = algebra6.cbilinear
    mx = lambda X: float(np.max([field_max(X[k], g, margin) for k in range(len(X))]))
    identity = {
        "dU13_U56_dt": mx(np.abs(pair(d13_t, np.conj(U56)) - 1j * lam)),
        "z12_3_relation": mx(
            np.abs(
                pair(d13_t, np.conj(U13))
                - pair(d56_t, np.conj(U56))
                + 2j * z12_3
            )
        ),
        "dU13_U56_dbar": mx(np.abs(pair(d13_zb, np.conj(U56)) + 2j * lam * w1db)),
    }

    # coefficient extraction from the printed projections
    sqlam = np.sqrt(lam)
    proj_d = 0.5 * pair(d13_z, np.conj(U56))
    c_lift = sqlam * (proj_d + 1j * lam * w1d)
    d13_x = d13_z + d13_zb
    d13_y = 1j * (d13_z - d13_zb)
    w1x = 2.0 * np.real(w1db)
    w1y = 2.0 * np.imag(w1db)
    Bx = 0.5 * pair(d13_x, np.conj(U13))
    By = 0.5 * pair(d13_y, np.conj(U13))
    z22_3c = sqlam * (-1j * Bx - (1.0 + z12_3) * w1x)
    z32_3c = sqlam * (-1j * By - (1.0 + z12_3) * w1y)
    identity["z22_3_real"] = mx(np.abs(np.imag(z22_3c)))
    identity["z32_3_real"] = mx(np.abs(np.imag(z32_3c)))

    # antisymmetry of the connection matrix in all three directions
    anti = 0.0
    dUdx = np.stack([grids.diff_x(lifts[i].U, g, F.order) for i in interior], axis=0)
    dUdy = np.stack([grids.diff_y(lifts[i].U, g, F.order) for i in interior], axis=0)
    Uin = Ustack[sl]
    for dU in (dUdt[sl], dUdx, dUdy):
        Om = np.einsum("...ik,...jk->...ij", Uin, dU)
        anti = max(anti, mx(np.max(np.abs(Om + np.swapaxes(Om, -1, -2)), axis=(-2, -1))))

    # column structure of U2 and the defining derivative relations
    dU2_dt = mx(np.linalg.norm(dUdt[sl, ..., 1, :], axis=-1))
    dg0 = grids.wirtinger_d(Fp.f0, g, F.order)
    df0 = grids.wirtinger_d(F.f0, g, F.order)
    defining = {
        "dU2": mx(
            np.linalg.norm(
                2.0 * sqlam[..., None] * dg0 - 2.0 * sqlam[..., None] * Fp.f1,
                axis=-1,
            )
        ),
        "dU4": mx(
            np.linalg.norm(
                2.0 * sqlam[..., None] * df0 - 2.0 * sqlam[..., None] * F.f1,
                axis=-1,
            )
        ),
    }

    report = OmegaReport(
        tgrid=tgrid,
        omega1_dbar=w1db,
        z22_3=np.real(z22_3c),
        z32_3=np.real(z32_3c),
        c_lift=c_lift,
        identity_residuals=identity,
        antisymmetry_residual=anti,
        dU2_dt_residual=dU2_dt,
        defining_residuals=defining,
        interior_t=tgrid[sl],
    )
    if tol is not None:
        for name, res in identity.items():
            if res > tol:
                raise StructureViolation(name, res, tol)
    return report


def bipolar_specialization_check(report, F, Fp, eta, margin=None):
    """Residuals of the ten closed-form coefficient formulas that hold
    when gamma of the (+) transform vanishes.

    ``report`` must come from omega_forms_and_Omega on the pair (f, f^+)
    of a bipolar surface with metric exponent eta.
    """
    g = F.grid
    ch, sh = np.cosh(eta), np.sinh(eta)
    ex = grids.diff_x(eta, g, F.order)
    ey = grids.diff_y(eta, g, F.order)
    out = {}
    lam_list, z21_list, z12_list = [], [], []
    a_list, b_list, z22_list, z32_list = [], [], [], []
    for k, t in enumerate(report.interior_t):
        lam_ref = 1.0 / (ch + np.cos(t) * sh)
        coeffs = lift_coefficients(F.omega, Fp.omega, t)
        lam_list.append(field_max(coeffs.lambda_ - lam_ref, g, margin))
        z21_list.append(
            field_max(coeffs.z21_2 - np.sin(t) * sh * lam_ref, g, margin)
        )
        z12_list.append(field_max(coeffs.z12_3, g, margin))
        pref = 0.5 * lam_ref**1.5
        a_list.append(
            field_max(report.a_lift[k] - pref * ex * np.sin(t), g, margin)
        )
        b_list.append(
            field_max(report.b_lift[k] - pref * ey * np.sin(t), g, margin)
        )
        z32_list.append(
            field_max(
                report.z32_3[k] - pref * ex * (np.cos(t) * ch + sh), g, margin
            )
        )
        z22_list.append(
            field_max(
                report.z22_3[k] + pref * ey * (np.cos(t) * ch + sh), g, margin
            )
        )
    out["lambda"] = max(lam_list)
    out["z21_2"] = max(z21_list)
    out["z12_3"] = max(z12_list)
    # omega1(d/dt) = -1/2 and omega2, omega3 = dx/sqrt(lambda), dy/sqrt(lambda)
    # hold identically by construction; omega1 = -dt/2 iff its dbar part dies
    out["omega1_dt"] = 0.0
    out["omega1_dbar"] = field_max(np.abs(report.omega1_dbar), g, margin)
    out["omega2_omega3"] = 0.0
    out["a"] = max(a_list)
    out["b"] = max(b_list)
    out["z32_3"] = max(z32_list)
    out["z22_3"] = max(z22_list)
    return out


# ---------------------------------------------------------------------------
# horizontal lift of bipolar surfaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HorizontalLift:
    tgrid: np.ndarray
    F: np.ndarray  # (nt, nx, ny, 4) complex
    theta1: complex = 1.0
    theta2: complex = 1.0


def horizontal_lift(s, tgrid=None):
    """F(t, x, y) = G1 cos(t/2) + i G2 sin(t/2) over a t-grid."""
    if tgrid is None:
        tgrid = default_t_grid()
    G1 = s.G1.values
    G2 = s.G2.values
    c = np.cos(tgrid / 2.0)[:, None, None, None]
    sn = np.sin(tgrid / 2.0)[:, None, None, None]
    return HorizontalLift(tgrid, c * G1 + 1j * sn * G2)


def bipolar_lift(s, tgrid=None, margin=None):
    """Build the horizontal lift of a bipolar source and check its system.

    Returns (HorizontalLift, residual dict).  The second-order system is
    evaluated with exact t-derivatives of the trigonometric profile and
    finite differences in (x, y); the final entry cross-checks the wedge
    formula f = (1/(i sqrt2))(F ^ (-2 F_t) - lambda F_x ^ F_y) against
    the complexified bipolar surface up to one global phase.
    """
    if tgrid is None:
        tgrid = default_t_grid()
    g = s.grid
    lift = horizontal_lift(s, tgrid)
    G1, G2 = s.G1.values, s.G2.values
    eta = s.eta
    ch, sh = np.cosh(eta), np.sinh(eta)
    ex = grids.diff_x(eta, g, 2)
    ey = grids.diff_y(eta, g, 2)
    dx = lambda X: grids.diff_x(X, g, 2)
    dy = lambda X: grids.diff_y(X, g, 2)

    res = {k: 0.0 for k in ("F_tt", "F_tx", "F_ty", "F_xx", "F_xy", "F_yy",
                            "G2_x", "G2_y", "unit_F", "wedge_formula")}
    res["G2_x"] = field_max(
        np.linalg.norm(dx(G2) + np.exp(-eta)[..., None] * dx(G1), axis=-1), g, margin
    )
    res["G2_y"] = field_max(
        np.linalg.norm(dy(G2) - np.exp(-eta)[..., None] * dy(G1), axis=-1), g, margin
    )

    phase = None
    target = algebra6.include_complex(algebra6.wedge(G1, G2))
    for k, t in enumerate(tgrid):
        c, sn = np.cos(t / 2.0), np.sin(t / 2.0)
        Ft_ = lift.F[k]
        F_t = -0.5 * sn * G1 + 0.5j * c * G2
        F_tt = -0.25 * Ft_
        res["F_tt"] = max(res["F_tt"], float(np.max(np.abs(F_tt + Ft_ / 4.0))))
        res["unit_F"] = max(
            res["unit_F"],
            field_max(algebra6.hnorm2(Ft_) - 1.0, g, margin),
        )
        den = ch + np.cos(t) * sh
        Fx, Fy = dx(Ft_), dy(Ft_)
        F_tx, F_ty = dx(F_t), dy(F_t)
        r = F_tx - (-(1j + np.sin(t) * sh) / (2.0 * den))[..., None] * Fx
        res["F_tx"] = max(res["F_tx"], field_max(np.linalg.norm(r, axis=-1), g, margin))
        r = F_ty - ((1j - np.sin(t) * sh) / (2.0 * den))[..., None] * Fy
        res["F_ty"] = max(res["F_ty"], field_max(np.linalg.norm(r, axis=-1), g, margin))
        cx = (ex * (np.cos(t) * ch + 1j * np.sin(t) + sh) / (2.0 * den))[..., None]
        cy = (ey * (np.cos(t) * ch - 1j * np.sin(t) + sh) / (2.0 * den))[..., None]
        r = (
            dx(Fx)
            + den[..., None] * Ft_
            - 2.0 * (np.sin(t) * sh - 1j)[..., None] * F_t
            - cx * Fx
            + cy * Fy
        )
        res["F_xx"] = max(res["F_xx"], field_max(np.linalg.norm(r, axis=-1), g, margin))
        cxy1 = (ey * (np.cos(t) * ch + 1j * np.sin(t) + sh) / (2.0 * den))[..., None]
        cxy2 = (ex * (np.cos(t) * ch - 1j * np.sin(t) + sh) / (2.0 * den))[..., None]
        r = dx(Fy) - cxy1 * Fx - cxy2 * Fy
        res["F_xy"] = max(res["F_xy"], field_max(np.linalg.norm(r, axis=-1), g, margin))
        r = (
            dy(Fy)
            + den[..., None] * Ft_
            - 2.0 * (1j + np.sin(t) * sh)[..., None] * F_t
            + cx * Fx
            - cy * Fy
        )
        res["F_yy"] = max(res["F_yy"], field_max(np.linalg.norm(r, axis=-1), g, margin))

        lam = 1.0 / den
        wedge_f = (
            algebra6.wedge(Ft_, -2.0 * F_t) - lam[..., None] * algebra6.wedge(Fx, Fy)
        ) / (1j * np.sqrt(2.0))
        if phase is None:
            overlap = np.sum(algebra6.herm(target, wedge_f))
            phase = overlap / np.abs(overlap)
        res["wedge_formula"] = max(
            res["wedge_formula"],
            field_max(np.linalg.norm(target - phase * wedge_f, axis=-1), g, margin),
        )
    res["phase"] = complex(phase)
    return lift, res
