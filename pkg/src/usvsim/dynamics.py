"""Planar (surge/sway/yaw) dynamics of a twin-pontoon vessel with two
azimuthing thrusters.

Frames and conventions:
  - Earth-fixed pose eta = [x (North, m), y (East, m), psi (heading, rad)],
    psi measured from North toward East, kept in (-pi, pi].
  - Body-fixed velocity nu = [u (surge), v (sway, +starboard), r (yaw rate)].
  - A Wrench is a generalized planar force [X (N), Y (N), N (N m)].

Sign conventions for the coefficient set:
  - Added-mass derivatives (x_udot, y_vdot, y_rdot, n_vdot, n_rdot) are stored
    SNAME-signed, i.e. non-positive, so the assembled inertia is m - x_udot etc.
    and exceeds the rigid-body inertia.
  - Drag coefficients are stored positive-dissipation: drag_wrench() returns the
    left-hand-side drag force, which the equation of motion subtracts, so a
    positive coefficient always removes kinetic energy.

The twin hulls see different surge flow when yawing; surge drag is therefore
modeled per hull at u_p = u - r*B/2 and u_s = u + r*B/2, and the imbalance
contributes an extra yaw moment (D_s - D_p)*B/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .angles import wrap_angle

# Bollard-pull calibration: motor command [%] -> total thrust from both motors
# [N]. The (0, 0) knot anchors the dead band between -30% and +20%, where the
# drivetrain produces no measurable thrust.
_COMMAND_KNOTS = np.array(
    [-100.0, -90.0, -80.0, -70.0, -60.0, -50.0, -40.0, -30.0,
     0.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0])
_THRUST_KNOTS = np.array(
    [-102.0, -84.0, -66.0, -44.0, -31.0, -13.0, -9.0, -4.0,
     0.0, 29.0, 34.0, 78.0, 110.0, 144.0, 175.0, 203.0, 228.0, 254.0])

# Surge drag calibration: linear/quadratic coefficients chosen so total surge
# drag balances the 254 N full-throttle thrust at the 1.5 m/s top speed with a
# 20% linear share there.
SURGE_DRAG_LINEAR = 33.9        # N s/m
SURGE_DRAG_QUADRATIC = 90.3     # N s^2/m^2


@dataclass(frozen=True)
class Wrench:
    """Generalized planar force: surge force, sway force, yaw moment."""

    x: float = 0.0  # [N]
    y: float = 0.0  # [N]
    n: float = 0.0  # [N m]

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.n)):
            raise ValueError(f"wrench components must be finite, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.n])

    @staticmethod
    def from_array(a) -> "Wrench":
        return Wrench(float(a[0]), float(a[1]), float(a[2]))

    def __add__(self, other: "Wrench") -> "Wrench":
        return Wrench(self.x + other.x, self.y + other.y, self.n + other.n)

    def __sub__(self, other: "Wrench") -> "Wrench":
        return Wrench(self.x - other.x, self.y - other.y, self.n - other.n)

    def __neg__(self) -> "Wrench":
        return Wrench(-self.x, -self.y, -self.n)


@dataclass
class VehicleState:
    """Earth-frame pose and body-frame velocity."""

    x: float = 0.0    # North [m]
    y: float = 0.0    # East [m]
    psi: float = 0.0  # heading [rad], (-pi, pi]
    u: float = 0.0    # surge [m/s]
    v: float = 0.0    # sway [m/s]
    r: float = 0.0    # yaw rate [rad/s]

    def __post_init__(self):
        vals = (self.x, self.y, self.psi, self.u, self.v, self.r)
        if not all(math.isfinite(c) for c in vals):
            raise ValueError(f"state components must be finite, got {vals}")
        self.psi = wrap_angle(self.psi)

    @property
    def pose(self) -> np.ndarray:
        return np.array([self.x, self.y, self.psi])

    @property
    def nu(self) -> np.ndarray:
        return np.array([self.u, self.v, self.r])

    @staticmethod
    def from_vectors(eta, nu) -> "VehicleState":
        return VehicleState(float(eta[0]), float(eta[1]), float(eta[2]),
                            float(nu[0]), float(nu[1]), float(nu[2]))


@dataclass(frozen=True)
class ThrusterSetpoint:
    """Signed thrust [N] and azimuth [rad] per side, positive azimuth to starboard."""

    thrust_port: float = 0.0
    thrust_stbd: float = 0.0
    azimuth_port: float = 0.0
    azimuth_stbd: float = 0.0

    def __post_init__(self):
        vals = (self.thrust_port, self.thrust_stbd, self.azimuth_port, self.azimuth_stbd)
        if not all(math.isfinite(c) for c in vals):
            raise ValueError(f"setpoint components must be finite, got {vals}")


@dataclass(frozen=True)
class HydroCoefficients:
    """Coefficient set produced by the slender-body estimation formulas."""

    x_udot: float
    y_vdot: float
    y_rdot: float
    n_vdot: float
    n_rdot: float
    y_v: float
    y_r: float
    n_r: float
    n_v: float = 0.0  # no estimation formula; zero like all unlisted terms


def estimate_hydro_coefficients(m: float, lwl: float, draft: float, b_hull: float,
                                hull_sep: float, lcg: float, rho: float = 1025.0,
                                u_nominal: float = 1.0,
                                n_rdot_pontoon_const: float = 4.75 / 2.0) -> HydroCoefficients:
    """Evaluate the slender-body coefficient formulas for a twin-pontoon hull.

    Added-mass values are returned SNAME-signed (non-positive).  The linear
    drag rows that scale with speed (y_v, y_r, n_r) are linearized at
    u_nominal and returned positive-dissipation; they vanish at u_nominal = 0.
    Surge drag has no formula here (it comes from the acceleration-test fit)
    and all coefficients without a formula are zero.
    """
    if lwl <= 0 or draft <= 0:
        raise ValueError(f"length and draft must be positive, got lwl={lwl}, draft={draft}")
    if m <= 0 or rho <= 0 or b_hull <= 0 or hull_sep <= 0:
        raise ValueError("mass, density and beam values must be positive")
    if u_nominal < 0:
        raise ValueError(f"u_nominal must be >= 0, got {u_nominal}")

    t2 = draft * draft
    pi_rho_t2 = math.pi * rho * t2
    fwd = lwl - lcg   # hull length ahead of the reference point
    aft = lcg

    x_udot = -0.05 * m
    y_vdot = -0.9 * pi_rho_t2 * lwl
    n_rdot = -1.2 * (n_rdot_pontoon_const * math.pi * rho * (hull_sep / 2.0) * t2 * t2
                     + pi_rho_t2 * (fwd ** 3 + aft ** 3) / 3.0)
    y_rdot = -0.5 * pi_rho_t2 * (fwd ** 2 + aft ** 2) / 2.0
    n_vdot = y_rdot

    ratio = b_hull / draft
    form = 1.1 + 0.0045 * (lwl / draft) - 0.1 * ratio + 0.016 * ratio * ratio
    y_v = 0.5 * rho * u_nominal * form * (math.pi * draft * lwl / 2.0)
    n_r = 0.65 * math.pi * rho * u_nominal * t2 * lwl * lwl
    y_r = 0.4 * math.pi * rho * u_nominal * t2 * lwl

    return HydroCoefficients(x_udot=x_udot, y_vdot=y_vdot, y_rdot=y_rdot,
                             n_vdot=n_vdot, n_rdot=n_rdot, y_v=y_v, y_r=y_r, n_r=n_r)


@dataclass
class VehicleParams:
    """Mass, geometry, hydrodynamic coefficients and actuator limits.

    Defaults describe the reference 4 m / 180 kg twin-pontoon vessel.  Any
    hydrodynamic coefficient left as None is filled from
    estimate_hydro_coefficients() using the geometry fields, so overriding
    e.g. the draft re-derives a consistent coefficient set.
    """

    m: float = 180.0          # mass [kg]
    i_z: float = 250.0        # yaw inertia [kg m^2]
    x_g: float = 0.0          # CG offset, body x [m]
    y_g: float = 0.0          # CG offset, body y [m]
    loa: float = 4.05         # length overall [m]
    lwl: float = 3.20         # waterline length [m], used in coefficient formulas
    draft: float = 0.23       # mid-length draft [m]
    b_hull: float = 0.61      # single-pontoon beam [m]
    hull_sep: float = 1.83    # hull centerline separation B [m]
    lcg: float = 1.30         # longitudinal CG from the stern plane [m]
    rho: float = 1025.0       # water density [kg/m^3]
    u_nominal: float = 1.0    # linearization speed for velocity-dependent drag [m/s]
    n_rdot_pontoon_const: float = 4.75 / 2.0

    # Added mass (SNAME-signed, non-positive); None -> estimated from geometry.
    x_udot: float | None = None
    y_vdot: float | None = None
    y_rdot: float | None = None
    n_vdot: float | None = None
    n_rdot: float | None = None

    # Linear drag (positive-dissipation); None -> estimated from geometry.
    x_u: float = SURGE_DRAG_LINEAR
    y_v: float | None = None
    y_r: float | None = None
    n_v: float = 0.0
    n_r: float | None = None

    # Quadratic drag (positive-dissipation); only the surge term is calibrated.
    x_uu: float = SURGE_DRAG_QUADRATIC
    y_vv: float = 0.0
    y_vr: float = 0.0
    y_rv: float = 0.0
    y_rr: float = 0.0
    n_vv: float = 0.0
    n_vr: float = 0.0
    n_rv: float = 0.0
    n_rr: float = 0.0

    # Propulsion limits (per thruster) and azimuth travel.
    thrust_max: float = 127.0          # forward [N]
    thrust_reverse_max: float = 51.0   # reverse magnitude [N]
    azimuth_max: float = math.pi / 4.0 # [rad]

    def __post_init__(self):
        if self.m <= 0 or self.i_z <= 0:
            raise ValueError(f"mass and yaw inertia must be positive, got m={self.m}, i_z={self.i_z}")
        if self.thrust_max <= 0 or self.thrust_reverse_max <= 0:
            raise ValueError("thrust limits must be positive")
        if not (0.0 < self.azimuth_max <= math.pi / 2.0):
            raise ValueError(f"azimuth limit must lie in (0, pi/2], got {self.azimuth_max}")
        estimated = estimate_hydro_coefficients(
            self.m, self.lwl, self.draft, self.b_hull, self.hull_sep, self.lcg,
            rho=self.rho, u_nominal=self.u_nominal,
            n_rdot_pontoon_const=self.n_rdot_pontoon_const)
        for name in ("x_udot", "y_vdot", "y_rdot", "n_vdot", "n_rdot", "y_v", "y_r", "n_r"):
            if getattr(self, name) is None:
                setattr(self, name, getattr(estimated, name))


def rotation_matrix(psi: float) -> np.ndarray:
    """Body-to-earth rotation for planar motion; orthogonal with det +1."""
    c, s = math.cos(psi), math.sin(psi)
    return np.array([[c, -s, 0.0],
                     [s, c, 0.0],
                     [0.0, 0.0, 1.0]])


def mass_matrix(params: VehicleParams) -> np.ndarray:
    """Rigid-body plus added-mass inertia tensor."""
    if params.m <= 0 or params.i_z <= 0:
        raise ValueError("mass matrix requires positive m and i_z")
    m, xg, yg = params.m, params.x_g, params.y_g
    return np.array([
        [m - params.x_udot, 0.0, -m * yg],
        [0.0, m - params.y_vdot, m * xg - params.y_rdot],
        [-m * yg, m * xg - params.n_vdot, params.i_z - params.n_rdot]])


def coriolis_matrix(params: VehicleParams, nu) -> np.ndarray:
    """Rigid-body plus added-mass Coriolis/centripetal matrix (skew-symmetric)."""
    u, v, r = float(nu[0]), float(nu[1]), float(nu[2])
    m, xg, yg = params.m, params.x_g, params.y_g
    c13 = -m * (xg * r + v) + params.y_vdot * v + 0.5 * (params.y_rdot + params.n_vdot) * r
    c23 = -m * (yg * r - u) - params.x_udot * u
    return np.array([[0.0, 0.0, c13],
                     [0.0, 0.0, c23],
                     [-c13, -c23, 0.0]])


def _per_hull_surge_drag(params: VehicleParams, u: float, r: float) -> tuple[float, float]:
    """Surge drag on the port and starboard pontoons at their local flow speeds."""
    half_sep = 0.5 * params.hull_sep
    u_p = u - r * half_sep
    u_s = u + r * half_sep
    d_p = 0.5 * params.x_uu * abs(u_p) * u_p + 0.5 * params.x_u * u_p
    d_s = 0.5 * params.x_uu * abs(u_s) * u_s + 0.5 * params.x_u * u_s
    return d_p, d_s


def drag_wrench(params: VehicleParams, nu) -> Wrench:
    """Total hydrodynamic drag (left-hand-side convention: opposes motion).

    Sway and yaw come from the linear + quadratic drag matrix rows; surge and
    the yaw imbalance moment come from the per-hull surge drag model.
    """
    u, v, r = float(nu[0]), float(nu[1]), float(nu[2])
    d_p, d_s = _per_hull_surge_drag(params, u, r)
    x = d_p + d_s
    y = (params.y_v + params.y_vv * abs(v) + params.y_vr * abs(r)) * v \
        + (params.y_r + params.y_rv * abs(v) + params.y_rr * abs(r)) * r
    n = (params.n_v + params.n_vv * abs(v) + params.n_vr * abs(r)) * v \
        + (params.n_r + params.n_rv * abs(v) + params.n_rr * abs(r)) * r \
        + (d_s - d_p) * 0.5 * params.hull_sep
    return Wrench(x, y, n)


def propulsion_wrench(params: VehicleParams, sp: ThrusterSetpoint) -> Wrench:
    """Forces and yaw moment from the two azimuthing thrusters.

    Strict on azimuth limits (allocation owns command legality); thrust
    magnitudes are the allocator's contract and are not checked here.
    """
    tol = 1e-12
    if abs(sp.azimuth_port) > params.azimuth_max + tol or abs(sp.azimuth_stbd) > params.azimuth_max + tol:
        raise ValueError(
            f"azimuth beyond +/-{params.azimuth_max:.4f} rad: "
            f"port={sp.azimuth_port:.4f}, stbd={sp.azimuth_stbd:.4f}")
    fxp = sp.thrust_port * math.cos(sp.azimuth_port)
    fyp = sp.thrust_port * math.sin(sp.azimuth_port)
    fxs = sp.thrust_stbd * math.cos(sp.azimuth_stbd)
    fys = sp.thrust_stbd * math.sin(sp.azimuth_stbd)
    # Moment arms from the CG: port at (-lcg, -B/2), starboard at (-lcg, +B/2).
    half_sep = 0.5 * params.hull_sep
    n = (-params.lcg) * fyp - (-half_sep) * fxp \
        + (-params.lcg) * fys - half_sep * fxs
    return Wrench(fxp + fxs, fyp + fys, n)


def thrust_from_command(cmd: float) -> float:
    """Total thrust [N] from both motors for a command in [-100, 100] percent.

    Piecewise-linear interpolation of the bollard-pull calibration knots;
    monotone non-decreasing, with the dead band crossing zero at cmd 0.
    """
    if not math.isfinite(cmd) or cmd < -100.0 or cmd > 100.0:
        raise ValueError(f"motor command must lie in [-100, 100], got {cmd}")
    return float(np.interp(cmd, _COMMAND_KNOTS, _THRUST_KNOTS))


def thrust_per_side_from_command(cmd: float) -> float:
    """Thrust [N] of a single motor at the given command (half the pair total)."""
    return 0.5 * thrust_from_command(cmd)


def _nu_dot(params: VehicleParams, m_inv: np.ndarray, u: float, v: float, r: float,
            fx: float, fy: float, fn: float) -> tuple[float, float, float]:
    """Body-frame acceleration for a net applied wrench (fx, fy, fn)."""
    m, xg, yg = params.m, params.x_g, params.y_g
    c13 = -m * (xg * r + v) + params.y_vdot * v + 0.5 * (params.y_rdot + params.n_vdot) * r
    c23 = -m * (yg * r - u) - params.x_udot * u
    d_p, d_s = _per_hull_surge_drag(params, u, r)
    drag_x = d_p + d_s
    drag_y = (params.y_v + params.y_vv * abs(v) + params.y_vr * abs(r)) * v \
        + (params.y_r + params.y_rv * abs(v) + params.y_rr * abs(r)) * r
    drag_n = (params.n_v + params.n_vv * abs(v) + params.n_vr * abs(r)) * v \
        + (params.n_r + params.n_rv * abs(v) + params.n_rr * abs(r)) * r \
        + (d_s - d_p) * 0.5 * params.hull_sep
    rhs0 = fx - c13 * r - drag_x
    rhs1 = fy - c23 * r - drag_y
    rhs2 = fn + c13 * u + c23 * v - drag_n
    mi = m_inv
    return (mi[0][0] * rhs0 + mi[0][1] * rhs1 + mi[0][2] * rhs2,
            mi[1][0] * rhs0 + mi[1][1] * rhs1 + mi[1][2] * rhs2,
            mi[2][0] * rhs0 + mi[2][1] * rhs1 + mi[2][2] * rhs2)


def inverse_mass_matrix(params: VehicleParams) -> np.ndarray:
    """Inverse inertia tensor; raises if the assembled matrix is singular."""
    m = mass_matrix(params)
    try:
        return np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"mass matrix is singular for the given parameters: {m}") from exc


def state_derivative(params: VehicleParams, state: VehicleState,
                     tau: Wrench, tau_w: Wrench = Wrench()) -> np.ndarray:
    """Continuous-time derivative [x_dot, y_dot, psi_dot, u_dot, v_dot, r_dot].

    Solves M nu_dot = tau + tau_w - C(nu) nu - drag(nu) and eta_dot = J(psi) nu.
    """
    m_inv = inverse_mass_matrix(params)
    fx = tau.x + tau_w.x
    fy = tau.y + tau_w.y
    fn = tau.n + tau_w.n
    ud, vd, rd = _nu_dot(params, m_inv, state.u, state.v, state.r, fx, fy, fn)
    c, s = math.cos(state.psi), math.sin(state.psi)
    return np.array([c * state.u - s * state.v,
                     s * state.u + c * state.v,
                     state.r, ud, vd, rd])


def kinetic_energy(params: VehicleParams, nu) -> float:
    """Generalized kinetic energy 0.5 nu^T M nu."""
    n = np.asarray(nu, dtype=float)
    return float(0.5 * n @ mass_matrix(params) @ n)
