"""Steady state of a driven four-level X-system and its optical response.

The medium is a degenerate two-level atom (two ground and two excited Zeeman
sublevels) in which the right-circular field component drives the 1<->2 arm
and the left-circular one drives the 3<->4 arm.  State labels follow the
convention {1: g,+1/2; 2: e,-1/2; 3: g,-1/2; 4: e,+1/2}; the stored density
matrix is 0-indexed, so ``rho[0, 1]`` is the 1-2 coherence.

All rates may be supplied in any common unit; internally the stationary
problem is solved with rates normalized to the combined linewidth
Gamma + gamma, and intensities are expressed as ratios to the saturation
intensity.  The dimensionless drive convention is

    I_x / I_sat = 4 |Omega_x|^2 / (Gamma + gamma)^2,

which makes the closed-form susceptibility expressions below exact
consequences of the stationary equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AtomicParams",
    "DriveField",
    "DensityMatrix4",
    "OpticalResponse",
    "SingularSystem",
    "ZeroField",
    "steady_state",
    "master_equation_residual",
    "optical_response",
    "response_closed_form",
    "self_rotation_angle",
    "small_signal_gain",
    "gain_scale_for_gain",
]

_RANK_RTOL = 1e-8


class SingularSystem(ValueError):
    """The stationary linear system is rank-deficient beyond the known degeneracies."""


class ZeroField(ValueError):
    """Optical response requested for a drive with no field in either component."""


@dataclass(frozen=True)
class AtomicParams:
    """Medium parameters.

    ``gain_scale`` is the single free proportionality constant C that absorbs
    number density, wavenumber and cell length; every dispersive output is
    reported up to this scale.
    """

    gamma_big: float
    gamma_small: float
    detuning: float
    dipole: float = 1.0
    sat_intensity: float = 1.0
    gain_scale: float = 1.0

    def __post_init__(self):
        if not (self.gamma_big > 0):
            raise ValueError("gamma_big must be positive")
        if self.gamma_small < 0:
            raise ValueError("gamma_small must be non-negative")
        if not (self.dipole > 0):
            raise ValueError("dipole must be positive")
        if not (self.sat_intensity > 0):
            raise ValueError("sat_intensity must be positive")
        for name in ("gamma_big", "gamma_small", "detuning", "gain_scale"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def linewidth(self) -> float:
        return self.gamma_big + self.gamma_small

    @property
    def delta(self) -> float:
        """Detuning in units of the combined linewidth."""
        return self.detuning / self.linewidth

    @classmethod
    def from_delta(cls, delta: float, gain_scale: float = 1.0,
                   gamma_big: float = 0.9, gamma_small: float = 0.1) -> "AtomicParams":
        """Build params with unit combined linewidth and the given detuning ratio."""
        return cls(gamma_big=gamma_big, gamma_small=gamma_small,
                   detuning=delta * (gamma_big + gamma_small),
                   gain_scale=gain_scale)


@dataclass(frozen=True)
class DriveField:
    """Complex Rabi frequencies of the two circular drive components."""

    omega_r: complex
    omega_l: complex

    def __post_init__(self):
        object.__setattr__(self, "omega_r", complex(self.omega_r))
        object.__setattr__(self, "omega_l", complex(self.omega_l))
        for name in ("omega_r", "omega_l"):
            v = getattr(self, name)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"{name} must be finite")

    def intensity_ratios(self, params: AtomicParams) -> tuple[float, float]:
        """(I_R/I_sat, I_L/I_sat) for this drive, per the 4|Omega|^2/(Gamma+gamma)^2 convention."""
        scale = 4.0 / params.linewidth ** 2
        return scale * abs(self.omega_r) ** 2, scale * abs(self.omega_l) ** 2

    @classmethod
    def from_intensity_ratios(cls, params: AtomicParams, i_r: float, i_l: float) -> "DriveField":
        """Real positive Rabi frequencies realizing the given intensity ratios."""
        if i_r < 0 or i_l < 0:
            raise ValueError("intensity ratios must be non-negative")
        half = params.linewidth / 2.0
        return cls(half * math.sqrt(i_r), half * math.sqrt(i_l))


@dataclass(frozen=True)
class DensityMatrix4:
    """4x4 complex Hermitian stationary state."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError("rho must be 4x4")
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    def validate(self, herm_tol: float = 1e-12, trace_tol: float = 1e-10,
                 diag_tol: float = 1e-10) -> None:
        """Raise ValueError if the Hermiticity/trace/population invariants fail."""
        if np.abs(self.rho - self.rho.conj().T).max() > herm_tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(self.rho.trace() - 1.0) > trace_tol:
            raise ValueError("density matrix trace differs from 1")
        diag = np.diag(self.rho)
        if np.abs(diag.imag).max() > diag_tol:
            raise ValueError("diagonal entries are not real")
        if diag.real.min() < -diag_tol or diag.real.max() > 1.0 + diag_tol:
            raise ValueError("populations outside [0, 1]")


@dataclass(frozen=True)
class OpticalResponse:
    """Dispersive and absorptive response of the medium, up to the gain scale C."""

    n_r_minus_1: float
    n_l_minus_1: float
    absorption: float


# The 16 real unknowns of the stationary problem, in order: the four
# populations, then (Re, Im) of rho12, rho34, rho13, rho14, rho23, rho24.
_PAIRS = ((0, 1), (2, 3), (0, 2), (0, 3), (1, 2), (1, 3))


def _vector_to_rho(x: np.ndarray) -> np.ndarray:
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0], rho[1, 1], rho[2, 2], rho[3, 3] = x[:4]
    for k, (i, j) in enumerate(_PAIRS):
        rho[i, j] = x[4 + 2 * k] + 1j * x[5 + 2 * k]
        rho[j, i] = x[4 + 2 * k] - 1j * x[5 + 2 * k]
    return rho


def _rho_to_vector(rho: np.ndarray) -> np.ndarray:
    x = np.empty(16)
    x[:4] = np.real(np.diag(rho))
    for k, (i, j) in enumerate(_PAIRS):
        x[4 + 2 * k] = rho[i, j].real
        x[5 + 2 * k] = rho[i, j].imag
    return x


def _master_rhs(rho: np.ndarray, gb: float, gs: float, delta_rate: float,
                om_r: complex, om_l: complex) -> np.ndarray:
    """Time derivative of rho under the ten stationary equations of the model.

    Written exactly as the equation set reads: populations fed by the two
    spontaneous channels, damped optical coherences on the driven arms, and
    undamped cross coherences evolving under the drive alone.
    """
    g_tot = gb + gs
    half_width = 0.5 * g_tot
    out = np.zeros((4, 4), dtype=complex)
    pump_r = 1j * om_r * rho[1, 0] - 1j * om_r.conjugate() * rho[0, 1]
    pump_l = 1j * om_l * rho[3, 2] - 1j * om_l.conjugate() * rho[2, 3]
    out[0, 0] = gb * rho[3, 3] + gs * rho[1, 1] + pump_r
    out[1, 1] = -g_tot * rho[1, 1] - pump_r
    out[2, 2] = gb * rho[1, 1] + gs * rho[3, 3] + pump_l
    out[3, 3] = -g_tot * rho[3, 3] - pump_l
    out[0, 1] = -(half_width + 1j * delta_rate) * rho[0, 1] - 1j * om_r * (rho[0, 0] - rho[1, 1])
    out[2, 3] = -(half_width + 1j * delta_rate) * rho[2, 3] - 1j * om_l * (rho[2, 2] - rho[3, 3])
    out[1, 3] = 1j * om_r.conjugate() * rho[0, 3] - 1j * om_l * rho[1, 2]
    out[1, 2] = 1j * delta_rate * rho[1, 2] + 1j * om_r.conjugate() * rho[0, 2] \
        - 1j * om_l.conjugate() * rho[1, 3]
    out[0, 3] = -1j * delta_rate * rho[0, 3] + 1j * om_r * rho[1, 3] - 1j * om_l * rho[0, 2]
    out[0, 2] = 1j * om_r * rho[1, 2] - 1j * om_l.conjugate() * rho[0, 3]
    for i, j in _PAIRS:
        out[j, i] = out[i, j].conjugate()
    return out


def master_equation_residual(params: AtomicParams, drive: DriveField,
                             dm: DensityMatrix4) -> float:
    """Largest residual of the stationary equations, in units of Gamma + gamma."""
    g = params.linewidth
    rhs = _master_rhs(dm.rho, params.gamma_big / g, params.gamma_small / g,
                      params.detuning / g, drive.omega_r / g, drive.omega_l / g)
    return float(np.abs(rhs).max())


def _build_system(params: AtomicParams, drive: DriveField) -> np.ndarray:
    """16x16 real coefficient matrix of the stationary equations (rates in linewidth units)."""
    g = params.linewidth
    gb, gs = params.gamma_big / g, params.gamma_small / g
    dr = params.detuning / g
    om_r, om_l = drive.omega_r / g, drive.omega_l / g
    a = np.empty((16, 16))
    for j in range(16):
        e = np.zeros(16)
        e[j] = 1.0
        a[:, j] = _rho_to_vector(_master_rhs(_vector_to_rho(e), gb, gs, dr, om_r, om_l))
    # The population equations sum to zero identically; the first is traded
    # for the trace condition, which removes the redundancy.
    a[0, :] = 0.0
    a[0, :4] = 1.0
    return a


def _solve_rank_checked(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] <= _RANK_RTOL * s[0]:
        return None
    return np.linalg.solve(a, b)


def steady_state(params: AtomicParams, drive: DriveField) -> DensityMatrix4:
    """Unique stationary density matrix of the driven X-system.

    Solves the linear system formed by the stationary equations with the
    first population equation replaced by the unit-trace condition.  Two
    degeneracies of the model are resolved deterministically:

    * zero drive leaves the ground populations free; the unpolarized split
      rho11 = rho33 = 1/2 is returned;
    * equal-magnitude drive components leave the undamped cross coherences
      (1-3, 1-4, 2-3, 2-4) free; they are fixed to zero, the value they
      retain for all time when the atom starts without cross coherence.

    Raises SingularSystem if the system is degenerate beyond these cases.
    """
    if drive.omega_r == 0 and drive.omega_l == 0:
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = rho[2, 2] = 0.5
        return DensityMatrix4(rho)

    a = _build_system(params, drive)
    b = np.zeros(16)
    b[0] = 1.0
    x = _solve_rank_checked(a, b)
    if x is None:
        # Degenerate cross-coherence block: restrict to populations plus the
        # two driven coherences, which decouple from the rest.
        x8 = _solve_rank_checked(a[:8, :8], b[:8])
        if x8 is None:
            raise SingularSystem("stationary equations are rank-deficient")
        x = np.zeros(16)
        x[:8] = x8
    return DensityMatrix4(_vector_to_rho(x))


def response_closed_form(params: AtomicParams, i_r: float, i_l: float) -> OpticalResponse:
    """Closed-form optical response for given circular intensity ratios.

    With D = (1 + 4 delta^2)(I_R + I_L) + 4 I_R I_L (intensities in units of
    I_sat) the dispersive parts are

        n_R - 1 = -C delta I_L / D,      n_L - 1 = -C delta I_R / D,

    and the reported absorption is the sum of the two per-component
    coefficients, C (I_L + I_R) / (2 D).  These are exact stationary results
    of the model; each component's response is controlled by the *opposite*
    component's intensity, the optical-pumping signature of the X-system.
    """
    if i_r < 0 or i_l < 0:
        raise ValueError("intensity ratios must be non-negative")
    if i_r == 0 and i_l == 0:
        raise ZeroField("closed-form response undefined with no field")
    d = params.delta
    c = params.gain_scale
    den = (1.0 + 4.0 * d * d) * (i_r + i_l) + 4.0 * i_r * i_l
    return OpticalResponse(
        n_r_minus_1=-c * d * i_l / den,
        n_l_minus_1=-c * d * i_r / den,
        absorption=0.5 * c * (i_l + i_r) / den,
    )


def optical_response(params: AtomicParams, drive: DriveField) -> OpticalResponse:
    """Optical response derived from the stationary density matrix.

    The dispersive part of each component is C (Gamma+gamma) Re(rho/Omega)/4
    evaluated on the corresponding driven coherence, and the absorptive part
    is the analogous -Im expression; this normalization makes the result
    coincide with ``response_closed_form``.  A component with exactly zero
    amplitude has no defined ratio; its contribution is taken from the
    closed-form limit instead.
    """
    if drive.omega_r == 0 and drive.omega_l == 0:
        raise ZeroField("optical response undefined with no field")
    dm = steady_state(params, drive)
    i_r, i_l = drive.intensity_ratios(params)
    limit = response_closed_form(params, i_r, i_l)
    scale = 0.25 * params.gain_scale * params.linewidth
    if drive.omega_r != 0:
        ratio_r = dm.rho[0, 1] / drive.omega_r
        n_r, a_r = scale * ratio_r.real, -scale * ratio_r.imag
    else:
        n_r, a_r = limit.n_r_minus_1, 0.0
    if drive.omega_l != 0:
        ratio_l = dm.rho[2, 3] / drive.omega_l
        n_l, a_l = scale * ratio_l.real, -scale * ratio_l.imag
    else:
        n_l, a_l = limit.n_l_minus_1, 0.0
    return OpticalResponse(n_r_minus_1=n_r, n_l_minus_1=n_l, absorption=a_r + a_l)


def self_rotation_angle(params: AtomicParams, intensity_ratio, ellipticity):
    """Rotation angle of the polarization ellipse per pass through the medium.

    phi = C delta sin(2 eps) / [(2 + 8 delta^2) + (1 + cos(4 eps)) I/I_sat],
    odd in the ellipticity and in the detuning.  Equivalent to the
    -(n_R - n_L)/2 route with the circular intensities split as
    I_R = I (1 - sin 2 eps)/2 and I_L = I (1 + sin 2 eps)/2, which ties
    positive ellipticity to left-circular dominance.  Accepts scalar or
    ndarray ``ellipticity``/``intensity_ratio``.
    """
    if np.any(np.asarray(intensity_ratio) < 0):
        raise ValueError("intensity_ratio must be non-negative")
    d = params.delta
    num = params.gain_scale * d * np.sin(2.0 * ellipticity)
    den = (2.0 + 8.0 * d * d) + (1.0 + np.cos(4.0 * ellipticity)) * intensity_ratio
    return num / den


def small_signal_gain(params: AtomicParams, intensity_ratio: float) -> float:
    """Self-rotation parameter gl = d(phi)/d(eps) at zero ellipticity."""
    if intensity_ratio < 0:
        raise ValueError("intensity_ratio must be non-negative")
    d = params.delta
    return 2.0 * params.gain_scale * d / ((2.0 + 8.0 * d * d) + 2.0 * intensity_ratio)


def gain_scale_for_gain(gl: float, delta: float, intensity_ratio: float) -> float:
    """Gain scale C that realizes a target small-signal gain at (delta, I/I_sat)."""
    if delta == 0:
        raise ValueError("gain vanishes identically at delta = 0")
    if intensity_ratio < 0:
        raise ValueError("intensity_ratio must be non-negative")
    return gl * ((2.0 + 8.0 * delta * delta) + 2.0 * intensity_ratio) / (2.0 * delta)
