"""Jones-vector states, basis decompositions, and intensity-inversion formulas.

States use the horizontal component as phase reference: the canonical form
has a real non-negative horizontal amplitude.  Analysis functions normalize
internally, so any global phase is harmless.  The ellipticity follows the
arcsine definition eps = arcsin[E_H Im(E_V) / (|E_H|^2 + |E_V|^2)]; note it
evaluates to arcsin(1/2) ~ 0.5236 rather than pi/4 for perfectly circular
light, a known quirk of that definition which is kept here verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PolarizationState",
    "IntensityRecord",
    "ZeroPower",
    "UndefinedAngle",
    "ZeroHorizontal",
    "ellipticity",
    "decompose",
    "ellipse_angle_from_intensities",
    "quadratures_from_intensities",
    "rotate",
]

_CIRCULAR_TOL = 1e-14


class ZeroPower(ValueError):
    """Analysis requested on a state with no optical power."""


class UndefinedAngle(ValueError):
    """Circular polarization has no major axis."""


class ZeroHorizontal(ValueError):
    """Quadrature ratios are undefined without horizontal power."""


@dataclass(frozen=True)
class PolarizationState:
    """Complex amplitude pair (E_H, E_V).

    ``normalized`` applies the phase convention (real non-negative E_H);
    ``rotate`` output is deliberately left raw, since a rotated state is an
    intra-loop quantity whose absolute phase matters.
    """

    e_h: complex
    e_v: complex

    def __post_init__(self):
        object.__setattr__(self, "e_h", complex(self.e_h))
        object.__setattr__(self, "e_v", complex(self.e_v))

    @classmethod
    def normalized(cls, e_h: complex, e_v: complex) -> "PolarizationState":
        """State with the global phase removed so that E_H is real, >= 0."""
        e_h, e_v = complex(e_h), complex(e_v)
        if e_h != 0:
            return cls(abs(e_h), e_v * (e_h.conjugate() / abs(e_h)))
        if e_v != 0:
            return cls(0.0, abs(e_v))
        return cls(0.0, 0.0)

    @property
    def power(self) -> float:
        return abs(self.e_h) ** 2 + abs(self.e_v) ** 2


def _canonical(state: PolarizationState) -> tuple[float, complex]:
    """(H, E_V) in the real-non-negative-E_H convention."""
    e_h, e_v = state.e_h, state.e_v
    if e_h.imag == 0.0 and e_h.real >= 0.0:
        return e_h.real, e_v
    if e_h != 0:
        return abs(e_h), e_v * (e_h.conjugate() / abs(e_h))
    return 0.0, complex(abs(e_v))


@dataclass(frozen=True)
class IntensityRecord:
    """Intensities of one state in the canonical, diagonal and circular bases."""

    i_h: float
    i_v: float
    i_plus: float
    i_minus: float
    i_r: float
    i_l: float

    def __post_init__(self):
        for name in ("i_h", "i_v", "i_plus", "i_minus", "i_r", "i_l"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def ellipticity(state: PolarizationState) -> float:
    """Ellipticity eps = arcsin[E_H Im(E_V) / (|E_H|^2 + |E_V|^2)] of the state."""
    power = state.power
    if power == 0:
        raise ZeroPower("ellipticity undefined for the zero state")
    h, e_v = _canonical(state)
    return math.asin(h * e_v.imag / power)


def decompose(state: PolarizationState) -> IntensityRecord:
    """Intensities of the state in all three measurement bases."""
    h, e_v = _canonical(state)
    x, y = e_v.real, e_v.imag
    return IntensityRecord(
        i_h=h * h,
        i_v=x * x + y * y,
        i_plus=0.5 * ((h + x) ** 2 + y * y),
        i_minus=0.5 * ((h - x) ** 2 + y * y),
        i_r=0.5 * ((h - y) ** 2 + x * x),
        i_l=0.5 * ((h + y) ** 2 + x * x),
    )


def ellipse_angle_from_intensities(rec: IntensityRecord) -> float:
    """Major-axis angle, 0.5 * atan2(I+ - I-, I+ + I- - 2 I_V), on (-pi/2, pi/2].

    The two-argument arctangent keeps the quadrant, so angles beyond +/-pi/4
    are recovered correctly.
    """
    num = rec.i_plus - rec.i_minus
    den = rec.i_plus + rec.i_minus - 2.0 * rec.i_v
    scale = rec.i_plus + rec.i_minus
    if abs(num) <= _CIRCULAR_TOL * scale and abs(den) <= _CIRCULAR_TOL * scale:
        raise UndefinedAngle("circular polarization has no major axis")
    return 0.5 * math.atan2(num, den)


def quadratures_from_intensities(rec: IntensityRecord) -> tuple[float, float]:
    """(Re E_V / E_H, Im E_V / E_H) recovered from basis intensities.

    Im E_V/E_H = (I_L - I_R) / (2 I_H) and
    Re E_V/E_H = sqrt(4 I_V I_H - (I_L - I_R)^2) / (2 I_H).  The square root
    loses the sign of the real quadrature; the non-negative root is returned.
    Radicands in [-1e-12, 0) are treated as rounding and clamped to zero.
    """
    if rec.i_h <= 0:
        raise ZeroHorizontal("quadrature ratios undefined without horizontal power")
    diff = rec.i_l - rec.i_r
    radicand = 4.0 * rec.i_v * rec.i_h - diff * diff
    if radicand < -1e-12:
        raise ValueError("inconsistent intensity record: negative radicand")
    im_ratio = diff / (2.0 * rec.i_h)
    re_ratio = math.sqrt(max(radicand, 0.0)) / (2.0 * rec.i_h)
    return re_ratio, im_ratio


def rotate(state: PolarizationState, angle: float) -> PolarizationState:
    """Rotate the polarization plane by ``angle`` (power preserving, not re-phased)."""
    c, s = math.cos(angle), math.sin(angle)
    return PolarizationState(c * state.e_h - s * state.e_v,
                             s * state.e_h + c * state.e_v)
