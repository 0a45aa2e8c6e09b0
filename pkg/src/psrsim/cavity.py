"""Polarization-selective ring-resonator dynamics.

One roundtrip acts on the vertical field as: self-rotation in the cell at
the current ellipticity of (pump, E_V), projection onto the vertical port,
multiplication by sqrt(eta) e^{i psi}, and re-injection of a fresh
horizontal pump.  The module provides the exact map, its small-signal
linearization with threshold and optimal-phase analysis, seeded iteration
to the steady state, and loss sweeps.

The map commutes with global negation of the vertical field, E_V -> -E_V,
which exchanges the two bistable branches; the helicity of a run is the
sign of Im(E_V) at convergence.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .atomic import (AtomicParams, gain_scale_for_gain, self_rotation_angle,
                     small_signal_gain)
from .polarization import PolarizationState, decompose, quadratures_from_intensities

__all__ = [
    "CavityParams",
    "Medium",
    "RunRecord",
    "SweepPoint",
    "InvalidEta",
    "roundtrip",
    "rotated_vertical",
    "linear_transfer_matrix",
    "spectral_radius",
    "max_spectral_radius",
    "threshold_check",
    "optimal_phase",
    "run_to_steady_state",
    "sweep_loss",
    "child_seed",
]


class InvalidEta(ValueError):
    """Roundtrip transmission outside (0, 1]."""


@dataclass(frozen=True)
class Medium:
    """Atomic medium together with the operating intensity ratio I/I_sat."""

    atom: AtomicParams
    intensity_ratio: float

    def __post_init__(self):
        if self.intensity_ratio < 0:
            raise ValueError("intensity_ratio must be non-negative")

    @property
    def gain(self) -> float:
        """Small-signal self-rotation parameter gl at this intensity."""
        return small_signal_gain(self.atom, self.intensity_ratio)

    @classmethod
    def with_gain(cls, gl: float, delta: float = 0.1,
                  intensity_ratio: float = 10.0) -> "Medium":
        """Medium tuned (via the gain scale) to a target small-signal gain."""
        c = gain_scale_for_gain(gl, delta, intensity_ratio)
        return cls(AtomicParams.from_delta(delta, gain_scale=c), intensity_ratio)


@dataclass(frozen=True)
class CavityParams:
    """Resonator settings and convergence controls for the iterated map.

    ``conv_window`` consecutive sub-tolerance steps are required before a run
    is declared converged, which avoids stopping inside slow spirals at
    phases far from the optimum.  ``per_pass_noise`` optionally adds a fresh
    complex Gaussian kick each roundtrip (off by default; the physical noise
    model is a single seeded initial fluctuation).
    """

    eta: float
    psi: float
    noise_sigma: float
    max_iters: int = 20000
    conv_tol: float = 1e-10
    conv_window: int = 10
    per_pass_noise: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise InvalidEta("eta must lie in [0, 1]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if self.conv_tol <= 0:
            raise ValueError("conv_tol must be positive")
        if self.max_iters < 1 or self.conv_window < 1:
            raise ValueError("max_iters and conv_window must be positive")
        if self.per_pass_noise < 0:
            raise ValueError("per_pass_noise must be non-negative")


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one seeded run to the steady state."""

    steady_state: PolarizationState
    helicity: int
    iterations: int
    converged: bool
    seed: object
    trajectory: tuple | None = None


@dataclass(frozen=True)
class SweepPoint:
    """Aggregated steady-state quadrature ratios at one loss setting."""

    eta: float
    mean_abs_re_ratio: float
    mean_abs_im_ratio: float
    not_converged: int


def child_seed(base, *indices: int) -> tuple:
    """Deterministic per-run seed: the base entropy extended by run indices.

    This is the seed-splitting rule used by sweeps, campaigns and restarts;
    the resulting tuple feeds ``numpy.random.SeedSequence``.
    """
    if isinstance(base, (tuple, list)):
        return tuple(base) + tuple(indices)
    return (base,) + tuple(indices)


def _rng(seed) -> np.random.Generator:
    entropy = tuple(seed) if isinstance(seed, (tuple, list)) else seed
    return np.random.default_rng(np.random.SeedSequence(entropy))


def rotated_vertical(e_v: complex, pump: float, medium: Medium) -> complex:
    """Vertical field after one pass through the self-rotating cell.

    Applies the rotation by phi(eps) to (pump, e_v) and keeps the vertical
    row; the ellipticity uses the full arcsine definition since steady
    states leave the small-ellipticity regime.
    """
    eps = math.asin(pump * e_v.imag / (pump * pump + abs(e_v) ** 2))
    phi = self_rotation_angle(medium.atom, medium.intensity_ratio, eps)
    return math.sin(phi) * pump + math.cos(phi) * e_v


def roundtrip(state: PolarizationState, pump: float, cav: CavityParams,
              medium: Medium) -> PolarizationState:
    """One full roundtrip: rotation, vertical projection, loss and phase, fresh pump."""
    if pump <= 0:
        raise ValueError("pump must be positive")
    feedback = math.sqrt(cav.eta) * cmath.exp(1j * cav.psi)
    return PolarizationState(pump, feedback * rotated_vertical(state.e_v, pump, medium))


def linear_transfer_matrix(gl: float, cav: CavityParams) -> np.ndarray:
    """2x2 real map of (Re E_V, Im E_V) for infinitesimal vertical fields.

    Equals sqrt(eta) R(psi) [[1, gl], [0, 1]]: the shear admixes the
    imaginary quadrature into the real one, then the cavity rotates and
    attenuates.
    """
    c, s = math.cos(cav.psi), math.sin(cav.psi)
    root_eta = math.sqrt(cav.eta)
    return root_eta * np.array([[c, gl * c - s],
                                [s, gl * s + c]])


def spectral_radius(gl: float, eta: float, psi) -> np.ndarray | float:
    """Spectral radius of the linear transfer matrix; vectorizes over psi.

    The eigenvalues satisfy lambda^2 - tr lambda + eta = 0 with
    tr = sqrt(eta)(2 cos psi + gl sin psi); complex pairs sit on the circle
    of radius sqrt(eta).
    """
    tr = math.sqrt(eta) * (2.0 * np.cos(psi) + gl * np.sin(psi))
    disc = tr * tr - 4.0 * eta
    grown = (np.abs(tr) + np.sqrt(np.where(disc > 0.0, disc, 0.0))) / 2.0
    out = np.where(disc >= 0.0, grown, math.sqrt(eta))
    return float(out) if np.ndim(out) == 0 else out


def max_spectral_radius(gl: float, eta: float) -> float:
    """Largest spectral radius over all roundtrip phases, sqrt(eta)(sqrt(4+gl^2)+|gl|)/2."""
    return math.sqrt(eta) * (math.sqrt(4.0 + gl * gl) + abs(gl)) / 2.0


def threshold_check(gl: float, eta: float) -> tuple[bool, float]:
    """Whether gl exceeds the oscillation threshold, and by how much.

    Returns (above, margin) with margin = gl - (1/sqrt(eta) - sqrt(eta)); the
    closed form coincides with requiring the phase-maximized spectral radius
    of the linear map to exceed unity.
    """
    if eta <= 0 or eta > 1:
        raise InvalidEta("eta must lie in (0, 1]")
    margin = gl - (1.0 / math.sqrt(eta) - math.sqrt(eta))
    return margin > 0, margin


def optimal_phase(gl: float) -> float:
    """Roundtrip phase arctan(gl/2) that maximizes the linear gain."""
    return math.atan(gl / 2.0)


def run_to_steady_state(pump: float, cav: CavityParams, medium: Medium, rng_seed,
                        conjugate_seed: bool = False,
                        record_trajectory: bool = False) -> RunRecord:
    """Iterate the roundtrip map from a seeded vacuum fluctuation.

    The vertical field starts as a complex Gaussian with per-quadrature
    standard deviation ``noise_sigma`` drawn from ``rng_seed`` (optionally
    conjugated), and the map is iterated until the change stays below
    ``conv_tol`` for ``conv_window`` consecutive passes or ``max_iters`` is
    reached.  Deterministic for a fixed seed.  Helicity 0 is assigned when
    the final |Im E_V| is below ``conv_tol``, so sub-threshold runs do not
    fabricate a sign.
    """
    if pump <= 0:
        raise ValueError("pump must be positive")
    rng = _rng(rng_seed)
    z = rng.standard_normal(2)
    e_v = complex(cav.noise_sigma * z[0], cav.noise_sigma * z[1])
    if conjugate_seed:
        e_v = e_v.conjugate()
    feedback = math.sqrt(cav.eta) * cmath.exp(1j * cav.psi)
    trajectory = [e_v] if record_trajectory else None
    streak = 0
    iterations = 0
    converged = False
    for _ in range(cav.max_iters):
        new = feedback * rotated_vertical(e_v, pump, medium)
        if cav.per_pass_noise > 0.0:
            kick = rng.standard_normal(2)
            new += complex(cav.per_pass_noise * kick[0], cav.per_pass_noise * kick[1])
        iterations += 1
        streak = streak + 1 if abs(new - e_v) < cav.conv_tol else 0
        e_v = new
        if trajectory is not None:
            trajectory.append(e_v)
        if streak >= cav.conv_window:
            converged = True
            break
    if abs(e_v.imag) < cav.conv_tol:
        helicity = 0
    else:
        helicity = 1 if e_v.imag > 0 else -1
    return RunRecord(
        steady_state=PolarizationState(pump, e_v),
        helicity=helicity,
        iterations=iterations,
        converged=converged,
        seed=rng_seed,
        trajectory=tuple(trajectory) if trajectory is not None else None,
    )


def sweep_loss(pump: float, medium: Medium, psi: float, eta_grid, runs_per_point: int,
               rng_seed, noise_sigma: float = 1e-6, max_iters: int = 20000,
               conv_tol: float = 1e-10, conv_window: int = 10) -> list[SweepPoint]:
    """Steady-state quadrature ratios versus roundtrip transmission.

    Runs ``runs_per_point`` seeded realizations per eta (seeds split by grid
    and run index) and averages |Re E_V|/E_H and |Im E_V|/E_H extracted from
    the decomposed steady state.  Rows follow the order of ``eta_grid``.
    """
    eta_grid = [float(e) for e in eta_grid]
    if not eta_grid:
        raise ValueError("eta_grid must be non-empty")
    if runs_per_point < 1:
        raise ValueError("runs_per_point must be positive")
    for eta in eta_grid:
        if not 0.0 < eta <= 1.0:
            raise InvalidEta("every eta must lie in (0, 1]")
    base = CavityParams(eta=eta_grid[0], psi=psi, noise_sigma=noise_sigma,
                        max_iters=max_iters, conv_tol=conv_tol,
                        conv_window=conv_window)
    points = []
    for i, eta in enumerate(eta_grid):
        cav = replace(base, eta=eta)
        re_sum = im_sum = 0.0
        failures = 0
        for j in range(runs_per_point):
            rec = run_to_steady_state(pump, cav, medium, child_seed(rng_seed, i, j))
            if not rec.converged:
                failures += 1
            re_ratio, im_ratio = quadratures_from_intensities(decompose(rec.steady_state))
            re_sum += abs(re_ratio)
            im_sum += abs(im_ratio)
        points.append(SweepPoint(eta=eta,
                                 mean_abs_re_ratio=re_sum / runs_per_point,
                                 mean_abs_im_ratio=im_sum / runs_per_point,
                                 not_converged=failures))
    return points
