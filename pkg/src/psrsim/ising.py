"""Coupled-mode coherent-Ising-machine dynamics and exact small-instance oracles.

N vertical-polarization modes share the nonlinear cell and are mixed inside
the feedback arm by a programmable coupling matrix: after the per-mode
self-rotation stage, mode i receives kappa * sum_k J_ik of the other rotated
fields together with the common loss and phase.  Spins are read out as the
sign of Im(E_V) per mode, and instances are exchanged in a plain-text edge
list (first line N, then ``i k J_ik`` with 0-based indices).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cavity import CavityParams, Medium, child_seed, rotated_vertical, _rng
from .polarization import PolarizationState

__all__ = [
    "IsingProblem",
    "SpinConfiguration",
    "RestartRecord",
    "SolveResult",
    "DimensionMismatch",
    "TooLarge",
    "ising_energy",
    "coupled_roundtrip",
    "solve",
    "brute_force_ground_state",
    "read_edge_list",
    "write_edge_list",
    "coupling_from_maxcut",
]

_ENUM_LIMIT = 24


class DimensionMismatch(ValueError):
    """Coupling matrix and spin/mode vector sizes disagree."""


class TooLarge(ValueError):
    """Exhaustive enumeration refused beyond the size guard."""


@dataclass(frozen=True)
class IsingProblem:
    """Symmetric zero-diagonal coupling matrix with a global coupling strength."""

    j: np.ndarray
    kappa: float = 0.0

    def __post_init__(self):
        j = np.array(self.j, dtype=float)
        if j.ndim != 2 or j.shape[0] != j.shape[1]:
            raise ValueError("coupling matrix must be square")
        if not np.array_equal(j, j.T):
            raise ValueError("coupling matrix must be symmetric")
        if np.any(np.diag(j) != 0):
            raise ValueError("coupling matrix must have a zero diagonal")
        if not (self.kappa >= 0 and math.isfinite(self.kappa)):
            raise ValueError("kappa must be non-negative and finite")
        j.setflags(write=False)
        object.__setattr__(self, "j", j)

    @property
    def n(self) -> int:
        return self.j.shape[0]


@dataclass(frozen=True)
class SpinConfiguration:
    """One +/-1 assignment per mode."""

    spins: tuple[int, ...]

    def __post_init__(self):
        spins = tuple(int(s) for s in self.spins)
        if any(s not in (-1, 1) for s in spins):
            raise ValueError("spins must be -1 or +1")
        object.__setattr__(self, "spins", spins)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.spins, dtype=float)


@dataclass(frozen=True)
class RestartRecord:
    spins: SpinConfiguration
    energy: float
    iterations: int
    converged: bool
    seed: tuple


@dataclass(frozen=True)
class SolveResult:
    best: SpinConfiguration
    best_energy: float
    records: tuple[RestartRecord, ...]


def ising_energy(problem: IsingProblem, config: SpinConfiguration) -> float:
    """H = -sum_{i<k} J_ik s_i s_k."""
    if len(config.spins) != problem.n:
        raise DimensionMismatch("spin configuration does not match the problem size")
    s = config.as_array()
    return float(-0.5 * s @ problem.j @ s)


def coupled_roundtrip(states: list[PolarizationState], problem: IsingProblem,
                      pump: float, cav: CavityParams,
                      medium: Medium) -> list[PolarizationState]:
    """One roundtrip of all modes with feedback-arm coupling.

    Each mode passes the cell independently; the rotated vertical fields are
    then mixed as v_i + kappa sum_k J_ik v_k before the common loss, phase
    and pump re-injection.  With kappa = 0 this reduces exactly to N
    independent single-mode roundtrips, and the map commutes with global
    negation of all vertical fields.
    """
    if len(states) != problem.n:
        raise DimensionMismatch("number of modes does not match the problem size")
    if pump <= 0:
        raise ValueError("pump must be positive")
    rotated = [rotated_vertical(st.e_v, pump, medium) for st in states]
    if problem.kappa != 0.0:
        mixed = np.asarray(rotated) + problem.kappa * (problem.j @ np.asarray(rotated))
    else:
        mixed = rotated
    feedback = math.sqrt(cav.eta) * cmath.exp(1j * cav.psi)
    return [PolarizationState(pump, feedback * v) for v in mixed]


def _spins_from_fields(e_v: np.ndarray) -> SpinConfiguration:
    # Im == 0 (no oscillation) maps to +1; only occurs below threshold.
    return SpinConfiguration(tuple(1 if v >= 0 else -1 for v in e_v.imag))


def solve(problem: IsingProblem, pump: float, cav: CavityParams, medium: Medium,
          restarts: int, rng_seed) -> SolveResult:
    """Relax the coupled modes from seeded noise and keep the best spin readout.

    Every restart draws independent per-mode complex Gaussian seeds (seed
    split by restart index), iterates ``coupled_roundtrip`` under the usual
    convergence controls, reads spins from the helicities and scores them
    with ``ising_energy``.  Deterministic for a fixed seed; non-converged
    restarts are flagged in their records but still scored.
    """
    if restarts < 1:
        raise ValueError("restarts must be positive")
    if pump <= 0:
        raise ValueError("pump must be positive")
    n = problem.n
    feedback = math.sqrt(cav.eta) * cmath.exp(1j * cav.psi)
    records = []
    best = None
    best_energy = math.inf
    for r in range(restarts):
        seed = child_seed(rng_seed, r)
        rng = _rng(seed)
        z = rng.standard_normal((2, n))
        e_v = cav.noise_sigma * (z[0] + 1j * z[1])
        streak = 0
        iterations = 0
        converged = False
        for _ in range(cav.max_iters):
            rotated = np.array([rotated_vertical(complex(v), pump, medium) for v in e_v])
            if problem.kappa != 0.0:
                rotated += problem.kappa * (problem.j @ rotated)
            new = feedback * rotated
            iterations += 1
            if not np.all(np.isfinite(new.view(float))):
                break
            streak = streak + 1 if np.abs(new - e_v).max() < cav.conv_tol else 0
            e_v = new
            if streak >= cav.conv_window:
                converged = True
                break
        spins = _spins_from_fields(e_v)
        energy = ising_energy(problem, spins)
        records.append(RestartRecord(spins=spins, energy=energy,
                                     iterations=iterations, converged=converged,
                                     seed=seed))
        if energy < best_energy:
            best, best_energy = spins, energy
    return SolveResult(best=best, best_energy=best_energy, records=tuple(records))


def _spin_table(num_bits: int, offset: int, count: int) -> np.ndarray:
    """Spin rows for enumeration indices [offset, offset+count); bit 0 is spin 0.

    The index runs in lexicographic order of the spin vector under +1 < -1,
    so the first minimizer found is the lexicographically smallest one.
    """
    idx = np.arange(offset, offset + count, dtype=np.int64)[:, None]
    shifts = np.arange(num_bits - 1, -1, -1, dtype=np.int64)
    return 1.0 - 2.0 * ((idx >> shifts) & 1)


def brute_force_ground_state(problem: IsingProblem) -> tuple[SpinConfiguration, float]:
    """Exhaustive minimum over all 2^N configurations (N <= 24).

    Ties are broken toward the lexicographically smallest spin vector with
    +1 ordered before -1.
    """
    n = problem.n
    if n > _ENUM_LIMIT:
        raise TooLarge(f"enumeration guard: N = {n} exceeds {_ENUM_LIMIT}")
    j = problem.j
    best_energy = math.inf
    best_index = 0
    chunk = 1 << min(n, 16)
    total = 1 << n
    for offset in range(0, total, chunk):
        s = _spin_table(n, offset, min(chunk, total - offset))
        energies = -0.5 * np.einsum("bi,ij,bj->b", s, j, s)
        k = int(np.argmin(energies))
        if energies[k] < best_energy:
            best_energy = float(energies[k])
            best_index = offset + k
    spins = _spin_table(n, best_index, 1)[0]
    return SpinConfiguration(tuple(int(v) for v in spins)), best_energy


def read_edge_list(path) -> np.ndarray:
    """Parse an instance file into a symmetric zero-diagonal coupling matrix.

    Format: first line N, then one ``i k J_ik`` line per coupled pair with
    0-based indices.  Blank lines and lines starting with '#' are ignored;
    repeating an unordered pair is an error.
    """
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    rows = [ln for ln in lines if ln and not ln.startswith("#")]
    if not rows:
        raise ValueError("empty instance file")
    try:
        n = int(rows[0])
    except ValueError:
        raise ValueError(f"invalid size line: {rows[0]!r}") from None
    if n < 1:
        raise ValueError("instance size must be positive")
    j = np.zeros((n, n))
    seen = set()
    for ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ValueError(f"invalid edge line: {ln!r}")
        try:
            i, k, val = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ValueError(f"invalid edge line: {ln!r}") from None
        if not (0 <= i < n and 0 <= k < n) or i == k:
            raise ValueError(f"edge indices out of range: {ln!r}")
        pair = (min(i, k), max(i, k))
        if pair in seen:
            raise ValueError(f"duplicate edge: {ln!r}")
        seen.add(pair)
        j[i, k] = j[k, i] = val
    return j


def write_edge_list(path, j: np.ndarray) -> None:
    """Write a coupling matrix in the edge-list format read by ``read_edge_list``."""
    j = np.asarray(j, dtype=float)
    IsingProblem(j)  # validates shape, symmetry, diagonal
    n = j.shape[0]
    lines = [str(n)]
    for i in range(n):
        for k in range(i + 1, n):
            if j[i, k] != 0.0:
                lines.append(f"{i} {k} {float(j[i, k])!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def coupling_from_maxcut(weights: np.ndarray) -> np.ndarray:
    """Ising couplings whose ground state is a maximum cut of the weighted graph.

    Maximizing the cut of w is minimizing H with J = -w, up to the constant
    sum(w)/2; this is the only MAX-CUT reduction provided.
    """
    w = np.asarray(weights, dtype=float)
    IsingProblem(w)
    return -w
