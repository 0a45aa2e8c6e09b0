"""Statistics of binary helicity sequences from repeated oscillation events."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "HelicitySequence",
    "LagTooLarge",
    "filter_events",
    "autocorrelation",
    "bernoulli_band",
    "bias",
]


class LagTooLarge(ValueError):
    """Requested autocorrelation lag reaches past the sequence."""


@dataclass(frozen=True)
class HelicitySequence:
    """Ordered +/-1 outcomes; zero-helicity events are excluded upstream."""

    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        if any(v not in (-1, 1) for v in values):
            raise ValueError("helicity values must be -1 or +1")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


def filter_events(helicities: Iterable[int]) -> tuple[HelicitySequence, int]:
    """Split raw event helicities into a +/-1 sequence and a zero count."""
    kept = []
    zeros = 0
    for h in helicities:
        if h == 0:
            zeros += 1
        else:
            kept.append(h)
    return HelicitySequence(tuple(kept)), zeros


def autocorrelation(seq: HelicitySequence, max_lag: int) -> list[float]:
    """K(m) = <s_n s_{n+m}> for m = 0..max_lag.

    Each lag is normalized by its actual number of terms (the unbiased
    estimator), which keeps |K| <= 1; K(0) is exactly 1.
    """
    m_len = len(seq)
    if not 0 <= max_lag < m_len:
        raise LagTooLarge(f"max_lag must lie in [0, {m_len - 1}]")
    s = np.asarray(seq.values, dtype=np.int64)
    out = [1.0]
    for m in range(1, max_lag + 1):
        out.append(float(np.dot(s[:m_len - m], s[m:])) / (m_len - m))
    return out


def bernoulli_band(num_events: int, confidence_sigmas: float) -> float:
    """Half-width of the K(m) confidence band for ideal fair +/-1 draws.

    The standard deviation of K(m >= 1) for independent fair outcomes is
    1/sqrt(M) to leading order, so the band is confidence_sigmas/sqrt(M).
    """
    if num_events <= 0:
        raise ValueError("num_events must be positive")
    return confidence_sigmas / math.sqrt(num_events)


def bias(seq: HelicitySequence) -> float:
    """Fraction of +1 outcomes."""
    if len(seq) == 0:
        raise ValueError("bias undefined for an empty sequence")
    return sum(1 for v in seq.values if v == 1) / len(seq)
