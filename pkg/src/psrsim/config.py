"""Run configuration: a flat-sectioned key-value file with CLI overrides.

The file uses INI syntax with one section per concern ('#' comments allowed).
All keys are declared in the schema below; unknown sections or keys are
rejected so typos cannot silently change a run.  Seeds are ordinary config
values and must be given explicitly wherever a command consumes randomness;
there are no wall-clock defaults anywhere.

Grids are written either as 'start:stop:num' (inclusive linspace) or as a
comma-separated list of values.
"""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .atomic import AtomicParams, gain_scale_for_gain
from .cavity import CavityParams, Medium, optimal_phase

__all__ = ["ConfigError", "RunConfig"]


class ConfigError(ValueError):
    """Invalid, missing or contradictory configuration input."""


def _parse_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {raw!r}")
    return value


def _parse_int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"expected an integer, got {raw!r}") from None


def _parse_grid(raw: str) -> np.ndarray:
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid spec must be start:stop:num, got {raw!r}")
        start, stop = _parse_float(parts[0]), _parse_float(parts[1])
        num = _parse_int(parts[2])
        if num < 1:
            raise ConfigError("grid point count must be positive")
        return np.linspace(start, stop, num)
    values = [p for p in raw.split(",") if p.strip()]
    if not values:
        raise ConfigError("grid must be non-empty")
    return np.array([_parse_float(p) for p in values])


def _parse_psi(raw: str):
    if raw.strip().lower() == "optimal":
        return "optimal"
    return _parse_float(raw)


def _parse_str(raw: str) -> str:
    return raw.strip()


_SCHEMA = {
    "medium": {
        "delta": _parse_float,
        "gamma_big": _parse_float,
        "gamma_small": _parse_float,
        "detuning": _parse_float,
        "intensity_ratio": _parse_float,
        "gain_scale": _parse_float,
        "target_gain": _parse_float,
        "linewidth_ghz": _parse_float,
    },
    "cavity": {
        "eta": _parse_float,
        "psi": _parse_psi,
        "noise_sigma": _parse_float,
        "max_iters": _parse_int,
        "conv_tol": _parse_float,
        "conv_window": _parse_int,
        "per_pass_noise": _parse_float,
        "pump": _parse_float,
    },
    "sweep": {
        "epsilon_grid": _parse_grid,
        "delta_grid": _parse_grid,
        "eta_grid": _parse_grid,
        "runs_per_point": _parse_int,
        "seed": _parse_int,
    },
    "montecarlo": {
        "num_events": _parse_int,
        "seed": _parse_int,
        "max_lag": _parse_int,
    },
    "ising": {
        "instance": _parse_str,
        "kappa": _parse_float,
        "restarts": _parse_int,
        "seed": _parse_int,
    },
    "output": {
        "path": _parse_str,
        "events_path": _parse_str,
        "summary_path": _parse_str,
    },
}


@dataclass
class RunConfig:
    """Parsed and validated configuration values plus their base directory."""

    values: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    @classmethod
    def load(cls, path, overrides=()) -> "RunConfig":
        """Read a config file, apply 'section.key=value' overrides, validate keys."""
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config file: {exc}") from None
        cfg = cls(values={}, base_dir=path.resolve().parent)
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                cfg._set(section, key, raw)
        for item in overrides:
            cfg._apply_override(item)
        return cfg

    def _set(self, section: str, key: str, raw: str) -> None:
        keys = _SCHEMA.get(section)
        if keys is None:
            raise ConfigError(f"unknown config section [{section}]")
        if key not in keys:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
        self.values.setdefault(section, {})[key] = keys[key](raw)

    def _apply_override(self, item: str) -> None:
        if "=" not in item:
            raise ConfigError(f"override must look like section.key=value: {item!r}")
        target, raw = item.split("=", 1)
        if "." not in target:
            raise ConfigError(f"override must look like section.key=value: {item!r}")
        section, key = target.split(".", 1)
        self._set(section.strip(), key.strip(), raw.strip())

    def get(self, section: str, key: str, default=None):
        return self.values.get(section, {}).get(key, default)

    def require(self, section: str, key: str):
        value = self.get(section, key)
        if value is None:
            raise ConfigError(f"missing required config value [{section}] {key}")
        return value

    # -- resolution helpers ------------------------------------------------

    def atomic_params(self) -> AtomicParams:
        """Medium parameters from either the delta route or the explicit rates."""
        has_delta = self.get("medium", "delta") is not None
        rate_keys = ("gamma_big", "gamma_small", "detuning")
        has_rates = any(self.get("medium", k) is not None for k in rate_keys)
        if has_delta and has_rates:
            raise ConfigError("give either [medium] delta or the explicit rates, not both")
        gain = self.gain_scale()
        if has_delta:
            return AtomicParams.from_delta(self.require("medium", "delta"), gain_scale=gain)
        if not all(self.get("medium", k) is not None for k in rate_keys):
            raise ConfigError("medium needs delta, or all of gamma_big/gamma_small/detuning")
        return AtomicParams(
            gamma_big=self.require("medium", "gamma_big"),
            gamma_small=self.require("medium", "gamma_small"),
            detuning=self.require("medium", "detuning"),
            gain_scale=gain,
        )

    def _delta(self) -> float:
        if self.get("medium", "delta") is not None:
            return self.get("medium", "delta")
        gb = self.require("medium", "gamma_big")
        gs = self.require("medium", "gamma_small")
        return self.require("medium", "detuning") / (gb + gs)

    def gain_scale(self) -> float:
        """The proportionality constant C, given directly or via a target gain."""
        direct = self.get("medium", "gain_scale")
        target = self.get("medium", "target_gain")
        if direct is not None and target is not None:
            raise ConfigError("give either gain_scale or target_gain, not both")
        if direct is not None:
            return direct
        if target is not None:
            return gain_scale_for_gain(target, self._delta(),
                                       self.require("medium", "intensity_ratio"))
        raise ConfigError("missing required config value [medium] gain_scale or target_gain")

    def medium(self) -> Medium:
        return Medium(self.atomic_params(), self.require("medium", "intensity_ratio"))

    def cavity(self, medium: Medium | None = None, eta: float | None = None) -> CavityParams:
        """Cavity settings; psi = 'optimal' resolves against the medium gain."""
        psi = self.require("cavity", "psi")
        if psi == "optimal":
            if medium is None:
                medium = self.medium()
            psi = optimal_phase(medium.gain)
        if eta is None:
            eta = self.require("cavity", "eta")
        try:
            return CavityParams(
                eta=eta,
                psi=psi,
                noise_sigma=self.require("cavity", "noise_sigma"),
                max_iters=self.get("cavity", "max_iters", 20000),
                conv_tol=self.get("cavity", "conv_tol", 1e-10),
                conv_window=self.get("cavity", "conv_window", 10),
                per_pass_noise=self.get("cavity", "per_pass_noise", 0.0),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def pump(self) -> float:
        pump = self.get("cavity", "pump", 1.0)
        if pump <= 0:
            raise ConfigError("pump must be positive")
        return pump

    def resolve_path(self, section: str, key: str) -> Path:
        return (self.base_dir / self.require(section, key)).resolve()

    # -- reproducibility ---------------------------------------------------

    def canonical_text(self) -> str:
        """Stable textual form of every resolved value, for hashing and echo."""
        lines = []
        for section in sorted(self.values):
            for key in sorted(self.values[section]):
                value = self.values[section][key]
                if isinstance(value, np.ndarray):
                    rendered = ",".join(repr(float(v)) for v in value)
                elif isinstance(value, float):
                    rendered = repr(value)
                else:
                    rendered = str(value)
                lines.append(f"{section}.{key} = {rendered}")
        return "\n".join(lines)

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()
