"""Command-line front end emitting plot-ready CSV data files.

Subcommands: psr-curve, spectrum, bistability, loss-sweep, ising.  Every
command is a deterministic function of (config, seed); outputs carry the
resolved-config hash in '#' comment lines and contain no timestamps, so
identical inputs give byte-identical files.

Exit codes: 0 success, 2 config/validation error, 3 I/O error, 4 oracle
refusal (--oracle beyond the enumeration guard).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .atomic import (AtomicParams, DriveField, optical_response,
                     self_rotation_angle, small_signal_gain)
from .cavity import child_seed, run_to_steady_state, sweep_loss, threshold_check
from .config import ConfigError, RunConfig
from .ising import (IsingProblem, TooLarge, brute_force_ground_state,
                    read_edge_list, solve)
from .polarization import decompose, quadratures_from_intensities
from .stats import autocorrelation, bernoulli_band, bias, filter_events

__all__ = ["main"]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, meta, header, rows) -> None:
    lines = [f"# {key} = {_fmt(value)}" for key, value in meta]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def _meta(cfg: RunConfig, command: str, extra=()) -> list:
    return [("command", command), ("config_sha256", cfg.sha256()), *extra]


def _output_path(cfg: RunConfig, args, key: str = "path") -> Path:
    if getattr(args, "output", None) and key == "path":
        return Path(args.output).resolve()
    return cfg.resolve_path("output", key)


def _seed_label(seed) -> str:
    return "-".join(str(s) for s in seed) if isinstance(seed, tuple) else str(seed)


def cmd_psr_curve(cfg: RunConfig, args) -> int:
    medium = cfg.medium()
    grid = cfg.require("sweep", "epsilon_grid")
    if grid.size == 0:
        raise ConfigError("epsilon_grid is empty")
    angles = self_rotation_angle(medium.atom, medium.intensity_ratio, grid)
    rows = [(float(e), float(a)) for e, a in zip(grid, angles)]
    meta = _meta(cfg, "psr-curve", [
        ("delta", medium.atom.delta),
        ("intensity_ratio", medium.intensity_ratio),
        ("gain_scale", medium.atom.gain_scale),
    ])
    _write_csv(_output_path(cfg, args), meta, ["epsilon", "rotation_angle"], rows)
    return 0


def cmd_spectrum(cfg: RunConfig, args) -> int:
    gain = cfg.gain_scale()
    ratio = cfg.require("medium", "intensity_ratio")
    grid = cfg.require("sweep", "delta_grid")
    if grid.size == 0:
        raise ConfigError("delta_grid is empty")
    linewidth_ghz = cfg.get("medium", "linewidth_ghz")
    gains, absorptions = [], []
    for delta in grid:
        params = AtomicParams.from_delta(float(delta), gain_scale=gain)
        gains.append(small_signal_gain(params, ratio))
        drive = DriveField.from_intensity_ratios(params, ratio / 2.0, ratio / 2.0)
        absorptions.append(optical_response(params, drive).absorption)
    # ln(I_max / I) for transmission I0 exp(-alpha): the response shifted to
    # vanish at its far-from-resonance minimum over the scanned grid.
    floor = min(absorptions)
    header = ["delta", "gain", "absorption", "absorption_ln_ratio"]
    rows = [[float(d), g, a, a - floor] for d, g, a in zip(grid, gains, absorptions)]
    if linewidth_ghz is not None:
        header.append("detuning_ghz")
        for row, delta in zip(rows, grid):
            row.append(float(delta) * linewidth_ghz)
    meta = _meta(cfg, "spectrum", [
        ("intensity_ratio", ratio),
        ("gain_scale", gain),
    ])
    _write_csv(_output_path(cfg, args), meta, header, rows)
    return 0


def cmd_bistability(cfg: RunConfig, args) -> int:
    medium = cfg.medium()
    cav = cfg.cavity(medium)
    pump = cfg.pump()
    num_events = cfg.get("montecarlo", "num_events", 700)
    base_seed = cfg.require("montecarlo", "seed")
    max_lag = cfg.require("montecarlo", "max_lag")
    if num_events < 1:
        raise ConfigError("num_events must be positive")
    if max_lag < 1:
        raise ConfigError("max_lag must be positive")

    records = []
    for i in range(num_events):
        rec = run_to_steady_state(pump, cav, medium, child_seed(base_seed, i))
        re_ratio, im_ratio = quadratures_from_intensities(decompose(rec.steady_state))
        records.append((i, rec, re_ratio, im_ratio))

    event_rows = [
        (i, _seed_label(rec.seed), rec.helicity, rec.iterations, rec.converged,
         float(re_ratio), float(im_ratio))
        for i, rec, re_ratio, im_ratio in records
    ]
    gl = medium.gain
    above, margin = threshold_check(gl, cav.eta)
    shared_meta = [
        ("num_events", num_events),
        ("base_seed", base_seed),
        ("gain", gl),
        ("eta", cav.eta),
        ("psi", cav.psi),
        ("above_threshold", above),
        ("threshold_margin", margin),
    ]
    _write_csv(_output_path(cfg, args, "events_path"),
               _meta(cfg, "bistability", shared_meta),
               ["event", "seed", "helicity", "iterations", "converged",
                "re_ratio", "im_ratio"],
               event_rows)

    seq, zero_events = filter_events(rec.helicity for _, rec, _, _ in records)
    not_converged = sum(1 for _, rec, _, _ in records if not rec.converged)
    summary_meta = shared_meta + [
        ("zero_helicity_events", zero_events),
        ("not_converged", not_converged),
        ("no_oscillation", len(seq) == 0),
    ]
    rows = []
    if len(seq) > 0:
        effective_lag = min(max_lag, len(seq) - 1)
        summary_meta += [
            ("oscillating_events", len(seq)),
            ("bias", bias(seq)),
            ("band_2sigma", bernoulli_band(len(seq), 2.0)),
            ("band_3sigma", bernoulli_band(len(seq), 3.0)),
            ("effective_max_lag", effective_lag),
        ]
        rows = list(enumerate(autocorrelation(seq, effective_lag)))
    _write_csv(_output_path(cfg, args, "summary_path"),
               _meta(cfg, "bistability-summary", summary_meta),
               ["lag", "autocorrelation"],
               rows)
    return 0


def cmd_loss_sweep(cfg: RunConfig, args) -> int:
    medium = cfg.medium()
    pump = cfg.pump()
    eta_grid = cfg.require("sweep", "eta_grid")
    if eta_grid.size == 0:
        raise ConfigError("eta_grid is empty")
    runs_per_point = cfg.require("sweep", "runs_per_point")
    seed = cfg.require("sweep", "seed")
    cav = cfg.cavity(medium, eta=float(np.max(eta_grid)))  # validates psi etc.
    try:
        points = sweep_loss(pump, medium, cav.psi, [float(e) for e in eta_grid],
                            runs_per_point, seed, noise_sigma=cav.noise_sigma,
                            max_iters=cav.max_iters, conv_tol=cav.conv_tol,
                            conv_window=cav.conv_window)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    gl = medium.gain
    rows = []
    for pt in points:
        above, _ = threshold_check(gl, pt.eta)
        rows.append((pt.eta, pt.mean_abs_re_ratio, pt.mean_abs_im_ratio,
                     pt.not_converged, above))
    meta = _meta(cfg, "loss-sweep", [
        ("gain", gl),
        ("psi", cav.psi),
        ("runs_per_point", runs_per_point),
        ("base_seed", seed),
    ])
    _write_csv(_output_path(cfg, args), meta,
               ["eta", "mean_abs_re_ratio", "mean_abs_im_ratio",
                "not_converged", "above_threshold"],
               rows)
    return 0


def cmd_ising(cfg: RunConfig, args) -> int:
    instance = cfg.resolve_path("ising", "instance")
    if not instance.is_file():
        raise ConfigError(f"instance file not found: {instance}")
    try:
        coupling = read_edge_list(instance)
        problem = IsingProblem(coupling, kappa=cfg.require("ising", "kappa"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    restarts = cfg.require("ising", "restarts")
    seed = cfg.require("ising", "seed")
    medium = cfg.medium()
    cav = cfg.cavity(medium)
    pump = cfg.pump()
    try:
        result = solve(problem, pump, cav, medium, restarts, seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    meta_extra = [
        ("instance", instance.name),
        ("n", problem.n),
        ("kappa", problem.kappa),
        ("restarts", restarts),
        ("base_seed", seed),
        ("best_energy", result.best_energy),
        ("best_spins", _spin_string(result.best.spins)),
    ]
    if args.oracle:
        _, oracle_energy = brute_force_ground_state(problem)
        meta_extra += [
            ("oracle_energy", oracle_energy),
            ("oracle_match", abs(result.best_energy - oracle_energy) < 1e-9),
        ]
    rows = [
        (i, _seed_label(rec.seed), rec.energy, rec.iterations, rec.converged,
         _spin_string(rec.spins.spins))
        for i, rec in enumerate(result.records)
    ]
    _write_csv(_output_path(cfg, args), _meta(cfg, "ising", meta_extra),
               ["restart", "seed", "energy", "iterations", "converged", "spins"],
               rows)
    return 0


def _spin_string(spins) -> str:
    return "".join("+" if s > 0 else "-" for s in spins)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psrsim",
        description="Polarization self-rotation resonator simulations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = [
        ("psr-curve", cmd_psr_curve, "rotation angle versus initial ellipticity"),
        ("spectrum", cmd_spectrum, "gain and absorption versus detuning"),
        ("bistability", cmd_bistability, "Monte Carlo campaign of oscillation events"),
        ("loss-sweep", cmd_loss_sweep, "steady-state quadratures versus cavity loss"),
        ("ising", cmd_ising, "coupled-mode Ising solve from an instance file"),
    ]
    for name, func, help_text in specs:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-c", "--config", required=True, help="config file path")
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="override a config value (repeatable)")
        p.add_argument("--output", help="override [output] path")
        if name == "ising":
            p.add_argument("--oracle", action="store_true",
                           help="also run the exhaustive ground-state oracle (N <= 24)")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = RunConfig.load(args.config, args.set)
        return args.func(cfg, args)
    except TooLarge as exc:
        print(f"psrsim: oracle refused: {exc}", file=sys.stderr)
        return 4
    except ConfigError as exc:
        print(f"psrsim: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"psrsim: i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
