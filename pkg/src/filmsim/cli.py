"""Command-line entry point: ``filmsim <mode> --config <path> [--out <dir>]``.

Exit codes: 0 on success, 1 on a configuration error, 2 on a numerical
failure.  ``FILMSIM_THREADS`` caps worker parallelism in ``compare`` mode.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments as ex
from . import io
from .config import RunConfig, format_value, load_config
from .errors import ConfigError, FilmsimError

MODES = ("stability-sweep", "simulate-full", "simulate-gaptooth", "eigs", "compare")
log = logging.getLogger("filmsim")


def config_comments(cfg: RunConfig, mode: str):
    yield f"mode = {mode}"
    for key, value in cfg.items():
        yield f"{key} = {format_value(value)}"


def full_snapshot_records(run: ex.FullRun):
    for t, state in zip(run.times, run.states):
        grid = state.grid
        for x, v in zip(grid.x_h, state.h):
            yield (t, x, "h", v)
        for x, a, b in zip(grid.x_u, state.u1, state.u2):
            yield (t, x, "u1", a)
            yield (t, x, "u2", b)


def patch_snapshot_records(run: ex.PatchRun):
    lay = run.system.layout
    entries = lay.dof_map.entries
    for t, y in zip(run.times, run.states):
        for (j, i, fld), v in zip(entries, y):
            yield (t, j, lay.x(j, i), fld, v)


def _write(out: Path, name, records, columns, comments):
    path = io.emit_csv(records, out / name, columns, comments)
    log.info("wrote %s", path)


def run_mode(mode: str, cfg: RunConfig, out: Path) -> int:
    comments = list(config_comments(cfg, mode))
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    if mode == "stability-sweep":
        rates = ex.stability_sweep(cfg)
        _write(out, "growth_rates.csv", io.growth_records(rates), io.GROWTH_COLUMNS, comments)
    elif mode == "simulate-full":
        run = ex.run_full(cfg)
        _write(out, "full_snapshots.csv", full_snapshot_records(run),
               io.FULL_SNAPSHOT_COLUMNS, comments)
    elif mode == "simulate-gaptooth":
        run = ex.run_gaptooth(cfg)
        _write(out, "gaptooth_snapshots.csv", patch_snapshot_records(run),
               io.PATCH_SNAPSHOT_COLUMNS, comments)
    elif mode == "eigs":
        result = ex.spectrum(cfg)
        _write(out, "spectrum.csv", io.spectrum_records(result), io.SPECTRUM_COLUMNS, comments)
    elif mode == "compare":
        report = ex.run_compare(cfg)
        notes = comments + [f"failure {name} at t={t}: {msg}" for name, msg, t in report.failures]
        _write(out, "comparison.csv", (r.as_tuple() for r in report.rows),
               io.COMPARISON_COLUMNS, notes)
        if report.full is not None:
            _write(out, "full_snapshots.csv", full_snapshot_records(report.full),
                   io.FULL_SNAPSHOT_COLUMNS, comments)
        if report.gaptooth is not None:
            _write(out, "gaptooth_snapshots.csv", patch_snapshot_records(report.gaptooth),
                   io.PATCH_SNAPSHOT_COLUMNS, comments)
        if report.failures:
            for name, msg, _ in report.failures:
                log.error("%s run failed: %s", name, msg)
            return 2
    else:  # argparse restricts the choices
        raise ConfigError(f"unknown mode {mode!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="filmsim", description=__doc__.splitlines()[0])
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", type=Path, help="key = value configuration file")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else RunConfig().validate()
        ex.thread_count()
        return run_mode(args.mode, cfg, args.out)
    except (ConfigError, io.CsvError) as exc:
        log.error("configuration error: %s", exc)
        return 1
    except FilmsimError as exc:
        log.error("numerical failure: %s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
