"""Run drivers shared by the CLI and the acceptance checks.

Each driver takes a resolved :class:`RunConfig` and returns plain result
objects; writing files is left to :mod:`filmsim.cli`.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .errors import ConfigError, FilmsimError
from .gaptooth import (CouplingConfig, GapToothSystem, PatchLayout, Spectrum,
                       SpectrumThresholds, build_layout, jacobian_spectrum)
from .grid import FlowField, FullGrid, full_rhs_vector, mass
from .integrate import IntegrationResult, IntegratorConfig, integrate
from .model import ModelParams
from .stability import GrowthRates, equilibrium_velocities, growth_rate_sweep

# positions closer than this fraction of L count as the same point when
# sharing the noise realisation between the two solvers
_SHARED_POINT_TOL = 1e-9


def model_params(cfg: RunConfig) -> ModelParams:
    m = cfg.model
    return ModelParams(re=m.re, tan_theta=m.tan_theta, c_reg=m.c_reg, gamma=m.gamma)


def patch_layout(cfg: RunConfig) -> PatchLayout:
    p = cfg.patches
    return build_layout(p.m, p.D, p.r, p.n)


def coupling_config(cfg: RunConfig) -> CouplingConfig:
    p = cfg.patches
    return CouplingConfig(degree=p.degree, interpolation=p.interpolation,
                          edge_lift_h2=p.edge_lift_h2, edge_rates=p.edge_rates)


def full_grid(cfg: RunConfig) -> FullGrid:
    return FullGrid(cfg.length, cfg.grid.n_cells)


def integrator_config(cfg: RunConfig) -> IntegratorConfig:
    i = cfg.integrator
    try:
        return IntegratorConfig(rtol=i.rtol, atol=i.atol, first_step=i.first_step,
                                max_step=i.max_step, max_newton=i.max_newton)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def thread_count() -> int:
    """Worker cap from ``FILMSIM_THREADS`` (default: CPU count)."""
    raw = os.environ.get("FILMSIM_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"FILMSIM_THREADS must be a positive integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigError(f"FILMSIM_THREADS must be a positive integer, got {raw!r}")
    return value


# -- initial conditions -------------------------------------------------------

@dataclass
class InitialCondition:
    full: FlowField | None
    gaptooth: np.ndarray | None


def _profile(cfg: RunConfig):
    a, q, L = cfg.init.amplitude, cfg.init.mode, cfg.length
    return lambda x: 1.0 + a * np.sin(2 * np.pi * q * np.asarray(x) / L)


def make_initial_condition(cfg: RunConfig, full=True, gaptooth=True) -> InitialCondition:
    """Seeded initial states for the requested solvers.

    ``h = 1 + a sin(2 pi q x / L) + noise`` with noise uniform in
    ``[-noise, noise]``; the layer velocities are the constants ``init.u1``
    and ``init.u2``.  When both states are built, the noise realisation is
    drawn on the patch depth points and copied to full-grid depth points that
    coincide with one of them; other full-grid points get no noise.
    """
    ic = cfg.init
    if abs(ic.amplitude) + ic.noise >= 1:
        raise ConfigError("init.amplitude + init.noise must stay below 1")
    rng = np.random.default_rng(ic.seed)
    prof = _profile(cfg)
    L = cfg.length
    y_gt = flow = None

    gt_noise = None
    if gaptooth:
        system = GapToothSystem(patch_layout(cfg), model_params(cfg), coupling_config(cfg))
        lay = system.layout
        y_gt = system.sample_state(prof, lambda x: ic.u1, lambda x: ic.u2)
        h_off = [k for k, (_, _, fld) in enumerate(lay.dof_map.entries) if fld == "h"]
        h_pos = np.array([lay.x(j, i) for (j, i, fld) in lay.dof_map.entries if fld == "h"])
        if ic.noise > 0:
            gt_noise = rng.uniform(-ic.noise, ic.noise, size=len(h_off))
            y_gt[h_off] += gt_noise
    if full:
        grid = full_grid(cfg)
        h = prof(grid.x_h)
        if ic.noise > 0:
            if gt_noise is None:
                h = h + rng.uniform(-ic.noise, ic.noise, size=h.size)
            else:
                pos = np.mod(h_pos, L)
                for k, x in enumerate(grid.x_h):
                    gap = np.abs(pos - x)
                    hit = np.nonzero(np.minimum(gap, L - gap) < _SHARED_POINT_TOL * L)[0]
                    if hit.size:
                        h[k] += gt_noise[hit[0]]
        n = grid.n_half
        flow = FlowField(grid, h, np.full(n, ic.u1), np.full(n, ic.u2))
    return InitialCondition(full=flow, gaptooth=y_gt)


# -- single runs ----------------------------------------------------------------

@dataclass
class FullRun:
    grid: FullGrid
    times: np.ndarray
    states: list
    masses: np.ndarray
    stats: IntegrationResult | None = None


@dataclass
class PatchRun:
    system: GapToothSystem
    times: np.ndarray
    states: np.ndarray        # shape (len(times), n_dofs)
    stats: IntegrationResult | None = None


def _times(cfg: RunConfig):
    times = np.asarray(cfg.run.output_times, dtype=float)
    return times if times.size else np.array([0.0, cfg.run.t_end])


def _full_run(grid, times, ys, res=None) -> FullRun:
    states = [FlowField.from_vector(grid, y) for y in ys]
    return FullRun(grid, np.asarray(times, dtype=float), states,
                   np.array([mass(s) for s in states]), res)


def run_full(cfg: RunConfig, initial: FlowField | None = None, partial=None) -> FullRun:
    """Full-domain run; ``partial`` (a list) collects ``(t, y)`` outputs as they arrive."""
    grid = full_grid(cfg)
    f0 = initial if initial is not None else make_initial_condition(cfg, gaptooth=False).full
    times = _times(cfg)
    observer = None if partial is None else (lambda t, y: partial.append((t, y)))
    res = integrate(full_rhs_vector(grid, model_params(cfg)), f0.to_vector(),
                    (0.0, cfg.run.t_end), integrator_config(cfg), t_eval=times,
                    observer=observer)
    return _full_run(grid, times, res.y, res)


def run_gaptooth(cfg: RunConfig, initial: np.ndarray | None = None, partial=None) -> PatchRun:
    """Gap-tooth run; ``partial`` (a list) collects ``(t, y)`` outputs as they arrive."""
    system = GapToothSystem(patch_layout(cfg), model_params(cfg), coupling_config(cfg))
    y0 = initial if initial is not None else make_initial_condition(cfg, full=False).gaptooth
    times = _times(cfg)
    observer = None if partial is None else (lambda t, y: partial.append((t, y)))
    res = integrate(system, y0, (0.0, cfg.run.t_end), integrator_config(cfg), t_eval=times,
                    observer=observer)
    return PatchRun(system, times, res.y, res)


# -- comparison -------------------------------------------------------------------

@dataclass
class ComparisonRow:
    t: float
    linf_h: float
    rel_l2_h: float
    max_dev_full: float
    max_dev_gaptooth: float
    mass_drift_full: float

    def as_tuple(self):
        return (self.t, self.linf_h, self.rel_l2_h, self.max_dev_full,
                self.max_dev_gaptooth, self.mass_drift_full)


@dataclass
class ComparisonReport:
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)     # (solver, message, t)
    full: FullRun | None = None
    gaptooth: PatchRun | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def row_at(self, t) -> ComparisonRow:
        for row in self.rows:
            if abs(row.t - t) < 1e-12 * max(1.0, abs(t)):
                return row
        raise KeyError(f"no comparison row at t={t}")


def _full_centre_depths(state: FlowField, layout: PatchLayout) -> np.ndarray:
    """Full-domain depth at patch centres (exact grid points when aligned)."""
    grid = state.grid
    step = 2 * grid.d
    out = np.empty(layout.m)
    for j in range(layout.m):
        x = layout.centre(j) % grid.length
        k = x / step
        kr = int(round(k))
        if abs(k - kr) < 1e-9:
            out[j] = state.h[kr % grid.n_half]
        else:
            kl = int(np.floor(k))
            w = k - kl
            out[j] = (1 - w) * state.h[kl % grid.n_half] + w * state.h[(kl + 1) % grid.n_half]
    return out


def run_compare(cfg: RunConfig) -> ComparisonReport:
    """Run both solvers from the same initial profile and compare patch-centre depths.

    A solver that fails keeps the outputs it reached; rows past that point
    carry NaN for its metrics and the failure is recorded in the report.
    """
    layout = patch_layout(cfg)
    macro = layout.length
    if abs(cfg.length - macro) > 1e-9 * macro:
        raise ConfigError(f"compare needs L = m D; got L={cfg.length}, m D={macro}")
    ic = make_initial_condition(cfg)
    report = ComparisonReport()

    def partial_full(outputs):
        return _full_run(full_grid(cfg), [t for t, _ in outputs], [y for _, y in outputs])

    def partial_gaptooth(outputs):
        system = GapToothSystem(layout, model_params(cfg), coupling_config(cfg))
        ys = np.array([y for _, y in outputs]).reshape(len(outputs), system.size)
        return PatchRun(system, np.array([t for t, _ in outputs], dtype=float), ys)

    def guarded(name, fn, arg, salvage):
        outputs = []
        try:
            return fn(cfg, arg, outputs)
        except FilmsimError as exc:
            report.failures.append((name, str(exc), getattr(exc, "t", None)))
            return salvage(outputs)

    jobs = (("full", run_full, ic.full, partial_full),
            ("gaptooth", run_gaptooth, ic.gaptooth, partial_gaptooth))
    if thread_count() >= 2:
        with ThreadPoolExecutor(max_workers=2) as pool:
            futures = [pool.submit(guarded, *job) for job in jobs]
            full_run, gt_run = (f.result() for f in futures)
    else:
        full_run, gt_run = (guarded(*job) for job in jobs)
    # keep the failure order independent of thread scheduling
    report.failures.sort(key=lambda rec: rec[0])
    report.full, report.gaptooth = full_run, gt_run

    times = _times(cfg)
    n_full, n_gt = len(full_run.times), len(gt_run.times)
    m0 = full_run.masses[0] if n_full else np.nan
    h_off = _h_offsets(gt_run.system)
    for k in range(max(n_full, n_gt)):
        h_full = _full_centre_depths(full_run.states[k], layout) if k < n_full else None
        h_gt = gt_run.system.centre_depths(gt_run.states[k]) if k < n_gt else None
        if h_full is not None and h_gt is not None:
            diff = h_gt - h_full
            linf = float(np.max(np.abs(diff)))
            rel = float(np.linalg.norm(diff) / np.linalg.norm(h_full))
        else:
            linf = rel = np.nan
        report.rows.append(ComparisonRow(
            t=float(times[k]), linf_h=linf, rel_l2_h=rel,
            max_dev_full=float(np.max(np.abs(full_run.states[k].h - 1))) if k < n_full else np.nan,
            max_dev_gaptooth=float(np.max(np.abs(gt_run.states[k][h_off] - 1)))
            if k < n_gt else np.nan,
            mass_drift_full=float(abs(full_run.masses[k] - m0) / m0) if k < n_full else np.nan,
        ))
    return report


def _h_offsets(system: GapToothSystem) -> np.ndarray:
    return np.array([k for k, (_, _, fld) in enumerate(system.layout.dof_map.entries)
                     if fld == "h"])


# -- stability and spectra -------------------------------------------------------

def stability_sweep(cfg: RunConfig) -> list:
    s = cfg.sweep
    n = int(np.floor((s.k_max - s.k_min) / s.dk + 1e-9)) + 1
    ks = s.k_min + s.dk * np.arange(n)
    return growth_rate_sweep(cfg.model.re, cfg.model.tan_theta, cfg.model.c_reg, ks,
                             s.left_operator)


def spectrum(cfg: RunConfig) -> Spectrum:
    """Eigenvalues of the gap-tooth Jacobian at the uniform equilibrium."""
    system = GapToothSystem(patch_layout(cfg), model_params(cfg), coupling_config(cfg))
    u1, u2 = equilibrium_velocities(cfg.model.re, cfg.model.tan_theta)
    y_star = system.sample_state(lambda x: 1.0, lambda x: u1, lambda x: u2)
    e = cfg.eigs
    th = SpectrumThresholds(macro_re=e.macro_re, fast_re=e.fast_re, wave_im=e.wave_im)
    return jacobian_spectrum(system, y_star, e.jacobian_step, th)


__all__ = ["ComparisonReport", "ComparisonRow", "FullRun", "GrowthRates", "InitialCondition",
           "PatchRun", "make_initial_condition", "run_compare", "run_full", "run_gaptooth",
           "spectrum", "stability_sweep", "thread_count"]
