"""Experiment runners and presets.

Every experiment is a list of independent jobs.  Jobs fan out over a process
pool (or run inline with one worker); records come back in submission order
and are written by a single collector once all of them have finished.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

import numpy as np

from . import __version__
from .config import ExperimentConfig, UsageError, build_config, merge_settings, parse_phi0
from .continuum import (Grid, compare_with_walk, continuum_sigma2, reconstruct,
                        seeds_for)
from .observables import count_sigma_peaks, distribution, moments, sigma_peak_times
from .output import (COMPARISON_COLUMNS, CONTINUUM_COLUMNS, DIFF_COLUMNS,
                     SIGMA2_COLUMNS, SNAPSHOT_COLUMNS, STATS_COLUMNS, RunRecord, Table)
from .walk import CoinParams, Lattice, WalkState, evolve

DIVERGENCE_THRESHOLD = 1e-6
FIG1_DENOMINATORS = (10, 30, 50)
FIG2_NUMERATORS = (1, 3, 7, 9)
FIG2_DENOMINATOR = 110


@dataclass(frozen=True)
class Job:
    name: str
    task: Callable
    cfg: ExperimentConfig


# ---------------------------------------------------------------- building blocks

def coin_params(cfg: ExperimentConfig) -> CoinParams:
    return CoinParams(cfg.rho, cfg.phi0)


def lattice_for(cfg: ExperimentConfig) -> Lattice:
    if cfg.lattice == "circle":
        return Lattice.circle(cfg.circle_L)
    return Lattice.line(max(cfg.steps, 1) + 1)


def initial_state(cfg: ExperimentConfig) -> WalkState:
    u0, d0 = cfg.initial
    return WalkState.localized(lattice_for(cfg), u0, d0)


def stats_row(state: WalkState) -> tuple:
    dist = distribution(state)
    m = moments(dist)
    return (state.t, m.mean, m.sigma, m.sigma2, dist.at(0), dist.total)


def snapshot_rows(state: WalkState) -> list:
    dist = distribution(state)
    sites = dist.sites
    if state.lattice.kind == "line":
        keep = np.abs(sites) <= state.t
    else:
        keep = np.ones(sites.shape, dtype=bool)
    return [(state.t, int(n), float(p), float(pu), float(pd))
            for n, p, pu, pd in zip(sites[keep], dist.probs[keep], dist.pu[keep], dist.pd[keep])]


def _walk(cfg: ExperimentConfig, engine=None, snapshots=()):
    """Stats table plus snapshot rows (and the retained states) for one run."""
    engine = engine or cfg.engine
    want = set(snapshots)
    stats = Table(STATS_COLUMNS)
    snaps = Table(SNAPSHOT_COLUMNS)
    kept = {}
    sigma = []
    for state in evolve(engine, coin_params(cfg), initial_state(cfg), cfg.steps):
        row = stats_row(state)
        sigma.append(row[2])
        if state.t % cfg.stride == 0:
            stats.rows.append(row)
        if state.t in want:
            snaps.rows.extend(snapshot_rows(state))
            kept[state.t] = state
    return stats, snaps, kept, np.array(sigma)


def _grid(cfg: ExperimentConfig) -> Grid:
    c = cfg.continuum
    return Grid(-c.halfwidth, c.halfwidth, c.spacing)


def _taus(cfg: ExperimentConfig) -> tuple:
    c = cfg.continuum
    if c.taus is not None:
        return tuple(c.taus)
    return tuple(range(0, cfg.steps + 1, cfg.stride))


def _record(name: str, cfg: ExperimentConfig, tables: dict, summary: dict, start: float):
    return RunRecord(name, cfg.echo(), tables, summary, __version__, time.perf_counter() - start)


# ---------------------------------------------------------------- job tasks

def walk_task(name: str, cfg: ExperimentConfig) -> RunRecord:
    start = time.perf_counter()
    snapshots = cfg.snapshots if cfg.snapshots is not None else (cfg.steps,)
    stats, snaps, _, sigma = _walk(cfg, snapshots=snapshots)
    summary = {"final_sigma": float(sigma[-1]), "max_sigma": float(sigma.max()),
               "max_total_prob_drift": max(abs(r[5] - 1.0) for r in stats.rows)}
    return _record(name, cfg, {"stats": stats, "snapshots": snaps}, summary, start)


def compare_task(name: str, cfg: ExperimentConfig) -> RunRecord:
    """Run ``engine`` and ``against`` side by side and track max |P_a - P_b|."""
    start = time.perf_counter()
    if cfg.against is None:
        raise UsageError("against: compare needs a second engine (--against)")
    params = coin_params(cfg)
    first, second = Table(STATS_COLUMNS), Table(STATS_COLUMNS)
    diff = Table(DIFF_COLUMNS)
    worst, worst_t, diverged = 0.0, 0, None
    pairs = zip(evolve(cfg.engine, params, initial_state(cfg), cfg.steps),
                evolve(cfg.against, params, initial_state(cfg), cfg.steps))
    for a, b in pairs:
        gap = float(np.max(np.abs(distribution(a).probs - distribution(b).probs)))
        if gap > worst:
            worst, worst_t = gap, a.t
        if diverged is None and gap > DIVERGENCE_THRESHOLD:
            diverged = a.t
        if a.t % cfg.stride == 0:
            first.rows.append(stats_row(a))
            second.rows.append(stats_row(b))
            diff.rows.append((a.t, gap))
    summary = {"engines": [cfg.engine.name, cfg.against.name], "max_abs_dp": worst,
               "t_of_max": worst_t, "divergence_threshold": DIVERGENCE_THRESHOLD,
               "first_divergence_t": diverged}
    tables = {f"stats_{cfg.engine.name}": first, f"stats_{cfg.against.name}": second,
              "diff": diff}
    return _record(name, cfg, tables, summary, start)


def continuum_task(name: str, cfg: ExperimentConfig, densities: bool = True) -> RunRecord:
    """Continuum slices for one Gaussian width (the first of ``cfg.continuum.widths``)."""
    start = time.perf_counter()
    w = cfg.continuum.widths[0]
    seeds = seeds_for(WalkState.localized(Lattice.line(2), *cfg.initial), coin_params(cfg), w)
    grid = _grid(cfg)
    dens, sig2 = Table(CONTINUUM_COLUMNS), Table(SIGMA2_COLUMNS)
    edge = 0.0
    for tau in _taus(cfg):
        sl = reconstruct(seeds, tau, grid, cfg.rho, cfg.phi0)
        sig2.rows.append((tau, continuum_sigma2(sl)))
        edge = max(edge, sl.edge_fraction)
        if densities:
            dens.rows.extend((tau, float(x), float(p)) for x, p in zip(sl.xi, sl.density))
    tables = {"continuum": dens, "sigma2": sig2} if densities else {"sigma2": sig2}
    summary = {"w": w, "max_edge_fraction": edge}
    return _record(name, cfg, tables, summary, start)


def sigma2_task(name: str, cfg: ExperimentConfig) -> RunRecord:
    return continuum_task(name, cfg, densities=False)


def fig1_task(name: str, cfg: ExperimentConfig) -> RunRecord:
    """Return probability after each quasiperiod ``p`` (stride = p)."""
    start = time.perf_counter()
    p = cfg.phi0.denominator
    stats, _, _, _ = _walk(cfg)
    returns = [(int(r[0]) // p, r[4]) for r in stats.rows if r[0] > 0]
    first = next((m for m, p0 in returns if p0 < 0.5), None)
    summary = {"p": p, "quasiperiods": len(returns), "first_m_below_half": first,
               "p0_per_quasiperiod": [p0 for _, p0 in returns]}
    return _record(name, cfg, {"stats": stats}, summary, start)


def fig2_task(name: str, cfg: ExperimentConfig) -> RunRecord:
    """sigma(t) over several quasiperiods with the peak count in the first one."""
    start = time.perf_counter()
    p = cfg.phi0.denominator
    stats, _, _, sigma = _walk(cfg)
    summary = {"q": cfg.phi0.numerator, "p": p,
               "peak_times": sigma_peak_times(sigma, (0, p)),
               "peak_count": count_sigma_peaks(sigma, (0, p)),
               "sigma_ratio_at_p": float(sigma[p] / sigma[:p + 1].max())}
    return _record(name, cfg, {"stats": stats}, summary, start)


def fig4_task(name: str, cfg: ExperimentConfig) -> RunRecord:
    """Exact and continuum distributions at matching snapshot times."""
    start = time.perf_counter()
    times = cfg.snapshots or tuple(range(10, cfg.steps + 1, 10))
    stats, snaps, kept, _ = _walk(cfg, snapshots=times)
    w = cfg.continuum.widths[0]
    seeds = seeds_for(WalkState.localized(Lattice.line(2), *cfg.initial), coin_params(cfg), w)
    grid = _grid(cfg)
    dens, sig2, comp = Table(CONTINUUM_COLUMNS), Table(SIGMA2_COLUMNS), Table(COMPARISON_COLUMNS)
    for t in times:
        sl = reconstruct(seeds, t, grid, cfg.rho, cfg.phi0)
        dens.rows.extend((t, float(x), float(p)) for x, p in zip(sl.xi, sl.density))
        sig2.rows.append((t, continuum_sigma2(sl)))
        dist = distribution(kept[t])
        cmp = compare_with_walk(sl, dist.sites, dist.probs)
        comp.rows.append((t, cmp.l1, *cmp.exact_peaks, *cmp.continuum_peaks))
    l1 = comp.column("l1")
    summary = {"w": w, "max_l1": max(l1), "t_of_max_l1": times[int(np.argmax(l1))]}
    tables = {"stats": stats, "snapshots": snaps, "continuum": dens, "sigma2": sig2,
              "comparison": comp}
    return _record(name, cfg, tables, summary, start)


# ---------------------------------------------------------------- job planning

def _tag(phi0_text: str) -> str:
    return phi0_text.replace("/", "-").replace(".", "p")


def plan(cfg: ExperimentConfig, phases: tuple | None = None) -> list[Job]:
    """Expand a configuration into independent jobs."""
    preset = cfg.preset
    if preset == "fig1":
        return [Job(f"fig1_p{p}", fig1_task, replace(cfg, phi0=Fraction(1, p), phi0_text=f"1/{p}",
                                                     stride=p))
                for p in FIG1_DENOMINATORS]
    if preset == "fig2":
        jobs = []
        for q in FIG2_NUMERATORS:
            phase = Fraction(q, FIG2_DENOMINATOR)
            jobs.append(Job(f"fig2_q{q}", fig2_task,
                            replace(cfg, phi0=phase, phi0_text=f"{q}/{FIG2_DENOMINATOR}")))
        return jobs
    if preset == "fig4":
        return [Job("fig4", fig4_task, cfg)]
    if preset == "fig6":
        jobs = [Job("fig6_exact", walk_task, replace(cfg, continuum=None))]
        for w in cfg.continuum.widths:
            one = replace(cfg, continuum=replace(cfg.continuum, widths=(w,)))
            jobs.append(Job(f"fig6_w{w:g}", sigma2_task, one))
        return jobs
    if preset in ("equivalence", "control", "circle"):
        return [Job(preset, compare_task, cfg)]

    if cfg.command == "compare":
        return [Job(f"compare_{cfg.engine.name}_{cfg.against.name if cfg.against else ''}",
                    compare_task, cfg)]
    if cfg.command == "continuum":
        jobs = []
        for w in cfg.continuum.widths:
            one = replace(cfg, continuum=replace(cfg.continuum, widths=(w,)))
            jobs.append(Job(f"continuum_{_tag(cfg.phi0_text)}_w{w:g}", continuum_task, one))
        return jobs
    if cfg.command == "sweep":
        texts = phases or (cfg.phi0_text,)
        jobs = []
        for text in texts:
            phi0, label = parse_phi0(text)
            jobs.append(Job(f"sweep_{cfg.engine.name}_{_tag(label)}", walk_task,
                            replace(cfg, phi0=phi0, phi0_text=label)))
        return jobs
    return [Job(f"run_{cfg.engine.name}_{_tag(cfg.phi0_text)}", walk_task, cfg)]


def _call(job: Job) -> RunRecord:
    return job.task(job.name, job.cfg)


def run_jobs(jobs: list[Job], workers: int = 1) -> list[RunRecord]:
    """Execute jobs, concurrently when ``workers > 1``; results keep job order."""
    if workers <= 1 or len(jobs) <= 1:
        return [_call(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_call, jobs))


def run_experiment(cfg: ExperimentConfig, phases: tuple | None = None) -> list[RunRecord]:
    return run_jobs(plan(cfg, phases), cfg.workers)


def preset_config(name: str, **flags) -> ExperimentConfig:
    """Configuration of a preset with optional flag-style overrides (strings or numbers)."""
    values = {k: str(v) for k, v in flags.items()}
    return build_config("run", merge_settings(name, None, values))

