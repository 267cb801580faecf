"""
Monte Carlo harness: multistart flows, the hitting-time synchronization
experiment and the stable-state catalog.

Every start draws its initial state from its own generator, keyed by
(experiment seed, n, trace seed, m, start), so results do not depend on the
number of worker threads. Rows are returned in task order.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import pandas as pd
from scipy.stats import norm

from .errors import InputError, NumericalError
from .flow import FlowOptions, flow
from .graph import Graph, random_tree
from .kuramoto import (PhaseState, StateLike, as_state, c_beta, canonical_form, circular_distance,
                       normalize_rotation, random_state)
from .lemmas import contradiction_bound_check
from .logger import get_logger
from .process import graph_at_m, hitting_times, pair_total, sample_trace, trace_metadata
from .spectral import spectral_norm_deviation
from .stability import ClassifyTolerances, classify

logger = get_logger("experiments")

CSV_COLUMNS = ["n", "seed", "m", "tau", "start", "converged", "final_energy",
               "final_grad_norm", "classification", "wall_ms"]
SYNC_ENERGY = 1e-8
DEDUP_TOL = 1e-5
BETA_GRID = 100
PROBES = ("tau", "tau+n/10", "cap")
FAMILIES = ("process", "tree")

T = TypeVar("T")
R = TypeVar("R")


# Seeds and pools ----------------------------------------------------------

def derive_rng(seed: int, n: int, trace_seed: int, m: int, start: int) -> np.random.Generator:
    """Philox generator for one start: SeedSequence(seed, spawn_key=(n, trace_seed, m, start))."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(n, trace_seed, m, start))
    return np.random.Generator(np.random.Philox(ss))


def run_tasks(fn: Callable[[T], R], tasks: Sequence[T], threads: int = 1) -> List[R]:
    """Apply fn to every task; results come back in task order."""
    if threads <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    z = float(norm.ppf(0.5 + confidence / 2.0))
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


# Configuration and records ------------------------------------------------

@dataclass
class ExperimentConfig:
    n_list: List[int] = field(default_factory=lambda: [100])
    seeds: List[int] = field(default_factory=lambda: list(range(10)))
    starts: int = 20
    seed: int = 0
    eps: float = 0.01
    alpha_rule: str = "log"
    alpha: float = 0.2
    probes: List[str] = field(default_factory=lambda: list(PROBES))
    family: str = "process"
    classify_states: bool = False
    flow: FlowOptions = field(default_factory=FlowOptions)
    tolerances: ClassifyTolerances = field(default_factory=ClassifyTolerances)

    def __post_init__(self):
        if any(n < 2 for n in self.n_list):
            raise InputError(f"every n must be >= 2, got {self.n_list}")
        if self.starts < 1:
            raise InputError(f"starts must be positive, got {self.starts}")
        if not 0.0 < self.eps < 1.0:
            raise InputError(f"eps must lie in (0, 1), got {self.eps}")
        if self.alpha_rule not in ("fixed", "log"):
            raise InputError(f"alpha_rule must be 'fixed' or 'log', got {self.alpha_rule!r}")
        if not self.alpha > 0:
            raise InputError(f"alpha must be positive, got {self.alpha}")
        unknown = [p for p in self.probes if p not in PROBES]
        if unknown:
            raise InputError(f"unknown m probes {unknown}; choose from {list(PROBES)}")
        if self.family not in FAMILIES:
            raise InputError(f"family must be one of {list(FAMILIES)}, got {self.family!r}")

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'ExperimentConfig':
        """Create an ExperimentConfig from the `experiment` configuration section"""
        defaults = cls()
        seeds = config.get('seeds', defaults.seeds)
        if isinstance(seeds, int):
            seeds = list(range(seeds))
        return cls(
            n_list=[int(n) for n in config.get('n_list', defaults.n_list)],
            seeds=[int(s) for s in (seeds or [])],
            starts=int(config.get('starts', defaults.starts)),
            seed=int(config.get('seed', defaults.seed)),
            eps=float(config.get('eps', defaults.eps)),
            alpha_rule=str(config.get('alpha_rule', defaults.alpha_rule)),
            alpha=float(config.get('alpha', defaults.alpha)),
            probes=list(config.get('probes', defaults.probes)),
            family=str(config.get('family', defaults.family)),
            classify_states=bool(config.get('classify', defaults.classify_states)),
            flow=FlowOptions.from_config(config.get('integrator', {}) or {}),
            tolerances=ClassifyTolerances.from_config(config.get('tolerances', {}) or {}),
        )

    def alpha_for(self, n: int) -> float:
        """Fixed alpha, or 20 (log n)^{-1/2}."""
        if self.alpha_rule == "fixed":
            return self.alpha
        return 20.0 / math.sqrt(math.log(n))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ExperimentRecord:
    n: int
    seed: int
    m: int
    tau: Optional[int]
    start: int
    converged: bool
    final_energy: float
    final_grad_norm: float
    classification: str
    wall_ms: float = 0.0

    @property
    def synchronized(self) -> bool:
        return self.final_energy < SYNC_ENERGY


def records_frame(records: Iterable[ExperimentRecord]) -> pd.DataFrame:
    rows = [asdict(r) for r in records]
    frame = pd.DataFrame(rows, columns=CSV_COLUMNS)
    if not rows:
        return frame
    frame["tau"] = frame["tau"].astype("Int64")
    return frame


# Single start --------------------------------------------------------------

@dataclass(frozen=True)
class StartTask:
    G: Graph
    n: int
    seed: int
    m: int
    tau: Optional[int]
    start: int
    rng_key: Tuple[int, int, int, int, int]
    state: Optional[PhaseState] = None


def _run_start(task: StartTask, opts: FlowOptions, tols: ClassifyTolerances,
               classify_states: bool, timings: bool, strict: bool) -> ExperimentRecord:
    began = time.perf_counter()
    s0 = task.state if task.state is not None else random_state(task.G.n, derive_rng(*task.rng_key))
    try:
        result = flow(task.G, s0, opts)
    except NumericalError as exc:
        if strict:
            raise
        logger.warning(f"start {task.start} on n={task.n} seed={task.seed} m={task.m}: {exc}")
        return ExperimentRecord(task.n, task.seed, task.m, task.tau, task.start, False,
                                float("nan"), float("nan"), "numerical_error")
    if classify_states:
        label = classify(task.G, result.final_state, tols).classification.value
    else:
        label = "synchronized" if result.final_energy < SYNC_ENERGY else "not_synchronized"
    wall_ms = (time.perf_counter() - began) * 1000.0 if timings else 0.0
    return ExperimentRecord(task.n, task.seed, task.m, task.tau, task.start, result.converged,
                            result.final_energy, result.final_gradient_norm, label, wall_ms)


def run_simulate(G: Graph, seed: int, starts: int = 1, states: Optional[Sequence[StateLike]] = None,
                 opts: Optional[FlowOptions] = None, tols: Optional[ClassifyTolerances] = None,
                 threads: int = 1, timings: bool = False) -> List[ExperimentRecord]:
    """Flow from the given states, or from `starts` uniform random states."""
    opts = opts or FlowOptions()
    tols = tols or ClassifyTolerances()
    if states is not None:
        tasks = [StartTask(G, G.n, seed, G.m, None, i, (seed, G.n, seed, G.m, i), as_state(s))
                 for i, s in enumerate(states)]
    else:
        if starts < 1:
            raise InputError(f"starts must be positive, got {starts}")
        tasks = [StartTask(G, G.n, seed, G.m, None, i, (seed, G.n, seed, G.m, i)) for i in range(starts)]
    logger.info(f"simulate: {len(tasks)} starts on n={G.n}, m={G.m}")
    return run_tasks(lambda t: _run_start(t, opts, tols, True, timings, True), tasks, threads)


# Hitting-time experiment ---------------------------------------------------

def m_probes(n: int, tau: int, probes: Sequence[str] = PROBES) -> List[Tuple[str, int]]:
    """(label, m) for the requested probes, capped at n(n-1)/2, duplicates dropped."""
    total = pair_total(n)
    values = {
        "tau": tau,
        "tau+n/10": min(tau + math.ceil(n / 10), total),
        "cap": max(tau, min(math.ceil(5 * n * math.log(n) / 2), total)),
    }
    seen, out = set(), []
    for label in PROBES:
        if label in probes and values[label] not in seen:
            seen.add(values[label])
            out.append((label, values[label]))
    return out


def probe_label(n: int, tau: int, m: int) -> str:
    for label, value in m_probes(n, tau):
        if value == m:
            return label
    return f"m={m}"


def _graphs_for(config: ExperimentConfig, n: int, trace_seed: int):
    """(tau, [(label, m, graph)], metadata) for one (n, seed) cell."""
    if config.family == "tree":
        G = random_tree(n, trace_seed)
        meta = {"n": n, "seed": trace_seed, "family": "tree", "tau_edges": n - 1}
        return n - 1, [("tau", n - 1, G)], meta
    t = sample_trace(n, trace_seed)
    tau = hitting_times(t).tau_edges
    meta = trace_metadata(t, config.eps) if n >= 3 else {"n": n, "seed": trace_seed, "tau_edges": tau}
    meta["alpha"] = config.alpha_for(n) if n >= 3 else None
    return tau, [(label, m, graph_at_m(t, m)) for label, m in m_probes(n, tau, config.probes)], meta


def summarize(frame: pd.DataFrame) -> List[Dict[str, Any]]:
    """Per (n, probe) sync fractions with Wilson 95% intervals, recomputed from raw rows."""
    if frame.empty:
        return []
    data = frame.copy()
    data["probe"] = [probe_label(int(n), int(tau), int(m)) for n, tau, m in zip(data["n"], data["tau"], data["m"])]
    data["synced"] = data["final_energy"] < SYNC_ENERGY
    cells = []
    for (n, probe), group in data.groupby(["n", "probe"], sort=True):
        trials = int(len(group))
        synced = int(group["synced"].sum())
        lo, hi = wilson_interval(synced, trials)
        cells.append({
            "n": int(n),
            "probe": probe,
            "trials": trials,
            "synchronized": synced,
            "fraction": synced / trials,
            "wilson_low": lo,
            "wilson_high": hi,
        })
    return cells


def run_hitting_sync(config: ExperimentConfig, threads: int = 1,
                     timings: bool = False) -> Tuple[List[ExperimentRecord], Dict[str, Any]]:
    tasks: List[StartTask] = []
    traces = []
    for n in config.n_list:
        for trace_seed in config.seeds:
            tau, graphs, meta = _graphs_for(config, n, trace_seed)
            traces.append(meta)
            for _, m, G in graphs:
                for start in range(config.starts):
                    key = (config.seed, n, trace_seed, m, start)
                    tasks.append(StartTask(G, n, trace_seed, m, tau, start, key))
    logger.info(f"hitting-sync: {len(traces)} graphs, {len(tasks)} flows on {threads} thread(s)")

    records = run_tasks(
        lambda t: _run_start(t, config.flow, config.tolerances, config.classify_states, timings, False),
        tasks, threads)
    summary = {
        "config": config.to_dict(),
        "sync_energy": SYNC_ENERGY,
        "cells": summarize(records_frame(records)),
        "traces": traces,
    }
    return records, summary


# Stable-state catalog ------------------------------------------------------

@dataclass
class CatalogEntry:
    state: PhaseState
    canonical: np.ndarray
    energy: float
    report: Dict[str, Any]
    hits: int = 1
    c_half_size: int = 0
    contradiction: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "angles": [float(x) for x in self.state.theta],
            "energy": self.energy,
            "hits": self.hits,
            "c_half_size": self.c_half_size,
            "stability": self.report,
            "contradiction": self.contradiction,
        }


def beta_grid(points: int = BETA_GRID) -> np.ndarray:
    """points evenly spaced angles in (0, pi/2]."""
    return np.arange(1, points + 1) * (np.pi / 2) / points


def contradiction_sweep(s: StateLike, alpha: float, points: int = BETA_GRID) -> Dict[str, Any]:
    checks = [contradiction_bound_check(s, float(b), alpha) for b in beta_grid(points)]
    failing = [float(b) for b, c in zip(beta_grid(points), checks) if not c.passed]
    return {
        "alpha": alpha,
        "grid_points": points,
        "all_pass": not failing,
        "failing_betas": failing,
        "max_lhs": max(c.lhs for c in checks),
        "rhs": checks[0].rhs,
    }


def stable_search(G: Graph, starts: int, seed: int, opts: Optional[FlowOptions] = None,
                  tols: Optional[ClassifyTolerances] = None, threads: int = 1,
                  alpha: Optional[float] = None) -> Dict[str, Any]:
    """Multistart flow; converged end states deduplicated up to global rotation."""
    opts = opts or FlowOptions()
    tols = tols or ClassifyTolerances()
    if starts < 1:
        raise InputError(f"starts must be positive, got {starts}")
    if alpha is None and G.m and G.n:
        d = G.average_degree
        alpha = spectral_norm_deviation(G, d) / d

    def run(start: int):
        s0 = random_state(G.n, derive_rng(seed, G.n, seed, G.m, start))
        return flow(G, s0, opts)

    results = run_tasks(run, list(range(starts)), threads)
    catalog: List[CatalogEntry] = []
    unconverged = 0
    for result in results:
        if not result.converged:
            unconverged += 1
            continue
        canon = canonical_form(result.final_state)
        match = next((e for e in catalog
                      if float(np.max(circular_distance(e.canonical, canon), initial=0.0)) <= DEDUP_TOL), None)
        if match is not None:
            match.hits += 1
            continue
        state = normalize_rotation(result.final_state)
        report = classify(G, state, tols)
        entry = CatalogEntry(state, canon, result.final_energy, report.to_dict())
        if G.n:
            entry.c_half_size = len(c_beta(state, np.pi / 2))
            if alpha is not None:
                entry.contradiction = contradiction_sweep(state, alpha)
        catalog.append(entry)

    catalog.sort(key=lambda e: (round(e.energy, 9), tuple(np.round(e.canonical, 6))))
    logger.info(f"stable-search: {len(catalog)} distinct critical states from {starts} starts "
                f"({unconverged} unconverged)")
    return {
        "n": G.n,
        "m": G.m,
        "seed": seed,
        "starts": starts,
        "unconverged": unconverged,
        "alpha": alpha,
        "states": [e.to_dict() for e in catalog],
    }
