"""Monte Carlo size/power experiments for the change-point tests.

Reproduces the K=4 AR(1) study design at configurable (desk) scale:
four sample-size cases over a horizon of 1200 time instants, per-sample
innovation scales, coordinate-dependent AR coefficients, changes injected
in either the innovation scale or the coefficients after a given time
instant, and learning-sample or in-sample long-run variance estimation.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import cptest, lrv, simgen, sumproc
from .errors import ConfigurationError

HORIZON = 1200
CASE_SIZES = {
    "I": (100, 120, 70, 90),
    "II": (300, 250, 350, 180),
    "III": (500, 450, 550, 600),
    "IV": (1000, 900, 1100, 950),
}
SIGMA_PRE = (1.0, 1.5, 0.7, 1.0)
SIGMA_POST = (1.0, 0.7, 1.2, 1.0)

SCENARIOS = ("none", "sigma-change", "coefficient-change")


def rho_pre(d: int) -> np.ndarray:
    """Pre-change AR coefficients 0.1 + 0.5 v / d for v = 1..d."""
    return 0.1 + 0.5 * np.arange(1, d + 1) / d


def rho_post(d: int) -> np.ndarray:
    """Post-change AR coefficients 0.4 + 0.5 v / d for v = 1..d."""
    return 0.4 + 0.5 * np.arange(1, d + 1) / d


def sampling_rates(sizes: Sequence[int], horizon: int = HORIZON) -> tuple:
    """Per-sample rates omega_j = N_j / T implied by the sizes."""
    return tuple(n / horizon for n in sizes)


def change_time_mapping(time_instant: float, rates: Sequence[float],
                        sizes: Sequence[int]) -> tuple:
    """Map a physical change time to per-sample indices floor(omega_j t).

    Clamped into [1, N_j]; a time at the end of the horizon maps to N_j.
    """
    taus = []
    for omega, n in zip(rates, sizes):
        if not 0.0 < omega <= 1.0:
            raise ConfigurationError(f"sampling rate {omega} outside (0, 1]")
        tau = int(math.floor(omega * time_instant))
        taus.append(min(max(tau, 1), n))
    return tuple(taus)


@dataclass
class ExperimentConfig:
    replications: int = 1000
    cases: tuple = ("I",)
    dims: tuple = (10,)
    scenario: str = "none"
    change_times: tuple = (600,)
    tests: tuple = ("q-breve", "v-breve")
    lrv_mode: str = lrv.MODE_IN_SAMPLE
    learning_length: int = 500  # in time instants, mapped through the rates
    level: float = 0.95
    seed: int = 0
    horizon: int = HORIZON
    critval_n_grid: int = 2000
    critval_n_rep: int = 100_000
    workers: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(f"unknown scenario {self.scenario!r}")
        for c in self.cases:
            if c not in CASE_SIZES:
                raise ConfigurationError(f"unknown case {c!r}")
        for t in self.tests:
            if t not in ("q-breve", "v-breve"):
                raise ConfigurationError(
                    f"experiment supports the target-free kinds, got {t!r}")


@dataclass
class CellResult:
    case: str
    d: int
    scenario: str
    change_time: Optional[int]
    test: str
    lrv_mode: str
    rate: float
    stderr: float
    n_rep: int
    wall_time: float
    seed: int

    def key(self):
        return (self.case, self.d, self.scenario, self.change_time, self.test)


def _cell_seed(master_seed, cell_index):
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(cell_index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _panel_config(case, d, scenario, change_time, cfg):
    sizes = CASE_SIZES[case]
    rates = sampling_rates(sizes, cfg.horizon)
    kwargs = dict(K=4, d=d, N=sizes, rho0=tuple(rho_pre(d)), sigma0=SIGMA_PRE)
    if scenario == "sigma-change":
        kwargs.update(sigma1=SIGMA_POST,
                      tau=change_time_mapping(change_time, rates, sizes))
    elif scenario == "coefficient-change":
        kwargs.update(rho1=tuple(rho_post(d)),
                      tau=change_time_mapping(change_time, rates, sizes))
    return kwargs


def _learning_sizes(case, cfg):
    sizes = CASE_SIZES[case]
    rates = sampling_rates(sizes, cfg.horizon)
    return tuple(max(int(math.floor(omega * cfg.learning_length)), 4)
                 for omega in rates)


def run_cell(case, d, scenario, change_time, cfg: ExperimentConfig, cell_index):
    """Run every requested test on one (case, d, scenario, time) cell."""
    t0 = time.time()
    seed = _cell_seed(cfg.seed, cell_index)
    base_kwargs = _panel_config(case, d, scenario, change_time, cfg)
    panel_cfg = simgen.PanelConfig(seed=seed, **base_kwargs)
    learning_cfg = None
    if cfg.lrv_mode == lrv.MODE_LEARNING:
        learning_cfg = simgen.PanelConfig(
            K=4, d=d, N=_learning_sizes(case, cfg),
            rho0=base_kwargs["rho0"], sigma0=SIGMA_PRE, seed=seed)

    rejections = {t: 0 for t in cfg.tests}
    for r in range(cfg.replications):
        proj_seed = _cell_seed(seed, r + 1)
        w = simgen.gen_dirichlet_projection(d, proj_seed)
        pair = sumproc.ProjectionPair.from_vectors(w)
        panel = simgen.gen_ar1_panel(panel_cfg, rep=2 * r)
        learning = None
        if learning_cfg is not None:
            learning = simgen.gen_ar1_panel(learning_cfg, rep=2 * r + 1).samples
        for t in cfg.tests:
            spec = cptest.TestSpec(
                kind=t, projection=pair, level=cfg.level,
                lrv_mode=cfg.lrv_mode,
                n_grid=cfg.critval_n_grid, n_rep=cfg.critval_n_rep,
                seed=seed)
            report = cptest.run_test(panel, spec, learning=learning)
            rejections[t] += int(report.reject)

    results = []
    n = cfg.replications
    for t in cfg.tests:
        p = rejections[t] / n
        results.append(CellResult(
            case=case, d=d, scenario=scenario,
            change_time=None if scenario == "none" else change_time,
            test=t, lrv_mode=cfg.lrv_mode,
            rate=p, stderr=math.sqrt(p * (1 - p) / n),
            n_rep=n, wall_time=time.time() - t0, seed=seed))
    return results


def run_experiment(cfg: ExperimentConfig):
    """Run the full grid of cells; deterministic for a fixed master seed.

    Each cell draws from its own seed stream, so adding or removing cells
    never perturbs the others.
    """
    cells = []
    idx = 0
    times = cfg.change_times if cfg.scenario != "none" else (None,)
    for case in cfg.cases:
        for d in cfg.dims:
            for ct in times:
                cells.append((case, d, cfg.scenario, ct, idx))
                idx += 1
    results = []
    for case, d, scenario, ct, i in cells:
        results.extend(run_cell(case, d, scenario, ct if ct is not None else 0,
                                cfg, i))
    return results


def results_to_csv(results, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case", "d", "scenario", "change_time", "test",
                         "lrv_mode", "rate", "stderr", "n_rep", "wall_time", "seed"])
        for r in results:
            writer.writerow([r.case, r.d, r.scenario,
                             "" if r.change_time is None else r.change_time,
                             r.test, r.lrv_mode,
                             f"{r.rate:.17g}", f"{r.stderr:.17g}",
                             r.n_rep, f"{r.wall_time:.3f}", r.seed])


def results_to_json(results, path):
    with open(path, "w") as fh:
        json.dump([r.__dict__ for r in results], fh, indent=2)
