"""The four covariance change-point tests.

Sum-of-squares statistics (one maximally selected CUSUM per sample,
standardized by its long-run variance, then summed) and pooled statistics
(grid maximum of the summed partial-sum deviations).  The "-breve"
variants recenter by the in-sample endpoint and therefore need no target
bilinear form; the plain variants require known targets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import limits, lrv, sumproc
from .errors import ConfigurationError, DegenerateLrvError
from .simgen import Panel

_QV_KINDS = ("q", "v")
_BREVE_KINDS = ("q-breve", "v-breve")


@dataclass
class TestSpec:
    __test__ = False  # keep pytest from collecting this dataclass

    kind: str
    projection: object  # ProjectionPair, or list of pairs for q kinds
    level: float = 0.95
    targets: Optional[sumproc.TargetBilinear] = None
    lrv_mode: str = lrv.MODE_IN_SAMPLE
    learning_length: Optional[Sequence[int]] = None
    alpha_sq_override: Optional[Sequence[float]] = None
    n_grid: int = limits.DEFAULT_N_GRID
    n_rep: int = limits.DEFAULT_N_REP
    seed: int = 0

    def __post_init__(self):
        if self.kind not in limits.KINDS:
            raise ConfigurationError(f"unknown statistic kind {self.kind!r}")
        if self.kind in _QV_KINDS and self.targets is None:
            raise ConfigurationError(f"kind {self.kind!r} requires targets")
        if self.kind in _BREVE_KINDS and self.targets is not None:
            raise ConfigurationError(f"kind {self.kind!r} forbids targets")
        if self.kind in ("v", "v-breve") and isinstance(self.projection, (list, tuple)):
            raise ConfigurationError(
                "pooled kinds require one shared projection pair, not per-sample pairs"
            )


@dataclass
class PerSampleInfo:
    alpha_sq: float
    bandwidth: float
    argmax_k: int


@dataclass
class TestReport:
    statistic: float
    critical_value: float
    level: float
    reject: bool
    per_sample: list
    sample_sizes: tuple
    kind: str
    seed: int

    def to_dict(self):
        return {
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "level": self.level,
            "reject": self.reject,
            "per_sample": [
                {"alpha_sq": s.alpha_sq, "bandwidth": s.bandwidth, "argmax_k": s.argmax_k}
                for s in self.per_sample
            ],
            "sample_sizes": list(self.sample_sizes),
            "kind": self.kind,
            "seed": self.seed,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _samples_of(panel):
    if isinstance(panel, Panel):
        return panel.samples
    return [np.asarray(s, dtype=float) for s in panel]


def _pairs_of(spec, K):
    if isinstance(spec.projection, (list, tuple)):
        if len(spec.projection) != K:
            raise ConfigurationError(
                f"got {len(spec.projection)} projection pairs for {K} samples"
            )
        return list(spec.projection)
    return [spec.projection] * K


def _split_learning(samples, spec, learning):
    """Resolve per-sample learning series and the data entering the test.

    Learning series may be supplied directly (one matrix per sample) or
    carved from the front of each sample via ``spec.learning_length``; the
    carved block is excluded from the test statistics.
    """
    if spec.lrv_mode != lrv.MODE_LEARNING:
        return None, samples
    if learning is not None:
        if len(learning) != len(samples):
            raise ConfigurationError("need one learning series per sample")
        return [np.asarray(b, dtype=float) for b in learning], samples
    if spec.learning_length is None:
        raise ConfigurationError(
            "learning-sample mode requires learning data or learning_length"
        )
    lengths = np.atleast_1d(spec.learning_length).astype(int)
    if lengths.size == 1:
        lengths = np.full(len(samples), lengths[0])
    blocks, rest = [], []
    for j, (y, L) in enumerate(zip(samples, lengths)):
        if not 0 < L < y.shape[0]:
            raise ConfigurationError(
                f"learning_length {L} invalid for sample {j} of size {y.shape[0]}"
            )
        blocks.append(y[:L])
        rest.append(y[L:])
    return blocks, rest


def _lrv_estimates(samples, pairs, spec, learning_blocks):
    ests = []
    for j, (y, pair) in enumerate(zip(samples, pairs)):
        if spec.alpha_sq_override is not None:
            a = float(spec.alpha_sq_override[j])
            if a <= 0:
                raise DegenerateLrvError(
                    f"alpha_sq_override for sample {j} must be positive", sample_index=j)
            ests.append(lrv.LrvEstimate(alpha_sq=a, bandwidth=0.0, n_lags=0,
                                        mode="override"))
            continue
        source = learning_blocks[j] if learning_blocks is not None else y
        ps = sumproc.project(source, pair)
        try:
            ests.append(lrv.lrv_estimate(ps, mode=spec.lrv_mode))
        except DegenerateLrvError as exc:
            raise DegenerateLrvError(f"sample {j}: {exc}", sample_index=j) from exc
    return ests


def _critval_cache_key(kind, K, level, alphas, kappas, n_grid, n_rep, seed):
    def sig4(x):
        return float(f"{x:.4g}")

    a = tuple(sig4(x) for x in alphas) if alphas is not None else None
    k = tuple(sig4(x) for x in kappas) if kappas is not None else None
    return (kind, K, level, a, k, n_grid, n_rep, seed)


_critval_cache: dict = {}


def _critical_value(spec, K, alphas=None, kappas=None):
    key = _critval_cache_key(spec.kind, K, spec.level, alphas, kappas,
                             spec.n_grid, spec.n_rep, spec.seed)
    if key not in _critval_cache:
        req = limits.CritValRequest(
            kind=spec.kind, K=K, level=spec.level,
            alpha_weights=alphas, kappa=kappas,
            n_grid=spec.n_grid, n_rep=spec.n_rep, seed=spec.seed)
        _critval_cache[key] = limits.critical_value(req)
    return _critval_cache[key]


def _sum_of_max_sq(processes, ests):
    stat = 0.0
    infos = []
    for j, (proc, est) in enumerate(zip(processes, ests)):
        if est.alpha_sq <= 0:
            raise DegenerateLrvError(f"sample {j}: non-positive long-run variance",
                                     sample_index=j)
        val, k = sumproc.per_sample_max_sq(proc, math.sqrt(est.alpha_sq))
        stat += val
        infos.append(PerSampleInfo(alpha_sq=est.alpha_sq, bandwidth=est.bandwidth,
                                   argmax_k=k))
    return stat, infos


def _report(spec, stat, crit, infos, sizes):
    return TestReport(statistic=float(stat), critical_value=float(crit),
                      level=spec.level, reject=bool(stat > crit),
                      per_sample=infos, sample_sizes=tuple(sizes),
                      kind=spec.kind, seed=spec.seed)


def run_q_test(panel, spec: TestSpec, learning=None) -> TestReport:
    """Sum of maximally selected squared CUSUMs against known targets."""
    samples = _samples_of(panel)
    K = len(samples)
    pairs = _pairs_of(spec, K)
    blocks, data = _split_learning(samples, spec, learning)
    ests = _lrv_estimates(data, pairs, spec, blocks)
    processes = [
        sumproc.d_process(sumproc.project(y, pair), spec.targets.for_sample(j))
        for j, (y, pair) in enumerate(zip(data, pairs))
    ]
    stat, infos = _sum_of_max_sq(processes, ests)
    crit = _critical_value(spec, K)
    return _report(spec, stat, crit, infos, (y.shape[0] for y in data))


def run_q_breve_test(panel, spec: TestSpec, learning=None) -> TestReport:
    """Sum of maximally selected squared bridge CUSUMs; target-free."""
    samples = _samples_of(panel)
    K = len(samples)
    pairs = _pairs_of(spec, K)
    blocks, data = _split_learning(samples, spec, learning)
    ests = _lrv_estimates(data, pairs, spec, blocks)
    processes = [sumproc.bridge_process(sumproc.project(y, pair))
                 for y, pair in zip(data, pairs)]
    stat, infos = _sum_of_max_sq(processes, ests)
    crit = _critical_value(spec, K)
    return _report(spec, stat, crit, infos, (y.shape[0] for y in data))


def _pooled_processes(data, pair, targets):
    """Per-sample summands of the pooled statistic, scaled by 1/sqrt(N total)."""
    n_total = sum(y.shape[0] for y in data)
    procs = []
    for j, y in enumerate(data):
        ps = sumproc.project(y, pair)
        n = ps.n
        if targets is None:
            k = np.arange(n + 1)
            f = ps.s - (k / n) * ps.s[n]
            f[0] = 0.0
            f[n] = 0.0
        else:
            f = ps.s - sumproc._cumulative_target(targets.for_sample(j), n)
            f[0] = 0.0
        procs.append(f / math.sqrt(n_total))
    return procs


def _run_pooled(panel, spec, learning):
    samples = _samples_of(panel)
    K = len(samples)
    pair = _pairs_of(spec, K)[0]
    blocks, data = _split_learning(samples, spec, learning)
    ests = _lrv_estimates(data, [pair] * K, spec, blocks)
    for j, est in enumerate(ests):
        if est.alpha_sq <= 0:
            raise DegenerateLrvError(f"sample {j}: non-positive long-run variance",
                                     sample_index=j)
    procs = _pooled_processes(data, pair, spec.targets)
    stat, argmax = sumproc.pooled_d_grid_max(procs)
    sizes = tuple(y.shape[0] for y in data)
    n_total = sum(sizes)
    alphas = tuple(math.sqrt(e.alpha_sq) for e in ests)
    kappas = tuple(n / n_total for n in sizes)
    crit = _critical_value(spec, K, alphas=alphas, kappas=kappas)
    infos = [PerSampleInfo(alpha_sq=e.alpha_sq, bandwidth=e.bandwidth, argmax_k=k)
             for e, k in zip(ests, argmax)]
    return _report(spec, stat, crit, infos, sizes)


def run_v_test(panel, spec: TestSpec, learning=None) -> TestReport:
    """Pooled grid-maximum CUSUM against known targets."""
    return _run_pooled(panel, spec, learning)


def run_v_breve_test(panel, spec: TestSpec, learning=None) -> TestReport:
    """Pooled grid-maximum bridge CUSUM; target-free."""
    return _run_pooled(panel, spec, learning)


_RUNNERS = {
    "q": run_q_test,
    "q-breve": run_q_breve_test,
    "v": run_v_test,
    "v-breve": run_v_breve_test,
}


def run_test(panel, spec: TestSpec, learning=None) -> TestReport:
    """Dispatch to the runner matching ``spec.kind``."""
    return _RUNNERS[spec.kind](panel, spec, learning=learning)
