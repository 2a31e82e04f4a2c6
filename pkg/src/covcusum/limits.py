"""Limit distributions and Monte Carlo critical values.

Closed-form series for the suprema of |Brownian motion| and |Brownian
bridge| on [0, 1], plus simulation of the four null functionals behind
the change-point tests.  The K-dimensional grid suprema of the pooled
functionals separate per coordinate, so the simulation only needs the
per-path extrema of each independent motion/bridge; these are cached and
reused across requests sharing (K, n_grid, n_rep, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError

KINDS = ("q", "v", "q-breve", "v-breve")
DEFAULT_N_GRID = 2000
DEFAULT_N_REP = 100_000
_BLOCK = 2048

_SERIES_TOL = 1e-14


def sup_abs_bm_cdf(y: float) -> float:
    """P(sup_{[0,1]} |B|^2 <= y) for standard Brownian motion.

    Alternating reflection series, evaluated until terms drop below 1e-14.
    The argument is the bound on the squared supremum.
    """
    if y < 0.0:
        raise ValueError(f"argument must be non-negative, got {y}")
    if y == 0.0:
        return 0.0
    total = 0.0
    l = 0
    while True:
        term = (-1.0) ** l / (2 * l + 1) * math.exp(-((2 * l + 1) ** 2) * math.pi ** 2 / (8.0 * y))
        total += term
        if abs(term) < _SERIES_TOL:
            break
        l += 1
    return min(max(4.0 / math.pi * total, 0.0), 1.0)


def sup_abs_bb_cdf(y: float) -> float:
    """P(sup_{[0,1]} |bridge|^2 <= y), the Kolmogorov law in squared form."""
    if y <= 0.0:
        raise ValueError(f"argument must be positive, got {y}")
    total = 0.0
    l = 1
    while True:
        term = math.exp(-((2 * l - 1) ** 2) * math.pi ** 2 / (8.0 * y))
        total += term
        if term < _SERIES_TOL:
            break
        l += 1
    return min(math.sqrt(2.0 * math.pi / y) * total, 1.0)


@dataclass(frozen=True)
class CritValRequest:
    kind: str
    K: int
    level: float
    alpha_weights: Optional[tuple] = None
    kappa: Optional[tuple] = None
    n_grid: int = DEFAULT_N_GRID
    n_rep: int = DEFAULT_N_REP
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown statistic kind {self.kind!r}")
        if self.K < 1:
            raise ConfigurationError("K must be >= 1")
        if not 0.0 < self.level < 1.0:
            raise ConfigurationError(f"level must be in (0, 1), got {self.level}")
        if self.n_grid < 100:
            raise ConfigurationError("n_grid must be >= 100")
        if self.n_rep < 1000:
            raise ConfigurationError("n_rep must be >= 1000")
        if self.alpha_weights is not None:
            aw = tuple(float(a) for a in np.atleast_1d(self.alpha_weights))
            if len(aw) != self.K or any(a <= 0 for a in aw):
                raise ConfigurationError("alpha_weights must be K positive reals")
            object.__setattr__(self, "alpha_weights", aw)
        if self.kappa is not None:
            kp = tuple(float(k) for k in np.atleast_1d(self.kappa))
            if len(kp) != self.K or any(k <= 0 for k in kp):
                raise ConfigurationError("kappa must be K positive reals")
            if sum(kp) > 1.0 + 1e-9:
                raise ConfigurationError("kappa entries must sum to at most 1")
            object.__setattr__(self, "kappa", kp)


@dataclass
class PathExtrema:
    """Per-replication, per-sample extrema of B and its bridge on [0, 1].

    Arrays have shape (n_rep, K).  These are sufficient for every grid
    supremum used here: sup |B| = max(bm_max, -bm_min) and the pooled
    supremum of a positively weighted sum separates per coordinate.
    """

    bm_max: np.ndarray
    bm_min: np.ndarray
    bb_max: np.ndarray
    bb_min: np.ndarray
    n_grid: int
    seed: int

    @property
    def n_rep(self):
        return self.bm_max.shape[0]

    @property
    def K(self):
        return self.bm_max.shape[1]


def simulate_brownian_paths(n_grid: int, n_rep: int, seed: int) -> np.ndarray:
    """Discretized standard Brownian paths, shape (n_rep, n_grid + 1).

    Cumulative sums of N(0, 1/n_grid) increments with B(0) = 0.  Intended
    for small-scale checks; large Monte Carlo runs use the extrema-only
    reduction of ``simulate_path_extrema``.
    """
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    inc = rng.standard_normal((n_rep, n_grid)) / math.sqrt(n_grid)
    paths = np.empty((n_rep, n_grid + 1))
    paths[:, 0] = 0.0
    np.cumsum(inc, axis=1, out=paths[:, 1:])
    return paths


def bridge_from_path(paths: np.ndarray) -> np.ndarray:
    """Turn discrete BM paths into bridge paths B(t) - t B(1)."""
    n_grid = paths.shape[1] - 1
    t = np.arange(n_grid + 1) / n_grid
    return paths - np.outer(paths[:, -1], t)


def _block_extrema(seed, block_index, j, n_block, n_grid):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(block_index), int(j)))
    rng = np.random.Generator(np.random.Philox(ss))
    inc = rng.standard_normal((n_block, n_grid)) / math.sqrt(n_grid)
    paths = np.cumsum(inc, axis=1)
    bm_max = np.maximum(paths.max(axis=1), 0.0)
    bm_min = np.minimum(paths.min(axis=1), 0.0)
    t = np.arange(1, n_grid + 1) / n_grid
    paths -= paths[:, -1:] * t
    bb_max = np.maximum(paths.max(axis=1), 0.0)
    bb_min = np.minimum(paths.min(axis=1), 0.0)
    return bm_max, bm_min, bb_max, bb_min


_extrema_cache: dict = {}


def simulate_path_extrema(K: int, n_grid: int, n_rep: int, seed: int,
                          workers: int = 1, cache: bool = True) -> PathExtrema:
    """Simulate per-path extrema for K independent motions and bridges.

    Replications are generated in fixed-size blocks keyed by
    (seed, block index, sample index), so the result is identical for any
    worker count.  Results are memoized on (K, n_grid, n_rep, seed).
    """
    key = (K, n_grid, n_rep, seed)
    if cache and key in _extrema_cache:
        return _extrema_cache[key]

    n_blocks = (n_rep + _BLOCK - 1) // _BLOCK
    arrays = [np.empty((n_rep, K)) for _ in range(4)]

    def fill(b, j):
        lo = b * _BLOCK
        hi = min(lo + _BLOCK, n_rep)
        parts = _block_extrema(seed, b, j, hi - lo, n_grid)
        for arr, part in zip(arrays, parts):
            arr[lo:hi, j] = part

    tasks = [(b, j) for b in range(n_blocks) for j in range(K)]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda t: fill(*t), tasks))
    else:
        for t in tasks:
            fill(*t)

    out = PathExtrema(*arrays, n_grid=n_grid, seed=seed)
    if cache:
        _extrema_cache[key] = out
    return out


def functional_draws(req: CritValRequest, extrema: PathExtrema) -> np.ndarray:
    """Per-replication draws of the requested null functional."""
    if extrema.K < req.K:
        raise ConfigurationError("extrema were simulated for fewer samples than requested")
    bm_max = extrema.bm_max[:, : req.K]
    bm_min = extrema.bm_min[:, : req.K]
    bb_max = extrema.bb_max[:, : req.K]
    bb_min = extrema.bb_min[:, : req.K]
    if req.kind == "q":
        return (np.maximum(bm_max, -bm_min) ** 2).sum(axis=1)
    if req.kind == "q-breve":
        return (np.maximum(bb_max, -bb_min) ** 2).sum(axis=1)
    # Pooled kinds: sup over the grid of |sum_j c_j B_j(s_j)| with positive
    # weights c_j = alpha_j sqrt(kappa_j) separates per coordinate.
    if req.alpha_weights is None or req.kappa is None:
        raise ConfigurationError(f"kind {req.kind!r} requires alpha_weights and kappa")
    c = np.asarray(req.alpha_weights) * np.sqrt(np.asarray(req.kappa))
    if req.kind == "v":
        hi, lo = bm_max, bm_min
    else:
        hi, lo = bb_max, bb_min
    return np.maximum(hi @ c, -(lo @ c))


def empirical_quantile(draws: np.ndarray, level: float) -> float:
    """Order statistic at ceil(level * n); deterministic and conservative."""
    n = len(draws)
    k = min(max(math.ceil(level * n), 1), n)
    return float(np.partition(draws, k - 1)[k - 1])


def critical_value(req: CritValRequest, workers: int = 1) -> float:
    """Monte Carlo critical value of the requested statistic at its level."""
    extrema = simulate_path_extrema(req.K, req.n_grid, req.n_rep, req.seed, workers=workers)
    return empirical_quantile(functional_draws(req, extrema), req.level)


def critical_value_table(requests, workers: int = 1):
    """Rows (kind, K, level, value, n_grid, n_rep, seed) for CSV export."""
    rows = []
    for req in requests:
        rows.append((req.kind, req.K, req.level, critical_value(req, workers=workers),
                     req.n_grid, req.n_rep, req.seed))
    return rows
