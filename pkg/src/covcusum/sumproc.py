"""Projected product series, partial-sum processes, bridges, grid maxima.

The monitored scalar per observation is p_i = (v'Y_i)(w'Y_i); its running
sums S_k reproduce the bilinear form of the unnormalized sample covariance
partial sums.  No d x d matrix is ever materialized: projecting first costs
O(N d) instead of O(N d^2) and gives identical values by bilinearity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DegenerateLrvError, ShapeError


def kahan_cumsum(values: np.ndarray) -> np.ndarray:
    """Compensated running sums with a leading zero: out[k] = sum(values[:k]).

    Kept sequential and compensated so results are identical no matter how
    per-sample work is scheduled across threads.
    """
    out = np.empty(len(values) + 1)
    out[0] = 0.0
    total = 0.0
    comp = 0.0
    for i, v in enumerate(values):
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i + 1] = total
    return out


@dataclass(frozen=True)
class ProjectionPair:
    """A pair of weight vectors with their recorded l1 norms."""

    v: np.ndarray
    w: np.ndarray
    l1_v: float
    l1_w: float

    @classmethod
    def from_vectors(cls, v, w=None):
        v = np.asarray(v, dtype=float)
        w = v if w is None else np.asarray(w, dtype=float)
        if v.ndim != 1 or w.ndim != 1 or v.shape != w.shape:
            raise ShapeError(f"v and w must be 1-d of equal length, got {v.shape}, {w.shape}")
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(w))):
            raise ShapeError("projection vectors must be finite")
        l1_v = float(np.abs(v).sum())
        l1_w = float(np.abs(w).sum())
        if l1_v == 0.0 or l1_w == 0.0:
            raise ShapeError("projection vectors must not be all-zero")
        return cls(v=v, w=w, l1_v=l1_v, l1_w=l1_w)

    @property
    def d(self):
        return self.v.shape[0]


@dataclass
class ProjectedSample:
    """Scalar series of one sample after projection.

    x = v'Y, y = w'Y, p = x * y elementwise, s = running sums of p with
    s[0] = 0 and len(s) = n + 1.
    """

    x: np.ndarray
    y: np.ndarray
    p: np.ndarray
    s: np.ndarray

    @property
    def n(self):
        return len(self.p)


@dataclass
class TargetBilinear:
    """Per-sample target values v' Cov(Y_i) w, constant or per-observation."""

    values: list  # one float or length-N_j array per sample

    def for_sample(self, j):
        return self.values[j]


def project(sample: np.ndarray, pair: ProjectionPair) -> ProjectedSample:
    """Project one observation matrix (rows=time) through a vector pair."""
    sample = np.asarray(sample, dtype=float)
    if sample.ndim != 2:
        raise ShapeError(f"sample must be a 2-d matrix, got ndim={sample.ndim}")
    if sample.shape[1] != pair.d:
        raise ShapeError(
            f"sample has {sample.shape[1]} columns but projection vectors have length {pair.d}"
        )
    x = sample @ pair.v
    y = sample @ pair.w
    p = x * y
    return ProjectedSample(x=x, y=y, p=p, s=kahan_cumsum(p))


def _cumulative_target(target, n):
    """Running sums of the target sequence, length n + 1, leading zero."""
    if np.ndim(target) == 0:
        return float(target) * np.arange(n + 1)
    target = np.asarray(target, dtype=float)
    if target.shape != (n,):
        raise ShapeError(f"target length {target.shape} does not match sample length {n}")
    return kahan_cumsum(target)


def d_process(ps: ProjectedSample, target) -> np.ndarray:
    """Scaled partial-sum deviation from the target bilinear form.

    Returns the length-(N+1) sequence N^{-1/2} (S_k - sum_{i<=k} target_i)
    for k = 0..N; entry 0 is exactly zero.
    """
    n = ps.n
    if n < 1:
        raise ShapeError("empty sample")
    out = (ps.s - _cumulative_target(target, n)) / np.sqrt(n)
    out[0] = 0.0
    return out


def bridge_process(ps: ProjectedSample) -> np.ndarray:
    """Endpoint-recentered partial-sum process N^{-1/2} (S_k - (k/N) S_N).

    Target-free: only the running sums enter.  Both endpoints are zero
    bit-exactly.
    """
    n = ps.n
    if n < 1:
        raise ShapeError("empty sample")
    k = np.arange(n + 1)
    out = (ps.s - (k / n) * ps.s[n]) / np.sqrt(n)
    out[0] = 0.0
    out[n] = 0.0
    return out


def pooled_d_grid_max(processes: Sequence[np.ndarray]):
    """Maximum of |sum_j f_j(k_j)| over the full product grid.

    Because the objective is additive across samples, the grid maximum
    separates: it is the larger of sum_j max f_j and sum_j max(-f_j),
    computable in O(sum_j N_j) instead of O(prod_j N_j).  Returns
    (value, multi-index); per-sample argmax ties break to the smallest
    index, and a tie between the two branches resolves to the positive one.
    """
    if not processes:
        raise ShapeError("no processes given")
    pos_total = 0.0
    neg_total = 0.0
    pos_idx = []
    neg_idx = []
    for f in processes:
        f = np.asarray(f, dtype=float)
        if f.ndim != 1 or len(f) < 1:
            raise ShapeError("each process must be a non-empty 1-d array")
        i_max = int(np.argmax(f))
        i_min = int(np.argmin(f))
        pos_total += f[i_max]
        neg_total += -f[i_min]
        pos_idx.append(i_max)
        neg_idx.append(i_min)
    if pos_total >= neg_total:
        return pos_total, tuple(pos_idx)
    return neg_total, tuple(neg_idx)


def per_sample_max_sq(process: np.ndarray, alpha: float):
    """Maximum squared standardized value max_k (f(k)/alpha)^2 with argmax."""
    if not alpha > 0.0:
        raise DegenerateLrvError(f"scale must be positive, got {alpha}")
    f = np.asarray(process, dtype=float)
    sq = (f / alpha) ** 2
    i = int(np.argmax(sq))
    return float(sq[i]), i
