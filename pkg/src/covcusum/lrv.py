"""Long-run variance estimation for the projected product series.

Kernel-weighted sum of sample autocovariances with quadratic-spectral
weights and an AR(1) plug-in bandwidth in the Andrews style.  The scale
estimated here standardizes the partial-sum processes of ``sumproc``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLrvError, ShapeError
from .sumproc import ProjectedSample

QS_BANDWIDTH_CONST = 1.3221
RHO_CLAMP = 0.97
# QS weights are negligible beyond three bandwidths.
TRUNCATION_BANDWIDTHS = 3.0

MODE_IN_SAMPLE = "in-sample"
MODE_LEARNING = "learning-sample"


@dataclass
class LrvEstimate:
    alpha_sq: float
    bandwidth: float
    n_lags: int
    mode: str
    degenerate: bool = False
    rho_clamped: bool = False


def _products(ps) -> np.ndarray:
    if isinstance(ps, ProjectedSample):
        return ps.p
    return np.asarray(ps, dtype=float)


def autocov_hat(ps, h: int) -> float:
    """Lag-h sample autocovariance of the product series, divisor N.

    Centered at the overall mean; the divisor is N (not N - h), matching
    the partial-sum scaling the estimate standardizes.
    """
    p = _products(ps)
    n = len(p)
    if not 0 <= h < n:
        raise ShapeError(f"lag {h} out of range for series of length {n}")
    c = p - p.mean()
    return float(c[: n - h] @ c[h:]) / n


def qs_weight(x: float) -> float:
    """Quadratic spectral kernel, k(0) = 1, symmetric, |k| <= 1."""
    z = 6.0 * math.pi * x / 5.0
    if abs(z) < 1e-3:
        # Taylor branch: sin(z)/z - cos(z) cancels catastrophically near 0.
        return 1.0 - z ** 2 / 10.0 + z ** 4 / 280.0
    return 25.0 / (12.0 * math.pi ** 2 * x ** 2) * (math.sin(z) / z - math.cos(z))


def qs_bandwidth(rho: float, n: int) -> float:
    """Bandwidth rule 1.3221 (a(2) n)^{1/5} with AR(1) plug-in a(2)."""
    if rho == 0.0:
        return 0.0
    a2 = 4.0 * rho ** 2 / (1.0 - rho) ** 4
    return QS_BANDWIDTH_CONST * (a2 * n) ** 0.2


def andrews_bandwidth(ps) -> float:
    """Adaptive bandwidth from an AR(1) fit to the centered product series.

    The lag-1 autocorrelation is clamped to [-0.97, 0.97] to keep the
    bandwidth finite on near-unit-root series.
    """
    p = _products(ps)
    n = len(p)
    if n < 4:
        raise ShapeError(f"need at least 4 observations, got {n}")
    g0 = autocov_hat(p, 0)
    if g0 <= 0.0:
        raise DegenerateLrvError("constant product series: autocovariance at lag 0 is zero")
    rho = autocov_hat(p, 1) / g0
    rho = min(max(rho, -RHO_CLAMP), RHO_CLAMP)
    return qs_bandwidth(rho, n)


def lrv_estimate(ps, mode: str = MODE_IN_SAMPLE, bandwidth_override=None) -> LrvEstimate:
    """Kernel long-run variance estimate of the product series.

    alpha_sq = Gamma(0) + 2 sum_{h=1}^{m} k(h / S) Gamma(h) with the QS
    kernel and m = min(ceil(3 S), N - 1).  A non-positive result is
    clamped to 1e-12 * Gamma(0) and flagged degenerate.
    """
    p = _products(ps)
    n = len(p)
    min_n = 2 if bandwidth_override == 0 else 4
    if n < min_n:
        raise ShapeError(f"need at least {min_n} observations, got {n}")
    g0 = autocov_hat(p, 0)
    if g0 <= 0.0:
        raise DegenerateLrvError("constant product series: long-run variance undefined")

    if bandwidth_override is not None:
        bw = float(bandwidth_override)
        rho_clamped = False
    else:
        rho_raw = autocov_hat(p, 1) / g0
        rho_clamped = abs(rho_raw) > RHO_CLAMP
        rho = min(max(rho_raw, -RHO_CLAMP), RHO_CLAMP)
        bw = qs_bandwidth(rho, n)

    if bw <= 0.0:
        return LrvEstimate(alpha_sq=g0, bandwidth=0.0, n_lags=0, mode=mode,
                           rho_clamped=rho_clamped)

    m = min(math.ceil(TRUNCATION_BANDWIDTHS * bw), n - 1)
    total = g0
    for h in range(1, m + 1):
        total += 2.0 * qs_weight(h / bw) * autocov_hat(p, h)

    degenerate = total <= 0.0
    if degenerate:
        total = max(total, 1e-12 * g0)
    return LrvEstimate(alpha_sq=float(total), bandwidth=bw, n_lags=m, mode=mode,
                       degenerate=degenerate, rho_clamped=rho_clamped)
