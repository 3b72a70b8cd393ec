"""Covariance-derived estimates entering the test statistic."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import InvalidInput


class Subset(str, enum.Enum):
    FULL = "full"
    FIRST_HALF = "first_half"
    SECOND_HALF = "second_half"


@dataclass(frozen=True)
class CovEstimate:
    sigma: np.ndarray
    m_used: int
    kind: Subset


@dataclass(frozen=True)
class ShrinkageCov:
    s: float
    matrix: np.ndarray
    base_kind: Subset


def as_data_matrix(x, require_even: bool = True) -> np.ndarray:
    """Validate an ``n x p`` observation matrix (rows are observations)."""
    a = np.asarray(x, dtype=float)
    if a.ndim != 2:
        raise InvalidInput(f"data must be 2-D (n x p), got ndim={a.ndim}")
    n, p = a.shape
    if n < 4:
        raise InvalidInput(f"need at least 4 observations, got n={n}")
    if p < 1:
        raise InvalidInput("need at least one column")
    if require_even and n % 2:
        raise InvalidInput(f"n must be even, got n={n}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("data contains non-finite entries")
    return a


def subset_rows(x: np.ndarray, subset: Subset) -> np.ndarray:
    subset = Subset(subset)
    half = x.shape[0] // 2
    if subset is Subset.FIRST_HALF:
        return x[:half]
    if subset is Subset.SECOND_HALF:
        return x[half:]
    return x


def sample_cov(x, subset: Subset = Subset.FULL) -> CovEstimate:
    """Uncentered second-moment matrix ``(1/m) sum X_i X_i^T`` over a row subset."""
    subset = Subset(subset)
    d = as_data_matrix(x, require_even=subset is not Subset.FULL)
    rows = subset_rows(d, subset)
    m = rows.shape[0]
    sigma = rows.T @ rows / m
    return CovEstimate((sigma + sigma.T) / 2.0, m, subset)


def frob_sq_bias_corrected(c: CovEstimate) -> float:
    """``||S||_F^2 - tr(S)^2 / m``; can be negative in small samples."""
    if c.m_used < 2:
        raise InvalidInput("bias correction needs m_used >= 2")
    tr = matcore.trace(c.sigma)
    return matcore.frob_sq(c.sigma) - tr * tr / c.m_used


def _offdiag_sq_sum(sigma: np.ndarray) -> float:
    off = sigma.copy()
    np.fill_diagonal(off, 0.0)
    return matcore.frob_sq(off)


def shrinkage_weight(c: CovEstimate, n_full: int) -> float:
    """Weight ``s`` with ``1 - s^2 = min{(2/n) tr(S)^2 / sum_{i!=j} S_ij^2, 1}``.

    ``n_full`` is the full sample size even when ``c`` comes from a half.
    """
    off = _offdiag_sq_sum(c.sigma)
    if off <= 0.0:
        return 0.0
    tr = matcore.trace(c.sigma)
    ratio = (2.0 / n_full) * tr * tr / off
    return float(np.sqrt(1.0 - min(ratio, 1.0)))


def shrinkage_cov(c: CovEstimate, n_full: int) -> ShrinkageCov:
    s = shrinkage_weight(c, n_full)
    m = s * c.sigma + (1.0 - s) * matcore.diag_part(c.sigma)
    return ShrinkageCov(s, m, c.kind)


def ell4_of_sqrt(sc: ShrinkageCov, clamp_floor: float = matcore.DEFAULT_CLAMP_FLOOR) -> float:
    """Entrywise fourth-power sum of the PSD square root of the shrunk matrix."""
    return matcore.ell4_4(matcore.sqrt_psd(sc.matrix, clamp_floor))
