"""The goodness-of-fit test for independent component models.

The statistic compares two estimates of the excess kurtosis of the
components. The first half of the sample estimates it from the variance of
``||X||_2^2``; the second half from the mean of ``||X||_4^4`` normalized by
the entrywise fourth-power sum of a shrunk covariance square root. Under an
IC model both target ``E(Z^4) - 3``, so their difference ``delta`` is
centered, and ``delta / sigma_hat`` is asymptotically standard normal.
"""
from __future__ import annotations

import math
import statistics
import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from . import estimators as est
from .errors import DegenerateVariance, IcgofError, InvalidInput, ZeroDenominator

_STD_NORMAL = statistics.NormalDist()


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_quantile(q: float) -> float:
    if not 0.0 < q < 1.0:
        raise InvalidInput(f"quantile level must lie in (0, 1), got {q!r}")
    return _STD_NORMAL.inv_cdf(q)


def two_sided_pvalue(z: float) -> float:
    # erfc keeps precision in the far tail where 1 - cdf would cancel
    return math.erfc(abs(z) / math.sqrt(2.0))


class DeltaStat(NamedTuple):
    delta: float
    lhs: float
    rhs: float


@dataclass(frozen=True)
class Diagnostics:
    n: int
    p: int
    s_tilde: float
    s_hat: float
    ell4_tilde: float
    ell4_hat: float
    lhs_term: float
    rhs_term: float


@dataclass(frozen=True)
class TestResult:
    delta: float
    sigma_hat: float
    z_stat: float
    p_value: float
    reject: bool
    alpha: float
    diagnostics: Diagnostics

    __test__ = False  # not a pytest class

    def to_dict(self) -> dict:
        d = self.diagnostics
        return {
            "n": d.n,
            "p": d.p,
            "delta": self.delta,
            "sigma_hat": self.sigma_hat,
            "z_stat": self.z_stat,
            "p_value": self.p_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "diagnostics": asdict(d),
        }


def _row_norm_moments(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sq = x * x
    return sq.sum(axis=1), (sq * sq).sum(axis=1)


def _delta_parts(x: np.ndarray) -> dict:
    n = x.shape[0]
    half = n // 2
    first, second = x[:half], x[half:]

    # first half: variance-of-squared-norm side
    norm2_sq, _ = _row_norm_moments(first)
    cov_first = est.sample_cov(x, est.Subset.FIRST_HALF)
    diag_first = np.diag(cov_first.sigma)
    denom_lhs = float(np.sum(diag_first**2))
    if denom_lhs == 0.0:
        raise ZeroDenominator("first-half diagonal second moments are all zero")
    var_norm2 = float(np.var(norm2_sq, ddof=1))
    lhs = (var_norm2 - 2.0 * est.frob_sq_bias_corrected(cov_first)) / denom_lhs

    # second half: fourth-moment side with the shrinkage normalizer
    _, norm4 = _row_norm_moments(second)
    cov_second = est.sample_cov(x, est.Subset.SECOND_HALF)
    diag_second = np.diag(cov_second.sigma)
    shrunk = est.shrinkage_cov(cov_second, n)
    ell4 = est.ell4_of_sqrt(shrunk)
    if ell4 == 0.0:
        raise ZeroDenominator("shrunk second-half covariance is zero")
    rhs = (float(np.mean(norm4)) - 3.0 * float(np.sum(diag_second**2))) / ell4
    return {"delta": lhs - rhs, "lhs": lhs, "rhs": rhs, "s_tilde": shrunk.s, "ell4_tilde": ell4}


def _sigma_parts(x: np.ndarray) -> dict:
    n = x.shape[0]
    norm2_sq, norm4 = _row_norm_moments(x)
    cov = est.sample_cov(x, est.Subset.FULL)
    diag_sq = float(np.sum(np.diag(cov.sigma) ** 2))
    shrunk = est.shrinkage_cov(cov, n)
    ell4 = est.ell4_of_sqrt(shrunk)
    if diag_sq == 0.0 or ell4 == 0.0:
        raise ZeroDenominator("full-sample covariance is zero")
    var2 = float(np.var(norm2_sq, ddof=1))
    var4 = float(np.var(norm4, ddof=1))
    value = 4.0 * var2 * var2 / (n * diag_sq * diag_sq) + 2.0 * var4 / (n * ell4 * ell4)
    if not value > 0.0:
        raise DegenerateVariance("sample variances of ||X||_2^2 and ||X||_4^4 are both zero")
    return {"sigma_sq": value, "s_hat": shrunk.s, "ell4_hat": ell4}


def delta_stat(x) -> DeltaStat:
    """Difference between the two half-sample kurtosis estimates.

    Returns ``(delta, lhs, rhs)`` where ``lhs`` comes from rows ``[0, n/2)``
    and ``rhs`` from rows ``[n/2, n)``.
    """
    parts = _delta_parts(est.as_data_matrix(x))
    return DeltaStat(parts["delta"], parts["lhs"], parts["rhs"])


def sigma_hat_sq(x) -> float:
    """Variance estimate for ``delta`` built from all ``n`` observations."""
    return _sigma_parts(est.as_data_matrix(x, require_even=False))["sigma_sq"]


def prepare(x, shuffle_seed: int | None = None) -> np.ndarray:
    """Drop a trailing row when ``n`` is odd and optionally shuffle rows."""
    a = est.as_data_matrix(x, require_even=False)
    if a.shape[0] % 2:
        warnings.warn(
            f"n={a.shape[0]} is odd; dropping the last observation", RuntimeWarning, stacklevel=3
        )
        a = a[:-1]
    if shuffle_seed is not None:
        perm = np.random.default_rng(shuffle_seed).permutation(a.shape[0])
        a = a[perm]
    return a


def run_test(x, alpha: float = 0.05, shuffle_seed: int | None = None) -> TestResult:
    """Run the test at level ``alpha``.

    Rejects when ``|delta| > sigma_hat * z_{1 - alpha/2}``.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidInput(f"alpha must lie in (0, 1), got {alpha!r}")
    a = prepare(x, shuffle_seed)
    try:
        dp = _delta_parts(a)
        sp = _sigma_parts(a)
    except IcgofError as exc:
        n, p = a.shape
        raise type(exc)(f"test failed on {n}x{p} data: {exc}") from exc
    sigma_hat = math.sqrt(sp["sigma_sq"])
    z = dp["delta"] / sigma_hat
    pval = two_sided_pvalue(z)
    reject = abs(dp["delta"]) > sigma_hat * normal_quantile(1.0 - alpha / 2.0)
    diag = Diagnostics(
        n=a.shape[0],
        p=a.shape[1],
        s_tilde=dp["s_tilde"],
        s_hat=sp["s_hat"],
        ell4_tilde=dp["ell4_tilde"],
        ell4_hat=sp["ell4_hat"],
        lhs_term=dp["lhs"],
        rhs_term=dp["rhs"],
    )
    return TestResult(dp["delta"], sigma_hat, z, pval, bool(reject), alpha, diag)
