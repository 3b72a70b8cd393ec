"""Analytic and brute-force checks of the fourth-moment identities behind the test."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .datagen import ComponentDist, draw_components
from .errors import InvalidInput
from .seeding import make_rng

# E(Z^4) of each standardized component law:
#   gaussian 3; t_nu 3 + 6/(nu-4) = 3 + 6/11 at nu=15;
#   Beta(a,b) excess 6[(a-b)^2(a+b+1) - ab(a+b+2)] / [ab(a+b+2)(a+b+3)] = -108/900 at (2,5);
#   Laplace excess 3; Uniform excess -6/5.
KAPPA4 = {
    ComponentDist.GAUSSIAN: 3.0,
    ComponentDist.T15: 3.0 + 6.0 / 11.0,
    ComponentDist.BETA25: 2.88,
    ComponentDist.LAPLACE: 6.0,
    ComponentDist.UNIFORM: 9.0 / 5.0,
}


@dataclass(frozen=True)
class MomentReport:
    analytic: float
    monte_carlo: float
    mc_se: float
    n_draws: int
    z_score: float


def analytic_kappa4(cd: ComponentDist) -> float:
    return KAPPA4[ComponentDist(cd)]


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = matcore.as_sym(a), matcore.as_sym(b)
    if a.shape != b.shape:
        raise InvalidInput(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def quadform_cov_formula(a, b, kappa4: float) -> float:
    """``cov(Z'AZ, Z'BZ) = 2 tr(AB) + (kappa4 - 3) sum_j A_jj B_jj``."""
    a, b = _pair(a, b)
    return float(2.0 * np.sum(a * b) + (kappa4 - 3.0) * np.dot(np.diag(a), np.diag(b)))


def constraint_sides(sigma, kappa4: float) -> tuple[float, float]:
    """Population values of the two sides of the global constraint.

    Both equal ``kappa4 - 3``; they are computed along separate routes so a
    caller can check the identity rather than assume it. The left side uses
    the probe ``A = I`` and the right side the probes ``A = e_j e_j^T``, each
    pushed through the quadratic-form covariance formula on ``Z`` with
    ``M = Sigma^{1/2} A Sigma^{1/2}``.
    """
    s = matcore.as_sym(sigma)
    if matcore.frob_sq(s) == 0.0:
        raise InvalidInput("sigma must be non-zero")
    root = matcore.sqrt_psd(s)
    p = s.shape[0]

    # var(||X||_2^2) = cov(Z'SZ, Z'SZ)
    var_norm2 = quadform_cov_formula(s, s, kappa4)
    diag_sq = float(np.sum(np.diag(s) ** 2))
    lhs = (var_norm2 - 2.0 * matcore.frob_sq(s)) / diag_sq

    # E(X_j^4) = var(X_j^2) + Sigma_jj^2 with X_j^2 = Z' r_j r_j' Z
    fourth = 0.0
    for j in range(p):
        r = root[:, j]
        m = np.outer(r, r)
        fourth += quadform_cov_formula(m, m, kappa4) + s[j, j] ** 2
    rhs = (fourth - 3.0 * diag_sq) / matcore.ell4_4(root)
    return float(lhs), float(rhs)


def mc_quadform_cov(a, b, cd: ComponentDist, n_draws: int, seed) -> MomentReport:
    """Monte Carlo covariance of ``(Z'AZ, Z'BZ)`` against the analytic formula."""
    a, b = _pair(a, b)
    p = a.shape[0]
    z = draw_components(cd, (n_draws, p), make_rng(seed))
    qa = np.einsum("ij,jk,ik->i", z, a, z)
    qb = np.einsum("ij,jk,ik->i", z, b, z)
    da = qa - qa.mean()
    db = qb - qb.mean()
    prod = da * db
    mc = float(prod.sum() / (n_draws - 1))
    se = float(prod.std(ddof=1) / np.sqrt(n_draws))
    analytic = quadform_cov_formula(a, b, analytic_kappa4(cd))
    return MomentReport(analytic, mc, se, n_draws, _zscore(mc, analytic, se))


def mc_kappa4(cd: ComponentDist, n_draws: int, seed) -> MomentReport:
    """Monte Carlo fourth moment of a standardized component law."""
    z = draw_components(cd, n_draws, make_rng(seed))
    z4 = z**4
    mc = float(z4.mean())
    se = float(z4.std(ddof=1) / np.sqrt(n_draws))
    analytic = analytic_kappa4(cd)
    return MomentReport(analytic, mc, se, n_draws, _zscore(mc, analytic, se))


def _zscore(mc: float, analytic: float, se: float) -> float:
    if se == 0.0:
        # degenerate draws (e.g. A = 0): exact agreement scores 0
        return 0.0 if mc == analytic else float(np.copysign(np.inf, mc - analytic))
    return (mc - analytic) / se
