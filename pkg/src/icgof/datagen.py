"""Seedable generators for null IC data and elliptical-interpolation alternatives."""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import InvalidInput
from .seeding import make_rng


class CovKind(str, enum.Enum):
    IDENTITY = "identity"
    AR = "ar"
    SPIKED = "spiked"


@dataclass(frozen=True)
class CovStructure:
    """Population covariance design.

    ``AR`` gives ``Sigma_ij = rho**|i-j|``. ``SPIKED`` gives eigenvalues
    ``j**(-exponent)`` with Haar-distributed eigenvectors drawn from ``seed``.
    """

    kind: CovKind
    p: int
    rho: float = 0.3
    exponent: float = 0.25
    seed: int = 0

    @classmethod
    def preset(cls, label: str, p: int, seed: int = 0) -> "CovStructure":
        """Structures ``"I"``, ``"II"`` and ``"III"`` of the simulation study."""
        label = label.upper()
        if label == "I":
            return cls(CovKind.IDENTITY, p)
        if label == "II":
            return cls(CovKind.AR, p, rho=0.3)
        if label == "III":
            return cls(CovKind.SPIKED, p, exponent=0.25, seed=seed)
        raise InvalidInput(f"unknown covariance structure {label!r}")


class ComponentDist(str, enum.Enum):
    T15 = "t15"
    BETA25 = "beta25"
    LAPLACE = "laplace"
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


class EtaLaw(str, enum.Enum):
    POISSON = "poisson"
    SCALED_BETA = "scaled_beta"
    SCALED_F = "scaled_f"


DEFAULT_MULTIPLIER = {EtaLaw.POISSON: 1.2, EtaLaw.SCALED_BETA: 1.0, EtaLaw.SCALED_F: 0.3}


@dataclass(frozen=True)
class AltSpec:
    eta_law: EtaLaw
    g: float
    c: float | None = None

    @property
    def multiplier(self) -> float:
        return DEFAULT_MULTIPLIER[EtaLaw(self.eta_law)] if self.c is None else self.c

    @property
    def h(self) -> float:
        return self.multiplier * self.g


def _haar_orthogonal(p: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((p, p)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


@functools.lru_cache(maxsize=64)
def build_cov(cs: CovStructure) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(sigma, sqrt_sigma)`` as read-only arrays."""
    p = cs.p
    if p < 1:
        raise InvalidInput("p must be positive")
    kind = CovKind(cs.kind)
    if kind is CovKind.IDENTITY:
        sigma = np.eye(p)
        root = np.eye(p)
    elif kind is CovKind.AR:
        if not abs(cs.rho) < 1:
            raise InvalidInput(f"AR structure needs |rho| < 1, got {cs.rho}")
        idx = np.arange(p)
        sigma = cs.rho ** np.abs(idx[:, None] - idx[None, :]).astype(float)
        root = matcore.sqrt_psd(sigma)
    else:
        if not cs.exponent > 0:
            raise InvalidInput("spiked spectrum needs a positive exponent")
        lam = np.arange(1, p + 1, dtype=float) ** (-cs.exponent)
        q = _haar_orthogonal(p, make_rng(cs.seed))
        sigma = (q * lam) @ q.T
        root = (q * np.sqrt(lam)) @ q.T
        sigma = (sigma + sigma.T) / 2.0
        root = (root + root.T) / 2.0
    sigma.setflags(write=False)
    root.setflags(write=False)
    return sigma, root


_BETA_A, _BETA_B = 2.0, 5.0
_BETA_MEAN = _BETA_A / (_BETA_A + _BETA_B)
_BETA_SD = math.sqrt(_BETA_A * _BETA_B / ((_BETA_A + _BETA_B) ** 2 * (_BETA_A + _BETA_B + 1)))


def draw_components(cd: ComponentDist, size, rng) -> np.ndarray:
    """I.i.d. draws standardized to mean 0 and variance 1 with analytic constants."""
    rng = make_rng(rng)
    cd = ComponentDist(cd)
    if cd is ComponentDist.GAUSSIAN:
        return rng.standard_normal(size)
    if cd is ComponentDist.T15:
        # var(t_nu) = nu / (nu - 2)
        return rng.standard_t(15, size) * math.sqrt(13.0 / 15.0)
    if cd is ComponentDist.BETA25:
        return (rng.beta(_BETA_A, _BETA_B, size) - _BETA_MEAN) / _BETA_SD
    if cd is ComponentDist.LAPLACE:
        return rng.laplace(0.0, 1.0, size) / math.sqrt(2.0)
    return rng.uniform(-1.0, 1.0, size) * math.sqrt(3.0)


def _mix(w: np.ndarray, cs: CovStructure) -> np.ndarray:
    if CovKind(cs.kind) is CovKind.IDENTITY:
        return w
    _, root = build_cov(cs)
    return w @ root


def gen_null(n: int, cs: CovStructure, cd: ComponentDist, seed) -> np.ndarray:
    """``n x p`` rows ``Sigma^{1/2} Z_i`` with standardized i.i.d. components."""
    if n < 1:
        raise InvalidInput("n must be positive")
    z = draw_components(cd, (n, cs.p), make_rng(seed))
    return _mix(z, cs)


def eta_squared_draw(law: EtaLaw, p: int, rng, size=None):
    """Draws of the squared radial variable, each law normalized to mean ``p``."""
    rng = make_rng(rng)
    law = EtaLaw(law)
    if law is EtaLaw.POISSON:
        return rng.poisson(p, size).astype(float)
    if law is EtaLaw.SCALED_BETA:
        # Beta(p/2, 2) as a gamma ratio
        ga = rng.standard_gamma(p / 2.0, size)
        gb = rng.standard_gamma(2.0, size)
        return (p + 4.0) * ga / (ga + gb)
    if p <= 20:
        raise InvalidInput(f"scaled F law needs p > 20, got p={p}")
    d1, d2 = float(p), p / 10.0
    # chi2_k = 2 * Gamma(k/2); the factors of 2 cancel in the ratio
    num = rng.standard_gamma(d1 / 2.0, size) / d1
    den = rng.standard_gamma(d2 / 2.0, size) / d2
    return (p - 20.0) * num / den


def unit_sphere(n: int, p: int, rng) -> np.ndarray:
    g = make_rng(rng).standard_normal((n, p))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def gen_alt(n: int, cs: CovStructure, alt: AltSpec, seed) -> np.ndarray:
    """Rows ``Sigma^{1/2} (sqrt(1-h) Z + sqrt(h) eta U)`` with Gaussian ``Z``."""
    h = alt.h
    if not 0.0 <= h <= 1.0:
        raise InvalidInput(f"h = c*g must lie in [0, 1], got {h}")
    p = cs.p
    if EtaLaw(alt.eta_law) is EtaLaw.SCALED_F and p <= 20:
        raise InvalidInput(f"scaled F law needs p > 20, got p={p}")
    z_ss, u_ss, eta_ss = np.random.SeedSequence(seed).spawn(3)
    z = make_rng(z_ss).standard_normal((n, p))
    u = unit_sphere(n, p, make_rng(u_ss))
    eta = np.sqrt(eta_squared_draw(alt.eta_law, p, make_rng(eta_ss), n))
    w = math.sqrt(1.0 - h) * z + math.sqrt(h) * eta[:, None] * u
    return _mix(w, cs)
