"""Dense symmetric-matrix primitives.

Everything here takes and returns plain ``numpy`` arrays. Inputs are
symmetrized as ``(M + M.T) / 2`` on entry so that downstream code may rely on
exact symmetry.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InvalidInput, NotPSD

DEFAULT_CLAMP_FLOOR = 1e-8


class EigDecomp(NamedTuple):
    """Eigenvalues sorted in descending order and matching eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def as_sym(m) -> np.ndarray:
    """Validate a square finite matrix and return its symmetrized float copy."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidInput(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("matrix has non-finite entries")
    return (a + a.T) / 2.0


def sym_eig(m) -> EigDecomp:
    a = as_sym(m)
    w, v = np.linalg.eigh(a)
    return EigDecomp(w[::-1].copy(), v[:, ::-1].copy())


def _eigvalsh(m) -> np.ndarray:
    return np.linalg.eigvalsh(as_sym(m))


def sqrt_psd(m, clamp_floor: float = DEFAULT_CLAMP_FLOOR) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in ``[-clamp_floor * ||m||_op, 0)`` are treated as rounding
    noise and set to zero; anything more negative raises :class:`NotPSD`.
    """
    a = as_sym(m)
    w, v = np.linalg.eigh(a)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if w[0] < -clamp_floor * scale:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e} below -{clamp_floor:g}*||m||_op ({scale:.3e})")
    w = np.clip(w, 0.0, None)
    s = (v * np.sqrt(w)) @ v.T
    return (s + s.T) / 2.0


def frob_sq(m) -> float:
    a = np.asarray(m, dtype=float)
    return float(np.sum(a * a))


def ell4_4(m) -> float:
    """Entrywise sum of fourth powers."""
    a = np.asarray(m, dtype=float)
    sq = a * a
    return float(np.sum(sq * sq))


def op_norm(m) -> float:
    w = _eigvalsh(m)
    return float(np.max(np.abs(w)))


def nuclear_norm(m) -> float:
    return float(np.sum(np.abs(_eigvalsh(m))))


def trace(m) -> float:
    return float(np.trace(np.asarray(m, dtype=float)))


def diag_part(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    return np.diag(np.diag(a))


def effective_rank(m) -> float:
    """Nuclear norm over operator norm; zero for the zero matrix."""
    w = _eigvalsh(m)
    top = float(np.max(np.abs(w)))
    if top < 1e-14 * w.size:
        return 0.0
    return float(np.sum(np.abs(w)) / top)
