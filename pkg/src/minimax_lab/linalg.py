"""Small dense linear algebra: eigenvalues, definiteness calls, Schur complements.

All matrices here are desk-scale (dimension <= ``Tolerances.dim_cap``) real
ndarrays.  Eigenvalues are delegated to LAPACK through numpy; the contracts
on top (symmetry validation, tolerance-banded verdicts, the degenerate-B
branch) are what the rest of the library relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import IterationLimitError, NonFiniteError, NonSquareError, SingularBError


class Verdict(str, Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    NEGATIVE_DEFINITE = "NegativeDefinite"
    POSITIVE_SEMIDEFINITE = "PositiveSemidefinite"
    NEGATIVE_SEMIDEFINITE = "NegativeSemidefinite"
    INDEFINITE = "Indefinite"
    NEAR_SINGULAR = "NearSingular"


@dataclass(frozen=True)
class Definiteness:
    """Definiteness verdict plus the eigenvalue closest to zero (the margin)."""

    verdict: Verdict
    margin_eigenvalue: float


def _as_matrix(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise NonSquareError(f"{name} must be 2-d, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError(f"{name} has non-finite entries")
    return a


def _require_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise NonSquareError(f"{name} must be square, got shape {a.shape}")
    return a


def check_symmetric(m, tol: Tolerances = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    """Validate symmetry to within ``symmetry_rtol`` and return the symmetrized matrix."""
    a = _require_square(_as_matrix(m, name), name)
    scale = max(np.max(np.abs(a)), 1.0)
    if np.max(np.abs(a - a.T)) > tol.symmetry_rtol * scale:
        raise ValueError(f"{name} is not symmetric within tolerance")
    return 0.5 * (a + a.T)


def symmetric_eigenvalues(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a (validated) symmetric matrix."""
    a = check_symmetric(m, tol)
    return np.linalg.eigvalsh(a)


def general_eigenvalues(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Complex eigenvalues (with multiplicity) of a real square matrix."""
    a = _require_square(_as_matrix(m))
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("matrix has non-finite entries")
    if a.shape[0] > tol.dim_cap:
        raise NonSquareError(f"dimension {a.shape[0]} exceeds the cap {tol.dim_cap}")
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        return np.linalg.eigvals(a).astype(complex)
    except np.linalg.LinAlgError as exc:  # QR iteration failed to converge
        raise IterationLimitError(str(exc)) from exc


def spectral_radius(m, tol: Tolerances = DEFAULT_TOL) -> float:
    return float(np.max(np.abs(general_eigenvalues(m, tol)))) if np.size(m) else 0.0


def is_near_singular(b, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when min singular value of ``b`` <= tau_sing * ||b|| (degenerate branch)."""
    a = _require_square(_as_matrix(b, "b"), "b")
    if a.shape[0] == 0:
        return False
    svals = np.linalg.svd(a, compute_uv=False)
    return bool(svals[-1] <= tol.tau_sing * max(svals[0], 1e-300))


def schur_complement(a, b, c, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """a - c b^{-1} c^T for symmetric a, symmetric invertible b, rectangular c.

    Raises ``SingularBError`` when ``b`` is within ``tau_sing`` of singular,
    which is the degenerate branch of the minimax classification.
    """
    aa = check_symmetric(a, tol, "a")
    bb = check_symmetric(b, tol, "b")
    cc = _as_matrix(c, "c")
    if cc.shape != (aa.shape[0], bb.shape[0]):
        raise NonSquareError(
            f"c must be {aa.shape[0]}x{bb.shape[0]}, got {cc.shape}"
        )
    if is_near_singular(bb, tol):
        raise SingularBError("b is within tolerance of singular")
    s = aa - cc @ np.linalg.solve(bb, cc.T)
    return 0.5 * (s + s.T)


def definiteness(m, tol_strict: float | None = None, tol: Tolerances = DEFAULT_TOL) -> Definiteness:
    """Classify a symmetric matrix with a declared strictness band.

    ``NearSingular`` wins whenever any eigenvalue sits inside the band, so a
    strict verdict is never issued off a marginal eigenvalue.
    """
    t = tol.tau_strict if tol_strict is None else float(tol_strict)
    if t <= 0:
        raise ValueError("tolerance must be positive")
    eigs = symmetric_eigenvalues(m, tol)
    if eigs.size == 0:
        return Definiteness(Verdict.NEAR_SINGULAR, 0.0)
    margin = float(eigs[np.argmin(np.abs(eigs))])
    lo, hi = float(eigs[0]), float(eigs[-1])
    if abs(margin) <= t:
        return Definiteness(Verdict.NEAR_SINGULAR, margin)
    if lo > t:
        return Definiteness(Verdict.POSITIVE_DEFINITE, margin)
    if hi < -t:
        return Definiteness(Verdict.NEGATIVE_DEFINITE, margin)
    if lo > 0:
        return Definiteness(Verdict.POSITIVE_SEMIDEFINITE, margin)
    if hi < 0:
        return Definiteness(Verdict.NEGATIVE_SEMIDEFINITE, margin)
    return Definiteness(Verdict.INDEFINITE, margin)
