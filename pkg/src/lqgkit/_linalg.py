"""Small dense-matrix helpers shared across the toolkit."""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla

# Definiteness decisions use symmetric-part eigenvalue bounds at this tolerance.
DEFINITENESS_TOL = 1e-9


class ConvergenceError(RuntimeError):
    """Fixed-point iteration did not reach tolerance within max_iter."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


def symmetrize(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def min_sym_eig(M: np.ndarray) -> float:
    """Minimum eigenvalue of the symmetric part of M."""
    if M.shape[0] == 0:
        return 0.0
    return float(np.linalg.eigvalsh(symmetrize(M)).min())


def is_symmetric(M: np.ndarray, tol: float = DEFINITENESS_TOL) -> bool:
    if M.size == 0:
        return True
    return float(np.max(np.abs(M - M.T))) <= tol * (1.0 + float(np.max(np.abs(M))))


def is_psd(M: np.ndarray, tol: float = DEFINITENESS_TOL) -> bool:
    return min_sym_eig(M) >= -tol


def is_pd(M: np.ndarray, tol: float = DEFINITENESS_TOL) -> bool:
    return min_sym_eig(M) > tol


def solve_spd(S: np.ndarray, B: np.ndarray, context: str) -> np.ndarray:
    """Solve S X = B for symmetric positive definite S via Cholesky.

    Raises LinAlgError naming `context` when S is not numerically PD,
    which signals a violated definiteness precondition upstream.
    """
    try:
        factor = sla.cho_factor(symmetrize(S), check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"{context}: matrix is not positive definite ({exc})") from exc
    return sla.cho_solve(factor, B, check_finite=False)


def spectral_radius(M: np.ndarray) -> float:
    if M.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def psd_factor(cov: np.ndarray) -> np.ndarray:
    """Factor S with S S^T = cov for symmetric PSD cov.

    Cholesky when cov is numerically PD; falls back to an eigendecomposition
    square root for semidefinite inputs (singular disturbance covariances are
    legitimate).  Raises LinAlgError on indefinite input.
    """
    n = cov.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    w, V = np.linalg.eigh(symmetrize(cov))
    if w.min() < -DEFINITENESS_TOL * max(1.0, abs(w.max())):
        raise np.linalg.LinAlgError(
            f"covariance is indefinite (min eigenvalue {w.min():.3e}); cannot factor"
        )
    return V * np.sqrt(np.clip(w, 0.0, None))
