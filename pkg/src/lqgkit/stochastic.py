"""Gaussian densities, conditioning, and seeded sampling.

These are both runtime utilities (noise generation for simulations) and the
independent statistical oracles used by the estimation tests: conditioning a
joint Gaussian on a linear measurement is the same computation a Kalman
measurement update performs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import is_pd, is_psd, psd_factor, solve_spd, symmetrize

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GaussianVector:
    """Mean vector and covariance matrix of a Gaussian random vector."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        n = mean.shape[0]
        if cov.shape != (n, n):
            raise ValueError(f"cov must be ({n}, {n}), got {cov.shape}")

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class JointGaussian:
    """Jointly Gaussian (x, y) described by block means and covariances."""

    mean_x: np.ndarray
    mean_y: np.ndarray
    cov_xx: np.ndarray
    cov_xy: np.ndarray
    cov_yy: np.ndarray

    def __post_init__(self):
        for name in ("mean_x", "mean_y"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), float)))
        for name in ("cov_xx", "cov_xy", "cov_yy"):
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name), float)))
        n, p = self.mean_x.shape[0], self.mean_y.shape[0]
        if self.cov_xx.shape != (n, n) or self.cov_yy.shape != (p, p) or self.cov_xy.shape != (n, p):
            raise ValueError("joint covariance blocks do not conform to the block means")


class GaussianStream:
    """Seeded, reproducible standard-normal stream.

    Uniforms come from numpy's PCG64 bit generator (whose raw stream is
    version-stable); normals are produced by the basic Box-Muller transform,
    which is pinned here so that CSV fixtures stay bit-stable:

      each pair draws (u1, u2) consecutively from Generator.random(),
      z0 = sqrt(-2 ln(1 - u1)) cos(2 pi u2),
      z1 = sqrt(-2 ln(1 - u1)) sin(2 pi u2),

    normals are emitted in order z0, z1 per pair, and a call for an odd
    number of normals discards the spare z1.  The stream is an owned value:
    never share one across concurrent simulations.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self._uniform = np.random.Generator(np.random.PCG64(seed))

    def standard_normal(self, count: int) -> np.ndarray:
        if count < 0:
            raise ValueError("count must be nonnegative")
        if count == 0:
            return np.zeros(0)
        pairs = (count + 1) // 2
        u = self._uniform.random((pairs, 2))
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        z = np.empty((pairs, 2))
        z[:, 0] = r * np.cos(_TWO_PI * u[:, 1])
        z[:, 1] = r * np.sin(_TWO_PI * u[:, 1])
        return z.reshape(-1)[:count]


def gaussian_pdf(x: float, mean: float, var: float) -> float:
    """Scalar Gaussian density at x."""
    if var <= 0.0:
        raise ValueError(f"variance must be positive, got {var}")
    d = x - mean
    return math.exp(-0.5 * d * d / var) / math.sqrt(_TWO_PI * var)


def multivariate_gaussian_pdf(x: np.ndarray, g: GaussianVector) -> float:
    """Multivariate Gaussian density at x.

    Determinant and quadratic form both come from one Cholesky factorization;
    singular covariances raise LinAlgError.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != g.mean.shape:
        raise ValueError(f"x must have shape {g.mean.shape}, got {x.shape}")
    try:
        chol = np.linalg.cholesky(symmetrize(g.cov))
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"covariance is singular or indefinite: {exc}") from exc
    z = np.linalg.solve(chol, x - g.mean)
    quad = float(z @ z)
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    n = g.dim
    return math.exp(-0.5 * (quad + log_det + n * math.log(_TWO_PI)))


def condition(joint: JointGaussian, y_obs: np.ndarray) -> GaussianVector:
    """Condition x on an observed y.

    mean = E(x) + V(x,y) V(y)^-1 (y_obs - E(y))
    cov  = V(x) - V(x,y) V(y)^-1 V(y,x)

    The gain V(x,y) V(y)^-1 is obtained by a symmetric solve, never by
    forming the inverse.
    """
    y_obs = np.atleast_1d(np.asarray(y_obs, dtype=float))
    if y_obs.shape != joint.mean_y.shape:
        raise ValueError(f"y_obs must have shape {joint.mean_y.shape}, got {y_obs.shape}")
    # G^T = V(y)^-1 V(y,x); V(y) symmetric.
    gain = solve_spd(joint.cov_yy, joint.cov_xy.T, "conditioning on y").T
    mean = joint.mean_x + gain @ (y_obs - joint.mean_y)
    cov = symmetrize(joint.cov_xx - gain @ joint.cov_xy.T)
    return GaussianVector(mean=mean, cov=cov)


def sample_gaussian(g: GaussianVector, stream: GaussianStream, count: int = 1) -> np.ndarray:
    """Draw `count` samples, returned as a (count, n) array.

    Each sample is mean + S z with S S^T = cov (Cholesky, eigendecomposition
    fallback for semidefinite cov) and z from the stream; one stream call of
    count * n normals is consumed, in sample-major order.
    """
    S = psd_factor(g.cov)
    n = g.dim
    z = stream.standard_normal(count * n).reshape(count, n)
    return g.mean + z @ S.T


def validate_gaussian(g: GaussianVector, require_pd: bool = False) -> list[str]:
    """Invariant check used by callers that accept externally built inputs."""
    problems = []
    if not is_psd(g.cov):
        problems.append("covariance is not positive semidefinite")
    if require_pd and not is_pd(g.cov):
        problems.append("covariance is not positive definite")
    return problems
