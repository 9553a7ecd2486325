"""Luenberger observer, Kalman predictor/filter, RTS smoother, steady gains.

Belief tags follow the (k | l) convention: the estimate of x_k given
measurements through time l.  Predictor beliefs carry l = k-1, filter
beliefs l = k, smoother beliefs l = N.  Covariance updates use the
Joseph-style quadratic forms as the primary path; the compact forms exist
only as test oracles.  The innovation is always y - C x_hat with x_hat the
current predicted mean.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._linalg import ConvergenceError, solve_spd, spectral_radius, symmetrize
from .model import LtvSystem, NoiseModel


@dataclass(frozen=True)
class Belief:
    """State estimate with its error covariance at tag = (k, l)."""

    mean: np.ndarray
    cov: np.ndarray
    tag: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "mean", np.atleast_1d(np.asarray(self.mean, dtype=float)))
        object.__setattr__(self, "cov", np.atleast_2d(np.asarray(self.cov, dtype=float)))


@dataclass
class EstimatorRun:
    """Beliefs, gains, and innovations produced by one estimator pass.

    predicted holds (k | k-1) beliefs, updated (k | k), smoothed (k | N);
    a predictor-only run fills `predicted` (including the initial belief)
    and leaves `updated` empty.  `gains` are n x p Kalman gains, or n x n
    smoother gains on a smoother run.
    """

    predicted: list[Belief] = field(default_factory=list)
    updated: list[Belief] = field(default_factory=list)
    smoothed: list[Belief] | None = None
    gains: list[np.ndarray] = field(default_factory=list)
    innovations: list[np.ndarray] = field(default_factory=list)

    def covariance_diagonals(self, which: str) -> np.ndarray:
        beliefs = {"predicted": self.predicted, "updated": self.updated,
                   "smoothed": self.smoothed or []}[which]
        return np.array([np.diag(b.cov) for b in beliefs])


@dataclass(frozen=True)
class SteadyStateEstimator:
    P: np.ndarray
    L: np.ndarray
    iterations: int
    residual: float
    observer_spectral_radius: float


def luenberger_step(A: np.ndarray, B: np.ndarray, C: np.ndarray, L: np.ndarray,
                    x_hat: np.ndarray, u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Fixed-gain observer update: A x_hat + B u + L (y - C x_hat)."""
    x_hat = np.atleast_1d(np.asarray(x_hat, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return A @ x_hat + B @ u + L @ (y - C @ x_hat)


def predictor_step(A_k, B_k, C_k, Qd_k, Rv_k, belief: Belief, u_k, y_k
                   ) -> tuple[Belief, np.ndarray]:
    """One Kalman predictor step from (k | k-1) to (k+1 | k).

    L_k = A P C^T (C P C^T + Rv)^{-1}
    mean' = A x_hat + B u + L (y - C x_hat)
    cov'  = (A - L C) P (A - L C)^T + Qd + L Rv L^T   (symmetrized)
    """
    A_k = np.atleast_2d(np.asarray(A_k, dtype=float))
    B_k = np.atleast_2d(np.asarray(B_k, dtype=float))
    C_k = np.atleast_2d(np.asarray(C_k, dtype=float))
    Qd_k = np.atleast_2d(np.asarray(Qd_k, dtype=float))
    Rv_k = np.atleast_2d(np.asarray(Rv_k, dtype=float))
    u_k = np.atleast_1d(np.asarray(u_k, dtype=float))
    y_k = np.atleast_1d(np.asarray(y_k, dtype=float))
    P = belief.cov
    PCt = P @ C_k.T
    S = C_k @ PCt + Rv_k
    # L = A PCt S^{-1}  <=>  S L^T = (A PCt)^T, S symmetric PD.
    L = solve_spd(S, (A_k @ PCt).T, "predictor innovation covariance").T
    mean = A_k @ belief.mean + B_k @ u_k + L @ (y_k - C_k @ belief.mean)
    ALC = A_k - L @ C_k
    cov = symmetrize(ALC @ P @ ALC.T + Qd_k + L @ Rv_k @ L.T)
    k = belief.tag[0]
    return Belief(mean=mean, cov=cov, tag=(k + 1, k)), L


def filter_predict(A_prev, B_prev, Qd_prev, belief: Belief, u_prev) -> Belief:
    """Time update from (k-1 | k-1) to (k | k-1)."""
    A_prev = np.atleast_2d(np.asarray(A_prev, dtype=float))
    B_prev = np.atleast_2d(np.asarray(B_prev, dtype=float))
    Qd_prev = np.atleast_2d(np.asarray(Qd_prev, dtype=float))
    u_prev = np.atleast_1d(np.asarray(u_prev, dtype=float))
    mean = A_prev @ belief.mean + B_prev @ u_prev
    cov = symmetrize(A_prev @ belief.cov @ A_prev.T + Qd_prev)
    k = belief.tag[0]
    return Belief(mean=mean, cov=cov, tag=(k + 1, k))


def filter_update(C_k, Rv_k, belief: Belief, y_k) -> tuple[Belief, np.ndarray]:
    """Measurement update from (k | k-1) to (k | k), Joseph-form covariance.

    L_k = P C^T (C P C^T + Rv)^{-1}
    cov' = (I - L C) P (I - L C)^T + L Rv L^T
    """
    C_k = np.atleast_2d(np.asarray(C_k, dtype=float))
    Rv_k = np.atleast_2d(np.asarray(Rv_k, dtype=float))
    y_k = np.atleast_1d(np.asarray(y_k, dtype=float))
    P = belief.cov
    PCt = P @ C_k.T
    S = C_k @ PCt + Rv_k
    L = solve_spd(S, PCt.T, "filter innovation covariance").T
    innovation = y_k - C_k @ belief.mean
    mean = belief.mean + L @ innovation
    ILC = np.eye(P.shape[0]) - L @ C_k
    cov = symmetrize(ILC @ P @ ILC.T + L @ Rv_k @ L.T)
    k = belief.tag[0]
    return Belief(mean=mean, cov=cov, tag=(k, k)), L


def filter_run(system: LtvSystem, noise: NoiseModel, inputs, measurements) -> EstimatorRun:
    """Kalman filter over the horizon: predict/update for k = 1..N.

    inputs are u_0..u_{N-1}; measurements are y_1..y_N (the filter's
    convention: measurement k is taken at state x_k and uses the (k-1)-th
    stored C/Rv entry).  Starts from the noise model's (x0_mean, P0) at
    tag (0 | 0).
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    measurements = np.atleast_2d(np.asarray(measurements, dtype=float))
    N = system.N
    if inputs.shape[0] != N:
        raise ValueError(f"{inputs.shape[0]} inputs for horizon {N}")
    if measurements.shape[0] != N:
        raise ValueError(f"{measurements.shape[0]} measurements for horizon {N}")
    run = EstimatorRun()
    belief = Belief(mean=noise.x0_mean, cov=noise.P0, tag=(0, 0))
    run.updated.append(belief)
    for k in range(1, N + 1):
        predicted = filter_predict(system.A[k - 1], system.B[k - 1], noise.Qd[k - 1],
                                   belief, inputs[k - 1])
        run.predicted.append(predicted)
        run.innovations.append(measurements[k - 1] - system.C[k - 1] @ predicted.mean)
        belief, L = filter_update(system.C[k - 1], noise.Rv[k - 1], predicted,
                                  measurements[k - 1])
        run.updated.append(belief)
        run.gains.append(L)
    return run


def predictor_run(system: LtvSystem, noise: NoiseModel, inputs, measurements) -> EstimatorRun:
    """Kalman predictor over the horizon: one step per k = 0..N-1.

    measurements are y_0..y_{N-1} (the predictor's convention: measurement k
    is taken at state x_k and uses the k-th stored C/Rv entry).  Starts from
    (x0_mean, P0) at tag (0 | -1); `predicted` holds beliefs (k | k-1) for
    k = 0..N.
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    measurements = np.atleast_2d(np.asarray(measurements, dtype=float))
    N = system.N
    if inputs.shape[0] != N or measurements.shape[0] != N:
        raise ValueError("inputs and measurements must both have horizon length")
    run = EstimatorRun()
    belief = Belief(mean=noise.x0_mean, cov=noise.P0, tag=(0, -1))
    run.predicted.append(belief)
    for k in range(N):
        run.innovations.append(measurements[k] - system.C[k] @ belief.mean)
        belief, L = predictor_step(system.A[k], system.B[k], system.C[k],
                                   noise.Qd[k], noise.Rv[k], belief,
                                   inputs[k], measurements[k])
        run.predicted.append(belief)
        run.gains.append(L)
    return run


def smoother_run(system: LtvSystem, noise: NoiseModel, filtered: EstimatorRun) -> EstimatorRun:
    """RTS smoother backward pass over a stored filter run.

    For k = N-1..0:
        Ls_k  = P_{k|k} A_k^T P_{k+1|k}^{-1}
        mean' = x_{k|k} + Ls_k (x_{k+1|N} - x_{k+1|k})
        cov'  = P_{k|k} + Ls_k (P_{k+1|N} - P_{k+1|k}) Ls_k^T

    The gain solves the symmetric system P_{k+1|k} X = A_k P_{k|k} (X = Ls^T);
    a singular predicted covariance (possible only with a degenerate Qd) is
    an error.
    """
    N = len(filtered.predicted)
    if len(filtered.updated) != N + 1:
        raise ValueError("filter run must store beliefs (k|k) for k=0..N and (k|k-1) for k=1..N")
    smoothed: list[Belief | None] = [None] * (N + 1)
    terminal = filtered.updated[N]
    smoothed[N] = Belief(mean=terminal.mean, cov=terminal.cov, tag=(N, N))
    gains: list[np.ndarray | None] = [None] * N
    for k in range(N - 1, -1, -1):
        updated = filtered.updated[k]
        predicted_next = filtered.predicted[k]  # belief (k+1 | k)
        A_k = system.A[k]
        Ls = solve_spd(predicted_next.cov, A_k @ updated.cov,
                       f"smoother predicted covariance at k={k + 1}").T
        mean = updated.mean + Ls @ (smoothed[k + 1].mean - predicted_next.mean)
        cov = symmetrize(updated.cov + Ls @ (smoothed[k + 1].cov - predicted_next.cov) @ Ls.T)
        smoothed[k] = Belief(mean=mean, cov=cov, tag=(k, N))
        gains[k] = Ls
    return EstimatorRun(
        predicted=list(filtered.predicted),
        updated=list(filtered.updated),
        smoothed=smoothed,
        gains=gains,
        innovations=list(filtered.innovations),
    )


def solve_dare_estimator(A: np.ndarray, C: np.ndarray, Qd: np.ndarray, Rv: np.ndarray,
                         tol: float = 1e-10, max_iter: int = 100_000) -> SteadyStateEstimator:
    """Steady-state predictor gain by fixed-point iteration from P = I.

    Returns the converged P, L = A P C^T (C P C^T + Rv)^{-1}, the final
    max-abs residual, and the spectral radius of A - L C.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    Qd = np.atleast_2d(np.asarray(Qd, dtype=float))
    Rv = np.atleast_2d(np.asarray(Rv, dtype=float))

    def gain(P):
        PCt = P @ C.T
        return solve_spd(C @ PCt + Rv, (A @ PCt).T, "estimator innovation covariance").T

    P = np.eye(A.shape[0])
    residual = np.inf
    for it in range(1, max_iter + 1):
        L = gain(P)
        ALC = A - L @ C
        P_new = symmetrize(ALC @ P @ ALC.T + Qd + L @ Rv @ L.T)
        residual = float(np.max(np.abs(P_new - P)))
        P = P_new
        if residual <= tol:
            L = gain(P)
            return SteadyStateEstimator(
                P=P, L=L, iterations=it, residual=residual,
                observer_spectral_radius=spectral_radius(A - L @ C),
            )
    raise ConvergenceError("steady-state estimator iteration did not converge", residual, max_iter)
