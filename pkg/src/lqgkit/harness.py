"""Scenario assembly and execution: open-loop, LQR, and LQG simulation.

A run is a pure function of (scenario, seed).  The noise draw order is
pinned so results are reproducible and so the true trajectory is identical
across estimator modes under true-state feedback: the initial state (when
sampled) is drawn first, then per step k a disturbance d_k followed by a
measurement noise v_k, one GaussianStream call per vector.  v_k is drawn
whenever the system has outputs and a noise model, regardless of estimator
mode; measurement j is taken at time j for predictor-convention estimators
(predictor, Luenberger) and at time j+1 for the filter/smoother, using the
j-th stored C/Rv entry either way.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .estimation import (
    Belief,
    EstimatorRun,
    filter_predict,
    filter_update,
    luenberger_step,
    predictor_step,
    smoother_run,
)
from .lqr import (
    RiccatiSolution,
    SettlingReport,
    settling_report,
    solve_dare_lqr,
    solve_lqr,
)
from .lqr import evaluate_cost as _evaluate_cost
from .model import (
    LqrWeights,
    LtvSystem,
    MatrixSchedule,
    NoiseModel,
    Trajectory,
    ValidationError,
    validate,
)
from .stochastic import GaussianStream, GaussianVector, sample_gaussian

CONTROLLERS = ("none", "fixed", "lqr", "steady")
ESTIMATORS = ("none", "luenberger", "predictor", "filter", "smoother")
FEEDBACK = ("true_state", "estimate")


@dataclass(frozen=True)
class Scenario:
    """Everything a run needs: system, design weights, noise, and policy.

    x0 = None means the initial state is sampled: x0_mean + x0_std * g with
    the scenario's x0_std, or from N(x0_mean, P0) when x0_std is None.
    sim_Qd / sim_Rv, when set, are the covariances the simulated truth
    actually uses while the estimator keeps believing noise.Qd / noise.Rv
    (the scaled-standard-normal convention of the estimation experiment).
    """

    system: LtvSystem
    weights: LqrWeights | None = None
    noise: NoiseModel | None = None
    controller: str = "none"
    fixed_gain: np.ndarray | None = None
    estimator: str = "none"
    luenberger_gain: np.ndarray | None = None
    feedback: str = "true_state"
    x0: np.ndarray | None = None
    x0_std: float | None = None
    sim_Qd: MatrixSchedule | None = None
    sim_Rv: MatrixSchedule | None = None
    seed: int = 0

    def __post_init__(self):
        if self.x0 is not None:
            object.__setattr__(self, "x0", np.atleast_1d(np.asarray(self.x0, dtype=float)))
        if self.fixed_gain is not None:
            object.__setattr__(self, "fixed_gain",
                               np.atleast_2d(np.asarray(self.fixed_gain, dtype=float)))
        if self.luenberger_gain is not None:
            object.__setattr__(self, "luenberger_gain",
                               np.atleast_2d(np.asarray(self.luenberger_gain, dtype=float)))


@dataclass
class RunResult:
    trajectory: Trajectory
    estimator_run: EstimatorRun | None
    controller_gains: MatrixSchedule | None
    riccati: RiccatiSolution | None
    cost: float | None
    settling: SettlingReport | None
    covariance_diagonals: np.ndarray | None


@dataclass(frozen=True)
class SweepPoint:
    value: float
    cost: float | None
    k_x: int | None
    k_K: int | None
    terminal_covariance_trace: float | None


def _config_violations(s: Scenario) -> list[str]:
    problems = []
    if s.controller not in CONTROLLERS:
        problems.append(f"unknown controller '{s.controller}' (choose from {CONTROLLERS})")
    if s.estimator not in ESTIMATORS:
        problems.append(f"unknown estimator '{s.estimator}' (choose from {ESTIMATORS})")
    if s.feedback not in FEEDBACK:
        problems.append(f"unknown feedback '{s.feedback}' (choose from {FEEDBACK})")
    if s.controller in ("lqr", "steady") and s.weights is None:
        problems.append(f"controller '{s.controller}' requires weights")
    if s.controller == "fixed" and s.fixed_gain is None:
        problems.append("controller 'fixed' requires fixed_gain")
    if s.estimator != "none":
        if s.noise is None:
            problems.append(f"estimator '{s.estimator}' requires a noise model")
        if s.system.C is None or s.system.p == 0:
            problems.append(f"estimator '{s.estimator}' requires a measurement matrix C")
    if s.estimator == "luenberger" and s.luenberger_gain is None:
        problems.append("estimator 'luenberger' requires luenberger_gain")
    if s.feedback == "estimate" and s.estimator in ("none", "smoother"):
        problems.append("feedback on the estimate requires a causal estimator "
                        "(luenberger, predictor, or filter)")
    if s.x0 is None and s.noise is None:
        problems.append("sampled x0 requires a noise model (x0_mean, P0)")
    if s.x0 is not None and s.x0.shape != (s.system.n,):
        problems.append(f"x0 has shape {s.x0.shape}, expected ({s.system.n},)")
    if s.controller == "steady":
        consts = [s.system.A.is_constant, s.system.B.is_constant]
        if s.weights is not None:
            consts += [s.weights.Q.is_constant, s.weights.R.is_constant]
        if not all(consts):
            problems.append("controller 'steady' requires constant A, B, Q, R")
    return problems


def _controller_gains(s: Scenario, tol: float, max_iter: int
                      ) -> tuple[MatrixSchedule | None, RiccatiSolution | None]:
    if s.controller == "none":
        return None, None
    if s.controller == "fixed":
        return MatrixSchedule.constant(s.fixed_gain, s.system.N), None
    if s.controller == "lqr":
        solution = solve_lqr(s.system, s.weights)
        return solution.K, solution
    steady = solve_dare_lqr(s.system.A[0], s.system.B[0], s.weights.Q[0], s.weights.R[0],
                            tol=tol, max_iter=max_iter)
    return MatrixSchedule.constant(steady.K, s.system.N), None


def run(scenario: Scenario, tol: float = 1e-10, max_iter: int = 100_000) -> RunResult:
    """Execute one scenario; deterministic per (scenario, seed).

    Synthesizes the configured controller, simulates the (possibly noisy)
    system, feeds measurements to the configured estimator, and applies
    u_k = -K_k times the true state or the causal estimate.
    """
    s = scenario
    report = validate(s.system, s.weights, s.noise)
    report += _config_violations(s)
    if report:
        raise ValidationError(report)

    system, noise = s.system, s.noise
    n, p, N = system.n, system.p, system.N
    gains, riccati = _controller_gains(s, tol, max_iter)

    stream = GaussianStream(s.seed)
    if s.x0 is not None:
        x0 = s.x0
    elif s.x0_std is not None:
        x0 = noise.x0_mean + s.x0_std * stream.standard_normal(n)
    else:
        x0 = sample_gaussian(noise.initial_belief(), stream)[0]

    sim_Qd = s.sim_Qd if s.sim_Qd is not None else (noise.Qd if noise else None)
    sim_Rv = s.sim_Rv if s.sim_Rv is not None else (noise.Rv if noise else None)
    measuring = p > 0 and noise is not None
    filter_convention = s.estimator in ("filter", "smoother")

    est_run = EstimatorRun() if s.estimator != "none" else None
    if s.estimator in ("predictor",):
        belief = Belief(mean=noise.x0_mean, cov=noise.P0, tag=(0, -1))
        est_run.predicted.append(belief)
    elif s.estimator in ("filter", "smoother"):
        belief = Belief(mean=noise.x0_mean, cov=noise.P0, tag=(0, 0))
        est_run.updated.append(belief)
    elif s.estimator == "luenberger":
        belief = Belief(mean=noise.x0_mean, cov=np.zeros((n, n)), tag=(0, -1))
        est_run.predicted.append(belief)

    def feedback_state(x: np.ndarray) -> np.ndarray:
        if s.feedback == "estimate":
            return belief.mean
        return x

    states = np.empty((N + 1, n))
    inputs = np.empty((N, system.m))
    outputs = np.empty((N, p)) if measuring else None
    states[0] = x0
    x = x0
    zero_u = np.zeros(system.m)

    for k in range(N):
        u = -(gains[k] @ feedback_state(x)) if gains is not None else zero_u
        inputs[k] = u
        d = sample_gaussian(GaussianVector(np.zeros(n), sim_Qd[k]), stream)[0] \
            if noise is not None else np.zeros(n)
        v = sample_gaussian(GaussianVector(np.zeros(p), sim_Rv[k]), stream)[0] \
            if measuring else None

        if measuring and not filter_convention:
            y = system.C[k] @ x + v            # measurement at time k
            outputs[k] = y
            if s.estimator == "predictor":
                est_run.innovations.append(y - system.C[k] @ belief.mean)
                belief, L = predictor_step(system.A[k], system.B[k], system.C[k],
                                           noise.Qd[k], noise.Rv[k], belief, u, y)
                est_run.predicted.append(belief)
                est_run.gains.append(L)
            elif s.estimator == "luenberger":
                mean = luenberger_step(system.A[k], system.B[k], system.C[k],
                                       s.luenberger_gain, belief.mean, u, y)
                belief = Belief(mean=mean, cov=np.zeros((n, n)), tag=(k + 1, k))
                est_run.predicted.append(belief)

        x = system.A[k] @ x + system.B[k] @ u + d
        states[k + 1] = x

        if measuring and filter_convention:
            y = system.C[k] @ x + v            # measurement at time k+1
            outputs[k] = y
            predicted = filter_predict(system.A[k], system.B[k], noise.Qd[k], belief, u)
            est_run.predicted.append(predicted)
            est_run.innovations.append(y - system.C[k] @ predicted.mean)
            belief, L = filter_update(system.C[k], noise.Rv[k], predicted, y)
            est_run.updated.append(belief)
            est_run.gains.append(L)

    if s.estimator == "smoother":
        est_run = smoother_run(system, noise, est_run)

    beliefs_along_states = None
    if s.estimator == "predictor" or s.estimator == "luenberger":
        beliefs_along_states = est_run.predicted
    elif s.estimator == "filter":
        beliefs_along_states = est_run.updated
    elif s.estimator == "smoother":
        beliefs_along_states = est_run.smoothed

    estimates = covariances = cov_diag = None
    if beliefs_along_states is not None:
        estimates = np.array([b.mean for b in beliefs_along_states])
        covariances = np.array([b.cov for b in beliefs_along_states])
        if s.estimator != "luenberger":
            cov_diag = np.array([np.diag(b.cov) for b in beliefs_along_states])

    trajectory = Trajectory(states=states, inputs=inputs, outputs=outputs,
                            estimates=estimates, covariances=covariances)
    cost = _evaluate_cost(trajectory, s.weights) if s.weights is not None else None
    trajectory.cost = cost

    settling = None
    if riccati is not None:
        settling = settling_report(riccati, trajectory)

    return RunResult(
        trajectory=trajectory,
        estimator_run=est_run,
        controller_gains=gains,
        riccati=riccati,
        cost=cost,
        settling=settling,
        covariance_diagonals=cov_diag,
    )


def _rescaled(sched: MatrixSchedule, factor: float) -> MatrixSchedule:
    if sched.is_constant:
        return MatrixSchedule.constant(factor * sched[0], len(sched))
    return MatrixSchedule.of([factor * M for M in sched])


def _with_horizon(s: Scenario, N: int) -> Scenario:
    system = LtvSystem(
        n=s.system.n, m=s.system.m, p=s.system.p, N=N,
        A=s.system.A.with_length(N), B=s.system.B.with_length(N),
        C=s.system.C.with_length(N) if s.system.C is not None else None,
    )
    weights = None
    if s.weights is not None:
        weights = LqrWeights(Q=s.weights.Q.with_length(N + 1), R=s.weights.R.with_length(N))
    noise = None
    if s.noise is not None:
        noise = NoiseModel(Qd=s.noise.Qd.with_length(N), Rv=s.noise.Rv.with_length(N),
                           x0_mean=s.noise.x0_mean, P0=s.noise.P0)
    return replace(
        s, system=system, weights=weights, noise=noise,
        sim_Qd=s.sim_Qd.with_length(N) if s.sim_Qd is not None else None,
        sim_Rv=s.sim_Rv.with_length(N) if s.sim_Rv is not None else None,
    )


def sweep(scenario: Scenario, axis: str, values, tol: float = 1e-10,
          max_iter: int = 100_000) -> list[SweepPoint]:
    """Independent runs along one parameter axis: N, seed, R-scale, Q-scale.

    Results are ordered by input value.  The N axis requires constant
    (LTI) schedules; scale axes rescale the LQR weights.
    """
    points = []
    for value in values:
        if axis == "N":
            varied = _with_horizon(scenario, int(value))
        elif axis == "seed":
            varied = replace(scenario, seed=int(value))
        elif axis == "R-scale":
            if scenario.weights is None:
                raise ValidationError(["R-scale sweep requires weights"])
            varied = replace(scenario, weights=LqrWeights(
                Q=scenario.weights.Q, R=_rescaled(scenario.weights.R, float(value))))
        elif axis == "Q-scale":
            if scenario.weights is None:
                raise ValidationError(["Q-scale sweep requires weights"])
            varied = replace(scenario, weights=LqrWeights(
                Q=_rescaled(scenario.weights.Q, float(value)), R=scenario.weights.R))
        else:
            raise ValidationError([f"unknown sweep axis '{axis}' "
                                   "(choose from N, seed, R-scale, Q-scale)"])
        result = run(varied, tol=tol, max_iter=max_iter)
        terminal_trace = None
        if result.covariance_diagonals is not None:
            terminal_trace = float(result.covariance_diagonals[-1].sum())
        points.append(SweepPoint(
            value=float(value),
            cost=result.cost,
            k_x=result.settling.k_x if result.settling else None,
            k_K=result.settling.k_K if result.settling else None,
            terminal_covariance_trace=terminal_trace,
        ))
    return points
