"""System, weight, and noise representations plus one-step propagation.

Time indexing convention used throughout the toolkit: states live at
0..N, inputs and controller gains at 0..N-1.  Measurement-side schedules
(C, Rv) hold N entries that the predictor consumes at times 0..N-1 and the
filter at times 1..N; entry i is addressed by position i in both cases
(the filter's measurement k uses position k-1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import DEFINITENESS_TOL, is_pd, is_psd, is_symmetric
from .stochastic import GaussianStream, GaussianVector, sample_gaussian


class ValidationError(ValueError):
    """Raised by callers that require a clean validation report."""

    def __init__(self, violations: list[str]):
        super().__init__("invalid configuration:\n  " + "\n  ".join(violations))
        self.violations = violations


def _freeze(M: np.ndarray) -> np.ndarray:
    M = np.array(M, dtype=float)
    M.flags.writeable = False
    return M


class MatrixSchedule:
    """Index-addressed sequence of equally shaped matrices.

    A constant schedule reports the same matrix at every index, so LTI and
    LTV systems are indistinguishable to callers; `constant` keeps one copy
    instead of N.  Entries are immutable after construction.
    """

    def __init__(self, entries: list[np.ndarray], length: int | None = None):
        entries = [_freeze(np.atleast_2d(e)) for e in entries]
        if not entries:
            raise ValueError("schedule needs at least one matrix")
        if any(e.shape != entries[0].shape for e in entries):
            raise ValueError("all schedule entries must share one shape")
        self._entries = entries
        self._constant = len(entries) == 1 and length is not None
        self._length = length if self._constant else len(entries)
        if length is not None and not self._constant and length != len(entries):
            raise ValueError(f"schedule has {len(entries)} entries but length {length} requested")

    @classmethod
    def constant(cls, M: np.ndarray, length: int) -> "MatrixSchedule":
        return cls([np.atleast_2d(np.asarray(M, dtype=float))], length=length)

    @classmethod
    def of(cls, matrices) -> "MatrixSchedule":
        return cls([np.atleast_2d(np.asarray(M, dtype=float)) for M in matrices])

    def __len__(self) -> int:
        return self._length

    def __getitem__(self, k: int) -> np.ndarray:
        if not 0 <= k < self._length:
            raise IndexError(f"schedule index {k} outside horizon [0, {self._length})")
        return self._entries[0] if self._constant else self._entries[k]

    def __iter__(self):
        for k in range(self._length):
            yield self[k]

    @property
    def shape(self) -> tuple[int, int]:
        return self._entries[0].shape

    @property
    def is_constant(self) -> bool:
        return self._constant or len(self._entries) == 1

    def distinct(self) -> list[np.ndarray]:
        """One representative per stored entry (a single matrix if constant)."""
        return list(self._entries)

    def with_length(self, length: int) -> "MatrixSchedule":
        if not self.is_constant:
            raise ValueError("cannot re-horizon an explicit (time-varying) schedule")
        return MatrixSchedule.constant(self._entries[0], length)

    def to_lists(self):
        """Plain-list form for serialization: one matrix if constant, else all."""
        if self.is_constant:
            return self._entries[0].tolist()
        return [e.tolist() for e in self._entries]


def _as_schedule(value, length: int) -> MatrixSchedule:
    if isinstance(value, MatrixSchedule):
        return value
    arr = np.asarray(value, dtype=float)
    if arr.ndim <= 2:
        return MatrixSchedule.constant(arr, length)
    return MatrixSchedule.of(list(arr))


@dataclass(frozen=True)
class LtvSystem:
    """Discrete-time linear system x_{k+1} = A_k x_k + B_k u_k (+ C_k output).

    Dimensions are declared, not derived, so a malformed build is
    representable and reported by `validate` rather than rejected here.
    """

    n: int
    m: int
    p: int
    N: int
    A: MatrixSchedule
    B: MatrixSchedule
    C: MatrixSchedule | None = None

    @classmethod
    def lti(cls, A, B, C=None, *, horizon: int) -> "LtvSystem":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        C_sched = None
        p = 0
        if C is not None:
            C = np.atleast_2d(np.asarray(C, dtype=float))
            C_sched = MatrixSchedule.constant(C, horizon)
            p = C.shape[0]
        return cls(
            n=A.shape[0], m=B.shape[1], p=p, N=horizon,
            A=MatrixSchedule.constant(A, horizon),
            B=MatrixSchedule.constant(B, horizon),
            C=C_sched,
        )

    @classmethod
    def from_schedules(cls, A, B, C=None, *, horizon: int) -> "LtvSystem":
        A = _as_schedule(A, horizon)
        B = _as_schedule(B, horizon)
        C_sched = _as_schedule(C, horizon) if C is not None else None
        return cls(
            n=A.shape[0], m=B.shape[1], p=(C_sched.shape[0] if C_sched is not None else 0),
            N=horizon, A=A, B=B, C=C_sched,
        )


@dataclass(frozen=True)
class LqrWeights:
    """Quadratic cost weights: Q_0..Q_N (terminal included), R_0..R_{N-1}."""

    Q: MatrixSchedule
    R: MatrixSchedule

    @classmethod
    def constant(cls, Q, R, *, horizon: int) -> "LqrWeights":
        return cls(
            Q=MatrixSchedule.constant(np.asarray(Q, dtype=float), horizon + 1),
            R=MatrixSchedule.constant(np.atleast_2d(np.asarray(R, dtype=float)), horizon),
        )


@dataclass(frozen=True)
class NoiseModel:
    """Disturbance/measurement covariances and the initial belief.

    Named Qd/Rv to keep them apart from the LQR weights Q/R, which play a
    different role despite the shared letters.
    """

    Qd: MatrixSchedule
    Rv: MatrixSchedule
    x0_mean: np.ndarray
    P0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x0_mean", _freeze(np.atleast_1d(np.asarray(self.x0_mean, float))))
        object.__setattr__(self, "P0", _freeze(np.atleast_2d(np.asarray(self.P0, float))))

    @classmethod
    def constant(cls, Qd, Rv, x0_mean, P0, *, horizon: int) -> "NoiseModel":
        return cls(
            Qd=MatrixSchedule.constant(np.asarray(Qd, dtype=float), horizon),
            Rv=MatrixSchedule.constant(np.atleast_2d(np.asarray(Rv, dtype=float)), horizon),
            x0_mean=x0_mean,
            P0=P0,
        )

    def initial_belief(self) -> GaussianVector:
        return GaussianVector(mean=self.x0_mean, cov=self.P0)


@dataclass
class Trajectory:
    """Time-indexed simulation record; the unit of CSV export.

    states has N+1 rows, inputs N; outputs holds the measurement sequence
    (N rows) when the run produced one.  estimates/covariances align with
    states when an estimator ran.
    """

    states: np.ndarray
    inputs: np.ndarray
    outputs: np.ndarray | None = None
    estimates: np.ndarray | None = None
    covariances: np.ndarray | None = None
    cost: float | None = None

    @property
    def horizon(self) -> int:
        return self.states.shape[0] - 1


def _check_dims(report: list[str], sched: MatrixSchedule | None, name: str,
                shape: tuple[int, int], length: int | None):
    if sched is None:
        return
    if sched.shape != shape:
        report.append(f"{name} entries have shape {sched.shape}, expected {shape}")
    if length is not None and len(sched) != length:
        report.append(f"{name} has length {len(sched)}, expected {length}")


def _check_definite(report: list[str], sched: MatrixSchedule, name: str, positive: bool):
    for M in sched.distinct():
        if not is_symmetric(M):
            report.append(f"{name} is not symmetric")
        if positive and not is_pd(M):
            report.append(f"{name} is not positive definite (tol {DEFINITENESS_TOL})")
        if not positive and not is_psd(M):
            report.append(f"{name} is not positive semidefinite (tol {DEFINITENESS_TOL})")


def validate(system: LtvSystem, weights: LqrWeights | None = None,
             noise: NoiseModel | None = None) -> list[str]:
    """Check every dimension and definiteness invariant; returns the report.

    An empty report means all invariants hold.  Callers decide whether a
    non-empty report is fatal (see ValidationError).
    """
    report: list[str] = []
    n, m, p, N = system.n, system.m, system.p, system.N
    if N < 1:
        report.append(f"horizon N must be positive, got {N}")
    _check_dims(report, system.A, "A", (n, n), N if N >= 1 else None)
    _check_dims(report, system.B, "B", (n, m), N if N >= 1 else None)
    if system.C is not None:
        _check_dims(report, system.C, "C", (p, n), N if N >= 1 else None)
    elif p != 0:
        report.append(f"p = {p} but no C schedule present")

    if weights is not None:
        _check_dims(report, weights.Q, "Q", (n, n), N + 1)
        _check_dims(report, weights.R, "R", (m, m), N)
        if weights.Q.shape == (n, n):
            _check_definite(report, weights.Q, "Q", positive=False)
        if weights.R.shape == (m, m):
            _check_definite(report, weights.R, "R", positive=True)

    if noise is not None:
        _check_dims(report, noise.Qd, "Qd", (n, n), N)
        if noise.Qd.shape == (n, n):
            _check_definite(report, noise.Qd, "Qd", positive=False)
        if p:
            _check_dims(report, noise.Rv, "Rv", (p, p), N)
            if noise.Rv.shape == (p, p):
                _check_definite(report, noise.Rv, "Rv", positive=True)
        if noise.x0_mean.shape != (n,):
            report.append(f"x0_mean has shape {noise.x0_mean.shape}, expected ({n},)")
        if noise.P0.shape != (n, n):
            report.append(f"P0 has shape {noise.P0.shape}, expected ({n}, {n})")
        else:
            if not is_symmetric(noise.P0):
                report.append("P0 is not symmetric")
            if not is_psd(noise.P0):
                report.append(f"P0 is not positive semidefinite (tol {DEFINITENESS_TOL})")
    return report


def step_deterministic(system: LtvSystem, k: int, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """One noise-free step: A_k x + B_k u."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    return system.A[k] @ x + system.B[k] @ u


def step_stochastic(system: LtvSystem, noise: NoiseModel, k: int,
                    x: np.ndarray, u: np.ndarray,
                    stream: GaussianStream) -> tuple[np.ndarray, np.ndarray]:
    """One noisy step: returns (A_k x + B_k u + d_k, C_k x + v_k).

    d_k ~ N(0, Qd_k) is drawn first, then v_k ~ N(0, Rv_k); with p = 0 the
    output is empty and no v is drawn.  Deterministic given the stream seed
    and call sequence.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = sample_gaussian(GaussianVector(np.zeros(system.n), noise.Qd[k]), stream)[0]
    x_next = step_deterministic(system, k, x, u) + d
    if system.C is None or system.p == 0:
        return x_next, np.zeros(0)
    v = sample_gaussian(GaussianVector(np.zeros(system.p), noise.Rv[k]), stream)[0]
    y = system.C[k] @ x + v
    return x_next, y
