"""Acceptance suite: one test per criterion, one PASS/FAIL line printed each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.  Criterion 2's display clause is expected to fail: the unique
steady-state gain for the benchmark system is [2.7354355..., -2.7470871...],
which rounds to [2.74, -2.75]; the reference rendering [2.73, -2.75] has a
truncated first entry (its own N=5 fixed-gain cost 432.17 is reproducible
only with the exact gain).  The companion unit tests pin the solver's
high-precision behavior.
"""
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import (
    A_BENCH,
    B_BENCH,
    K_STEADY,
    X0_BENCH,
    bench_noise,
    bench_system,
    bench_weights,
)
from lqgkit import (
    Belief,
    GaussianStream,
    GaussianVector,
    JointGaussian,
    Scenario,
    condition,
    evaluate_cost,
    filter_predict,
    filter_run,
    filter_update,
    mayne_murdoch_gain,
    predictor_step,
    run,
    sample_gaussian,
    settling_report,
    simulate_closed_loop,
    smoother_run,
    solve_dare_estimator,
    solve_dare_lqr,
    solve_lqr,
)
from lqgkit.model import MatrixSchedule


@contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"FAIL  criterion {number:2d}: {description}")
        raise
    print(f"PASS  criterion {number:2d}: {description}")


def fig1_scenario(N, controller):
    return Scenario(system=bench_system(N), weights=bench_weights(N),
                    controller=controller, x0=X0_BENCH)


def random_psd(rng, n, scale=1.0):
    M = rng.standard_normal((n, n))
    return scale * (M @ M.T) + 0.1 * np.eye(n)


def test_criterion_1_fig1_cost_table():
    with criterion(1, "Fig.1 cost table within +-0.01, runtime < 1 s"):
        start = time.perf_counter()
        expected = {(5, "lqr"): 422.13, (5, "steady"): 432.17,
                    (50, "lqr"): 433.25, (50, "steady"): 433.25}
        for (N, controller), value in expected.items():
            cost = run(fig1_scenario(N, controller)).cost
            assert cost == pytest.approx(value, abs=0.01), \
                f"N={N} controller={controller}: {cost} vs {value}"
        assert time.perf_counter() - start < 1.0


def test_criterion_2_steady_state_gain_display():
    with criterion(2, "steady gain rounds to [2.73, -2.75], rho < 1, residual <= 1e-9"):
        result = solve_dare_lqr(A_BENCH, B_BENCH, np.eye(2), 1.0)
        assert result.closed_loop_spectral_radius < 1.0
        assert result.residual <= 1e-9
        np.testing.assert_allclose(
            np.round(result.K, 2), [[2.73, -2.75]],
            err_msg="expected red (reference-display defect): the converged "
                    f"gain {result.K.tolist()} rounds to [2.74, -2.75]; the "
                    "reference's first entry is a truncation artifact (see "
                    "module docstring and README)")


def test_criterion_3_settling_condition():
    with criterion(3, "k_x < k_K at N=50, fails at N=5 (epsilon = 0.1)"):
        reports = {}
        for N in (5, 50):
            system, weights = bench_system(N), bench_weights(N)
            solution = solve_lqr(system, weights)
            traj = simulate_closed_loop(system, solution, X0_BENCH)
            reports[N] = settling_report(solution, traj, epsilon=0.1)
        assert reports[50].k_x < reports[50].k_K
        assert not reports[5].k_x < reports[5].k_K


def test_criterion_4_mayne_murdoch_placement():
    with criterion(4, "Mayne-Murdoch places eigenvalues within 1e-8, 20 random systems"):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(1, 5))
            lam = np.sort(rng.uniform(-0.9, 0.9, n))
            while n > 1 and np.min(np.diff(lam)) < 0.05:
                lam = np.sort(rng.uniform(-0.9, 0.9, n))
            mu = rng.uniform(-0.9, 0.9, n)
            b = rng.uniform(0.5, 2.0, n) * rng.choice([-1.0, 1.0], n)
            K = mayne_murdoch_gain(lam, mu, b)
            placed = np.linalg.eigvals(np.diag(lam) - np.outer(b, K))
            np.testing.assert_allclose(np.sort(placed.real), np.sort(mu), atol=1e-8)
            np.testing.assert_allclose(placed.imag, 0.0, atol=1e-8)


def test_criterion_5_form_equivalences():
    with criterion(5, "Joseph==compact (predictor, filter) and one-step==two-stage, "
                      "200 random PSD inputs each, 1e-10"):
        rng = np.random.default_rng(5)
        for _ in range(200):
            n, p = int(rng.integers(1, 4)), int(rng.integers(1, 3))
            A = rng.standard_normal((n, n))
            B = rng.standard_normal((n, 1))
            C = rng.standard_normal((p, n))
            Qd = random_psd(rng, n)
            Rv = random_psd(rng, p)
            P = random_psd(rng, n)
            mean = rng.standard_normal(n)
            u = rng.standard_normal(1)
            y = rng.standard_normal(p)
            S = C @ P @ C.T + Rv

            # predictor: Joseph-form step vs compact covariance
            pred, _ = predictor_step(A, B, C, Qd, Rv,
                                     Belief(mean=mean, cov=P, tag=(0, -1)), u, y)
            compact = A @ P @ A.T + Qd - A @ P @ C.T @ np.linalg.solve(S, C @ P @ A.T)
            assert np.max(np.abs(pred.cov - compact)) < 1e-10

            # filter update: Joseph form vs compact covariance
            upd, _ = filter_update(C, Rv, Belief(mean=mean, cov=P, tag=(1, 0)), y)
            compact_f = P - P @ C.T @ np.linalg.solve(S, C @ P)
            assert np.max(np.abs(upd.cov - compact_f)) < 1e-10

            # two-stage filter step vs composed one-step form
            predicted = filter_predict(A, B, Qd, Belief(mean=mean, cov=P, tag=(0, 0)), u)
            two_stage, _ = filter_update(C, Rv, predicted, y)
            M = A @ P @ A.T + Qd
            S1 = C @ M @ C.T + Rv
            L1 = M @ C.T @ np.linalg.inv(S1)
            x_pred = A @ mean + B @ u
            one_mean = x_pred + L1 @ (y - C @ x_pred)
            ILC = np.eye(n) - L1 @ C
            one_cov = ILC @ M @ ILC.T + L1 @ Rv @ L1.T
            assert np.max(np.abs(two_stage.mean - one_mean)) < 1e-10
            assert np.max(np.abs(two_stage.cov - one_cov)) < 1e-10


def test_criterion_6_covariance_ordering():
    with criterion(6, "P(k|k) <= P(k|k-1) PSD; diag smoother <= filter <= predicted"):
        N = 50
        system = bench_system(N, with_output=True)
        noise = bench_noise(N)
        stream = GaussianStream(6)
        x = noise.x0_mean + 2.5 * stream.standard_normal(2)
        inputs, measurements = [], []
        for k in range(N):
            u = -(K_STEADY @ x)
            inputs.append(u)
            d = 0.25 * stream.standard_normal(2)
            v = 0.25 * stream.standard_normal(1)
            x = system.A[k] @ x + system.B[k] @ u + d
            measurements.append(system.C[k] @ x + v)
        filtered = filter_run(system, noise, np.array(inputs), np.array(measurements))
        smoothed = smoother_run(system, noise, filtered)
        for k in range(1, N + 1):
            pred_cov = filtered.predicted[k - 1].cov
            upd_cov = filtered.updated[k].cov
            assert np.linalg.eigvalsh(pred_cov - upd_cov).min() >= -1e-10
            assert np.all(np.diag(upd_cov) <= np.diag(pred_cov) + 1e-10)
            assert np.all(np.diag(smoothed.smoothed[k].cov) <= np.diag(upd_cov) + 1e-10)
        assert np.all(np.diag(smoothed.smoothed[0].cov)
                      <= np.diag(filtered.updated[0].cov) + 1e-10)


def test_criterion_7_gain_stationarity():
    with criterion(7, "+-1e-4 single-entry gain perturbations never improve by > 1e-10"):
        # LQR side: perturb entries of the optimal schedule
        N = 10
        system, weights = bench_system(N), bench_weights(N)
        solution = solve_lqr(system, weights)
        base = evaluate_cost(simulate_closed_loop(system, solution, X0_BENCH), weights)
        for k in range(N):
            for j in range(2):
                for sign in (+1.0, -1.0):
                    gains = [solution.K[i].copy() for i in range(N)]
                    gains[k][0, j] += sign * 1e-4
                    cost = evaluate_cost(
                        simulate_closed_loop(system, MatrixSchedule.of(gains), X0_BENCH),
                        weights)
                    assert cost >= base - 1e-10

        # estimator side: perturb the Kalman gain in the trace objective
        rng = np.random.default_rng(7)
        for _ in range(20):
            A = rng.standard_normal((2, 2))
            C = rng.standard_normal((1, 2))
            Qd = random_psd(rng, 2)
            Rv = random_psd(rng, 1)
            P_prev = random_psd(rng, 2)
            M = A @ P_prev @ A.T + Qd
            L_opt = M @ C.T @ np.linalg.inv(C @ M @ C.T + Rv)

            def trace_obj(L):
                ILC = np.eye(2) - L @ C
                return float(np.trace(ILC @ M @ ILC.T + L @ Rv @ L.T))

            base_tr = trace_obj(L_opt)
            for i in range(2):
                for sign in (+1.0, -1.0):
                    L = L_opt.copy()
                    L[i, 0] += sign * 1e-4
                    assert trace_obj(L) >= base_tr - 1e-10


def test_criterion_8_monte_carlo_consistency():
    with criterion(8, "1e4-run sample covariance of filter error at k=20 "
                      "within 20% of P(20|20), runtime < 30 s"):
        start = time.perf_counter()
        N, runs = 20, 10_000
        system = bench_system(N, with_output=True)
        noise = bench_noise(N)  # model-consistent truth (see decisions ledger)
        d_gauss = GaussianVector(np.zeros(2), np.eye(2))
        v_gauss = GaussianVector(np.zeros(1), np.eye(1))
        errors = np.empty((runs, 2))
        for r in range(runs):
            stream = GaussianStream(r)
            x = sample_gaussian(noise.initial_belief(), stream)[0]
            d_all = sample_gaussian(d_gauss, stream, count=N)
            v_all = sample_gaussian(v_gauss, stream, count=N)
            inputs = np.empty((N, 1))
            measurements = np.empty((N, 1))
            for k in range(N):
                u = -(K_STEADY @ x)
                inputs[k] = u
                x = system.A[k] @ x + system.B[k] @ u + d_all[k]
                measurements[k] = system.C[k] @ x + v_all[k]
            filtered = filter_run(system, noise, inputs, measurements)
            errors[r] = x - filtered.updated[N].mean
        sample_cov = np.cov(errors.T)
        model_cov = filtered.updated[N].cov
        rel = np.abs(np.diag(sample_cov) - np.diag(model_cov)) / np.diag(model_cov)
        assert np.all(rel < 0.20), f"relative deviation {rel}"
        assert time.perf_counter() - start < 30.0


def test_criterion_9_conditional_gaussian_oracle():
    with criterion(9, "filter_update == conditional-Gaussian formula, 100 cases, 1e-12"):
        rng = np.random.default_rng(9)
        for _ in range(100):
            n, p = int(rng.integers(1, 4)), int(rng.integers(1, 3))
            C = rng.standard_normal((p, n))
            Rv = random_psd(rng, p)
            P = random_psd(rng, n)
            mean = rng.standard_normal(n)
            y_obs = rng.standard_normal(p)
            joint = JointGaussian(mean_x=mean, mean_y=C @ mean, cov_xx=P,
                                  cov_xy=P @ C.T, cov_yy=C @ P @ C.T + Rv)
            expected = condition(joint, y_obs)
            got, _ = filter_update(C, Rv, Belief(mean=mean, cov=P, tag=(1, 0)), y_obs)
            assert np.max(np.abs(got.mean - expected.mean)) <= 1e-12
            assert np.max(np.abs(got.cov - expected.cov)) <= 1e-12


def test_criterion_10_transpose_duality():
    with criterion(10, "steady estimator gain equals transposed steady LQR gain, "
                       "50 random pairs, 1e-8"):
        rng = np.random.default_rng(10)
        for _ in range(50):
            n = int(rng.integers(1, 4))
            p = int(rng.integers(1, 3))
            A = rng.standard_normal((n, n))
            A *= rng.uniform(0.3, 0.95) / max(abs(np.linalg.eigvals(A)))
            C = rng.standard_normal((p, n))
            Qd = random_psd(rng, n)
            Rv = random_psd(rng, p)
            est = solve_dare_estimator(A, C, Qd, Rv, tol=1e-12)
            ctrl = solve_dare_lqr(A.T, C.T, Qd, Rv, tol=1e-12)
            np.testing.assert_allclose(est.L, ctrl.K.T, atol=1e-8)


def test_criterion_11_reproduce_determinism(tmp_path):
    with criterion(11, "reproduce fig4 twice with one seed -> byte-identical CSVs"):
        from lqgkit.cli import main
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["reproduce", "fig4", "--output", str(out_a)]) == 0
        assert main(["reproduce", "fig4", "--output", str(out_b)]) == 0
        for name in ("fig4_predictor.csv", "fig4_filter.csv", "fig4_smoother.csv"):
            bytes_a = (out_a / name).read_bytes()
            assert bytes_a == (out_b / name).read_bytes()
            assert len(bytes_a) > 0
