"""Eigenvalue placement vs optimal steady-state design.

Places closed-loop eigenvalues of a diagonal system with the Mayne-Murdoch
formula, then contrasts the gain magnitudes with what the steady-state LQR
trades off, and shows the estimator-side duality: the steady Kalman gain of
(A, C) is the transposed steady LQR gain of (A^T, C^T).
"""
import numpy as np

from lqgkit import mayne_murdoch_gain, solve_dare_estimator, solve_dare_lqr

lam = np.array([0.5, 1.5])          # open-loop eigenvalues, one unstable
b = np.array([1.0, 1.0])

print("Mayne-Murdoch placement for A = diag(0.5, 1.5), B = [1, 1]:")
for mu in ([0.4, 0.8], [0.2, 0.3], [0.05, 0.1], [0.0, 0.01]):
    K = mayne_murdoch_gain(lam, mu, b)
    placed = np.linalg.eigvals(np.diag(lam) - np.outer(b, K))
    print(f"  targets {mu}: K = {np.round(K, 4)}, "
          f"placed = {np.round(np.sort(placed.real), 6)}, |K| = {np.abs(K).max():.3f}")
print("faster targets demand larger gains; LQR picks the trade-off instead:")

K_lqr = solve_dare_lqr(np.diag(lam), b.reshape(2, 1) @ np.ones((1, 1)), np.eye(2), 1.0)
print(f"  steady LQR gain {np.round(K_lqr.K.ravel(), 4)}, "
      f"spectral radius {K_lqr.closed_loop_spectral_radius:.4f}")

A = np.array([[0.5, 0.0], [-1.0, 1.5]])
C = np.array([[1.0, 0.5]])
est = solve_dare_estimator(A, C, np.eye(2), 1.0)
dual = solve_dare_lqr(A.T, C.T, np.eye(2), 1.0)
print("\nestimator/controller duality on the benchmark pair:")
print(f"  steady Kalman gain L^T    = {np.round(est.L.ravel(), 10)}")
print(f"  steady LQR gain of (A',C') = {np.round(dual.K.ravel(), 10)}")
print(f"  observer spectral radius   = {est.observer_spectral_radius:.4f}")
