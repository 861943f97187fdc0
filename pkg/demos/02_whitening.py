"""Whitening by the noise covariance maximizes the signal-to-noise ratio.

For a random pair (R, R_n) the transform W = Phi Lambda^{-1/2} attains the
largest eigenvalue of W^T R W, and small errors in W move the adjusted
covariance only linearly.
"""

import numpy as np

from spikeid import optimality_report, perturbation_curve
from spikeid.snr import loglog_slope

rng = np.random.default_rng(1)


def random_pd(k, cond):
    q, _ = np.linalg.qr(rng.standard_normal((k, k)))
    return (q * np.geomspace(1.0, cond, k)) @ q.T


r, rn = random_pd(20, 1e3), random_pd(20, 1e2)
rep = optimality_report(r, rn)
print(f"lambda_max(R_adj)       = {rep.lambda_max:.6f}")
print(f"ratio at the whitener   = {rep.value_whitener:.6f}")
print(f"ratio after a rotation  = {rep.value_rotated:.6f}")

# A random transform does worse.
x = rng.standard_normal((20, 20))
ratio = np.linalg.norm(x.T @ r @ x, 2) / np.linalg.norm(x.T @ rn @ x, 2)
print(f"ratio at a random X     = {ratio:.6f}")

curve = perturbation_curve(r, rn, np.geomspace(1e-6, 1e-3, 7), seed=0)
for omega, dev in curve:
    print(f"omega {omega:8.1e}  deviation {dev:.3e}")
print(f"log-log slope {loglog_slope(curve):.3f}")
