"""Tracking the number of sources over time.

A 20 s recording switches on a third source halfway through.  Estimating
in 2 s windows advanced by 0.6 s shows the count stepping up.
"""

import numpy as np

from spikeid import DataMatrix, sliding_id

rng = np.random.default_rng(4)
k, t = 40, 20000
n = np.arange(t)
sources = np.vstack([
    np.sin(2 * np.pi * 10 * n / 1000),
    np.cos(2 * np.pi * 15 * n / 1000),
    np.sin(2 * np.pi * 20 * n / 1000) * (n >= t // 2),
])
gains = rng.standard_normal((k, 3)) * np.array([3.0, 2.5, 2.0])
y = DataMatrix(gains @ sources + rng.standard_normal((k, t)))

series = sliding_id(y, window_ms=2000, stride_ms=600, noise_method="fft")
for start, end, count in series.rows():
    print(f"{start / 1000:5.1f}-{end / 1000:5.1f} s  L = {count}")
