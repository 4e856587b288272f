"""
Longer horizons and shorter traces
==================================

Two practical questions: how fast does predictive information fade as we
forecast further ahead, and how much data does a reconstruction need
before its SPI can be trusted? Both use the 22-dimensional Lorenz 96 trace.

About two minutes on one core.
"""

import numpy as np

from spiselect import (ReconstructionParams, data_length_curve, generate_benchmark_trace,
                       horizon_curves, r_of_p)
from spiselect.dynamics import LORENZ96_K22

trace = generate_benchmark_trace("lorenz96", system_params=LORENZ96_K22)

# %%
# SPI against horizon
# -------------------
# With m = 2 and tau = 1, the information about ``x_{j+p}`` drops steadily
# with p. The second column divides by the entropy of the target, giving
# the share of the future's uncertainty that the state estimator removes.

ratios = dict(r_of_p(trace, ReconstructionParams(2, 1), 40))
for pt in horizon_curves(trace, [1, 5, 10, 20, 40], [2], [1]):
    print(f"p={pt.p:3d}  SPI={pt.spi:.3f}  share={ratios[pt.p]:.3f}")

# %%
# Which delay for which horizon?
# ------------------------------
# Forecasting further out rewards reaching further back.

taus = list(range(1, 41))
for p in (1, 25, 50):
    curve = horizon_curves(trace, [p], [2], taus)
    best = taus[int(np.argmax([pt.spi for pt in curve]))]
    print(f"p={p:3d}: best tau for m=2 is {best}")

# %%
# SPI against data length
# -----------------------
# On short prefixes the low-dimensional reconstruction holds the most
# information; the attractor is too thinly sampled for large m to help.

for pt in data_length_curve(trace, [1000, 5000, 20_000, 50_000], [2, 4, 8]):
    print(f"N={pt.length:6d}  m={pt.m}  SPI={pt.spi:.3f}")
