"""Synthetic benchmark systems and trace generation.

Two flows (Lorenz 63, Lorenz 96) integrated with classical fixed-step RK4,
and two maps (Henon, logistic). ``generate_benchmark_trace`` applies the
run/discard/observe protocol that turns a system into a scalar series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DataError, NonFiniteStateError
from .timeseries import TimeSeries

FLOW_DT = 1.0 / 64
TOTAL_STEPS = 60_000
DISCARD = 10_000

LORENZ63 = {"sigma": 10.0, "rho": 28.0, "beta": 8.0 / 3.0}
LORENZ96_K22 = {"K": 22, "F": 5.0}
LORENZ96_K47 = {"K": 47, "F": 5.0}
HENON = {"a": 1.4, "b": 0.3}
LOGISTIC = {"r": 3.65}

SYSTEMS = ("lorenz63", "lorenz96", "henon", "logistic")


@dataclass(frozen=True)
class VectorField:
    dimension: int
    eval: Callable[[np.ndarray], np.ndarray]

    def __call__(self, state):
        return self.eval(state)


def lorenz63_field(sigma=10.0, rho=28.0, beta=8.0 / 3.0) -> VectorField:
    def f(s):
        x, y, z = s
        return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])

    return VectorField(3, f)


def lorenz96_field(K: int, F: float) -> VectorField:
    """Cyclic field ``d xi_k/dt = (xi_{k+1} - xi_{k-2}) xi_{k-1} - xi_k + F``."""
    if K < 4:
        raise DataError(f"Lorenz 96 needs K >= 4, got {K}")
    K = int(K)
    ip1 = np.roll(np.arange(K), -1)
    im1 = np.roll(np.arange(K), 1)
    im2 = np.roll(np.arange(K), 2)

    def f(s):
        return (s[ip1] - s[im2]) * s[im1] - s + F

    return VectorField(K, f)


def rk4_integrate(field: VectorField, x0, dt: float, steps: int) -> np.ndarray:
    """Fixed-step classical Runge-Kutta; returns ``steps + 1`` rows, row 0 = ``x0``."""
    x = np.array(x0, dtype=np.float64)
    if x.shape != (field.dimension,):
        raise DataError(f"initial state has shape {x.shape}, field dimension is {field.dimension}")
    if not dt > 0:
        raise DataError("dt must be positive")
    if steps < 1:
        raise DataError("steps must be >= 1")
    f = field.eval
    out = np.empty((steps + 1, field.dimension))
    out[0] = x
    h2, h6 = dt / 2.0, dt / 6.0
    for i in range(steps):
        k1 = f(x)
        k2 = f(x + h2 * k1)
        k3 = f(x + h2 * k2)
        k4 = f(x + dt * k3)
        x = x + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(x).all():
            raise NonFiniteStateError(i + 1)
        out[i + 1] = x
    return out


def henon_iterate(a=1.4, b=0.3, x0=(0.1, 0.1), n=1) -> np.ndarray:
    if n < 1:
        raise DataError("n must be >= 1")
    out = np.empty((n + 1, 2))
    x, y = map(float, x0)
    out[0] = x, y
    for i in range(n):
        x, y = 1.0 - a * x * x + y, b * x
        if not (np.isfinite(x) and np.isfinite(y)):
            raise NonFiniteStateError(i + 1)
        out[i + 1] = x, y
    return out


def logistic_iterate(r=3.65, x0=0.1, n=1) -> np.ndarray:
    if not 0 < x0 < 1:
        raise DataError("logistic map needs 0 < x0 < 1")
    if not 0 < r <= 4:
        raise DataError("logistic map needs 0 < r <= 4")
    if n < 1:
        raise DataError("n must be >= 1")
    out = np.empty(n + 1)
    x = float(x0)
    out[0] = x
    for i in range(n):
        x = r * x * (1.0 - x)
        out[i + 1] = x
    return out


def default_initial_state(system: str, params: dict) -> np.ndarray:
    if system == "lorenz63":
        return np.ones(3)
    if system == "lorenz96":
        s = np.full(int(params["K"]), float(params["F"]))
        s[0] += 0.01
        return s
    if system == "henon":
        return np.array([0.1, 0.1])
    if system == "logistic":
        return np.array([0.1])
    raise DataError(f"unknown system {system!r}")


def default_params(system: str) -> dict:
    presets = {"lorenz63": LORENZ63, "lorenz96": LORENZ96_K22, "henon": HENON, "logistic": LOGISTIC}
    if system not in presets:
        raise DataError(f"unknown system {system!r}")
    return dict(presets[system])


@dataclass(frozen=True)
class GenerationProtocol:
    """How many steps to run, how many to throw away, and what to observe.

    ``dt=None`` means 1/64 for flows and 1 for maps. ``initial_state=None``
    picks the documented default for the system.
    """

    total_steps: int = TOTAL_STEPS
    discard: int = DISCARD
    dt: float | None = None
    observable_index: int = 0
    initial_state: tuple | None = field(default=None)

    def __post_init__(self):
        if not 0 <= self.discard < self.total_steps:
            raise DataError("need 0 <= discard < total_steps")
        if self.dt is not None and not self.dt > 0:
            raise DataError("dt must be positive")


def generate_benchmark_trace(system: str, protocol: GenerationProtocol | None = None,
                             system_params: dict | None = None) -> TimeSeries:
    """Run ``system`` for ``total_steps`` and keep the observable after ``discard``.

    The result has exactly ``total_steps - discard`` samples: state 0 is the
    initial condition, so states ``discard .. total_steps - 1`` are kept.
    """
    protocol = protocol or GenerationProtocol()
    params = default_params(system)
    params.update(system_params or {})
    x0 = (np.asarray(protocol.initial_state, dtype=np.float64)
          if protocol.initial_state is not None else default_initial_state(system, params))
    steps = protocol.total_steps - 1
    if system in ("lorenz63", "lorenz96"):
        dt = FLOW_DT if protocol.dt is None else protocol.dt
        field_ = (lorenz63_field(params["sigma"], params["rho"], params["beta"])
                  if system == "lorenz63" else lorenz96_field(int(params["K"]), params["F"]))
        if protocol.observable_index >= field_.dimension:
            raise DataError("observable_index exceeds system dimension")
        traj = rk4_integrate(field_, x0, dt, steps) if steps else x0[None, :]
    else:
        dt = 1.0 if protocol.dt is None else protocol.dt
        if system == "henon":
            if protocol.observable_index >= 2:
                raise DataError("observable_index exceeds system dimension")
            traj = henon_iterate(params["a"], params["b"], x0, steps) if steps else x0[None, :]
        else:
            if protocol.observable_index != 0:
                raise DataError("logistic map is one-dimensional")
            traj = (logistic_iterate(params["r"], float(x0[0]), steps)[:, None]
                    if steps else x0[None, :])
    values = traj[protocol.discard:, protocol.observable_index]
    label = system + "".join(f"_{k}={v:g}" for k, v in sorted(params.items()))
    return TimeSeries(values, sample_step=dt, name=label, source="synthetic")
