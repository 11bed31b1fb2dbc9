"""Method-of-steps integration of delayed systems ``y' = f(t, y(t), y(t - tau(t)))``.

Classical RK4 with a fixed step.  Every accepted sample stores the state and
the derivative, so past values are recovered by cubic Hermite interpolation.
Because ``step <= tau0 / 4`` is enforced, the delayed argument of any stage
lies in the already-integrated past and no implicit iteration is needed.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from delayqp._validation import freeze
from delayqp.exceptions import ConfigError, DivergenceError


@dataclass(frozen=True)
class DelaySpec:
    """``tau(t) = tau0`` or ``tau0 + amplitude * sin(omega * t)``."""

    kind: str = "constant"
    tau0: float = 0.0
    amplitude: float = 0.0
    omega: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "sinusoidal"):
            raise ConfigError(f"unknown delay kind {self.kind!r}")
        for name in ("tau0", "amplitude", "omega"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ConfigError(f"delay {name} must be finite")
            object.__setattr__(self, name, v)
        if self.tau0 < 0 or self.amplitude < 0:
            raise ConfigError("tau0 and amplitude must be nonnegative")
        if self.kind == "sinusoidal" and self.amplitude > self.tau0:
            raise ConfigError("amplitude > tau0 would make the delay negative")

    @property
    def tau_max(self):
        return self.tau0 + (self.amplitude if self.kind == "sinusoidal" else 0.0)

    def __call__(self, t):
        if self.kind == "constant":
            return self.tau0
        return self.tau0 + self.amplitude * math.sin(self.omega * t)

    @classmethod
    def from_dict(cls, data):
        return cls(**{k: data[k] for k in ("kind", "tau0", "amplitude", "omega") if k in data})

    def to_dict(self):
        return {"kind": self.kind, "tau0": self.tau0, "amplitude": self.amplitude,
                "omega": self.omega}


@dataclass(frozen=True, eq=False)
class HistoryFn:
    """Initial function on ``[-tau_max, 0]``.

    A constant vector when ``times`` is None, otherwise a sample table
    interpolated linearly between rows.
    """

    value: np.ndarray
    times: np.ndarray = None

    def __post_init__(self):
        value = np.array(self.value, dtype=np.float64)
        if not np.all(np.isfinite(value)):
            raise ConfigError("history contains NaN or infinity")
        if self.times is None:
            if value.ndim != 1:
                raise ConfigError("constant history must be a vector")
        else:
            times = np.array(self.times, dtype=np.float64)
            if value.ndim != 2 or times.ndim != 1 or value.shape[0] != times.size:
                raise ConfigError("sampled history needs one row per time")
            if times.size < 2 or np.any(np.diff(times) <= 0):
                raise ConfigError("history times must be strictly increasing")
            object.__setattr__(self, "times", freeze(times))
        object.__setattr__(self, "value", freeze(value))

    @property
    def kind(self):
        return "constant-vector" if self.times is None else "sampled"

    @property
    def dim(self):
        return self.value.shape[-1]

    @classmethod
    def constant(cls, v):
        return cls(np.asarray(v, dtype=np.float64))

    @classmethod
    def sampled(cls, times, values):
        return cls(np.asarray(values, dtype=np.float64), np.asarray(times, dtype=np.float64))

    def covers(self, t0):
        return self.times is None or (self.times[0] <= t0 + 1e-12 and self.times[-1] >= -1e-12)

    def __call__(self, t):
        if self.times is None:
            return self.value.copy()
        return np.array([np.interp(t, self.times, col) for col in self.value.T])


@dataclass(frozen=True)
class IntegrationConfig:
    step: float
    t_end: float
    converge_tol: float = 1e-6
    stall_window: float = 1.0

    def __post_init__(self):
        for name in ("step", "t_end", "converge_tol", "stall_window"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v <= 0:
                raise ConfigError(f"{name} must be a positive finite number, got {v}")
            object.__setattr__(self, name, v)

    def check_delay(self, delay):
        if delay.tau0 > 0 and self.step > delay.tau0 / 4 * (1 + 1e-12):
            raise ConfigError(
                f"step {self.step} too large for delay tau0={delay.tau0} (need step <= tau0/4)")

    def to_dict(self):
        return {"step": self.step, "t_end": self.t_end, "converge_tol": self.converge_tol,
                "stall_window": self.stall_window}


class Trajectory:
    """Uniformly sampled solution with Hermite dense output.

    Attributes
    ----------
    times, states, derivatives, residuals : ndarray
        One row/entry per accepted sample, ``times[i] = i * step``.
    stop_reason : {"converged", "t_end"}
    """

    def __init__(self, times, states, derivatives, residuals, history, delay, step,
                 stop_reason):
        self.times = freeze(times)
        self.states = freeze(states)
        self.derivatives = freeze(derivatives)
        self.residuals = freeze(residuals)
        self.history = history
        self.delay = delay
        self.step = step
        self.stop_reason = stop_reason

    def __len__(self):
        return self.times.size

    @property
    def final_state(self):
        return self.states[-1]

    @property
    def final_residual(self):
        return float(self.residuals[-1])

    def __call__(self, t):
        return sample_state(self, t)


def _hermite(y0, f0, y1, f1, s, h):
    s2 = s * s
    s3 = s2 * s
    return ((2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0
            + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1)


def sample_state(traj, t):
    """State at time ``t`` in ``[-tau_max, t_last]``; exact at sample times."""
    t = float(t)
    lo = -traj.delay.tau_max
    if t < lo - 1e-12 or t > traj.times[-1] + 1e-12:
        raise ValueError(f"t={t} outside [{lo}, {traj.times[-1]}]")
    if t < 0:
        return traj.history(t)
    h = traj.step
    last = traj.times.size - 1
    i = min(int(t / h), last)
    if i == last or t == traj.times[i]:
        return traj.states[i].copy()
    s = (t - traj.times[i]) / h
    return _hermite(traj.states[i], traj.derivatives[i],
                    traj.states[i + 1], traj.derivatives[i + 1], s, h)


# overflow is detected explicitly below and reported as DivergenceError
@np.errstate(over="ignore", invalid="ignore")
def integrate_field(field, delay, history, cfg, residual=None):
    """Integrate ``y' = field(t, y, y_delayed)`` from ``history``.

    Parameters
    ----------
    field : callable ``(t, y, y_delayed) -> dy``
    residual : callable ``y -> float``, optional
        Convergence measure.  Integration stops early once it has stayed
        below ``cfg.converge_tol`` for ``cfg.stall_window`` time units.

    Raises
    ------
    DivergenceError
        The state became non-finite.
    """
    cfg.check_delay(delay)
    if not history.covers(-delay.tau_max):
        raise ConfigError("history does not cover [-tau_max, 0]")
    h = cfg.step
    n_steps = max(1, math.ceil(cfg.t_end / h - 1e-9))
    dim = history.dim
    states = np.empty((n_steps + 1, dim))
    derivs = np.empty((n_steps + 1, dim))
    resid = np.empty(n_steps + 1)
    states[0] = history(0.0)
    zero_delay = delay.kind == "constant" and delay.tau0 == 0.0
    known = -1  # last index whose derivative is stored

    def past(tq, y_stage):
        if zero_delay:
            return y_stage
        if tq <= 0.0:
            return history(tq)
        tk = known * h
        if tq >= tk:
            # only reachable when tau(t) < step (sinusoidal dips)
            return states[known] + (tq - tk) * derivs[known]
        i = int(tq / h)
        if i >= known:
            i = known - 1
        s = (tq - i * h) / h
        return _hermite(states[i], derivs[i], states[i + 1], derivs[i + 1], s, h)

    measure = residual if residual is not None else (lambda y: float("nan"))
    resid[0] = measure(states[0])
    tol = cfg.converge_tol
    below_since = 0.0 if resid[0] <= tol else None
    stop_reason = "t_end"
    k = 0
    while k < n_steps:
        t = k * h
        y = states[k]
        if not zero_delay:
            known = k - 1
        k1 = field(t, y, past(t - delay(t), y))
        derivs[k] = k1
        known = k
        tm = t + 0.5 * h
        tn = (k + 1) * h
        ya = y + 0.5 * h * k1
        k2 = field(tm, ya, past(tm - delay(tm), ya))
        yb = y + 0.5 * h * k2
        k3 = field(tm, yb, past(tm - delay(tm), yb))
        yc = y + h * k3
        k4 = field(tn, yc, past(tn - delay(tn), yc))
        y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y_new)):
            raise DivergenceError(f"state became non-finite at t={tn:.6g}", time=tn)
        k += 1
        states[k] = y_new
        r = measure(y_new)
        resid[k] = r
        if r <= tol:
            if below_since is None:
                below_since = tn
            if tn - below_since >= cfg.stall_window - 1e-12:
                stop_reason = "converged"
                break
        else:
            below_since = None
    known = k - 1
    t = k * h
    derivs[k] = field(t, states[k], past(t - delay(t), states[k]))
    times = np.arange(k + 1) * h
    return Trajectory(times, states[:k + 1].copy(), derivs[:k + 1].copy(), resid[:k + 1].copy(),
                      history, delay, h, stop_reason)


def integrate(net, delay, history, cfg):
    """Integrate the projection network from ``history``."""
    if history.dim != net.size:
        raise ConfigError(f"history has dimension {history.dim}, network needs {net.size}")

    def field(t, y, yd):
        return net.field(y, yd)

    def residual(y):
        return float(np.linalg.norm(y - net.projection_map(y)))

    return integrate_field(field, delay, history, cfg, residual=residual)


def random_histories(count, dims, range_=1.0, seed=0):
    """``count`` constant histories with entries uniform in ``[-range_, range_]``.

    Multiplier components are left unclipped; the dynamics handles starts
    outside the box.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    n, h = dims
    rng = np.random.default_rng(seed)
    draws = rng.uniform(-range_, range_, size=(count, n + h))
    return [HistoryFn.constant(row) for row in draws]


def write_trajectory_csv(traj, path):
    k = traj.states.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"y{i + 1}" for i in range(k)] + ["residual"])
        for t, y, r in zip(traj.times, traj.states, traj.residuals):
            w.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in y] + [f"{r:.17g}"])
