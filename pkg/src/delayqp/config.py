"""Parameters file: network constants, delay, integration and history settings.

Example::

    {
      "alpha": 0.45, "gamma": 0.0, "kappa": 2.0, "selector": "zero",
      "step": 0.0365, "t_end": 200.0, "converge_tol": 1e-6, "stall_window": 1.0,
      "tau": {"kind": "constant", "tau0": 0.365, "amplitude": 0.0, "omega": 0.0},
      "histories": {"count": 10, "range": 5.0, "seed": 0}
    }

``alpha`` may be ``"search"`` to pick it with the stability grid search.
"""

import math
from dataclasses import dataclass, field, replace

from delayqp.exceptions import ConfigError, ProblemFormatError
from delayqp.integrator import DelaySpec, IntegrationConfig
from delayqp.network import HSelector, NetworkParams
from delayqp.problem import read_json


@dataclass(frozen=True)
class HistorySettings:
    count: int = 10
    range: float = 5.0
    seed: int = 0

    def to_dict(self):
        return {"count": self.count, "range": self.range, "seed": self.seed}


@dataclass(frozen=True)
class SolverParams:
    alpha: object  # float, or "search"
    gamma: float = 0.0
    kappa: float = 2.0
    selector: HSelector = HSelector.ZERO
    integration: IntegrationConfig = field(
        default_factory=lambda: IntegrationConfig(step=0.01, t_end=100.0))
    delay: DelaySpec = field(default_factory=DelaySpec)
    histories: HistorySettings = field(default_factory=HistorySettings)
    distance_tol: float = 5e-3

    @property
    def search(self):
        return self.alpha == "search"

    def network_params(self, alpha=None):
        a = self.alpha if alpha is None else alpha
        if a == "search":
            raise ConfigError("alpha not resolved; run the stability search first")
        return NetworkParams(alpha=a, gamma=self.gamma, kappa=self.kappa)

    def with_seed(self, seed):
        return replace(self, histories=replace(self.histories, seed=int(seed)))

    def to_dict(self):
        out = {"alpha": self.alpha, "gamma": self.gamma, "kappa": self.kappa,
               "selector": HSelector(self.selector).value}
        out.update(self.integration.to_dict())
        out["tau"] = self.delay.to_dict()
        out["histories"] = self.histories.to_dict()
        out["distance_tol"] = self.distance_tol
        return out


def _number(data, key, default=None):
    v = data.get(key, default)
    if v is None:
        raise ProblemFormatError(f"parameters: missing key {key!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ProblemFormatError(f"parameters: {key!r} must be a finite number")
    return float(v)


def params_from_dict(data):
    if not isinstance(data, dict):
        raise ProblemFormatError("parameters: top level must be a JSON object")
    alpha = data.get("alpha")
    if alpha != "search":
        alpha = _number(data, "alpha")
        if alpha < 0:
            raise ConfigError(f"alpha must be nonnegative, got {alpha}")
    try:
        selector = HSelector(data.get("selector", "zero"))
    except ValueError as exc:
        raise ProblemFormatError(f"parameters: {exc}") from exc
    tau = data.get("tau", {"kind": "constant", "tau0": 0.0})
    hist = data.get("histories", {})
    if not isinstance(tau, dict) or not isinstance(hist, dict):
        raise ProblemFormatError("parameters: 'tau' and 'histories' must be objects")
    count = hist.get("count", 10)
    seed = hist.get("seed", 0)
    if not isinstance(count, int) or not isinstance(seed, int) or count < 1:
        raise ProblemFormatError("parameters: histories.count/seed must be integers, count >= 1")
    try:
        return SolverParams(
            alpha=alpha,
            gamma=_number(data, "gamma", 0.0),
            kappa=_number(data, "kappa", 2.0),
            selector=selector,
            integration=IntegrationConfig(
                step=_number(data, "step"),
                t_end=_number(data, "t_end"),
                converge_tol=_number(data, "converge_tol", 1e-6),
                stall_window=_number(data, "stall_window", 1.0),
            ),
            delay=DelaySpec(
                kind=tau.get("kind", "constant"),
                tau0=_number(tau, "tau0", 0.0),
                amplitude=_number(tau, "amplitude", 0.0),
                omega=_number(tau, "omega", 0.0),
            ),
            histories=HistorySettings(count=count, range=_number(hist, "range", 5.0), seed=seed),
            distance_tol=_number(data, "distance_tol", 5e-3),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ProblemFormatError(f"parameters: {exc}") from exc


def load_params(path):
    return params_from_dict(read_json(path))
