"""scikit-learn compatible front end for the delayed projection network."""

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from delayqp.config import SolverParams
from delayqp.exceptions import ConfigError
from delayqp.integrator import (
    DelaySpec,
    HistoryFn,
    IntegrationConfig,
    integrate,
    random_histories,
)
from delayqp.network import NetworkParams, build_network
from delayqp.problem import QpProblem, problem_from_dict
from delayqp.stability import search_alpha, stability_margin, with_alpha


def _as_problem(problem):
    if isinstance(problem, QpProblem):
        return problem
    if isinstance(problem, dict):
        return problem_from_dict(problem)
    raise TypeError(f"expected a QpProblem or a dict of arrays, got {type(problem).__name__}")


class DelayedProjectionQP(TransformerMixin, BaseEstimator):
    """Solve a convex QP by integrating the delayed projection network.

    ``fit`` builds the network for a problem, evaluates the stability
    certificate and integrates ``n_histories`` random constant histories.
    ``transform`` maps user supplied initial states (one per row, length
    ``n + h``) to the states the network settles in.

    Parameters
    ----------
    alpha : float or "search"
        Projection step.  ``"search"`` picks the grid value with the most
        negative stability margin and falls back to ``alpha_fallback`` when
        no grid value certifies stability.
    gamma : float
        Coupling weight of the projected stationarity residual in the
        multiplier update.
    kappa : float
        Time scale; ``kappa = 1`` removes the delayed term.
    selector : {"zero", "first_h_rows"}
    step, t_end, converge_tol, stall_window : float
        Fixed RK4 step, horizon, and early stop rule on the fixed-point
        residual.
    delay_kind : {"constant", "sinusoidal"}
    tau0, tau_amplitude, tau_omega : float
    n_histories : int
    history_range : float
    random_state : int
    n_jobs : int, optional
        Histories are integrated concurrently with joblib threads.

    Attributes
    ----------
    network_ : ProjectionNetwork
    stability_ : StabilityReport
    alpha_ : float
    trajectories_ : list of Trajectory
    converged_ : ndarray of bool
    x_, v_ : ndarray
        Mean final primal/multiplier state over converged histories.
    """

    def __init__(self, alpha=0.45, gamma=0.0, kappa=2.0, selector="zero", step=0.01,
                 t_end=100.0, converge_tol=1e-6, stall_window=1.0, delay_kind="constant",
                 tau0=0.0, tau_amplitude=0.0, tau_omega=0.0, n_histories=10,
                 history_range=5.0, random_state=0, alpha_fallback=0.45, n_jobs=None):
        self.alpha = alpha
        self.gamma = gamma
        self.kappa = kappa
        self.selector = selector
        self.step = step
        self.t_end = t_end
        self.converge_tol = converge_tol
        self.stall_window = stall_window
        self.delay_kind = delay_kind
        self.tau0 = tau0
        self.tau_amplitude = tau_amplitude
        self.tau_omega = tau_omega
        self.n_histories = n_histories
        self.history_range = history_range
        self.random_state = random_state
        self.alpha_fallback = alpha_fallback
        self.n_jobs = n_jobs

    @classmethod
    def from_params(cls, params: SolverParams, **overrides):
        kw = dict(
            alpha=params.alpha, gamma=params.gamma, kappa=params.kappa,
            selector=params.selector.value, step=params.integration.step,
            t_end=params.integration.t_end, converge_tol=params.integration.converge_tol,
            stall_window=params.integration.stall_window, delay_kind=params.delay.kind,
            tau0=params.delay.tau0, tau_amplitude=params.delay.amplitude,
            tau_omega=params.delay.omega, n_histories=params.histories.count,
            history_range=params.histories.range, random_state=params.histories.seed,
        )
        kw.update(overrides)
        return cls(**kw)

    def _delay(self):
        return DelaySpec(kind=self.delay_kind, tau0=self.tau0, amplitude=self.tau_amplitude,
                         omega=self.tau_omega)

    def _config(self):
        return IntegrationConfig(step=self.step, t_end=self.t_end,
                                 converge_tol=self.converge_tol, stall_window=self.stall_window)

    def _build(self, problem):
        search = isinstance(self.alpha, str)
        if search and self.alpha != "search":
            raise ConfigError(f"alpha must be a number or 'search', got {self.alpha!r}")
        alpha0 = self.alpha_fallback if search else self.alpha
        net = build_network(problem, NetworkParams(alpha0, self.gamma, self.kappa), self.selector)
        self.alpha_search_ = None
        if search:
            found = search_alpha(net)
            self.alpha_search_ = found
            if found is not None:
                net = with_alpha(net, found[0])
        return net

    def _run(self, histories):
        delay, cfg, net = self._delay(), self._config(), self.network_
        cfg.check_delay(delay)
        return Parallel(n_jobs=self.n_jobs, prefer="threads")(
            delayed(integrate)(net, delay, hist, cfg) for hist in histories)

    def fit(self, problem, y=None):
        problem = _as_problem(problem)
        self.problem_ = problem
        self.network_ = self._build(problem)
        self.alpha_ = self.network_.params.alpha
        self.stability_ = stability_margin(self.network_)
        self.histories_ = random_histories(
            self.n_histories, (problem.n, problem.h), self.history_range, self.random_state)
        self.trajectories_ = self._run(self.histories_)
        self.converged_ = np.array(
            [t.final_residual <= self.converge_tol for t in self.trajectories_])
        finals = np.array([t.final_state for t in self.trajectories_])
        n = problem.n
        if self.converged_.any():
            mean = finals[self.converged_].mean(axis=0)
        else:
            mean = np.full(finals.shape[1], np.nan)
        self.x_, self.v_ = mean[:n], mean[n:]
        return self

    def transform(self, X):
        """Final network states for initial states ``X`` of shape (k, n+h)."""
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.network_.size:
            raise ValueError(f"X has {X.shape[1]} columns, network needs {self.network_.size}")
        trajs = self._run([HistoryFn.constant(row) for row in X])
        return np.array([t.final_state for t in trajs])

    def predict(self, X):
        """Primal part of :meth:`transform`."""
        return self.transform(X)[:, :self.problem_.n]

    def fit_transform(self, problem, y=None, **fit_params):
        self.fit(problem, y)
        return np.array([t.final_state for t in self.trajectories_])

    def score(self, problem=None, y=None):
        """Negative objective value at the fitted primal solution."""
        check_is_fitted(self, "x_")
        p = self.problem_ if problem is None else _as_problem(problem)
        return -p.objective(self.x_)
