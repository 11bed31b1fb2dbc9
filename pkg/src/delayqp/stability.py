"""Exponential-stability certificate and empirical decay rates.

The certificate is the sign of

    margin = (|kappa - 1| + 1) * ||I - alpha W||_2 - kappa,

negative meaning every trajectory converges exponentially to the unique
equilibrium.  Margin zero is treated as inconclusive.
"""

from dataclasses import dataclass

import numpy as np

from delayqp.exceptions import UndefinedDecayError
from delayqp.linalg import spectral_norm
from delayqp.network import NetworkParams

DEFAULT_GRID = np.logspace(-4, np.log10(2.0), 200)


@dataclass(frozen=True)
class StabilityReport:
    norm_I_minus_alphaW: float
    margin: float
    stable: bool
    alpha_used: float
    kappa_used: float

    @property
    def margin_alpha_subtrahend(self):
        """Same bound with ``alpha`` in place of ``kappa`` as the subtracted term."""
        return (abs(self.kappa_used - 1.0) + 1.0) * self.norm_I_minus_alphaW - self.alpha_used

    def to_dict(self):
        return {
            "norm": self.norm_I_minus_alphaW,
            "margin": self.margin,
            "stable": self.stable,
            "alpha": self.alpha_used,
            "kappa": self.kappa_used,
            "margin_alpha_subtrahend": self.margin_alpha_subtrahend,
        }


def margin_from_norm(norm, kappa):
    return (abs(kappa - 1.0) + 1.0) * norm - kappa


def stability_report(W, alpha, kappa):
    """Certificate for an explicit ``W``; ``alpha = 0`` is allowed here."""
    norm = spectral_norm(np.eye(W.shape[0]) - alpha * W)
    margin = margin_from_norm(norm, kappa)
    return StabilityReport(float(norm), float(margin), bool(margin < 0.0), float(alpha), float(kappa))


def stability_margin(net):
    return stability_report(net.W, net.params.alpha, net.params.kappa)


def search_alpha(net, kappa=None, grid=None):
    """Grid point ``alpha`` with the smallest margin, or None if none is negative.

    ``W`` does not depend on ``alpha``, so the network is built once and
    only ``I - alpha W`` is re-evaluated.  Returns ``(alpha, report)``.
    """
    kappa = net.params.kappa if kappa is None else float(kappa)
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0):
        raise ValueError("alpha grid must be nonempty and positive")
    best = None
    for alpha in grid:
        rep = stability_report(net.W, float(alpha), kappa)
        if best is None or rep.margin < best.margin:
            best = rep
    if not best.stable:
        return None
    return best.alpha_used, best


def with_alpha(net, alpha, kappa=None):
    kappa = net.params.kappa if kappa is None else kappa
    return net.with_params(NetworkParams(alpha=alpha, gamma=net.params.gamma, kappa=kappa))


def fit_decay_rate(traj, y_star, window=(1e-10, 1e-1), min_samples=10):
    """Least-squares slope of ``log ||y(t) - y*||`` against ``t``.

    Only samples whose error lies within ``window`` times the initial error
    enter the fit.  A negative slope means exponential convergence.

    Raises
    ------
    UndefinedDecayError
        The trajectory sits at ``y*`` (no usable samples).
    """
    y_star = np.asarray(y_star, dtype=float)
    err = np.linalg.norm(traj.states - y_star, axis=1)
    if np.count_nonzero(err > 1e-12) < min_samples:
        raise UndefinedDecayError("trajectory is already at equilibrium")
    e0 = err[0] if err[0] > 1e-12 else err.max()
    mask = (err >= window[0] * e0) & (err <= window[1] * e0) & (err > 1e-12)
    if np.count_nonzero(mask) < min_samples:
        raise UndefinedDecayError(
            f"only {np.count_nonzero(mask)} samples inside the fitting window")
    slope, _ = np.polyfit(traj.times[mask], np.log(err[mask]), 1)
    return float(slope)
