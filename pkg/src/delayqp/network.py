"""Projection network for the QP: projectors, block operator, box projection.

The network state is ``y = (x, v)`` with ``x`` the primal variables and
``v >= 0`` the inequality multipliers.  Equilibria are the solutions of

    y = P_U(y - alpha * (W y + p))

and the delayed dynamics is

    y' = -kappa y + (kappa - 1) g(y(t - tau(t))) + g(y(t)),
    g(y) = P_U(y - alpha * (W y + p)).
"""

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from delayqp._validation import freeze
from delayqp.exceptions import ConfigError, ProblemFormatError, RankDeficientError

COND_LIMIT = 1e12


class HSelector(str, enum.Enum):
    """How the ``n``-row coupling expression is reduced to ``h`` rows.

    ``ZERO`` drops the coupling (same as ``gamma = 0``); ``FIRST_H_ROWS``
    keeps the first ``h`` rows and needs ``n >= h``.
    """

    ZERO = "zero"
    FIRST_H_ROWS = "first_h_rows"


@dataclass(frozen=True)
class NetworkParams:
    alpha: float
    gamma: float = 0.0
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "gamma", "kappa"):
            v = getattr(self, name)
            if isinstance(v, bool) or not np.isfinite(float(v)):
                raise ConfigError(f"{name} must be a finite number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.kappa <= 0:
            raise ConfigError(f"kappa must be positive, got {self.kappa}")

    def to_dict(self):
        return {"alpha": self.alpha, "gamma": self.gamma, "kappa": self.kappa}


@dataclass(frozen=True, eq=False)
class BoxSet:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = freeze(np.array(self.lower, dtype=np.float64))
        hi = freeze(np.array(self.upper, dtype=np.float64))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lower and upper must be 1-D of equal length")
        if np.any(lo > hi):
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def for_dims(cls, n, h):
        """``x`` free, ``v`` in the nonnegative orthant."""
        lower = np.concatenate([np.full(n, -np.inf), np.zeros(h)])
        return cls(lower, np.full(n + h, np.inf))

    def project(self, s):
        return np.minimum(self.upper, np.maximum(self.lower, s))


def project_box(s, box):
    """Euclidean projection onto the box, i.e. componentwise clamping."""
    return box.project(np.asarray(s, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class ProjectionNetwork:
    M: np.ndarray
    N: np.ndarray
    W: np.ndarray
    p: np.ndarray
    box: BoxSet
    params: NetworkParams
    dims: tuple
    selector: HSelector = HSelector.ZERO

    def __post_init__(self):
        for name in ("M", "N", "W", "p"):
            object.__setattr__(self, name, freeze(np.array(getattr(self, name), dtype=np.float64)))
        n, m, h = (int(v) for v in self.dims)
        object.__setattr__(self, "dims", (n, m, h))
        object.__setattr__(self, "selector", HSelector(self.selector))
        k = n + h
        if self.W.shape != (k, k) or self.p.shape != (k,):
            raise ValueError(f"W/p shapes {self.W.shape}/{self.p.shape} do not match n+h={k}")
        if self.M.shape != (n, n) or self.N.shape != (n, m):
            raise ValueError("M/N shapes do not match dims")
        # cached for the integrator hot loop
        object.__setattr__(self, "_lower", self.box.lower)
        object.__setattr__(self, "_upper", self.box.upper if np.any(np.isfinite(self.box.upper)) else None)
        object.__setattr__(self, "_aW", self.params.alpha * self.W)
        object.__setattr__(self, "_ap", self.params.alpha * self.p)

    @property
    def size(self):
        return self.dims[0] + self.dims[2]

    def with_params(self, params):
        """Same ``W`` and ``p`` under new ``alpha``/``kappa``.

        ``gamma`` is baked into ``W``, so it must be unchanged.
        """
        if params.gamma != self.params.gamma:
            raise ConfigError("gamma changes W; rebuild the network instead")
        return ProjectionNetwork(self.M, self.N, self.W, self.p, self.box, params,
                                 self.dims, self.selector)

    def projection_map(self, y):
        """``P_U(y - alpha (W y + p))``."""
        out = np.maximum(self._lower, y - self._aW @ y - self._ap)
        if self._upper is not None:
            np.minimum(self._upper, out, out=out)
        return out

    def field(self, y_now, y_delayed):
        kappa = self.params.kappa
        out = self.projection_map(y_now) - kappa * y_now
        if kappa != 1.0:
            out += (kappa - 1.0) * self.projection_map(y_delayed)
        return out

    def to_dict(self):
        n, m, h = self.dims

        def enc(v):
            return v if np.isfinite(v) else ("inf" if v > 0 else "-inf")

        return {
            "dims": {"n": n, "m": m, "h": h},
            "params": self.params.to_dict(),
            "selector": self.selector.value,
            "M": self.M.tolist(),
            "N": self.N.tolist(),
            "W": self.W.tolist(),
            "p": self.p.tolist(),
            "box": {
                "lower": [enc(v) for v in self.box.lower],
                "upper": [enc(v) for v in self.box.upper],
            },
        }

    @classmethod
    def from_dict(cls, data):
        try:
            dims = data["dims"]
            n, m, h = int(dims["n"]), int(dims["m"]), int(dims["h"])
            params = NetworkParams(**data["params"])
            return cls(
                M=np.array(data["M"], dtype=float).reshape(n, n),
                N=np.array(data["N"], dtype=float).reshape(n, m),
                W=np.array(data["W"], dtype=float),
                p=np.array(data["p"], dtype=float),
                box=BoxSet.for_dims(n, h),
                params=params,
                dims=(n, m, h),
                selector=data.get("selector", "zero"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ProblemFormatError(f"bad network description: {exc}") from exc


def build_projectors(p):
    """``N = A'(AA')^{-1}`` and ``M = N A`` via a Cholesky solve.

    ``M`` is the orthogonal projector onto the row space of ``A``.
    """
    A = p.A
    G = A @ A.T
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise RankDeficientError(f"rank-deficient A: cond(AA') = {cond:.3g}", field="A")
    N = cho_solve(cho_factor(G), A).T
    M = N @ A
    return M, N


def _select(selector, X, h):
    if selector is HSelector.FIRST_H_ROWS:
        return X[:h]
    return np.zeros((h,) + X.shape[1:])


def build_network(p, params, selector=HSelector.ZERO):
    """Assemble ``W`` and ``p`` for problem ``p``.

    ``W = [[T, R], [gamma*S(T) - B, gamma*S(R)]]`` and
    ``p = [q; d + gamma*S(q)]`` with ``T = (I-M)Q + M``, ``R = (I-M)B'``,
    ``q = (I-M)c - N b`` and ``S`` the row selector.
    """
    selector = HSelector(selector)
    n, m, h = p.n, p.m, p.h
    if selector is HSelector.FIRST_H_ROWS and n < h:
        raise ConfigError(f"selector 'first_h_rows' needs n >= h (n={n}, h={h})")
    M, N = build_projectors(p)
    P_null = np.eye(n) - M
    T = P_null @ p.Q + M
    R = P_null @ p.B.T
    q = P_null @ p.c - N @ p.b
    g = params.gamma
    W = np.block([
        [T, R],
        [g * _select(selector, T, h) - p.B, g * _select(selector, R, h)],
    ])
    pv = np.concatenate([q, p.d + g * _select(selector, q, h)])
    return ProjectionNetwork(M, N, W, pv, BoxSet.for_dims(n, h), params, (n, m, h), selector)


def fixed_point_residual(y, net):
    """``||y - P_U(y - alpha (W y + p))||``; zero exactly at equilibria."""
    y = np.asarray(y, dtype=np.float64)
    return float(np.linalg.norm(y - net.projection_map(y)))


def rhs(t, y_now, y_delayed, net):
    """Right-hand side of the delayed network dynamics (autonomous in ``t``)."""
    return net.field(np.asarray(y_now, dtype=np.float64),
                     np.asarray(y_delayed, dtype=np.float64))


def load_network(path):
    from delayqp.problem import read_json

    return ProjectionNetwork.from_dict(read_json(path))
