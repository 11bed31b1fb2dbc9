"""Ground-truth QP solutions by exhaustive active-set enumeration.

For each subset ``S`` of inequality rows the equality-constrained KKT system

    [ Q   A'  B_S' ] [  x ]   [ -c  ]
    [ A   0   0    ] [ -u ] = [  b  ]
    [ B_S 0   0    ] [ v_S]   [ d_S ]

is solved; a candidate is accepted when the remaining rows are satisfied and
``v_S >= 0``.  With ``2^h`` subsets this is only meant for small ``h``, and
its simplicity is the point: it is the reference the network is judged by.
"""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from delayqp.exceptions import InfeasibleError, ProblemValidationError
from delayqp.linalg import eigenvalues_symmetric
from delayqp.network import build_projectors

logger = logging.getLogger(__name__)

PD_TOL = 1e-10
MULTIPLIER_TOL = 1e-10
SLACK_TOL = 1e-9
TIE_TOL = 1e-10
MAX_INEQUALITIES = 20


@dataclass
class KktSolution:
    x_star: np.ndarray
    u_star: np.ndarray
    v_star: np.ndarray
    active_set: tuple
    objective: float
    skipped: list = field(default_factory=list)

    @property
    def y_star(self):
        """Network state ``(x*, v*)``."""
        return np.concatenate([self.x_star, self.v_star])

    def to_dict(self):
        return {
            "x": self.x_star.tolist(),
            "u": self.u_star.tolist(),
            "v": self.v_star.tolist(),
            "active_set": list(self.active_set),
            "objective": self.objective,
        }


def _subsets(h):
    # by size, then lexicographically: ties resolve to the smallest active set
    for r in range(h + 1):
        yield from itertools.combinations(range(h), r)


def solve(p):
    """Exact minimizer of a strictly convex QP with its multipliers.

    Raises
    ------
    ProblemValidationError
        ``Q`` is not positive definite.
    InfeasibleError
        No subset produced an admissible KKT point.
    """
    lam_min = eigenvalues_symmetric(p.Q)[0]
    if lam_min < PD_TOL:
        raise ProblemValidationError(
            f"oracle needs positive definite Q; smallest eigenvalue {lam_min:.3g}", field="Q")
    if p.h > MAX_INEQUALITIES:
        raise ProblemValidationError(f"too many inequalities for enumeration ({p.h})", field="B")

    n, m, h = p.n, p.m, p.h
    best = None
    skipped = []
    for S in _subsets(h):
        S = list(S)
        k = len(S)
        BS = p.B[S]
        K = np.zeros((n + m + k, n + m + k))
        K[:n, :n] = p.Q
        K[:n, n:n + m] = p.A.T
        K[n:n + m, :n] = p.A
        K[:n, n + m:] = BS.T
        K[n + m:, :n] = BS
        rhs = np.concatenate([-p.c, p.b, p.d[S]])
        try:
            sol = np.linalg.solve(K, rhs)
        except np.linalg.LinAlgError:
            skipped.append(tuple(S))
            logger.debug("singular KKT system for active set %s", S)
            continue
        if np.linalg.norm(K @ sol - rhs) > 1e-8 * (1.0 + np.linalg.norm(rhs)):
            skipped.append(tuple(S))
            continue
        x = sol[:n]
        u = -sol[n:n + m]
        vS = sol[n + m:]
        if np.any(vS < -MULTIPLIER_TOL):
            continue
        inactive = np.setdiff1d(np.arange(h), S)
        if np.any(p.B[inactive] @ x > p.d[inactive] + SLACK_TOL):
            continue
        f = p.objective(x)
        if best is None or f < best[0] - TIE_TOL:
            v = np.zeros(h)
            v[S] = np.maximum(vS, 0.0)
            best = (f, x, u, v, tuple(S))
    if best is None:
        raise InfeasibleError("no active set yields a feasible KKT point (infeasible or unbounded)")
    f, x, u, v, S = best
    return KktSolution(x, u, v, S, f, skipped)


@dataclass
class KktResiduals:
    stationarity: float
    primal_eq: float
    primal_ineq: float
    comp_slack: float
    dual_feas: float
    projected_stationarity: float

    def max(self):
        return max(self.stationarity, self.primal_eq, self.primal_ineq,
                   self.comp_slack, self.dual_feas, self.projected_stationarity)

    def to_dict(self):
        return dict(vars(self))


def kkt_residuals(p, sol):
    """KKT violation norms for ``(x, u, v)``.

    ``projected_stationarity`` is ``||(I-M)(Qx+c+B'v) + N(Ax-b)||``, the
    form the network's fixed point encodes.
    """
    x = np.asarray(sol.x_star, dtype=float)
    u = np.asarray(sol.u_star, dtype=float)
    v = np.asarray(sol.v_star, dtype=float)
    if x.shape != (p.n,) or u.shape != (p.m,) or v.shape != (p.h,):
        raise ValueError("solution dimensions do not match the problem")
    grad = p.Q @ x + p.c
    slack = p.d - p.B @ x
    M, N = build_projectors(p)
    return KktResiduals(
        stationarity=float(np.linalg.norm(grad - p.A.T @ u + p.B.T @ v)),
        primal_eq=float(np.linalg.norm(p.A @ x - p.b)),
        primal_ineq=float(np.max(np.maximum(-slack, 0.0), initial=0.0)),
        comp_slack=float(np.max(np.abs(v * slack), initial=0.0)),
        dual_feas=float(np.max(np.maximum(-v, 0.0), initial=0.0)),
        projected_stationarity=float(np.linalg.norm(
            (np.eye(p.n) - M) @ (grad + p.B.T @ v) + N @ (p.A @ x - p.b))),
    )
