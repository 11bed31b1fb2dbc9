import numpy as np

from delayqp.problem import QpProblem


def make_random_problem(rng, n=None, m=None, h=None, n_min=2, n_max=4, h_max=3):
    """Strictly convex QP with a strictly feasible interior point.

    ``n >= h`` always holds so the first-h-rows selector is usable.
    """
    n = int(rng.integers(n_min, n_max + 1)) if n is None else n
    h = int(rng.integers(1, min(n, h_max) + 1)) if h is None else h
    m = int(rng.integers(1, n)) if m is None else m
    R = rng.normal(size=(n, n))
    Q = R.T @ R + 0.1 * np.eye(n)
    A = rng.normal(size=(m, n))
    x0 = rng.normal(size=n)
    B = rng.normal(size=(h, n))
    return QpProblem(
        Q=Q, c=rng.normal(size=n) * 2, A=A, b=A @ x0, B=B,
        d=B @ x0 + rng.uniform(0.0, 1.0, size=h),
    )
