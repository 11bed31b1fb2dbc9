"""Convex QP data: ``min 1/2 x'Qx + c'x  s.t.  Ax = b, Bx <= d``."""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from delayqp._validation import check_matrix, check_vector, freeze
from delayqp.exceptions import (
    ProblemFormatError,
    ProblemValidationError,
    RankDeficientError,
)
from delayqp.linalg import eigenvalues_symmetric, matrix_rank

PSD_TOL = -1e-8
SYMMETRY_TOL = 1e-10

_KEYS = ("Q", "c", "A", "b", "B", "d")


@dataclass(frozen=True, eq=False)
class QpProblem:
    """Immutable container for the QP data.

    Construction checks shapes and finiteness only; convexity and rank are
    the business of :func:`validate` so that reports can be produced for
    bad inputs too.
    """

    Q: np.ndarray
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    B: np.ndarray
    d: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        try:
            Q = check_matrix(self.Q, "Q")
            c = check_vector(self.c, "c")
            A = check_matrix(self.A, "A")
            b = check_vector(self.b, "b")
            B = check_matrix(self.B, "B")
            d = check_vector(self.d, "d")
        except ValueError as exc:
            raise ProblemValidationError(str(exc)) from exc
        n = c.size
        checks = [
            ("Q", Q.shape == (n, n), f"expected ({n}, {n}), got {Q.shape}"),
            ("A", A.shape[1] == n, f"expected {n} columns, got {A.shape[1]}"),
            ("b", b.size == A.shape[0], f"expected length {A.shape[0]}, got {b.size}"),
            ("B", B.shape[1] == n, f"expected {n} columns, got {B.shape[1]}"),
            ("d", d.size == B.shape[0], f"expected length {B.shape[0]}, got {d.size}"),
            ("A", A.shape[0] <= n, f"more equality rows ({A.shape[0]}) than unknowns ({n})"),
        ]
        for name, ok, msg in checks:
            if not ok:
                raise ProblemValidationError(f"dimension mismatch in {name}: {msg}", field=name)
        for name, arr in zip(_KEYS, (Q, c, A, b, B, d)):
            object.__setattr__(self, name, freeze(arr))

    @property
    def n(self):
        return self.c.size

    @property
    def m(self):
        return self.b.size

    @property
    def h(self):
        return self.d.size

    def objective(self, x):
        x = np.asarray(x, dtype=np.float64)
        return float(0.5 * x @ self.Q @ x + self.c @ x)

    def to_dict(self):
        out = {
            "Q": self.Q.tolist(),
            "c": self.c.tolist(),
            "A": self.A.tolist(),
            "b": self.b.tolist(),
            "B": self.B.tolist(),
            "d": self.d.tolist(),
        }
        if self.meta:
            out["meta"] = self.meta
        return out


@dataclass
class Check:
    name: str
    passed: bool
    value: object

    def to_dict(self):
        return {"name": self.name, "pass": bool(self.passed), "value": self.value}


@dataclass
class ValidationReport:
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_list(self):
        return [c.to_dict() for c in self.checks]


def validate(p):
    """Report symmetry, semidefiniteness, rank and equality consistency of ``p``.

    Never raises on mathematically bad data; every check carries the
    measured quantity.
    """
    asym = float(np.linalg.norm(p.Q - p.Q.T))
    sym_Q = 0.5 * (p.Q + p.Q.T)
    lam_min = float(eigenvalues_symmetric(sym_Q)[0])
    rank = matrix_rank(p.A)

    if rank == p.m:
        # least-norm solution of Ax = b
        x_ln = np.linalg.lstsq(p.A, p.b, rcond=None)[0]
        eq_defect = float(np.linalg.norm(p.A @ x_ln - p.b))
    else:
        eq_defect = float("nan")
    tol = 1e-8 * max(1.0, float(np.linalg.norm(p.b)))
    return ValidationReport([
        Check("symmetry", asym <= SYMMETRY_TOL, asym),
        Check("psd", lam_min >= PSD_TOL, lam_min),
        Check("rank_A", rank == p.m, rank),
        Check("equality_consistent", eq_defect <= tol, None if math.isnan(eq_defect) else eq_defect),
    ])


def _reject_constant(token):
    raise ValueError(f"non-finite literal {token!r}")


def read_json(path):
    """Load JSON, rejecting NaN/Infinity literals; errors become ProblemFormatError."""
    try:
        with open(path) as fh:
            return json.load(fh, parse_constant=_reject_constant)
    except FileNotFoundError as exc:
        raise ProblemFormatError(f"{path}: file not found") from exc
    except OSError as exc:
        raise ProblemFormatError(f"{path}: {exc}") from exc
    except (json.JSONDecodeError, ValueError) as exc:
        raise ProblemFormatError(f"{path}: {exc}") from exc


def _numeric(value, name, depth):
    """Check ``value`` is a ``depth``-nested list of JSON numbers."""
    def bad():
        kind = "matrix (list of rows)" if depth == 2 else "vector"
        return ProblemFormatError(f"field {name!r}: expected a numeric {kind}")

    if not isinstance(value, list) or not value:
        raise bad()
    items = value
    if depth == 2:
        if not all(isinstance(row, list) and row for row in items):
            raise bad()
        if len({len(row) for row in items}) != 1:
            raise ProblemFormatError(f"field {name!r}: ragged rows")
        items = [v for row in items for v in row]
    for v in items:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise bad()
    return value


def problem_from_dict(data, source="<dict>"):
    if not isinstance(data, dict):
        raise ProblemFormatError(f"{source}: top level must be a JSON object")
    missing = [k for k in _KEYS if k not in data]
    if missing:
        raise ProblemFormatError(f"{source}: missing key(s) {', '.join(missing)}")
    raw = {}
    for k in _KEYS:
        raw[k] = _numeric(data[k], k, 2 if k in ("Q", "A", "B") else 1)
    return QpProblem(meta=dict(data.get("meta", {})), **raw)


def load_problem(path, strict=True):
    """Read a problem file, symmetrize ``Q`` and validate it.

    With ``strict`` (the default) a failing validation check raises
    :class:`~delayqp.exceptions.ProblemValidationError` naming the field.
    """
    data = read_json(path)
    p = problem_from_dict(data, source=str(path))
    Q = p.Q
    p = QpProblem(Q=(Q + Q.T) / 2, c=p.c, A=p.A, b=p.b, B=p.B, d=p.d, meta=p.meta)
    if strict:
        report = validate(p)
        if not report["rank_A"].passed:
            raise RankDeficientError(
                f"rank-deficient A: rank {report['rank_A'].value} < {p.m} rows", field="A")
        if not report["psd"].passed:
            raise ProblemValidationError(
                f"indefinite Q: smallest eigenvalue {report['psd'].value:.6g}", field="Q")
    return p


def save_problem(p, path):
    Path(path).write_text(json.dumps(p.to_dict(), indent=2) + "\n")
