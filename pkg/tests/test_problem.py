import json

import numpy as np
import pytest
import sympy

from delayqp.exceptions import (
    ProblemFormatError,
    ProblemValidationError,
    RankDeficientError,
)
from delayqp.linalg import eigenvalues_symmetric, matrix_rank
from delayqp.problem import QpProblem, load_problem, save_problem, validate
from helpers import make_random_problem


def write(tmp_path, data, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return path


SMALL = {"Q": [[1, 0], [0, 1]], "c": [0, 0], "A": [[1, 1]], "b": [2], "B": [[1, 0]], "d": [10]}


class TestLoad:
    def test_example1(self, ex1):
        assert (ex1.n, ex1.m, ex1.h) == (3, 1, 2)
        np.testing.assert_array_equal(ex1.Q, np.diag([0.72, 0.6, 0.4]))
        np.testing.assert_array_equal(ex1.B[1], [0.25, 0.4, 0.6])

    def test_example2(self, ex2):
        assert (ex2.n, ex2.m, ex2.h) == (4, 1, 2)
        assert ex2.Q[0, 1] == 0.35
        assert ex2.Q[1, 3] == pytest.approx(1 / 9)

    def test_prose_variant_differs_in_one_entry(self, ex1, ex1_prose):
        assert ex1_prose.B[1, 2] == -0.6
        np.testing.assert_array_equal(ex1.B[0], ex1_prose.B[0])

    def test_symmetrizes_q(self, tmp_path):
        data = dict(SMALL, Q=[[1, 0.4], [0, 1]])
        p = load_problem(write(tmp_path, data))
        np.testing.assert_array_equal(p.Q, [[1, 0.2], [0.2, 1]])

    def test_zero_row_a_is_rank_deficient(self, tmp_path):
        with pytest.raises(RankDeficientError, match="rank-deficient A") as info:
            load_problem(write(tmp_path, dict(SMALL, A=[[0, 0]])))
        assert info.value.field == "A"

    def test_indefinite_q(self, tmp_path):
        with pytest.raises(ProblemValidationError, match="indefinite Q"):
            load_problem(write(tmp_path, dict(SMALL, Q=[[1, 0], [0, -1]])))

    @pytest.mark.parametrize("data, match", [
        ("{not json", "Expecting"),
        ('{"Q": [[NaN]]}', "non-finite"),
        ({k: v for k, v in SMALL.items() if k != "d"}, "missing key"),
        (dict(SMALL, c=["a", 0]), "'c'"),
        (dict(SMALL, Q=[[1, 0], [0]]), "ragged"),
        ([1, 2], "JSON object"),
    ])
    def test_parse_errors(self, tmp_path, data, match):
        with pytest.raises(ProblemFormatError, match=match):
            load_problem(write(tmp_path, data))

    def test_dimension_mismatch_names_field(self, tmp_path):
        with pytest.raises(ProblemValidationError, match="dimension mismatch in d"):
            load_problem(write(tmp_path, dict(SMALL, d=[1, 2])))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ProblemFormatError, match="not found"):
            load_problem(tmp_path / "nope.json")

    def test_round_trip_bit_identical(self, tmp_path, ex2, rng):
        for p in [ex2] + [make_random_problem(rng) for _ in range(5)]:
            path = tmp_path / "rt.json"
            save_problem(p, path)
            q = load_problem(path)
            for k in "QcAbBd":
                a, b = getattr(p, k), getattr(q, k)
                assert a.tobytes() == b.tobytes(), k

    def test_problem_is_read_only(self, ex1):
        with pytest.raises(ValueError):
            ex1.Q[0, 0] = 5.0


class TestValidate:
    def test_example1_passes(self, ex1):
        report = validate(ex1)
        assert report.passed
        assert report["psd"].value == pytest.approx(0.4, abs=1e-12)
        assert report["rank_A"].value == 1

    def test_example2_min_eigenvalue(self, ex2):
        report = validate(ex2)
        assert report.passed
        assert report["psd"].value == pytest.approx(0.3012, abs=1e-4)

    def test_indefinite_reported_not_raised(self):
        p = QpProblem([[1, 0], [0, -1]], [0, 0], [[1, 1]], [1], [[1, 0]], [1])
        report = validate(p)
        assert not report["psd"].passed
        assert report["psd"].value == pytest.approx(-1.0)
        assert report.failures()[0].name == "psd"

    def test_serializes(self, ex1):
        items = validate(ex1).to_list()
        assert {"name", "pass", "value"} == set(items[0])
        json.dumps(items)

    def test_prose_variant_passes(self, ex1_prose):
        assert validate(ex1_prose).passed


class TestEigenvalues:
    def test_diagonal(self):
        np.testing.assert_allclose(eigenvalues_symmetric(np.diag([0.72, 0.6, 0.4])),
                                   [0.4, 0.6, 0.72], rtol=1e-12)

    def test_identity(self):
        np.testing.assert_array_equal(eigenvalues_symmetric(np.eye(3)), [1, 1, 1])

    def test_example2_against_characteristic_polynomial(self, ex2):
        # independent route: roots of det(Q - t I) with Q in exact rationals
        Qs = sympy.Matrix([[sympy.nsimplify(v) for v in row] for row in ex2.Q.tolist()])
        t = sympy.Symbol("t")
        roots = sorted(float(r) for r in sympy.Poly((Qs - t * sympy.eye(4)).det(), t).nroots(n=30))
        got = eigenvalues_symmetric(ex2.Q)
        np.testing.assert_allclose(got, roots, rtol=1e-9)
        np.testing.assert_allclose(got, [0.3012, 0.9396, 1.8547, 4.0045], atol=1e-3)

    def test_rejects_nonsymmetric(self):
        with pytest.raises(ValueError, match="not symmetric"):
            eigenvalues_symmetric([[1, 2], [0, 1]])

    def test_random_psd_trace_and_sign(self, rng):
        for _ in range(100):
            k = int(rng.integers(1, 8))
            R = rng.normal(size=(k, k))
            S = R.T @ R
            lam = eigenvalues_symmetric(S)
            assert np.all(lam >= -1e-12)
            assert lam.sum() == pytest.approx(np.trace(S), abs=1e-8)
            np.testing.assert_allclose(lam, np.linalg.eigvalsh(S), rtol=1e-9, atol=1e-12)


class TestRank:
    @pytest.mark.parametrize("A, r", [
        ([[1, -1, 1]], 1),
        ([[0, 0, 0]], 0),
        ([[1, 2], [2, 4]], 1),
        ([[1, 0, 0], [0, 1, 0]], 2),
        ([[1, 1], [1, 1 + 1e-13]], 1),
    ])
    def test_small(self, A, r):
        assert matrix_rank(A) == r

    def test_matches_lapack(self, rng):
        for _ in range(50):
            m, n, r = 4, 6, int(rng.integers(1, 5))
            A = rng.normal(size=(m, r)) @ rng.normal(size=(r, n))
            assert matrix_rank(A) == np.linalg.matrix_rank(A) == r
