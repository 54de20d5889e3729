import numpy as np
import pytest

from oscbound.coefficients import (CoefficientField, checkerboard_field, constant_field,
                                   identity_field, make_field, matrix_sqrt,
                                   random_cell_field, verify_ellipticity)
from oscbound.errors import FieldError


def test_identity_field():
    f = identity_field()
    assert f.lambda_min == f.lambda_max == 1.0
    A = f.at(np.array([[0.3, -2.0], [5.0, 5.0]]))
    assert np.array_equal(A[0], np.eye(2))
    assert np.array_equal(A[1], np.eye(2))


def test_constant_field_eigen_bounds():
    f = constant_field(np.diag([4.0, 1.0]))
    assert f.lambda_min == 1.0
    assert f.lambda_max == 4.0


def test_checkerboard_parity_rule():
    f = checkerboard_field(0.1, np.eye(2), 5.0 * np.eye(2))
    assert f.lambda_min == 1.0 and f.lambda_max == 5.0
    # (0.05, 0.05) is cell (0, 0): even parity
    A = f.at(np.array([[0.05, 0.05], [0.15, 0.05], [0.15, 0.15]]))
    assert np.array_equal(A[0], np.eye(2))
    assert np.array_equal(A[1], 5.0 * np.eye(2))
    assert np.array_equal(A[2], np.eye(2))


def test_nonpositive_eigenvalue_rejected():
    with pytest.raises(FieldError):
        constant_field(np.diag([0.0, 1.0]))
    with pytest.raises(FieldError):
        random_cell_field(0.2, -1.0, 2.0, seed=0)
    with pytest.raises(FieldError):
        checkerboard_field(0.0, np.eye(2), np.eye(2))


def test_random_field_reproducible_bitwise():
    pts = np.random.default_rng(3).uniform(-1, 1, size=(50, 2))
    a = make_field("random", cell=0.2, eig_lo=1.0, eig_hi=10.0, seed=42).at(pts)
    b = make_field("random", cell=0.2, eig_lo=1.0, eig_hi=10.0, seed=42).at(pts)
    c = make_field("random", cell=0.2, eig_lo=1.0, eig_hi=10.0, seed=43).at(pts)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_random_field_eigen_range_oracle():
    f = random_cell_field(0.25, 1.0, 10.0, seed=7)
    pts = np.random.default_rng(0).uniform(-2, 2, size=(200, 2))
    A = f.at(pts)
    assert np.allclose(A, np.transpose(A, (0, 2, 1)))
    w = np.linalg.eigvalsh(A)
    assert w.min() >= 1.0 - 1e-12
    assert w.max() <= 10.0 + 1e-11


def test_verify_ellipticity_pass_and_fail():
    ok = verify_ellipticity(identity_field(), 500, seed=1)
    assert ok.passed
    assert ok.min_quotient == pytest.approx(1.0, abs=1e-14)
    assert ok.max_quotient == pytest.approx(1.0, abs=1e-14)
    # declared lambda too large: eigenvector probes drop below it
    base = constant_field(np.diag([4.0, 1.0]))
    wrong = CoefficientField("constant", 2.0, 4.0, base.evaluator, spec=base.spec)
    rep = verify_ellipticity(wrong, 2000, seed=1)
    assert not rep.passed
    assert rep.min_quotient < 2.0
    assert rep.min_quotient >= 1.0 - 1e-12


def test_verify_ellipticity_random_within_range():
    f = random_cell_field(0.3, 1.0, 10.0, seed=11)
    rep = verify_ellipticity(f, 3000, seed=5, box=(-1, -1, 1, 1))
    assert rep.passed
    assert 1.0 - 1e-9 <= rep.min_quotient and rep.max_quotient <= 10.0 + 1e-9


def test_matrix_sqrt():
    assert np.allclose(matrix_sqrt(np.eye(2)), np.eye(2), atol=1e-15)
    assert np.allclose(matrix_sqrt(np.diag([4.0, 1.0])), np.diag([2.0, 1.0]), atol=1e-14)
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    S = matrix_sqrt(A)
    assert np.allclose(S, S.T, atol=1e-15)
    assert np.abs(S @ S - A).max() <= 1e-12
    with pytest.raises(FieldError):
        matrix_sqrt(np.array([[1.0, 3.0], [3.0, 1.0]]))  # indefinite


def test_make_field_unknown_kind():
    with pytest.raises(FieldError):
        make_field("mystery")
