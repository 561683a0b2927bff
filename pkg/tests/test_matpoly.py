import math

import numpy as np
import pytest
import sympy

from matsolve.errors import CapExceeded, DimensionMismatch, NotGeneric
from matsolve.exactalg import RatMatrix, RatUniPoly
from matsolve.instances import random_instance
from matsolve.matpoly import (
    MatPolynomial,
    det_lambda,
    iter_solvents,
    solve_unilateral,
    specialization,
    verify_solvent,
)
from matsolve.numlin import CUniPoly, dedup_matrices, max_norm


def unilateral(n, k, seed):
    return MatPolynomial(random_instance("unilateral", n, k, seed=seed).coefficient_list())


@pytest.mark.parametrize("n,k", [(2, 2), (2, 3), (3, 2)])
def test_specialization_polynomial(n, k):
    phi = det_lambda(specialization(n, k))
    expected = [-1, -1] + [0] * (n * k - 2) + [1]
    assert phi == RatUniPoly(expected)


def test_characteristic_polynomial_as_det_lambda():
    mp = MatPolynomial([RatMatrix.diag([-1, -2]), RatMatrix.identity(2)])
    assert det_lambda(mp) == RatUniPoly([2, -3, 1])


@pytest.mark.parametrize("seed", range(4))
def test_det_lambda_matches_symbolic_determinant(seed):
    mp = unilateral(3, 2, seed)
    lam = sympy.Symbol("lam")
    mats = [sympy.Matrix(a.rows, a.cols, [sympy.Rational(v.numerator, v.denominator) for v in a.entries]) for a in mp.coeffs]
    sym = sympy.Poly(sum((lam**i * m for i, m in enumerate(mats)), sympy.zeros(3, 3)).det(), lam)
    phi = det_lambda(mp)
    ours = [sympy.Rational(c.numerator, c.denominator) for c in phi.coeffs]
    assert ours == list(reversed(sym.all_coeffs()))
    assert phi.coeffs[0] == mp.coeffs[0].det()
    assert phi.coeffs[-1] == mp.coeffs[-1].det()


def test_det_lambda_complex_path_matches_exact():
    mp = unilateral(2, 2, 1)
    exact = det_lambda(mp)
    numeric = det_lambda(MatPolynomial(mp.numeric()))
    assert isinstance(numeric, CUniPoly)
    assert np.allclose(numeric.coeffs, [float(c) for c in exact.coeffs], atol=1e-9)


@pytest.mark.parametrize("n,k", [(2, 2), (2, 3), (3, 2)])
@pytest.mark.parametrize("seed", range(3))
def test_counts_residuals_and_spectra(n, k, seed):
    mp = unilateral(n, k, seed)
    sols = solve_unilateral(mp)
    mats = sols.matrices()
    assert len(mats) == math.comb(n * k, n) == sols.count_expected
    assert sols.all_simple and len(dedup_matrices(mats)) == len(mats)
    roots = sols.notes["roots"]
    union = []
    for s in sols:
        assert s.residual <= 1e-8
        for lam in np.linalg.eigvals(s.x):
            assert np.min(np.abs(roots - lam)) <= 1e-7 * max(1.0, abs(lam))
            union.append(lam)
    # every root of phi appears in some solvent spectrum
    for r in roots:
        assert np.min(np.abs(np.array(union) - r)) <= 1e-7 * max(1.0, abs(r))


def test_verify_solvent_on_solutions_and_controls():
    mp = unilateral(2, 2, 7)
    for x in solve_unilateral(mp).matrices():
        res, phi_res = verify_solvent(mp, x)
        assert res <= 1e-8 and phi_res <= 1e-7
    res, _ = verify_solvent(mp, np.zeros((2, 2)))
    assert res == pytest.approx(max_norm(mp.coeffs[0].to_numpy()))
    res, _ = verify_solvent(mp, np.array([[3.0, -1.0], [0.5, 2.0]]))
    assert res > 1e-3
    with pytest.raises(DimensionMismatch):
        verify_solvent(mp, np.eye(3))


def test_linear_case_returns_the_matrix():
    a = RatMatrix.from_rows([[1, 2], [0, 3]])
    mp = MatPolynomial([a.scale(-1), RatMatrix.identity(2)])
    sols = solve_unilateral(mp)
    assert len(sols) == 1
    assert np.allclose(sols.matrices()[0], a.to_numpy(), atol=1e-10)


def test_normalized_solver_agrees():
    mp = unilateral(2, 2, 2)
    from matsolve.numlin import match_solution_sets

    assert match_solution_sets(solve_unilateral(mp).matrices(), solve_unilateral(mp, normalize=True).matrices())


def test_not_generic_checks_are_named():
    z, i = RatMatrix.zeros(2), RatMatrix.identity(2)
    # singular leading coefficient drops the degree
    with pytest.raises(NotGeneric) as exc:
        solve_unilateral(MatPolynomial([i, i, RatMatrix.diag([1, 0])]))
    assert exc.value.check == "degree"
    # X^2 = I has phi = (l^2 - 1)^2
    with pytest.raises(NotGeneric) as exc:
        solve_unilateral(MatPolynomial([i.scale(-1), z, i]))
    assert exc.value.check == "repeated_roots"


def test_cap_exceeded_and_streaming():
    mp = unilateral(2, 2, 0)
    with pytest.raises(CapExceeded):
        solve_unilateral(mp, cap=5)
    first = list(iter_solvents(mp, subsets=[(0, 1)]))
    assert len(first) == 1 and first[0].residual <= 1e-8


def test_matpolynomial_validation():
    with pytest.raises(ValueError):
        MatPolynomial([RatMatrix.identity(2)])
    with pytest.raises(DimensionMismatch):
        MatPolynomial([RatMatrix.identity(2), RatMatrix.identity(3)])
    with pytest.raises(ValueError):
        MatPolynomial([RatMatrix.identity(2), RatMatrix.zeros(2)])
