from fractions import Fraction as F

import numpy as np
import pytest

from matsolve.errors import NotGeneric, NotGenericCommuting
from matsolve.exactalg import RatMatrix, RatUniPoly
from matsolve.instances import random_instance
from matsolve.numlin import match_solution_sets, max_norm
from matsolve.riccati import RiccatiProblem, hamiltonian_solve
from matsolve.structured import (
    BinomeFamilyDescriptor,
    CommutingFamily,
    binome_family_emit,
    binome_residual,
    binome_strata,
    binome_stratum_count,
    commuting_counterexample_check,
    commuting_riccati_family,
    commuting_solve,
    mu_distinct_exact,
    polynomial_span_residual,
    symmetric_quadratic_solve,
)


def commutator(x, b):
    b = b.to_numpy() if isinstance(b, RatMatrix) else b
    return max_norm(x @ b - b @ x)


# --- commuting coefficients -------------------------------------------------


def test_commuting_hand_example():
    b0, b1 = RatMatrix.diag([1, 2]), RatMatrix.identity(2)
    fam = CommutingFamily.from_matrices([b0, b1])
    sols = commuting_solve(fam)
    assert len(sols) == 4
    # x^2 + x + lam = 0 for lam = 1, 2
    r1 = np.roots([1, 1, 1])
    r2 = np.roots([1, 1, 2])
    expected = [np.diag([a, b]) for a in r1 for b in r2]
    assert match_solution_sets(sols.matrices(), expected, 1e-9)
    for x in sols.matrices():
        assert commutator(x, b0) <= 1e-9 and commutator(x, b1) <= 1e-9


def test_commuting_linear_case():
    b0 = RatMatrix.from_rows([[1, 2], [0, 3]])
    sols = commuting_solve(CommutingFamily.from_matrices([b0]))
    assert len(sols) == 1
    assert np.allclose(sols.matrices()[0], -b0.to_numpy())


@pytest.mark.parametrize("n,k", [(2, 2), (2, 3), (3, 2)])
@pytest.mark.parametrize("seed", range(3))
def test_commuting_counts(n, k, seed):
    inst = random_instance("commuting", n, k, seed=seed)
    fam = CommutingFamily.from_instance(inst)
    assert mu_distinct_exact(fam)
    sols = commuting_solve(fam)
    assert len(sols) == k**n and sols.all_simple
    assert max(sols.notes["residuals"]) <= 1e-8
    for x in sols.matrices():
        for b in inst.coefficient_list():
            assert commutator(x, b) <= 1e-9 * max(1.0, max_norm(x))
        assert polynomial_span_residual(x, inst["B0"]) <= 1e-8


def test_commuting_instance_is_exact_by_construction():
    inst = random_instance("commuting", 3, 3, seed=4)
    b = inst.coefficient_list()
    for i in range(3):
        for j in range(3):
            assert (b[i] @ b[j] - b[j] @ b[i]).is_zero()


def test_recovered_polynomials_match_stored():
    inst = random_instance("commuting", 2, 3, seed=2)
    stored = CommutingFamily.from_instance(inst)
    recovered = CommutingFamily.from_matrices(inst.coefficient_list())
    for p, q in zip(stored.p_polys, recovered.p_polys):
        pc = np.array([float(c) for c in p.coeffs])
        qc = np.asarray(q.coeffs)[: len(pc)]
        assert np.allclose(pc, qc, atol=1e-9)


def test_non_commuting_rejected():
    a = RatMatrix.from_rows([[1, 1], [0, 2]])
    b = RatMatrix.from_rows([[0, 0], [1, 0]])
    with pytest.raises(NotGenericCommuting) as exc:
        CommutingFamily.from_matrices([a, b])
    assert exc.value.check == "commutator"


def test_repeated_b0_eigenvalue_rejected():
    with pytest.raises(NotGenericCommuting):
        commuting_solve(CommutingFamily.from_matrices([RatMatrix.identity(2), RatMatrix.identity(2)]))


def test_mu_collision_detected():
    # theta(x, lam) = x^2 + P1(lam) x + lam with P1 chosen so both quadratics share x = -1:
    # 1 - P1(lam) + lam = 0, P1(lam) = lam + 1, i.e. B1 = B0 + I
    b0 = RatMatrix.diag([2, 3])
    b1 = b0 + RatMatrix.identity(2)
    fam = CommutingFamily.from_matrices([b0, b1])
    assert not mu_distinct_exact(fam)
    with pytest.raises(NotGenericCommuting) as exc:
        commuting_solve(fam)
    assert exc.value.check == "mu_collision"


def test_commuting_riccati_cross_check():
    inst = random_instance("commuting", 2, 2, seed=1)
    b0, b1 = inst["B0"], inst["B1"]
    i = RatMatrix.identity(2)
    p = RiccatiProblem(i, b1, b0, b0 @ b0 + b1)
    fam, trace = commuting_riccati_family(p)
    # D = B1 - B2, E = AC - B1 B2
    assert fam.b[1] == b1 - b0
    assert fam.b[0] == p.c - b1 @ b0
    zs = commuting_solve(fam).matrices()
    xs = [trace.back_map(z) for z in zs]
    assert match_solution_sets(xs, hamiltonian_solve(p).matrices(), 1e-6)


# --- symmetric quadratic ----------------------------------------------------


def test_symmetric_square_roots_of_identity():
    sols = symmetric_quadratic_solve(RatMatrix.zeros(2), RatMatrix.identity(2).scale(-1))
    expected = [np.diag([a, b]) for a in (1, -1) for b in (1, -1)]
    assert match_solution_sets(sols.matrices(), expected, 1e-12)
    # repeated eigenvalue: only the coordinate sign patterns are listed
    assert sols.notes["complete"] is False


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("seed", range(3))
def test_symmetric_counts(n, seed):
    inst = random_instance("symmetric", n, seed=seed)
    b, c = inst["B"], inst["C"]
    sols = symmetric_quadratic_solve(b, c)
    assert len(sols) == 2**n and sols.all_simple
    bn, cn = b.to_numpy(), c.to_numpy()
    e = bn @ bn - cn
    for x in sols.matrices():
        assert max_norm(x @ x + bn @ x + x @ bn + cn) <= 1e-8
        y = x + bn
        assert max_norm(y @ e - e @ y) <= 1e-8 * max(1.0, max_norm(e))


def test_symmetric_singular_rejected():
    with pytest.raises(NotGeneric):
        symmetric_quadratic_solve(RatMatrix.zeros(2), RatMatrix.zeros(2))


# --- binome families --------------------------------------------------------


def test_binome_extremes():
    t = RatMatrix.diag([1, 2, -3])
    assert binome_family_emit(BinomeFamilyDescriptor(t, 0, (0, 1, 2))) == t.scale(-1)
    assert binome_family_emit(BinomeFamilyDescriptor(t, 3, ())).is_zero()


def test_binome_upper_block_shape():
    t = RatMatrix.diag([F(3), F(-5)])
    y = RatMatrix.from_rows([[F(7, 2)]])
    z = binome_family_emit(BinomeFamilyDescriptor(t, 1, (0,), y))
    assert z == RatMatrix.from_rows([[-3, F(7, 2)], [0, 0]])
    assert binome_residual(t, z) == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_binome_exact_residual_all_strata(n):
    import itertools

    t = RatMatrix.diag(list(range(1, n + 1)))
    for r in range(n + 1):
        for chosen in itertools.combinations(range(n), n - r):
            y = RatMatrix(n - r, r, [F(i + 1, 3) for i in range((n - r) * r)]) if 0 < r < n else None
            desc = BinomeFamilyDescriptor(t, r, chosen, y)
            assert desc.dimension == r * (n - r)
            assert binome_residual(t, binome_family_emit(desc)) == 0


def test_binome_numeric_path():
    t = np.array([[1.0, 2.0], [0.0, -1.0]])
    z = binome_family_emit(BinomeFamilyDescriptor(t, 1, (1,), np.array([[0.7]])))
    assert binome_residual(t, z) <= 1e-10


def test_binome_strata_counts():
    assert binome_stratum_count(2) == (1, 2)
    assert binome_stratum_count(3) == (2, 6)
    assert binome_stratum_count(4) == (4, 6)
    for n in range(1, 7):
        dim, count = binome_stratum_count(n)
        strata = binome_strata(n)
        top = max(d for d, _ in strata.values())
        assert dim == top == n * n // 4
        assert count == sum(c for d, c in strata.values() if d == top)


def test_binome_descriptor_validation():
    t = RatMatrix.diag([1, 2])
    with pytest.raises(ValueError):
        binome_family_emit(BinomeFamilyDescriptor(t, 1, (0, 1)))
    with pytest.raises(NotGeneric):
        binome_family_emit(BinomeFamilyDescriptor(RatMatrix.diag([1, 1]), 1, (0,)))


# --- commuting counterexample -----------------------------------------------


@pytest.mark.parametrize("seed", range(3))
def test_counterexample(seed):
    rng = np.random.default_rng(seed)
    while True:
        bd = [int(v) for v in rng.integers(-2, 3, size=2)]
        cd = [int(v) for v in rng.integers(-2, 3, size=2)]
        if 0 not in bd and 0 not in cd and bd[0] != bd[1] and cd[0] != cd[1]:
            break
    b, c = RatMatrix.diag(bd), RatMatrix.diag(cd)
    rep = commuting_counterexample_check(b, c, seed=seed)
    assert rep.hilbert_dimension == 1
    assert len(rep.diagonal_solutions) == 4
    assert max(rep.diagonal_residuals) <= 1e-8
    assert max(rep.diagonal_commutators) <= 1e-9
    assert rep.family_residual <= 1e-8 and rep.family_commutator > 1e-6
    assert rep.ok
