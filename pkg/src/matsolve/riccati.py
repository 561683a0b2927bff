"""Riccati equations XAX + B1 X + X B2 + C = 0.

Two independent solvers are provided:

* :func:`reduce_riccati` translates and rescales the unknown to reach the
  monic unilateral form Z^2 + B Z + C = 0, solved by :mod:`matpoly`;
* :func:`hamiltonian_solve` reads solutions off the n-dimensional invariant
  subspaces of the block matrix M = [[-B2, -A], [C, B1]] as X = V U^-1.

The module also holds the trace evenness test and a catalogue of small
non-generic 2x2 instances with known outcomes.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DefectiveM, DimensionMismatch, IncompleteSolutionSet, SingularA
from .exactalg.groebner import charpoly
from .exactalg.rational import RatMatrix
from .matpoly import MatPolynomial, SolutionSet, solve_unilateral
from .numlin import DEDUP_TOL, dedup_matrices, eigen, max_norm, root_clusters
from .syscount import EquationSpec, count_solutions, jacobian_at, word_spec

U_DET_TOL = 1e-10
U_COND_LIMIT = 1e12
EVEN_TOL = 1e-6


def _is_exact(*mats) -> bool:
    return all(isinstance(m, RatMatrix) for m in mats)


def _np(m) -> np.ndarray:
    return m.to_numpy() if isinstance(m, RatMatrix) else np.asarray(m, dtype=complex)


@dataclass(frozen=True)
class RiccatiProblem:
    """XAX + B1 X + X B2 + C = 0 with n x n coefficients (rational or complex)."""

    a: object
    b1: object
    b2: object
    c: object

    def __post_init__(self):
        shapes = {tuple(_np(m).shape) for m in (self.a, self.b1, self.b2, self.c)}
        if len(shapes) != 1:
            raise DimensionMismatch("Riccati coefficients must share one square shape")
        (shape,) = shapes
        if len(shape) != 2 or shape[0] != shape[1]:
            raise DimensionMismatch("Riccati coefficients must be square")

    @property
    def n(self) -> int:
        return _np(self.a).shape[0]

    @property
    def exact(self) -> bool:
        return _is_exact(self.a, self.b1, self.b2, self.c)

    @classmethod
    def from_rows(cls, a, b1, b2, c) -> "RiccatiProblem":
        return cls(*(RatMatrix.from_rows(m) for m in (a, b1, b2, c)))

    @classmethod
    def from_instance(cls, inst) -> "RiccatiProblem":
        return cls(inst["A"], inst["B1"], inst["B2"], inst["C"])

    def residual(self, x) -> np.ndarray:
        a, b1, b2, c = (_np(m) for m in (self.a, self.b1, self.b2, self.c))
        x = np.asarray(x, dtype=complex)
        return x @ a @ x + b1 @ x + x @ b2 + c

    def to_equation_spec(self) -> EquationSpec:
        if not self.exact:
            raise TypeError("counting needs rational coefficients")
        consts = {"A": self.a, "B1": self.b1, "B2": self.b2}
        return word_spec(self.n, ["XAX", "B1X", "XB2"], consts, self.c)

    def newton(self, x, steps: int = 3) -> np.ndarray:
        """Newton polish with the Jacobian I(x)(AX)^T + XA(x)I + B1(x)I + I(x)B2^T (row-major vec)."""
        a, b1, b2 = (_np(m) for m in (self.a, self.b1, self.b2))
        n = self.n
        eye = np.eye(n)
        x = np.asarray(x, dtype=complex)
        for _ in range(steps):
            f = self.residual(x)
            if max_norm(f) <= 1e-15:
                break
            jac = np.kron(eye, (a @ x).T) + np.kron(x @ a, eye) + np.kron(b1, eye) + np.kron(eye, b2.T)
            try:
                step = np.linalg.solve(jac, f.reshape(-1))
            except np.linalg.LinAlgError:
                break
            cand = x - step.reshape(n, n)
            if max_norm(self.residual(cand)) >= max_norm(f):
                break
            x = cand
        return x


@dataclass(frozen=True)
class HamiltonianM:
    m: object  # 2n x 2n, rational or complex

    @classmethod
    def of(cls, p: RiccatiProblem) -> "HamiltonianM":
        if p.exact:
            n = p.n
            rows = []
            for i in range(n):
                rows.append([-p.b2[i, j] for j in range(n)] + [-p.a[i, j] for j in range(n)])
            for i in range(n):
                rows.append([p.c[i, j] for j in range(n)] + [p.b1[i, j] for j in range(n)])
            return cls(RatMatrix.from_rows(rows))
        a, b1, b2, c = (_np(m) for m in (p.a, p.b1, p.b2, p.c))
        return cls(np.block([[-b2, -a], [c, b1]]))

    def numeric(self) -> np.ndarray:
        return _np(self.m)

    def blocks(self):
        m = self.numeric()
        n = m.shape[0] // 2
        return m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:]


@dataclass
class ReductionTrace:
    """Data of the reduction X = A^-1 Z + U with U = -A^-1 B2."""

    u_shift: object
    a_inv: object
    unilateral: MatPolynomial  # Z^2 + B Z + C' with identity leading coefficient

    def back_map(self, z) -> np.ndarray:
        return _np(self.a_inv) @ np.asarray(z, dtype=complex) + _np(self.u_shift)

    def back_map_exact(self, z: RatMatrix) -> RatMatrix:
        return self.a_inv @ z + self.u_shift


def reduce_riccati(p: RiccatiProblem) -> ReductionTrace:
    """Monic unilateral form of a Riccati equation with invertible A.

    With U = -A^-1 B2 and X = Y + U the equation becomes YAY + BY + C' = 0,
    B = UA + B1, C' = B1 U + C. Multiplying by A on the left and putting
    Z = AY gives Z^2 + (A B A^-1) Z + A C' = 0.
    """
    if p.exact:
        if p.a.det() == 0:
            raise SingularA("A is singular; the Riccati equation cannot be reduced")
        a_inv = p.a.inverse()
        u = -(a_inv @ p.b2)
        b = u @ p.a + p.b1
        cp = p.b1 @ u + p.c
        coeffs = [p.a @ cp, p.a @ b @ a_inv, RatMatrix.identity(p.n)]
    else:
        a = _np(p.a)
        if np.linalg.cond(a) > U_COND_LIMIT:
            raise SingularA("A is numerically singular")
        a_inv = np.linalg.inv(a)
        u = -a_inv @ _np(p.b2)
        b = u @ a + _np(p.b1)
        cp = _np(p.b1) @ u + _np(p.c)
        coeffs = [a @ cp, a @ b @ a_inv, np.eye(p.n, dtype=complex)]
    return ReductionTrace(u, a_inv, MatPolynomial(coeffs))


def solve_by_reduction(p: RiccatiProblem) -> SolutionSet:
    """reduce_riccati followed by the unilateral eigenvalue solver and the back-map."""
    trace = reduce_riccati(p)
    zs = solve_unilateral(trace.unilateral)
    xs = [p.newton(trace.back_map(s.x)) for s in zs.solutions]
    res = [max_norm(p.residual(x)) for x in xs]
    return SolutionSet(
        xs,
        count_expected=zs.count_expected,
        all_simple=len(dedup_matrices(xs)) == len(xs),
        method="eigen",
        notes={"residuals": res, "subsets": [s.subset for s in zs.solutions]},
    )


def _subset_gate(u: np.ndarray) -> tuple[bool, float]:
    """Complementarity proxy: relative |det U| and condition number of U."""
    norms = np.linalg.norm(u, axis=0)
    if np.any(norms == 0):
        return False, 0.0
    rel = abs(np.linalg.det(u / norms))
    if rel <= U_DET_TOL:
        return False, rel
    return np.linalg.cond(u) <= U_COND_LIMIT, rel


def hamiltonian_solve(
    p: RiccatiProblem,
    cluster_tol: float = 1e-6,
    recombine: np.random.Generator | None = None,
) -> SolutionSet:
    """Solutions X = V U^-1 from the n-dimensional invariant subspaces of M.

    Requires 2n distinct eigenvalues of M (exact squarefree test for rational
    input, a ``cluster_tol`` gap otherwise). Subsets whose U block fails the
    invertibility gate are the subspaces meeting {0} x K^n; they are listed
    in ``notes["at_infinity"]``. Passing ``recombine`` mixes the chosen
    eigenvectors by a random invertible matrix before forming V U^-1.
    """
    hm = HamiltonianM.of(p)
    n = p.n
    if p.exact and not charpoly(hm.m).is_squarefree():
        raise DefectiveM("M has a repeated eigenvalue")
    m = hm.numeric()
    eig = eigen(m, cluster_tol=cluster_tol)
    if eig.deficient:
        raise DefectiveM("M is defective")
    if any(len(g) > 1 for g in root_clusters(eig.values, cluster_tol)):
        raise DefectiveM("M has numerically repeated eigenvalues (derogatory or defective)")
    vecs = eig.vectors
    sols, subsets, at_inf, res = [], [], [], []
    for subset in itertools.combinations(range(2 * n), n):
        w = vecs[:, list(subset)]
        if recombine is not None:
            g = recombine.standard_normal((n, n)) + 1j * recombine.standard_normal((n, n))
            w = w @ g
        u, v = w[:n], w[n:]
        ok, _ = _subset_gate(u)
        if not ok:
            at_inf.append(subset)
            continue
        x = p.newton(v @ np.linalg.inv(u))
        sols.append(x)
        subsets.append(subset)
        res.append(max_norm(p.residual(x)))
    return SolutionSet(
        sols,
        count_expected=math.comb(2 * n, n),
        all_simple=len(dedup_matrices(sols, DEDUP_TOL)) == len(sols),
        method="hamiltonian",
        notes={"subsets": subsets, "at_infinity": at_inf, "residuals": res, "eigenvalues": eig.values},
    )


def graph_invariance_residual(p: RiccatiProblem, x) -> float:
    """max|M [I; X] - [I; X](-B2 - A X)|."""
    m = HamiltonianM.of(p).numeric()
    n = p.n
    x = np.asarray(x, dtype=complex)
    g = np.vstack([np.eye(n), x])
    k = -_np(p.b2) - _np(p.a) @ x
    return max_norm(m @ g - g @ k)


# --------------------------------------------------------------------------
# trace evenness


@dataclass(frozen=True)
class EvennessReport:
    even: bool
    shift: complex  # mean trace, i.e. a_{tau-1}/tau up to sign
    q_coeffs: np.ndarray  # ascending coefficients of Q(u) = P(u + mean)
    r_coeffs: np.ndarray  # Q(u) = R(u^2)
    max_odd_ratio: float

    @property
    def r_degree(self) -> int:
        # Q is monic of even degree, so R is monic too
        return len(self.r_coeffs) - 1


def trace_evenness_check(solutions, n: int | None = None, tol: float = EVEN_TOL) -> EvennessReport:
    """Shift the trace polynomial P(z) = prod (z - tr X_J) to zero mean and test evenness.

    For a complete solution set of a generic monic degree-2 unilateral
    equation, tau = C(2n, n) traces pair up as t and S - t (complementary
    root subsets), so the shifted polynomial only has even powers. Back-mapped
    Riccati solutions do not keep this pairing; reduce first.
    """
    mats = solutions.matrices() if isinstance(solutions, SolutionSet) else [np.asarray(x) for x in solutions]
    if not mats:
        raise IncompleteSolutionSet("empty solution set")
    n = n or mats[0].shape[0]
    tau = math.comb(2 * n, n)
    if len(mats) != tau or len(dedup_matrices(mats)) != tau:
        raise IncompleteSolutionSet(f"expected {tau} distinct solutions, got {len(dedup_matrices(mats))}")
    traces = np.array([np.trace(x) for x in mats])
    # P(z) = z^tau + a_{tau-1} z^{tau-1} + ..., a_{tau-1} = -sum(traces)
    shift = np.mean(traces)
    q = np.poly(traces - shift)[::-1]  # ascending, untrimmed
    scale = np.max(np.abs(q))
    odd = np.abs(q[1::2])
    ratio = float(np.max(odd) / scale) if odd.size else 0.0
    return EvennessReport(ratio <= tol, complex(shift), q, q[0::2].copy(), ratio)


# --------------------------------------------------------------------------
# fixture catalogue


def _m(rows) -> RatMatrix:
    return RatMatrix.from_rows(rows)


@dataclass
class Fixture:
    """A small equation f(X) = Y with a known classification.

    ``expected`` keys: ``nu`` (finite count with multiplicity) or
    ``hilbert_dimension``; optionally ``sole_solution`` (point carrying the
    whole count), ``multiplicity`` ((point, m) pairs), ``solutions``
    (explicit rational solutions) and ``isolated_nonsingular`` (points whose
    Jacobian is invertible).
    """

    name: str
    spec: EquationSpec
    expected: dict
    claim: str
    tags: tuple = ()

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, RatMatrix):
                return v.to_json()
            if isinstance(v, (list, tuple)):
                return [enc(e) for e in v]
            return v

        return {
            "name": self.name,
            "claim": self.claim,
            "equation": self.spec.to_json(),
            "expected": {k: enc(v) for k, v in self.expected.items()},
        }


@dataclass
class FixtureOutcome:
    fixture: Fixture
    actual: dict
    passed: bool
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "name": self.fixture.name,
            "expected": self.fixture.to_json()["expected"],
            "actual": self.actual,
            "passed": self.passed,
            "failures": self.failures,
        }


def _phi(n: int, words: Sequence, consts: dict, y: RatMatrix | None) -> EquationSpec:
    spec = word_spec(n, words, consts)
    return spec.with_rhs(y) if y is not None else spec


def catalogue_fixtures() -> list[Fixture]:
    """Explicit 2x2 instances realizing every finite count 0..6 and dimensions 1 and 2."""
    e = RatMatrix.identity(2)
    phi1 = {"P": _m([[0, 1], [0, 1]]), "Q": _m([[-1, 2], [0, -1]])}
    phi3 = {"D": _m([[2, 0], [0, -1]])}
    phi6 = {"P": _m([[0, 1], [1, 1]]), "N": _m([[0, -1], [0, 0]]), "R": _m([[0, 1], [0, 0]])}
    generic = {
        "A": _m([[1, 2], [-1, 1]]),
        "B1": _m([[2, -1], [1, 0]]),
        "B2": _m([[0, 1], [2, -2]]),
    }
    out = [
        Fixture(
            "nu0", _phi(2, ["XX"], {}, _m([[0, 1], [0, 0]])), {"nu": 0},
            "X^2 = [[0,1],[0,0]] has no solutions",
        ),
        Fixture(
            "nu1", _phi(2, ["XPX", "QX"], phi1, _m([[1, 0], [-1, 1]])),
            {"nu": 1, "solutions": [_m([[0, -1], [1, -1]])]},
            "phi1(X) = Y with Y in the ramification set has one solution",
        ),
        Fixture(
            "nu2", _phi(2, ["XX", "X"], {}, _m([[0, 0], [-2, 0]])), {"nu": 2},
            "X^2 + X = [[u,0],[-2,u]] has 2 solutions for u != -1/4 (u = 0)",
        ),
        Fixture(
            "nu3", _phi(2, ["XX", "DX"], phi3, _m([[-1, 1], [0, 2]])),
            {"nu": 3, "sole_solution": _m([[-1, Fraction(1, 3)], [0, 2]])},
            "phi3(X) = [[-1,1],[0,2]] has a unique solution of multiplicity 3",
        ),
        Fixture(
            "nu4", _phi(2, ["XX", "DX"], phi3, _m([[3, 0], [0, 5]])), {"nu": 4},
            "phi3(X) = generic diagonal Y has 4 solutions",
        ),
        Fixture(
            "nu5", _phi(2, ["XX", "DX"], phi3, _m([[3, 7], [0, 5]])), {"nu": 5, "all_simple": True},
            "phi3(X) = generic upper triangular Y has 5 simple solutions",
        ),
        Fixture(
            "nu6_palin", _phi(2, ["XPX", "NX", "XR"], phi6, None),
            {"nu": 6, "sole_solution": RatMatrix.zeros(2)},
            "phi6(X) = 0 has the sole solution 0 with multiplicity 6",
        ),
        Fixture(
            "nu6_generic", word_spec(2, ["XAX", "B1X", "XB2"], generic, _m([[1, -2], [0, 1]])),
            {"nu": 6, "all_simple": True},
            "a generic Riccati equation has 6 simple solutions",
        ),
        Fixture(
            "dim1_binome", _phi(2, ["XX", "TX"], {"T": _m([[1, 0], [0, 2]])}, None),
            {"hilbert_dimension": 1},
            "X^2 + TX = 0 has a one-dimensional solution set",
        ),
        Fixture(
            "dim2_square_root_of_identity", _phi(2, ["XX"], {}, e),
            {
                "hilbert_dimension": 2,
                "isolated_nonsingular": [e, -e],
                "surface_member": _m([[1, 1], [0, -1]]),
            },
            "X^2 = I: isolated non-singular +-I plus the quadric a^2 + bc = 1 of trace-zero matrices",
        ),
        Fixture(
            "dim2_xax", _phi(2, ["XAX"], {"A": _m([[1, 2], [-1, 1]])}, None),
            {"hilbert_dimension": 2},
            "XAX = 0 with invertible A is a cone of dimension 2",
        ),
    ]
    return out


def classify_fixture(fx: Fixture, pair_budget: int = 200_000) -> FixtureOutcome:
    res = count_solutions(fx.spec, pair_budget=pair_budget)
    s = res.summary
    actual: dict = {
        "is_zero_dimensional": s.is_zero_dimensional,
        "hilbert_dimension": s.hilbert_dimension,
        "nu": s.quotient_dimension,
    }
    fails = []
    exp = fx.expected
    if "nu" in exp and s.quotient_dimension != exp["nu"]:
        fails.append(f"nu {s.quotient_dimension} != {exp['nu']}")
    if "hilbert_dimension" in exp and s.hilbert_dimension != exp["hilbert_dimension"]:
        fails.append(f"hilbert dimension {s.hilbert_dimension} != {exp['hilbert_dimension']}")
    if "sole_solution" in exp:
        pt = exp["sole_solution"]
        mult = res.multiplicity_at(list(pt.entries)) if s.is_zero_dimensional else None
        actual["multiplicity_at_sole"] = mult
        if not res.sole_solution(list(pt.entries)):
            fails.append("stated point does not carry the whole count")
        if not fx.spec.evaluate_exact(pt).is_zero():
            fails.append("stated point is not a solution")
    for pt in exp.get("solutions", []):
        if not fx.spec.evaluate_exact(pt).is_zero():
            fails.append(f"{pt.to_rows()} is not a solution")
    if exp.get("all_simple"):
        simple = res.shape is not None and res.solutions is not None and res.solutions.all_simple
        actual["all_simple"] = simple
        if not simple:
            fails.append("solutions are not all simple")
    if "isolated_nonsingular" in exp:
        flags = []
        for pt in exp["isolated_nonsingular"]:
            rep = jacobian_at(fx.spec, pt)
            ok = fx.spec.evaluate_exact(pt).is_zero() and not rep.singular
            flags.append(ok)
        actual["isolated_nonsingular"] = flags
        if not all(flags):
            fails.append("an isolated point is singular or not a solution")
    if "surface_member" in exp:
        pt = exp["surface_member"]
        on = fx.spec.evaluate_exact(pt).is_zero() and jacobian_at(fx.spec, pt).singular
        actual["surface_member_singular_solution"] = on
        if not on:
            fails.append("surface member is not a singular solution")
    return FixtureOutcome(fx, actual, not fails, fails)


def classify_all(pair_budget: int = 200_000) -> list[FixtureOutcome]:
    return [classify_fixture(fx, pair_budget) for fx in catalogue_fixtures()]


def fixtures_json() -> str:
    return json.dumps([fx.to_json() for fx in catalogue_fixtures()], indent=2) + "\n"
