"""Closed-form solvers for structured equations.

* commuting coefficients: X^k + B_{k-1} X^{k-1} + ... + B_1 X + B_0 = 0 with
  B_j = P_j(B_0); every solution is diagonal in the eigenbasis of B_0;
* the symmetric quadratic X^2 + BX + XB + C = 0, i.e. (X + B)^2 = B^2 - C;
* the binome Z^2 + TZ = 0, whose solutions form affine families indexed by
  subsets of the spectrum of T.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotGeneric, NotGenericCommuting
from .exactalg.groebner import charpoly
from .exactalg.multipoly import MultiPoly
from .exactalg.rational import RatMatrix, RatUniPoly, discriminant
from .matpoly import MatPolynomial, SolutionSet, _newton_refine, det_lambda
from .numlin import CUniPoly, aberth_roots, dedup_matrices, eigen, max_norm, poly_of_matrix, root_clusters
from .syscount import count_ideal, matricize, word_spec

COMMUTE_TOL = 1e-9
POLY_TOL = 1e-9
MU_GAP = 1e-7


def _np(m) -> np.ndarray:
    return m.to_numpy() if isinstance(m, RatMatrix) else np.asarray(m, dtype=complex)


def _exact(*ms) -> bool:
    return all(isinstance(m, RatMatrix) for m in ms)


def _rel_commutator(x: np.ndarray, b: np.ndarray) -> float:
    return max_norm(x @ b - b @ x) / max(1.0, max_norm(x) * max_norm(b))


def _distinct_eigen(m, what: str, err=NotGeneric, nonzero: bool = False):
    """Eigen-decomposition with distinct (optionally non-zero) eigenvalues enforced."""
    if isinstance(m, RatMatrix):
        cp = charpoly(m)
        if not cp.is_squarefree():
            raise err(f"{what} has a repeated eigenvalue", check="repeated_eigenvalues")
        if nonzero and cp.coeffs[0] == 0:
            raise err(f"{what} is singular", check="zero_eigenvalue")
    a = _np(m)
    eig = eigen(a)
    if eig.deficient or any(len(g) > 1 for g in root_clusters(eig.values, MU_GAP)):
        raise err(f"{what} has numerically repeated eigenvalues", check="repeated_eigenvalues")
    if nonzero and np.min(np.abs(eig.vector_values)) <= 1e-12 * max(1.0, max_norm(a)):
        raise err(f"{what} has a zero eigenvalue", check="zero_eigenvalue")
    return eig.vector_values, eig.vectors


# --------------------------------------------------------------------------
# commuting coefficients


def _lagrange_complex(nodes: np.ndarray, values: np.ndarray) -> CUniPoly:
    """Interpolating polynomial through (nodes, values), ascending coefficients."""
    n = len(nodes)
    coeffs = np.zeros(n, dtype=complex)
    for i in range(n):
        others = np.delete(nodes, i)
        basis = np.poly(others)[::-1] if n > 1 else np.ones(1)
        coeffs += values[i] * basis / np.prod(nodes[i] - others)
    return CUniPoly(coeffs, leading_tol=0.0)


@dataclass
class CommutingFamily:
    """Coefficients B_0..B_{k-1} of X^k + ... + B_1 X + B_0 with B_j = P_j(B_0)."""

    n: int
    k: int
    b: list
    p_polys: list = field(default_factory=list)  # P_1..P_{k-1}

    def __post_init__(self):
        if len(self.b) != self.k:
            raise DimensionMismatch(f"need {self.k} coefficients B_0..B_{self.k - 1}")
        for m in self.b:
            if _np(m).shape != (self.n, self.n):
                raise DimensionMismatch("coefficient of the wrong size")

    @property
    def exact(self) -> bool:
        return _exact(*self.b) and all(isinstance(p, RatUniPoly) for p in self.p_polys)

    @classmethod
    def from_matrices(cls, b: Sequence) -> "CommutingFamily":
        """Recover P_j from the eigenpairs of B_0 by interpolation."""
        b = list(b)
        n = _np(b[0]).shape[0]
        fam = cls(n, len(b), b)
        fam.check_commuting()
        if len(b) > 1:
            lam, vecs = _distinct_eigen(b[0], "B_0", NotGenericCommuting)
            polys = []
            for bj in b[1:]:
                bv = _np(bj) @ vecs
                # B_j e_i = P_j(lambda_i) e_i; read the ratio at the largest entry
                idx = np.argmax(np.abs(vecs), axis=0)
                vals = bv[idx, range(n)] / vecs[idx, range(n)]
                polys.append(_lagrange_complex(lam, vals))
            fam.p_polys = polys
        fam.check_polynomials()
        return fam

    @classmethod
    def from_instance(cls, inst) -> "CommutingFamily":
        polys = [RatUniPoly(Fraction(c) for c in p) for p in inst.extra.get("p_polys", [])]
        fam = cls(inst.n, inst.k, inst.coefficient_list(), polys)
        fam.check_commuting()
        fam.check_polynomials()
        return fam

    def mat_polynomial(self) -> MatPolynomial:
        ident = RatMatrix.identity(self.n) if _exact(*self.b) else np.eye(self.n, dtype=complex)
        return MatPolynomial(list(self.b) + [ident])

    def check_commuting(self) -> None:
        for i, j in itertools.combinations(range(self.k), 2):
            bi, bj = self.b[i], self.b[j]
            if _exact(bi, bj):
                ok = (bi @ bj - bj @ bi).is_zero()
            else:
                ok = _rel_commutator(_np(bi), _np(bj)) <= 1e-12
            if not ok:
                raise NotGenericCommuting(f"B_{i} and B_{j} do not commute", check="commutator")

    def check_polynomials(self) -> None:
        b0 = _np(self.b[0])
        for j, p in enumerate(self.p_polys, start=1):
            coeffs = [complex(float(c)) for c in p.coeffs] if isinstance(p, RatUniPoly) else p.coeffs
            bj = _np(self.b[j])
            err = max_norm(poly_of_matrix(CUniPoly(coeffs, leading_tol=0.0), b0) - bj)
            if err > POLY_TOL * max(1.0, max_norm(bj)):
                raise NotGenericCommuting(f"P_{j}(B_0) differs from B_{j} by {err:.3g}", check="p_poly")

    def theta(self, lam: complex) -> np.ndarray:
        """Ascending coefficients of x^k + P_{k-1}(lam) x^{k-1} + ... + P_1(lam) x + lam."""
        out = [lam]
        for p in self.p_polys:
            coeffs = [complex(float(c)) for c in p.coeffs] if isinstance(p, RatUniPoly) else p.coeffs
            out.append(CUniPoly(coeffs, leading_tol=0.0)(lam))
        out.append(1.0)
        return np.array(out, dtype=complex)


def mu_distinct_exact(fam: CommutingFamily) -> bool:
    """All k n roots mu_{i,j} distinct, via the discriminant of det(x^k I + ... + B_0).

    That determinant is prod_i theta(x, lambda_i), so its discriminant
    vanishes exactly when some theta(., lambda_i) has a double root or two of
    them share a root (the resultant condition).
    """
    phi = det_lambda(fam.mat_polynomial())
    return discriminant(phi) != 0


def commuting_solve(fam: CommutingFamily) -> SolutionSet:
    """All k^n solutions X = P diag(mu_{1,j_1}, ..., mu_{n,j_n}) P^-1."""
    n, k = fam.n, fam.k
    b0 = fam.b[0]
    fam.check_commuting()
    lam, vecs = _distinct_eigen(b0, "B_0", NotGenericCommuting)
    if _exact(*fam.b) and not mu_distinct_exact(fam):
        raise NotGenericCommuting("two roots mu_{i,j} coincide", check="mu_collision")
    mus = []
    for li in lam:
        th = fam.theta(li)
        mus.append(np.array([-th[0]]) if k == 1 else aberth_roots(CUniPoly(th, leading_tol=0.0)).roots)
    flat = np.concatenate(mus)
    gaps = [abs(a - b) for a, b in itertools.combinations(flat, 2)]
    if gaps and min(gaps) < MU_GAP:
        raise NotGenericCommuting("numerically coincident roots mu_{i,j}", check="mu_collision")
    mp = fam.mat_polynomial()
    pinv = np.linalg.inv(vecs)
    coeffs = [_np(m) for m in fam.b]
    sols, residuals, comm = [], [], []
    for choice in itertools.product(range(k), repeat=n):
        d = np.diag([mus[i][j] for i, j in enumerate(choice)])
        x = _newton_refine(mp, vecs @ d @ pinv)
        sols.append(x)
        residuals.append(max_norm(mp.apply(x)))
        comm.append(max(_rel_commutator(x, bi) for bi in coeffs))
    return SolutionSet(
        sols,
        count_expected=k**n,
        all_simple=len(dedup_matrices(sols)) == len(sols),
        method="eigen",
        notes={"residuals": residuals, "commutators": comm, "mu": [m.tolist() for m in mus]},
    )


def polynomial_span_residual(x, b0) -> float:
    """Distance of X from span{I, B_0, ..., B_0^{n-1}}, relative to |X|."""
    x = np.asarray(x, dtype=complex)
    b0 = _np(b0)
    n = b0.shape[0]
    powers = [np.eye(n, dtype=complex)]
    for _ in range(n - 1):
        powers.append(powers[-1] @ b0)
    basis = np.array([p.reshape(-1) for p in powers]).T
    coef, *_ = np.linalg.lstsq(basis, x.reshape(-1), rcond=None)
    return max_norm(basis @ coef - x.reshape(-1)) / max(1.0, max_norm(x))


def commuting_riccati_family(p) -> tuple[CommutingFamily, object]:
    """Commuting Riccati data as Z^2 + D Z + E = 0 plus the reduction trace.

    With commuting coefficients D = B1 - B2 and E = AC - B1 B2; the
    solutions are X = A^-1 Z - A^-1 B2.
    """
    from .riccati import reduce_riccati

    trace = reduce_riccati(p)
    e, d, _ = trace.unilateral.coeffs
    return CommutingFamily.from_matrices([e, d]), trace


# --------------------------------------------------------------------------
# symmetric quadratic


def symmetric_quadratic_solve(b, c) -> SolutionSet:
    """The 2^n solutions of X^2 + BX + XB + C = 0 from the square roots of B^2 - C.

    Sign patterns follow binary counting: bit i of the pattern index set
    means the negative principal root on eigenvalue i. A rational diagonal
    B^2 - C is used as is, even with repeated entries; the result then holds
    only the sign-pattern roots and ``notes["complete"]`` is False.
    """
    if _np(b).shape != _np(c).shape:
        raise DimensionMismatch("B and C must have the same shape")
    e = b @ b - c if _exact(b, c) else _np(b) @ _np(b) - _np(c)
    complete = True
    if isinstance(e, RatMatrix) and e.is_diagonal():
        # already diagonal: keep the coordinate basis; a repeated eigenvalue
        # then only yields the 2^n sign patterns of this basis, not all roots
        lam = np.array([complex(e[i, i]) for i in range(e.rows)])
        if np.any(lam == 0):
            raise NotGeneric("B^2 - C is singular", check="zero_eigenvalue")
        vecs = np.eye(e.rows, dtype=complex)
        complete = len(set(e[i, i] for i in range(e.rows))) == e.rows
    else:
        lam, vecs = _distinct_eigen(e, "B^2 - C", NotGeneric, nonzero=True)
    n = len(lam)
    root = np.sqrt(lam.astype(complex))
    pinv = np.linalg.inv(vecs)
    bn, cn = _np(b), _np(c)
    sols, residuals = [], []
    for pattern in range(2**n):
        signs = np.array([-1.0 if pattern >> i & 1 else 1.0 for i in range(n)])
        x = -bn + vecs @ np.diag(signs * root) @ pinv
        sols.append(x)
        residuals.append(max_norm(x @ x + bn @ x + x @ bn + cn))
    return SolutionSet(
        sols,
        count_expected=2**n,
        all_simple=len(dedup_matrices(sols)) == len(sols),
        method="eigen",
        notes={"residuals": residuals, "eigenvalues": lam, "complete": complete},
    )


# --------------------------------------------------------------------------
# binome Z^2 + TZ = 0


@dataclass(frozen=True)
class BinomeFamilyDescriptor:
    """One member of the r(n-r)-dimensional family attached to a subset of sigma(T).

    ``chosen_complement`` lists the n - r eigenvalue indices placed in the
    block D = -diag(lambda_chosen); the other r indices span the zero block.
    ``y_params`` fills the free (n-r) x r block Y.
    """

    t: object
    r: int
    chosen_complement: tuple
    y_params: object = None

    @property
    def n(self) -> int:
        return _np(self.t).shape[0]

    @property
    def dimension(self) -> int:
        return self.r * (self.n - self.r)

    def validate(self):
        n = self.n
        if not 0 <= self.r <= n:
            raise ValueError("r must lie in 0..n")
        idx = tuple(self.chosen_complement)
        if len(idx) != n - self.r or len(set(idx)) != len(idx) or any(not 0 <= i < n for i in idx):
            raise ValueError(f"chosen_complement must be {n - self.r} distinct indices in 0..{n - 1}")
        if self.y_params is not None and _np(self.y_params).shape != (n - self.r, self.r):
            raise DimensionMismatch(f"Y must be {(n - self.r)} x {self.r}")


def _binome_block(d_vals, y, r: int, n: int, order: list[int], zero, make):
    m = n - r
    entries = [[zero] * n for _ in range(n)]
    for a in range(m):
        entries[a][a] = d_vals[a]
        for bcol in range(r):
            entries[a][m + bcol] = y[a][bcol]
    # un-permute: position p in the blocked basis is eigen-index order[p]
    out = [[zero] * n for _ in range(n)]
    for p in range(n):
        for q in range(n):
            out[order[p]][order[q]] = entries[p][q]
    return make(out)


def binome_family_emit(desc: BinomeFamilyDescriptor):
    """Z with Z^2 + TZ = 0 from the descriptor.

    Exact (RatMatrix, zero residual) when T is a rational diagonal matrix
    and Y is rational; otherwise conjugated back from the eigenbasis of T.
    """
    desc.validate()
    n, r = desc.n, desc.r
    chosen = list(desc.chosen_complement)
    order = chosen + [i for i in range(n) if i not in chosen]
    t = desc.t
    y = desc.y_params
    if isinstance(t, RatMatrix) and t.is_diagonal() and (y is None or isinstance(y, RatMatrix)):
        lam = [t[i, i] for i in range(n)]
        if any(v == 0 for v in lam) or len(set(lam)) != n:
            raise NotGeneric("T needs distinct non-zero eigenvalues", check="repeated_eigenvalues")
        yrows = y.to_rows() if y is not None else [[Fraction(0)] * r for _ in range(n - r)]
        return _binome_block([-lam[i] for i in chosen], yrows, r, n, order, Fraction(0), RatMatrix.from_rows)
    lam, vecs = _distinct_eigen(t, "T", NotGeneric, nonzero=True)
    yrows = _np(y) if y is not None else np.zeros((n - r, r), dtype=complex)
    zp = _binome_block([-lam[i] for i in chosen], yrows, r, n, order, 0j, lambda e: np.array(e, dtype=complex))
    return vecs @ zp @ np.linalg.inv(vecs)


def binome_residual(t, z) -> float:
    if isinstance(t, RatMatrix) and isinstance(z, RatMatrix):
        res = z @ z + t @ z
        return float(max(abs(v) for v in res.entries))
    z = np.asarray(z, dtype=complex)
    return max_norm(z @ z + _np(t) @ z)


def binome_strata(n: int) -> dict[int, tuple[int, int]]:
    """r -> (dimension r(n-r), number of families C(n, r))."""
    return {r: (r * (n - r), math.comb(n, r)) for r in range(n + 1)}


def binome_stratum_count(n: int) -> tuple[int, int]:
    """Dimension and number of components of the top stratum.

    (p^2, C(2p, p)) for n = 2p and (p(p+1), 2 C(2p+1, p)) for n = 2p + 1.
    """
    if n < 1:
        raise ValueError("n must be positive")
    p = n // 2
    if n % 2 == 0:
        return p * p, math.comb(2 * p, p)
    return p * (p + 1), 2 * math.comb(2 * p + 1, p)


# --------------------------------------------------------------------------
# the non-commuting family of X^2 + BXB + C with commuting diagonal B, C


@dataclass
class CounterexampleReport:
    hilbert_dimension: int
    diagonal_solutions: list
    diagonal_residuals: list
    diagonal_commutators: list
    family_member: np.ndarray | None
    family_residual: float | None
    family_commutator: float | None
    slice_count: int | None

    @property
    def ok(self) -> bool:
        return (
            self.hilbert_dimension >= 1
            and len(self.diagonal_solutions) == 4
            and max(self.diagonal_commutators) <= COMMUTE_TOL
            and self.family_commutator is not None
            and self.family_commutator > 1e-6
        )


def commuting_counterexample_check(b: RatMatrix, c: RatMatrix, seed: int = 0) -> CounterexampleReport:
    """Solution set of X^2 + BXB + C = 0 for commuting diagonal 2x2 B, C.

    Besides the 4 diagonal (commuting) solutions the ideal carries a curve of
    non-commuting ones. A member is found by slicing with a random rational
    hyperplane and solving the resulting zero-dimensional system.
    """
    if not (b.is_diagonal() and c.is_diagonal()) or b.shape != (2, 2):
        raise ValueError("B and C must be 2x2 diagonal")
    spec = word_spec(2, ["XX", "BXB"], {"B": b}, c)
    system = matricize(spec)
    full = count_ideal(system, effective=False)
    hdim = full.summary.hilbert_dimension

    # diagonal solutions: x_i^2 + b_i^2 x_i + c_i = 0
    bn, cn = b.to_numpy(), c.to_numpy()
    roots = []
    for i in range(2):
        bi, ci = b[i, i], c[i, i]
        roots.append(aberth_roots([complex(ci), complex(bi * bi), 1.0]).roots)
    diag = [np.diag([r0, r1]) for r0 in roots[0] for r1 in roots[1]]
    diag = [system.numeric().newton(x) for x in diag]
    dres = [max_norm(spec.evaluate(x)) for x in diag]
    dcomm = [max(_rel_commutator(x, bn), _rel_commutator(x, cn)) for x in diag]

    member = member_res = member_comm = None
    slice_count = None
    rng = np.random.default_rng(seed)
    for _ in range(5):
        w = [int(v) for v in rng.integers(-3, 4, size=4)]
        if not any(w):
            continue
        ring = system.ring
        ell = MultiPoly(ring, {})
        for wi, g in zip(w, ring.gens()):
            ell = ell + g * wi
        ell = ell - ring.const(int(rng.integers(1, 4)))
        sliced = count_ideal(system, extra=[ell])
        if not sliced.summary.is_zero_dimensional or sliced.solutions is None:
            continue
        slice_count = sliced.nu
        best = None
        for x in sliced.solutions.matrices():
            cm = _rel_commutator(x, bn)
            if best is None or cm > best[1]:
                best = (x, cm)
        if best is not None and best[1] > 1e-6:
            member, member_comm = best
            member_res = max_norm(spec.evaluate(member))
            break
    return CounterexampleReport(hdim, diag, dres, dcomm, member, member_res, member_comm, slice_count)
