"""Matrix polynomials: the lambda-determinant and the eigenvalue-method solver.

A solvent of ``A_k X^k + ... + A_1 X + A_0 = 0`` is assembled from n
eigenpairs of the polynomial eigenproblem: ``X_J = P_J D_J P_J^{-1}``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapExceeded, DimensionMismatch, NotGeneric
from .exactalg.rational import RatMatrix, RatUniPoly, lagrange_interpolate
from .numlin import (
    DEDUP_TOL,
    RANK_TOL,
    ROOT_RESIDUAL_TOL,
    CUniPoly,
    aberth_roots,
    dedup_matrices,
    max_norm,
    poly_of_matrix,
)

ENUMERATION_CAP = 20_000
SOLVENT_TOL = 1e-8
COND_LIMIT = 1e12


class MatPolynomial:
    """The lambda-polynomial ``sum_i lambda^i A_i`` with square n x n coefficients.

    Coefficients may be :class:`RatMatrix` (exact path) or anything numpy can
    turn into a square complex array.
    """

    def __init__(self, coeffs: Sequence):
        if len(coeffs) < 2:
            raise ValueError("need at least A_0 and A_1")
        self.exact = all(isinstance(a, RatMatrix) for a in coeffs)
        if self.exact:
            n = coeffs[0].rows
            if any(a.shape != (n, n) for a in coeffs):
                raise DimensionMismatch("all coefficients must be n x n")
            self.coeffs = list(coeffs)
            if coeffs[-1].is_zero():
                raise ValueError("leading coefficient must be non-zero")
        else:
            arrs = [a.to_numpy() if isinstance(a, RatMatrix) else np.asarray(a, dtype=complex) for a in coeffs]
            n = arrs[0].shape[0]
            if any(a.shape != (n, n) for a in arrs):
                raise DimensionMismatch("all coefficients must be n x n")
            if not np.any(arrs[-1]):
                raise ValueError("leading coefficient must be non-zero")
            self.coeffs = arrs
        self.n = n
        self.k = len(coeffs) - 1

    @classmethod
    def from_rows(cls, coeffs: Sequence[Sequence[Sequence]]) -> "MatPolynomial":
        return cls([RatMatrix.from_rows(c) for c in coeffs])

    def numeric(self) -> list[np.ndarray]:
        if self.exact:
            return [a.to_numpy() for a in self.coeffs]
        return list(self.coeffs)

    def at(self, lam) -> np.ndarray:
        """Evaluate ``sum lam^i A_i`` numerically."""
        out = np.zeros((self.n, self.n), dtype=complex)
        for a in reversed(self.numeric()):
            out = out * lam + a
        return out

    def derivative_at(self, lam) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=complex)
        coeffs = self.numeric()
        for i in range(self.k, 0, -1):
            out = out * lam + i * coeffs[i]
        return out

    def exact_at(self, lam) -> RatMatrix:
        out = RatMatrix.zeros(self.n)
        for a in reversed(self.coeffs):
            out = out.scale(lam) + a
        return out

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Right evaluation ``sum A_i X^i``."""
        x = np.asarray(x, dtype=complex)
        out = np.zeros((self.n, self.n), dtype=complex)
        power = np.eye(self.n, dtype=complex)
        for a in self.numeric():
            out = out + a @ power
            power = power @ x
        return out

    def normalized(self) -> "MatPolynomial":
        """Left-multiply by A_k^{-1} so that the leading coefficient is I."""
        if self.exact:
            inv = self.coeffs[-1].inverse()
            return MatPolynomial([inv @ a for a in self.coeffs])
        inv = np.linalg.inv(self.coeffs[-1])
        return MatPolynomial([inv @ a for a in self.coeffs])

    def __repr__(self):
        return f"MatPolynomial(n={self.n}, k={self.k}, exact={self.exact})"


def specialization(n: int, k: int) -> MatPolynomial:
    """The sparse rational instance whose lambda-determinant is ``lambda^{nk} - lambda - 1``.

    A_k = I, the middle coefficients vanish, A_1 has the single entry
    (-1)^n at (1, n), A_0 has ones on the subdiagonal and (-1)^n at (1, n).
    """
    if n < 1 or k < 2:
        raise ValueError("specialization needs n >= 1, k >= 2")
    sign = (-1) ** n
    zero = RatMatrix.zeros(n)
    a1 = [[0] * n for _ in range(n)]
    a1[0][n - 1] = sign
    a0 = [[0] * n for _ in range(n)]
    for i in range(n - 1):
        a0[i + 1][i] = 1
    a0[0][n - 1] += sign
    coeffs = [RatMatrix.from_rows(a0), RatMatrix.from_rows(a1)] + [zero] * (k - 2) + [RatMatrix.identity(n)]
    return MatPolynomial(coeffs)


def det_lambda(mp: MatPolynomial) -> RatUniPoly | CUniPoly:
    """phi(lambda) = det(sum lambda^i A_i) by sampling and interpolation.

    Exact input: Lagrange interpolation at the integers 0..nk. Complex
    input: samples on a circle, recovered by an inverse DFT.
    """
    deg = mp.n * mp.k
    if mp.exact:
        nodes = list(range(deg + 1))
        values = [mp.exact_at(t).det() for t in nodes]
        return lagrange_interpolate(nodes, values)
    scale = max(1.0, max(max_norm(a) for a in mp.coeffs))
    radius = scale
    m = deg + 1
    nodes = radius * np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.array([np.linalg.det(mp.at(t)) for t in nodes])
    coeffs = np.fft.fft(vals) / m / radius ** np.arange(m)
    return CUniPoly(coeffs)


def _as_complex_poly(phi) -> CUniPoly:
    if isinstance(phi, RatUniPoly):
        return CUniPoly([complex(float(c)) for c in phi.coeffs])
    return phi


@dataclass(frozen=True)
class Solvent:
    x: np.ndarray
    subset: tuple
    residual: float
    eigenvalues: tuple = ()


@dataclass
class SolutionSet:
    """Verified solutions plus bookkeeping on how they were obtained."""

    solutions: list
    count_expected: int | str = "unknown"
    all_simple: bool = True
    method: str = ""
    notes: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    def matrices(self) -> list[np.ndarray]:
        return [s.x if isinstance(s, Solvent) else np.asarray(s) for s in self.solutions]


@dataclass(frozen=True)
class EigenData:
    phi: object
    roots: np.ndarray
    vectors: np.ndarray  # column i spans ker P(roots[i])


def _polish_root(mp: MatPolynomial, lam: complex, steps: int = 3) -> complex:
    for _ in range(steps):
        u, s, vh = np.linalg.svd(mp.at(lam))
        x = vh[-1].conj()
        y = u[:, -1]
        denom = np.vdot(y, mp.derivative_at(lam) @ x)
        if abs(denom) < 1e-300:
            break
        delta = np.vdot(y, mp.at(lam) @ x) / denom
        lam = lam - delta
        if abs(delta) <= 1e-16 * max(1.0, abs(lam)):
            break
    return lam


def eigen_data(mp: MatPolynomial, rank_tol: float = RANK_TOL, root_tol: float = ROOT_RESIDUAL_TOL) -> EigenData:
    """Roots of phi and one kernel vector per root, with the genericity checks."""
    phi = det_lambda(mp)
    deg = mp.n * mp.k
    if isinstance(phi, RatUniPoly):
        if phi.degree != deg:
            raise NotGeneric(f"phi has degree {phi.degree} < nk = {deg} (A_k singular)", check="degree")
        if not phi.is_squarefree():
            raise NotGeneric("phi has a repeated root", check="repeated_roots")
    elif phi.degree != deg:
        raise NotGeneric(f"phi has degree {phi.degree} < nk = {deg} (A_k singular)", check="degree")
    roots = aberth_roots(_as_complex_poly(phi), tol=root_tol).roots
    roots = np.array([_polish_root(mp, lam) for lam in roots])
    sep = np.min(
        [abs(roots[i] - roots[j]) / max(1.0, abs(roots[i])) for i in range(deg) for j in range(i + 1, deg)]
        or [np.inf]
    )
    if sep < 1e-7:
        raise NotGeneric("phi has numerically repeated roots", check="repeated_roots")
    vecs = []
    for lam in roots:
        _, s, vh = np.linalg.svd(mp.at(lam))
        small = int(np.sum(s <= rank_tol * s[0]))
        if small > 1:
            raise NotGeneric(f"kernel at lambda={lam:.6g} has dimension {small}", check="kernel_dim")
        if small == 0 and s[-1] > 1e-6 * s[0]:
            raise NotGeneric(f"no kernel vector at lambda={lam:.6g}", check="kernel_dim")
        v = vh[-1].conj()
        vecs.append(v / np.linalg.norm(v))
    return EigenData(phi, roots, np.array(vecs).T)


def _newton_refine(mp: MatPolynomial, x: np.ndarray, steps: int = 2) -> np.ndarray:
    """Newton steps on F(X) = sum A_i X^i with the Kronecker Jacobian (row-major vec)."""
    n = mp.n
    coeffs = mp.numeric()
    for _ in range(steps):
        f = mp.apply(x)
        if max_norm(f) <= 1e-15:
            break
        powers = [np.eye(n, dtype=complex)]
        for _ in range(mp.k):
            powers.append(powers[-1] @ x)
        jac = np.zeros((n * n, n * n), dtype=complex)
        for i in range(1, mp.k + 1):
            for a in range(i):
                b = i - 1 - a
                jac += np.kron(coeffs[i] @ powers[a], powers[b].T)
        try:
            step = np.linalg.solve(jac, f.reshape(-1))
        except np.linalg.LinAlgError:
            break
        candidate = x - step.reshape(n, n)
        if max_norm(mp.apply(candidate)) >= max_norm(f):
            break
        x = candidate
    return x


def build_solvent(mp: MatPolynomial, data: EigenData, subset: Sequence[int], refine: bool = True) -> Solvent:
    idx = list(subset)
    p = data.vectors[:, idx]
    cond = np.linalg.cond(p)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NotGeneric(f"eigenvector matrix for subset {tuple(idx)} is singular (cond={cond:.3g})", check="singular_pj")
    d = np.diag(data.roots[idx])
    x = p @ d @ np.linalg.inv(p)
    if refine:
        x = _newton_refine(mp, x)
    return Solvent(x, tuple(idx), max_norm(mp.apply(x)), tuple(data.roots[idx]))


def iter_solvents(
    mp: MatPolynomial, subsets: Iterable[Sequence[int]] | None = None, data: EigenData | None = None
) -> Iterator[Solvent]:
    """Stream solvents for caller-selected index subsets (all subsets by default)."""
    data = data or eigen_data(mp)
    if subsets is None:
        subsets = itertools.combinations(range(mp.n * mp.k), mp.n)
    for subset in subsets:
        yield build_solvent(mp, data, subset)


def solve_unilateral(
    mp: MatPolynomial,
    cap: int = ENUMERATION_CAP,
    normalize: bool = False,
    rank_tol: float = RANK_TOL,
    root_tol: float = ROOT_RESIDUAL_TOL,
    dedup_tol: float = DEDUP_TOL,
) -> SolutionSet:
    """All C(kn, n) solvents of a generic unilateral equation.

    Raises :class:`NotGeneric` naming the failed check (degree,
    repeated_roots, kernel_dim, singular_pj) and :class:`CapExceeded` when
    the subset count exceeds ``cap``; use :func:`iter_solvents` then.
    """
    if mp.n < 1 or mp.k < 1:
        raise ValueError("need n, k >= 1")
    total = math.comb(mp.n * mp.k, mp.n)
    if total > cap:
        raise CapExceeded(f"C({mp.n * mp.k},{mp.n}) = {total} solvents exceeds the cap {cap}")
    work = mp.normalized() if normalize else mp
    data = eigen_data(work, rank_tol, root_tol)
    sols = list(iter_solvents(work, data=data))
    distinct = dedup_matrices([s.x for s in sols], dedup_tol)
    return SolutionSet(
        sols,
        count_expected=total,
        all_simple=len(distinct) == len(sols),
        method="eigen",
        notes={"roots": data.roots},
    )


def verify_solvent(mp: MatPolynomial, x: np.ndarray) -> tuple[float, float]:
    """Residuals max|sum A_i X^i| and max|phi(X)|."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (mp.n, mp.n):
        raise DimensionMismatch("solvent has the wrong size")
    phi = _as_complex_poly(det_lambda(mp))
    return max_norm(mp.apply(x)), max_norm(poly_of_matrix(phi, x))
