"""Numerical kernel: complex polynomials, Aberth-Ehrlich roots, nullspaces, eigenpairs.

Complex matrices are plain ``numpy`` arrays of dtype ``complex128``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NoConvergence

ROOT_RESIDUAL_TOL = 1e-10
RANK_TOL = 1e-9
DEDUP_TOL = 1e-6
LEADING_TOL = 1e-14

# fixed irrational rotation for the initial circle
_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


class CUniPoly:
    """Complex univariate polynomial with ascending coefficients.

    Trailing coefficients whose magnitude is at most ``leading_tol`` times
    the largest coefficient are dropped, so ``degree`` is the index of the
    last non-negligible coefficient.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence, leading_tol: float = LEADING_TOL):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        scale = np.max(np.abs(c)) if c.size else 0.0
        end = c.size
        while end > 1 and abs(c[end - 1]) <= leading_tol * scale:
            end -= 1
        self.coeffs = c[:end] if scale > 0 else np.zeros(1, dtype=complex)

    @property
    def degree(self) -> int:
        if self.coeffs.size == 1 and self.coeffs[0] == 0:
            return -1
        return self.coeffs.size - 1

    def __call__(self, x):
        acc = np.zeros_like(np.asarray(x, dtype=complex))
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc

    def derivative(self) -> "CUniPoly":
        if self.coeffs.size == 1:
            return CUniPoly([0.0])
        return CUniPoly(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def scale(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __repr__(self):
        return f"CUniPoly({self.coeffs.tolist()})"

    @classmethod
    def from_roots(cls, roots: Sequence, lead: complex = 1.0) -> "CUniPoly":
        c = np.array([lead], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(c)


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    pairwise_min_separation: float
    residuals: np.ndarray
    iterations: int

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _min_separation(z: np.ndarray) -> float:
    if z.size < 2:
        return float("inf")
    d = np.abs(z[:, None] - z[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def aberth_roots(
    p: CUniPoly | Sequence,
    tol: float = ROOT_RESIDUAL_TOL,
    max_iter: int = 500,
    polish_steps: int = 3,
) -> RootSet:
    """All complex roots of ``p`` by Aberth-Ehrlich simultaneous iteration.

    Start points lie on a circle of Cauchy-bound radius rotated by a fixed
    irrational angle, so runs are reproducible. Converged roots get a few
    Newton polishing steps. Residuals are relative to the coefficient scale.
    """
    if not isinstance(p, CUniPoly):
        p = CUniPoly(p)
    d = p.degree
    if d < 1:
        raise ValueError("aberth_roots needs degree >= 1")
    c = p.coeffs / p.coeffs[-1]
    monic = CUniPoly(c)
    dp = monic.derivative()
    if d == 1:
        z = np.array([-c[0]])
        return RootSet(z, float("inf"), np.abs(p(z)) / p.scale(), 0)

    radius = 1.0 + np.max(np.abs(c[:-1]))  # Cauchy bound
    z = radius * np.exp(1j * (2 * np.pi * np.arange(d) / d + _GOLDEN_ANGLE))

    converged = np.zeros(d, dtype=bool)
    it = 0
    for it in range(1, max_iter + 1):
        pv = monic(z)
        dv = dp(z)
        ratio = np.where(dv != 0, pv / np.where(dv != 0, dv, 1), pv)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        step = ratio / (1.0 - ratio * s)
        step[converged] = 0
        z = z - step
        converged |= (_relative_residuals(monic, z) <= 4e-16) | (
            np.abs(step) <= 1e-16 * np.maximum(1.0, np.abs(z))
        )
        if converged.all():
            break

    for _ in range(polish_steps):
        pv = monic(z)
        dv = dp(z)
        ok = np.abs(dv) > 1e-300
        z = np.where(ok, z - np.where(ok, pv / np.where(ok, dv, 1), 0), z)

    res = _relative_residuals(monic, z)
    if np.any(~np.isfinite(z)) or np.any(res > max(tol, 1e-6)):
        raise NoConvergence(f"Aberth iteration stalled after {it} steps", residuals=res)
    return RootSet(z, _min_separation(z), res, it)


def _relative_residuals(p: CUniPoly, z: np.ndarray) -> np.ndarray:
    # |p(z)| / (max|c_i| * max(1,|z|)^d); stays meaningful at exact zero roots
    denom = p.scale() * np.maximum(1.0, np.abs(z)) ** max(p.degree, 0)
    return np.abs(p(z)) / np.where(denom > 0, denom, 1.0)


def root_clusters(roots: Sequence, tol: float = 1e-6) -> list[list[int]]:
    """Group root indices whose pairwise distance is below ``tol`` (single linkage)."""
    roots = np.asarray(roots)
    n = len(roots)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= tol * max(1.0, abs(roots[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: (roots[g[0]].real, roots[g[0]].imag))


def nullspace(m: np.ndarray, rank_tol: float = RANK_TOL) -> list[np.ndarray]:
    """Orthonormal basis of the numerical right nullspace, as column vectors."""
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    rows, cols = m.shape
    _, s, vh = np.linalg.svd(m)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return [np.eye(cols, dtype=complex)[:, [i]] for i in range(cols)]
    sv = np.zeros(cols)
    sv[: s.size] = s
    return [vh[i].conj().reshape(cols, 1) for i in range(cols) if sv[i] <= rank_tol * smax]


def smallest_singular_vector(m: np.ndarray) -> tuple[np.ndarray, float]:
    _, s, vh = np.linalg.svd(np.asarray(m, dtype=complex))
    return vh[-1].conj().reshape(-1, 1), float(s[-1] / s[0]) if s[0] else 0.0


def charpoly_numeric(m: np.ndarray) -> CUniPoly:
    """det(tI - m) by evaluation on a circle and inverse DFT."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    radius = max(1.0, float(np.max(np.abs(m).sum(axis=1))))
    nodes = radius * np.exp(2j * np.pi * np.arange(n + 1) / (n + 1))
    vals = np.array([np.linalg.det(t * np.eye(n) - m) for t in nodes])
    coeffs = np.fft.fft(vals) / (n + 1)
    coeffs = coeffs / radius ** np.arange(n + 1)
    coeffs[-1] = 1.0
    return CUniPoly(coeffs)


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray  # columns, one per independent eigenvector found
    vector_values: np.ndarray  # eigenvalue attached to each column
    deficient: bool


def eigen(m: np.ndarray, cluster_tol: float = 1e-6, rank_tol: float = 1e-7) -> EigenResult:
    """Eigenvalues from the characteristic polynomial, eigenvectors from nullspaces.

    Clusters of (numerically) repeated eigenvalues are treated together; if
    a cluster of size k yields fewer than k independent eigenvectors the
    result is flagged ``deficient``. No Jordan chains are computed.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch("eigen needs a square matrix")
    n = m.shape[0]
    if n == 1:
        return EigenResult(m[0].copy(), np.ones((1, 1), complex), m[0].copy(), False)
    values = aberth_roots(charpoly_numeric(m), tol=1e-8).roots
    values = _refine_eigenvalues(m, values)
    vecs, vec_vals = [], []
    deficient = False
    for group in root_clusters(values, cluster_tol):
        lam = np.mean(values[group])
        basis = nullspace(m - lam * np.eye(n), rank_tol)
        if not basis:
            basis = [smallest_singular_vector(m - lam * np.eye(n))[0]]
        if len(basis) < len(group):
            deficient = True
        for v in basis[: len(group)]:
            vecs.append(v[:, 0] / np.linalg.norm(v))
            vec_vals.append(lam)
    return EigenResult(values, np.array(vecs).T, np.array(vec_vals), deficient)


def _refine_eigenvalues(m: np.ndarray, values: np.ndarray, steps: int = 2) -> np.ndarray:
    """Rayleigh-quotient polish of simple eigenvalues using singular vectors."""
    n = m.shape[0]
    out = values.copy()
    clusters = root_clusters(values, 1e-6)
    for group in clusters:
        if len(group) != 1:
            continue
        i = group[0]
        lam = out[i]
        for _ in range(steps):
            u, s, vh = np.linalg.svd(m - lam * np.eye(n))
            x = vh[-1].conj()
            y = u[:, -1]
            denom = np.vdot(y, x)
            if abs(denom) < 1e-12:
                break
            lam = np.vdot(y, m @ x) / denom
        out[i] = lam
    return out


def poly_of_matrix(p: CUniPoly | Sequence, x: np.ndarray) -> np.ndarray:
    """Horner evaluation of a scalar polynomial at a square matrix."""
    if not isinstance(p, CUniPoly):
        p = CUniPoly(p)
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionMismatch("poly_of_matrix needs a square matrix")
    n = x.shape[0]
    acc = np.zeros((n, n), dtype=complex)
    for c in p.coeffs[::-1]:
        acc = acc @ x + c * np.eye(n)
    return acc


def max_norm(m) -> float:
    return float(np.max(np.abs(np.asarray(m)))) if np.size(m) else 0.0


def dedup_matrices(mats: Sequence[np.ndarray], tol: float = DEDUP_TOL) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for m in mats:
        if all(max_norm(m - o) > tol * max(1.0, max_norm(o)) for o in out):
            out.append(m)
    return out


def match_solution_sets(a: Sequence[np.ndarray], b: Sequence[np.ndarray], tol: float = DEDUP_TOL) -> bool:
    """True when the two lists are the same set of matrices up to ``tol`` (max-norm, relative)."""
    if len(a) != len(b):
        return False
    unused = list(range(len(b)))
    for x in a:
        hit = None
        for j in unused:
            if max_norm(x - b[j]) <= tol * max(1.0, max_norm(x)):
                hit = j
                break
        if hit is None:
            return False
        unused.remove(hit)
    return True
