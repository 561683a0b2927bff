"""Matricization of matrix equations, Jacobians, and Groebner-based counting.

An equation is a sum of words in constant matrices and the unknown ``X``
plus an optional constant ``F``; it becomes n^2 polynomial equations in the
entries ``x_ij`` (row-major order throughout, for both equations and
unknowns).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import DegreeCapExceeded, DimensionMismatch, ParseError, PositiveDimensional
from .exactalg.groebner import (
    DEFAULT_PAIR_BUDGET,
    GroebnerBasis,
    IdealSummary,
    ShapeBasis,
    buchberger,
    find_shape_basis,
    point_multiplicity,
    quotient_dimension,
)
from .exactalg.multipoly import MultiPoly, PolyRing
from .exactalg.rational import RatMatrix, format_rat, parse_rat
from .matpoly import SolutionSet
from .numlin import CUniPoly, aberth_roots, dedup_matrices, max_norm

UNKNOWN = "X"
MAX_WORD_DEGREE = 4


@dataclass(frozen=True)
class Term:
    word: tuple
    coef: Fraction = Fraction(1)

    @property
    def degree(self) -> int:
        return sum(1 for f in self.word if f == UNKNOWN)


@dataclass(frozen=True)
class EquationSpec:
    """``sum_t coef_t * word_t + F = 0`` with words over named n x n constants and X."""

    n: int
    terms: tuple
    constants: Mapping[str, RatMatrix] = field(default_factory=dict)
    F: RatMatrix | None = None

    def __post_init__(self):
        if self.n < 1:
            raise DimensionMismatch("matrix size must be positive")
        for name, m in self.constants.items():
            if name == UNKNOWN:
                raise ParseError("'X' is reserved for the unknown")
            if m.shape != (self.n, self.n):
                raise DimensionMismatch(f"constant {name} is {m.shape}, expected {self.n}x{self.n}")
        if self.F is not None and self.F.shape != (self.n, self.n):
            raise DimensionMismatch("F has the wrong size")
        for t in self.terms:
            if not t.word:
                raise ParseError("empty word")
            for f in t.word:
                if f != UNKNOWN and f not in self.constants:
                    raise ParseError(f"word uses undefined constant {f!r}")

    @property
    def degree(self) -> int:
        return max((t.degree for t in self.terms), default=0)

    def homogeneous_part(self) -> "EquationSpec":
        """Top-degree words only, constant dropped."""
        d = self.degree
        return EquationSpec(self.n, tuple(t for t in self.terms if t.degree == d), self.constants, None)

    def with_rhs(self, y: RatMatrix) -> "EquationSpec":
        """The equation ``lhs(X) = y``, i.e. F replaced by F - y."""
        f = (self.F if self.F is not None else RatMatrix.zeros(self.n)) - y
        return EquationSpec(self.n, self.terms, self.constants, f)

    def evaluate(self, x) -> np.ndarray:
        """Direct matrix arithmetic, independent of the matricized polynomials."""
        x = np.asarray(x, dtype=complex)
        num = {k: v.to_numpy() for k, v in self.constants.items()}
        num[UNKNOWN] = x
        out = np.zeros((self.n, self.n), dtype=complex)
        for t in self.terms:
            prod = np.eye(self.n, dtype=complex)
            for f in t.word:
                prod = prod @ num[f]
            out = out + complex(t.coef) * prod
        if self.F is not None:
            out = out + self.F.to_numpy()
        return out

    def evaluate_exact(self, x: RatMatrix) -> RatMatrix:
        mats = dict(self.constants)
        mats[UNKNOWN] = x
        out = RatMatrix.zeros(self.n)
        for t in self.terms:
            prod = RatMatrix.identity(self.n)
            for f in t.word:
                prod = prod @ mats[f]
            out = out + prod.scale(t.coef)
        if self.F is not None:
            out = out + self.F
        return out

    # JSON -----------------------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for t in self.terms:
            d = {"word": list(t.word)}
            if t.coef != 1:
                d["coef"] = format_rat(t.coef)
            terms.append(d)
        out = {
            "n": self.n,
            "terms": terms,
            "constants": {k: v.to_json() for k, v in self.constants.items()},
        }
        if self.F is not None:
            out["F"] = self.F.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "EquationSpec":
        try:
            n = int(data["n"])
            constants = {k: RatMatrix.from_rows(v) for k, v in data.get("constants", {}).items()}
            terms = tuple(
                Term(tuple(t["word"]), parse_rat(t.get("coef", 1))) for t in data["terms"]
            )
            f = RatMatrix.from_rows(data["F"]) if data.get("F") is not None else None
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed equation: {exc}") from exc
        return cls(n, terms, constants, f)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def word_spec(n: int, words: Sequence, constants: Mapping[str, RatMatrix], F: RatMatrix | None = None) -> EquationSpec:
    """Convenience constructor: ``words`` are strings like ``"AXBX"`` or lists, optionally ``(coef, word)``."""
    terms = []
    for w in words:
        coef = 1
        if isinstance(w, tuple) and len(w) == 2 and not isinstance(w[0], str):
            coef, w = w
        if isinstance(w, str):
            w = _split_word(w, constants)
        terms.append(Term(tuple(w), parse_rat(coef)))
    return EquationSpec(n, tuple(terms), dict(constants), F)


def _split_word(text: str, constants: Mapping) -> list[str]:
    out, i = [], 0
    names = sorted(set(constants) | {UNKNOWN}, key=len, reverse=True)
    while i < len(text):
        for name in names:
            if text.startswith(name, i):
                out.append(name)
                i += len(name)
                break
        else:
            raise ParseError(f"cannot split word {text!r} at position {i}")
    return out


# --------------------------------------------------------------------------
# matricization


def unknown_names(n: int) -> list[str]:
    if n <= 9:
        return [f"x{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    return [f"x{i + 1}_{j + 1}" for i in range(n) for j in range(n)]


@dataclass(frozen=True)
class MatricizedSystem:
    ring: PolyRing
    polys: tuple  # n^2 polynomials, entry (i, j) at index i*n + j
    n: int

    def evaluate(self, x) -> np.ndarray:
        pt = [complex(v) for v in np.asarray(x, dtype=complex).reshape(-1)]
        return np.array([complex(p.evaluate(pt)) for p in self.polys]).reshape(self.n, self.n)

    def evaluate_exact(self, x: RatMatrix) -> RatMatrix:
        pt = list(x.entries)
        return RatMatrix(self.n, self.n, [p.evaluate(pt) for p in self.polys])

    def numeric(self) -> "NumericSystem":
        return NumericSystem(self)


def matricize(spec: EquationSpec, order: str = "grevlex") -> MatricizedSystem:
    """Expand every word by symbolic matrix multiplication over Q[x_11..x_nn]."""
    if spec.degree > MAX_WORD_DEGREE:
        raise DegreeCapExceeded(f"word degree {spec.degree} exceeds {MAX_WORD_DEGREE}")
    n = spec.n
    ring = PolyRing(unknown_names(n), order)
    zero = ring.zero()
    xmat = [[ring.gen(i * n + j) for j in range(n)] for i in range(n)]

    def const_mat(m: RatMatrix):
        return [[ring.const(m[i, j]) for j in range(n)] for i in range(n)]

    def matmul(a, b):
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for k in range(n):
                    if a[i][k].terms and b[k][j].terms:
                        acc = acc + a[i][k] * b[k][j]
                row.append(acc)
            out.append(row)
        return out

    mats = {name: const_mat(m) for name, m in spec.constants.items()}
    mats[UNKNOWN] = xmat
    total = [[zero] * n for _ in range(n)]
    for t in spec.terms:
        prod = mats[t.word[0]]
        for f in t.word[1:]:
            prod = matmul(prod, mats[f])
        total = [[total[i][j] + prod[i][j] * t.coef for j in range(n)] for i in range(n)]
    if spec.F is not None:
        total = [[total[i][j] + spec.F[i, j] for j in range(n)] for i in range(n)]
    return MatricizedSystem(ring, tuple(total[i][j] for i in range(n) for j in range(n)), n)


class NumericSystem:
    """Vectorised float evaluation of a matricized system and its Jacobian."""

    def __init__(self, system: MatricizedSystem):
        self.n = system.n
        nv = system.ring.nvars
        self._f = [self._compile(p, nv) for p in system.polys]
        self._j = [[self._compile(p.diff(v), nv) for v in range(nv)] for p in system.polys]

    @staticmethod
    def _compile(p: MultiPoly, nv: int):
        if not p.terms:
            return np.zeros((0, nv), dtype=int), np.zeros(0, dtype=complex)
        exps = np.array(list(p.terms.keys()), dtype=int)
        coefs = np.array([complex(float(c)) for c in p.terms.values()])
        return exps, coefs

    @staticmethod
    def _eval(compiled, pt: np.ndarray) -> complex:
        exps, coefs = compiled
        if coefs.size == 0:
            return 0j
        return complex(np.sum(coefs * np.prod(pt[None, :] ** exps, axis=1)))

    def residual(self, x) -> np.ndarray:
        pt = np.asarray(x, dtype=complex).reshape(-1)
        return np.array([self._eval(c, pt) for c in self._f])

    def jacobian(self, x) -> np.ndarray:
        pt = np.asarray(x, dtype=complex).reshape(-1)
        return np.array([[self._eval(c, pt) for c in row] for row in self._j])

    def newton(self, x, steps: int = 4) -> np.ndarray:
        x = np.asarray(x, dtype=complex).reshape(-1).copy()
        for _ in range(steps):
            r = self.residual(x)
            if np.max(np.abs(r)) <= 1e-15:
                break
            try:
                step = np.linalg.solve(self.jacobian(x), r)
            except np.linalg.LinAlgError:
                break
            cand = x - step
            if np.max(np.abs(self.residual(cand))) >= np.max(np.abs(r)):
                break
            x = cand
        return x.reshape(self.n, self.n)


# --------------------------------------------------------------------------
# Jacobians


@dataclass(frozen=True)
class JacobianReport:
    point: object
    jacobian: object  # RatMatrix (exact) or ndarray
    determinant: object
    singular: bool


def jacobian_at(spec: EquationSpec, x0, tol: float = 1e-10) -> JacobianReport:
    """d f_ij / d x_kl at ``x0``; rows (i, j) and columns (k, l) in row-major order.

    With this layout the Jacobian of X^2 + DX is X⊗I + I⊗X^T + D⊗I.
    """
    system = matricize(spec)
    n = spec.n
    nv = n * n
    exact = isinstance(x0, RatMatrix)
    if exact:
        if x0.shape != (n, n):
            raise DimensionMismatch("point has the wrong size")
        pt = list(x0.entries)
        jac = RatMatrix(nv, nv, [p.diff(v).evaluate(pt) for p in system.polys for v in range(nv)])
        det = jac.det()
        return JacobianReport(x0, jac, det, det == 0)
    x0 = np.asarray(x0, dtype=complex)
    if x0.shape != (n, n):
        raise DimensionMismatch("point has the wrong size")
    jac = system.numeric().jacobian(x0)
    det = complex(np.linalg.det(jac))
    s = np.linalg.svd(jac, compute_uv=False)
    singular = bool(s[0] == 0 or s[-1] <= tol * s[0])
    return JacobianReport(x0, jac, det, singular)


# --------------------------------------------------------------------------
# counting


@dataclass
class CountResult:
    summary: IdealSummary
    basis: GroebnerBasis
    system: MatricizedSystem
    shape: ShapeBasis | None = None
    solutions: SolutionSet | None = None
    method: str = "groebner"

    @property
    def nu(self):
        return self.summary.quotient_dimension

    @property
    def effective(self) -> bool:
        return self.shape is not None

    def multiplicity_at(self, point: Sequence) -> int:
        """Multiplicity of a rational solution (0 when it is not a solution)."""
        return point_multiplicity(self.basis, [Fraction(p) for p in point])

    def sole_solution(self, point: Sequence) -> bool:
        """True when ``point`` carries the whole count, i.e. it is the only solution."""
        return self.summary.is_zero_dimensional and self.multiplicity_at(point) == self.nu


def count_ideal(
    system: MatricizedSystem,
    extra: Sequence[MultiPoly] = (),
    order: str = "grevlex",
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    effective: bool = True,
) -> CountResult:
    polys = [p for p in system.polys if p.terms] + list(extra)
    if not polys:
        raise PositiveDimensional("equation is identically zero", system.ring.nvars)
    gb = buchberger(polys, order=order, pair_budget=pair_budget)
    summary = quotient_dimension(gb)
    result = CountResult(summary, gb, system)
    if effective and summary.is_zero_dimensional and summary.quotient_dimension:
        result.shape = find_shape_basis(gb)
        if result.shape is not None:
            result.solutions = solve_shape(result.shape, system)
    return result


def count_solutions(
    spec: EquationSpec,
    order: str = "grevlex",
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    effective: bool = True,
    require_finite: bool = False,
) -> CountResult:
    """Matricize, compute a reduced Groebner basis and count solutions with multiplicity.

    When the ideal is zero-dimensional and in shape position the solutions
    are also produced numerically (roots of the eliminant, back-substituted
    and Newton-polished). A positive-dimensional ideal yields a summary with
    its Hilbert dimension, or raises when ``require_finite`` is set.
    """
    system = matricize(spec, order)
    result = count_ideal(system, order=order, pair_budget=pair_budget, effective=effective)
    if require_finite and not result.summary.is_zero_dimensional:
        raise PositiveDimensional("solution set is positive-dimensional", result.summary.hilbert_dimension)
    return result


def solve_shape(shape: ShapeBasis, system: MatricizedSystem) -> SolutionSet:
    """Numerical points from a shape basis, polished by Newton on the system."""
    n = system.n
    p = CUniPoly([complex(float(c)) for c in shape.minpoly.coeffs])
    roots = aberth_roots(p, tol=1e-6).roots
    numeric = system.numeric()
    sols = []
    residuals = []
    for t in roots:
        pt = np.array([_eval_rat_poly(q, t) for q in shape.coordinates])
        x = numeric.newton(pt.reshape(n, n))
        sols.append(x)
        residuals.append(float(np.max(np.abs(numeric.residual(x)))))
    distinct = dedup_matrices(sols)
    return SolutionSet(
        sols,
        count_expected=shape.degree,
        all_simple=len(distinct) == len(sols),
        method="groebner",
        notes={"residuals": residuals},
    )


def _eval_rat_poly(q, t: complex) -> complex:
    acc = 0j
    for c in reversed(q.coeffs):
        acc = acc * t + float(c)
    return acc


def is_degenerate(result: CountResult) -> bool:
    """Positive-dimensional, empty, or non-radical (some solution is multiple)."""
    s = result.summary
    return not s.is_zero_dimensional or not s.quotient_dimension or result.shape is None


@dataclass
class InfinityReport:
    homogeneous: CountResult
    hilbert_dimension: int
    nu_homogeneous: int | None
    only_zero: bool
    affine_bezout_count: int | None  # 2^(n^2) for quadratic specs without points at infinity

    @property
    def has_solutions_at_infinity(self) -> bool:
        return not self.only_zero


def homogeneous_infinity_check(
    spec: EquationSpec, pair_budget: int = DEFAULT_PAIR_BUDGET
) -> InfinityReport:
    """Classify the non-zero solutions of the top-degree part (the points at infinity).

    If the homogeneous part vanishes only at X = 0, that point carries the
    full Bezout number d^(n^2) and the affine equation has no solutions at
    infinity; otherwise the report carries the dimension of the cone.
    """
    homog = spec.homogeneous_part()
    res = count_solutions(homog, pair_budget=pair_budget, effective=False)
    zero = [0] * (spec.n ** 2)
    only_zero = res.summary.is_zero_dimensional and bool(res.nu) and res.multiplicity_at(zero) == res.nu
    bezout = spec.degree ** (spec.n ** 2) if only_zero else None
    return InfinityReport(res, res.summary.hilbert_dimension, res.nu, only_zero, bezout)
