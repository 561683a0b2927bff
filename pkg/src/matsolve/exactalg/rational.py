"""Exact rationals, dense rational matrices and univariate rational polynomials.

Scalars are :class:`fractions.Fraction`; it already keeps numerator and
denominator coprime with a positive denominator, so ``Rat`` is just an alias.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..errors import DimensionMismatch, ParseError, SingularMatrix, ZeroPolynomial

Rat = Fraction


def parse_rat(value) -> Fraction:
    """Parse ``"p/q"``, an integer, or a Fraction into a Fraction.

    Floats are rejected: they would silently smuggle binary rounding into
    the exact pipeline.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().replace("−", "-")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {value!r}") from exc
    raise ParseError(f"not a rational: {value!r}")


def format_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class RatMatrix:
    """Dense matrix of Fractions stored row-major in a tuple."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(parse_rat(e) for e in entries)
        if rows < 1 or cols < 1 or len(entries) != rows * cols:
            raise DimensionMismatch(f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    # construction -------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise DimensionMismatch("ragged or empty row list")
        return cls(len(rows), len(rows[0]), [e for r in rows for e in r])

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, [int(i == j) for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RatMatrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def diag(cls, values: Sequence) -> "RatMatrix":
        n = len(values)
        return cls(n, n, [values[i] if i == j else 0 for i in range(n) for j in range(n)])

    # access ---------------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def to_numpy(self, dtype=complex) -> np.ndarray:
        return np.array([float(e) for e in self.entries], dtype=float).reshape(self.rows, self.cols).astype(dtype)

    def to_json(self) -> list[list[str]]:
        return [[format_rat(e) for e in self.row(i)] for i in range(self.rows)]

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"RatMatrix({self.to_json()})"

    # arithmetic -----------------------------------------------------------
    def _check_same(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same(other)
        return RatMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_same(other)
        return RatMatrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c) -> "RatMatrix":
        c = parse_rat(c)
        return RatMatrix(self.rows, self.cols, [c * a for a in self.entries])

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        ocols = [other.entries[j::other.cols] for j in range(other.cols)]
        for i in range(self.rows):
            r = self.row(i)
            for col in ocols:
                out.append(sum((a * b for a, b in zip(r, col) if a and b), Fraction(0)))
        return RatMatrix(self.rows, other.cols, out)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def commutator(self, other: "RatMatrix") -> "RatMatrix":
        return self @ other - other @ self

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def power(self, k: int) -> "RatMatrix":
        if not self.is_square:
            raise DimensionMismatch("power of a non-square matrix")
        out = RatMatrix.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out

    # elimination ----------------------------------------------------------
    def det(self) -> Fraction:
        """Determinant by Bareiss fraction-free elimination."""
        if not self.is_square:
            raise DimensionMismatch("determinant of a non-square matrix")
        n = self.rows
        # clear denominators row by row so that Bareiss runs over the integers
        scale = Fraction(1)
        m = []
        for i in range(n):
            r = self.row(i)
            lcm = 1
            for e in r:
                lcm = lcm * e.denominator // _gcd(lcm, e.denominator)
            scale /= lcm
            m.append([int(e * lcm) for e in r])
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for p in range(k + 1, n):
                    if m[p][k] != 0:
                        m[k], m[p] = m[p], m[k]
                        sign = -sign
                        break
                else:
                    return Fraction(0)
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sign * m[n - 1][n - 1] * scale

    def rref(self) -> tuple["RatMatrix", list[int]]:
        """Reduced row echelon form and pivot columns."""
        m = self.to_rows()
        pivots = []
        r = 0
        for c in range(self.cols):
            p = next((i for i in range(r, self.rows) if m[i][c] != 0), None)
            if p is None:
                continue
            m[r], m[p] = m[p], m[r]
            inv = 1 / m[r][c]
            m[r] = [e * inv for e in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return RatMatrix.from_rows(m), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def inverse(self) -> "RatMatrix":
        if not self.is_square:
            raise DimensionMismatch("inverse of a non-square matrix")
        n = self.rows
        aug = RatMatrix(n, 2 * n, [e for i in range(n) for e in self.row(i) + RatMatrix.identity(n).row(i)])
        red, pivots = aug.rref()
        if len(pivots) < n or pivots[n - 1] != n - 1:
            raise SingularMatrix("matrix is not invertible")
        return RatMatrix(n, n, [red[i, j] for i in range(n) for j in range(n, 2 * n)])

    def kernel(self) -> list["RatMatrix"]:
        """Basis of the right nullspace as column vectors."""
        red, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for r, p in enumerate(pivots):
                v[p] = -red[r, f]
            basis.append(RatMatrix(self.cols, 1, v))
        return basis

    def solve(self, rhs: "RatMatrix") -> "RatMatrix":
        return self.inverse() @ rhs


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def rat_matrix_ops(a: RatMatrix, b: RatMatrix | None = None, op: str = "mul"):
    """Dispatch helper: ``op`` is one of add, sub, mul, det, inverse, kernel."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a @ b
    if op == "det":
        return a.det()
    if op == "inverse":
        return a.inverse()
    if op == "kernel":
        return a.kernel()
    raise ValueError(f"unknown matrix operation {op!r}")


class RatUniPoly:
    """Univariate polynomial over Q, ascending coefficients, no trailing zeros."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [parse_rat(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "RatUniPoly":
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if not isinstance(other, RatUniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RatUniPoly({[format_rat(c) for c in self.coeffs]})"

    def __add__(self, other: "RatUniPoly") -> "RatUniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RatUniPoly(x + y for x, y in zip(a, b))

    def __neg__(self):
        return RatUniPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, RatUniPoly):
            return RatUniPoly(c * parse_rat(other) for c in self.coeffs)
        if self.is_zero() or other.is_zero():
            return RatUniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RatUniPoly(out)

    __rmul__ = __mul__

    def derivative(self) -> "RatUniPoly":
        return RatUniPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def divmod(self, other: "RatUniPoly") -> tuple["RatUniPoly", "RatUniPoly"]:
        if other.is_zero():
            raise ZeroPolynomial("division by the zero polynomial")
        r = list(self.coeffs)
        q = [Fraction(0)] * max(len(r) - len(other.coeffs) + 1, 0)
        inv = 1 / other.lc
        while len(r) >= len(other.coeffs) and r:
            shift = len(r) - len(other.coeffs)
            f = r[-1] * inv
            q[shift] = f
            for i, c in enumerate(other.coeffs):
                r[shift + i] -= f * c
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return RatUniPoly(q), RatUniPoly(r)

    def monic(self) -> "RatUniPoly":
        if self.is_zero():
            return self
        return self * (1 / self.lc)

    def gcd(self, other: "RatUniPoly") -> "RatUniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def compose_shift(self, s) -> "RatUniPoly":
        """Return p(x + s)."""
        s = parse_rat(s)
        out = RatUniPoly()
        lin = RatUniPoly([s, 1])
        for c in reversed(self.coeffs):
            out = out * lin + RatUniPoly([c])
        return out

    def is_squarefree(self) -> bool:
        return self.gcd(self.derivative()).degree == 0


def sylvester_matrix(p: RatUniPoly, q: RatUniPoly) -> RatMatrix:
    m, n = p.degree, q.degree
    size = m + n
    rows = []
    pc = list(reversed(p.coeffs))
    qc = list(reversed(q.coeffs))
    for i in range(n):
        rows.append([0] * i + pc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + qc + [0] * (size - n - 1 - i))
    return RatMatrix.from_rows(rows)


def rat_resultant(p: RatUniPoly, q: RatUniPoly) -> Fraction:
    """Resultant of two non-zero polynomials as the Sylvester determinant."""
    if p.is_zero() or q.is_zero():
        raise ZeroPolynomial("resultant of a zero polynomial")
    if p.degree == 0:
        return p.lc ** q.degree
    if q.degree == 0:
        return q.lc ** p.degree
    return sylvester_matrix(p, q).det()


def discriminant(p: RatUniPoly) -> Fraction:
    d = p.degree
    if d < 1:
        raise ZeroPolynomial("discriminant needs degree >= 1")
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * rat_resultant(p, p.derivative()) / p.lc


def lagrange_interpolate(nodes: Sequence, values: Sequence) -> RatUniPoly:
    """Exact interpolating polynomial through ``(nodes[i], values[i])``."""
    nodes = [parse_rat(x) for x in nodes]
    values = [parse_rat(v) for v in values]
    if len(set(nodes)) != len(nodes):
        raise ValueError("interpolation nodes must be distinct")
    # Newton divided differences, then expand
    coef = list(values)
    n = len(nodes)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (nodes[i] - nodes[i - j])
    out = RatUniPoly([coef[-1]])
    for i in range(n - 2, -1, -1):
        out = out * RatUniPoly([-nodes[i], 1]) + RatUniPoly([coef[i]])
    return out
