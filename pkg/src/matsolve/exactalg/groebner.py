"""Buchberger's algorithm over Q and zero-dimensional quotient queries.

Internally every polynomial is a dict ``exponent -> int`` kept primitive
(content 1, positive leading coefficient); reduction is fraction-free. The
public results are monic :class:`MultiPoly` objects.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..errors import BudgetExceeded, DimensionMismatch, PositiveDimensional
from .multipoly import MultiPoly, PolyRing, divides, mono_div, mono_lcm, mono_mul
from .rational import RatMatrix, RatUniPoly

DEFAULT_PAIR_BUDGET = 200_000


# --------------------------------------------------------------------------
# integer polynomial kernel


def _primitive(poly: dict, key) -> dict:
    if not poly:
        return poly
    g = 0
    for c in poly.values():
        g = math.gcd(g, c)
        if g == 1:
            break
    lead = poly[max(poly, key=key)]
    if lead < 0:
        g = -g
    if g == 1:
        return poly
    return {e: c // g for e, c in poly.items()}


def _from_multipoly(p: MultiPoly) -> dict:
    lcm = 1
    for c in p.terms.values():
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    return _primitive({e: int(c * lcm) for e, c in p.terms.items()}, p.ring.key)


class _Basis:
    """Mutable working set of primitive integer polynomials with cached leads."""

    def __init__(self, key):
        self.key = key
        self.polys: list[dict] = []
        self.lms: list[tuple] = []
        self.lcs: list[int] = []

    def add(self, poly: dict) -> int:
        lm = max(poly, key=self.key)
        self.polys.append(poly)
        self.lms.append(lm)
        self.lcs.append(poly[lm])
        return len(self.polys) - 1


def _reduce(f: dict, divisors: Sequence[int], basis: _Basis) -> dict:
    """Fully reduce ``f`` modulo the basis elements listed in ``divisors``."""
    key = basis.key
    f = dict(f)
    rem: dict = {}
    steps = 0
    while f:
        lm = max(f, key=key)
        c = f[lm]
        for idx in divisors:
            glm = basis.lms[idx]
            if divides(glm, lm):
                break
        else:
            rem[lm] = c
            del f[lm]
            continue
        glc = basis.lcs[idx]
        g = math.gcd(c, glc)
        a, b = glc // g, c // g
        if a < 0:
            a, b = -a, -b
        if a != 1:
            f = {e: a * v for e, v in f.items()}
            rem = {e: a * v for e, v in rem.items()}
        shift = mono_div(lm, glm)
        for e, v in basis.polys[idx].items():
            m = mono_mul(e, shift)
            nv = f.get(m, 0) - b * v
            if nv:
                f[m] = nv
            else:
                f.pop(m, None)
        steps += 1
        if steps % 8 == 0 and (f or rem):
            cont = 0
            for v in itertools.chain(f.values(), rem.values()):
                cont = math.gcd(cont, v)
                if cont == 1:
                    break
            if cont > 1:
                f = {e: v // cont for e, v in f.items()}
                rem = {e: v // cont for e, v in rem.items()}
    return _primitive(rem, key)


def _spoly(i: int, j: int, basis: _Basis) -> dict:
    lcm = mono_lcm(basis.lms[i], basis.lms[j])
    ci, cj = basis.lcs[i], basis.lcs[j]
    g = math.gcd(ci, cj)
    fi, fj = cj // g, ci // g
    si, sj = mono_div(lcm, basis.lms[i]), mono_div(lcm, basis.lms[j])
    out: dict = {}
    for e, v in basis.polys[i].items():
        m = mono_mul(e, si)
        out[m] = out.get(m, 0) + fi * v
    for e, v in basis.polys[j].items():
        m = mono_mul(e, sj)
        nv = out.get(m, 0) - fj * v
        if nv:
            out[m] = nv
        else:
            out.pop(m, None)
    return out


def _coprime(a, b) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _update(G: list[int], B: list[tuple[int, int]], h: int, basis: _Basis):
    """Gebauer-Moeller pair update (Buchberger criteria 1 and 2)."""
    lms = basis.lms
    hl = lms[h]
    C = [(h, g) for g in G]
    D = []
    while C:
        pair = C.pop()
        g1 = pair[1]
        l1 = mono_lcm(hl, lms[g1])
        if _coprime(hl, lms[g1]) or not any(
            divides(mono_lcm(hl, lms[g2]), l1) for _, g2 in itertools.chain(C, D)
        ):
            D.append(pair)
    E = [(a, b) for a, b in D if not _coprime(lms[a], lms[b])]
    newB = []
    for g1, g2 in B:
        l12 = mono_lcm(lms[g1], lms[g2])
        if (
            divides(hl, l12)
            and mono_lcm(lms[g1], hl) != l12
            and mono_lcm(hl, lms[g2]) != l12
        ):
            continue
        newB.append((g1, g2))
    newB.extend(E)
    newG = [g for g in G if not divides(hl, lms[g])]
    newG.append(h)
    return newG, newB


# --------------------------------------------------------------------------
# public API


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis: monic, inter-reduced, sorted by leading monomial."""

    ring: PolyRing
    generators: tuple
    pair_reductions: int = 0

    @property
    def order(self) -> str:
        return self.ring.order

    def leading_monomials(self) -> list[tuple]:
        return [g.lm for g in self.generators]

    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_constant()

    def reduce(self, f: MultiPoly) -> MultiPoly:
        return normal_form(f, self)

    def contains(self, f: MultiPoly) -> bool:
        return normal_form(f, self).is_zero()

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def same_as(self, other: "GroebnerBasis") -> bool:
        return set(self.generators) == set(other.generators)


def buchberger(
    generators: Sequence[MultiPoly],
    order: str | None = None,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal spanned by ``generators``.

    Pairs are processed by the normal strategy (smallest lcm first) after
    Gebauer-Moeller pruning. ``pair_budget`` caps the number of S-pair
    reductions; hitting it raises :class:`BudgetExceeded`.
    """
    generators = list(generators)
    if not generators:
        raise ValueError("need at least one generator")
    ring = generators[0].ring
    if any(g.ring.vars != ring.vars for g in generators):
        raise DimensionMismatch("generators must share one ring")
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
    key = ring.key

    basis = _Basis(key)
    inputs = [_from_multipoly(g.reorder(ring)) for g in generators]
    inputs = [p for p in inputs if p]
    if not inputs:
        return GroebnerBasis(ring, ())
    if any(all(not any(e) for e in p) for p in inputs):
        return GroebnerBasis(ring, (ring.const(1),))

    G: list[int] = []
    B: list[tuple[int, int]] = []
    # feed inputs smallest first and reduce each against what is already in
    inputs.sort(key=lambda p: key(max(p, key=key)))
    for p in inputs:
        r = _reduce(p, G, basis)
        if not r:
            continue
        h = basis.add(r)
        if all(not any(e) for e in r):
            return GroebnerBasis(ring, (ring.const(1),))
        G, B = _update(G, B, h, basis)

    reductions = 0
    while B:
        best = min(
            range(len(B)),
            key=lambda t: key(mono_lcm(basis.lms[B[t][0]], basis.lms[B[t][1]])),
        )
        i, j = B.pop(best)
        reductions += 1
        if reductions > pair_budget:
            raise BudgetExceeded(f"S-pair budget of {pair_budget} reductions exhausted")
        h = _reduce(_spoly(i, j, basis), G, basis)
        if not h:
            continue
        if all(not any(e) for e in h):
            return GroebnerBasis(ring, (ring.const(1),), reductions)
        idx = basis.add(h)
        G, B = _update(G, B, idx, basis)

    # minimal basis, then inter-reduce
    G = sorted(G, key=lambda g: key(basis.lms[g]))
    minimal = []
    for g in G:
        if not any(divides(basis.lms[m], basis.lms[g]) for m in minimal):
            minimal.append(g)
    reduced = []
    for g in minimal:
        others = [m for m in minimal if m != g]
        r = _reduce(basis.polys[g], others, basis)
        reduced.append(MultiPoly(ring, r).monic())
    reduced.sort(key=lambda p: key(p.lm))
    return GroebnerBasis(ring, tuple(reduced), reductions)


def normal_form(f: MultiPoly, gb: GroebnerBasis) -> MultiPoly:
    """Remainder of ``f`` modulo a (monic) Groebner basis, exact over Q."""
    ring = gb.ring
    key = ring.key
    f = dict(f.reorder(ring).terms) if f.ring.order != ring.order else dict(f.terms)
    gens = [(g.lm, g.terms) for g in gb.generators]
    rem = {}
    while f:
        lm = max(f, key=key)
        c = f.pop(lm)
        for glm, gterms in gens:
            if divides(glm, lm):
                shift = mono_div(lm, glm)
                for e, v in gterms.items():
                    if e == glm:
                        continue
                    m = mono_mul(e, shift)
                    nv = f.get(m, 0) - c * v
                    if nv:
                        f[m] = nv
                    else:
                        f.pop(m, None)
                break
        else:
            rem[lm] = c
    return MultiPoly(ring, rem)


@dataclass(frozen=True)
class IdealSummary:
    is_zero_dimensional: bool
    hilbert_dimension: int
    quotient_dimension: int | None  # None stands for "infinite"
    standard_monomials: tuple = field(default=(), repr=False)

    @property
    def count(self):
        return self.quotient_dimension if self.quotient_dimension is not None else "infinite"


def hilbert_dimension(gb: GroebnerBasis) -> int:
    """Largest variable subset containing the support of no leading monomial."""
    n = gb.ring.nvars
    if gb.is_unit():
        return 0
    supports = [frozenset(i for i, k in enumerate(lm) if k) for lm in gb.leading_monomials()]
    for size in range(n, -1, -1):
        for subset in itertools.combinations(range(n), size):
            s = frozenset(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0


def standard_monomials(gb: GroebnerBasis) -> list[tuple]:
    """Monomials divisible by no leading monomial (zero-dimensional case only)."""
    n = gb.ring.nvars
    lms = gb.leading_monomials()
    if gb.is_unit():
        return []
    bounds = []
    for i in range(n):
        pure = [lm[i] for lm in lms if lm[i] and all(k == 0 for j, k in enumerate(lm) if j != i)]
        if not pure:
            raise PositiveDimensional("ideal is not zero-dimensional", hilbert_dimension(gb))
        bounds.append(min(pure))
    out = []
    for exp in itertools.product(*(range(b) for b in bounds)):
        if not any(divides(lm, exp) for lm in lms):
            out.append(exp)
    out.sort(key=gb.ring.key)
    return out


def quotient_dimension(gb: GroebnerBasis) -> IdealSummary:
    if gb.is_unit():
        return IdealSummary(True, 0, 0, ())
    try:
        mons = standard_monomials(gb)
    except PositiveDimensional as exc:
        return IdealSummary(False, exc.hilbert_dimension, None)
    return IdealSummary(True, 0, len(mons), tuple(mons))


# --------------------------------------------------------------------------
# quotient ring linear algebra (zero-dimensional ideals)


class QuotientAlgebra:
    """The finite-dimensional algebra Q[x]/I with standard-monomial basis."""

    def __init__(self, gb: GroebnerBasis):
        self.gb = gb
        self.ring = gb.ring
        self.basis = standard_monomials(gb)
        self.index = {m: i for i, m in enumerate(self.basis)}
        self._mult: dict[int, RatMatrix] = {}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def coords(self, f: MultiPoly) -> list[Fraction]:
        nf = normal_form(f, self.gb)
        v = [Fraction(0)] * self.dimension
        for e, c in nf.terms.items():
            v[self.index[e]] = c
        return v

    def multiplication_matrix(self, var: int) -> RatMatrix:
        """Matrix of multiplication by ``x_var``; column j is NF(x_var * m_j)."""
        if var not in self._mult:
            d = self.dimension
            cols = []
            for m in self.basis:
                shifted = mono_mul(m, self.ring.var_exp(var))
                if shifted in self.index:
                    col = [Fraction(0)] * d
                    col[self.index[shifted]] = Fraction(1)
                else:
                    col = self.coords(MultiPoly(self.ring, {shifted: 1}))
                cols.append(col)
            self._mult[var] = RatMatrix(d, d, [cols[j][i] for i in range(d) for j in range(d)])
        return self._mult[var]

    def linear_form_matrix(self, weights: Sequence) -> RatMatrix:
        d = self.dimension
        out = RatMatrix.zeros(d)
        for v, w in enumerate(weights):
            if w:
                out = out + self.multiplication_matrix(v).scale(w)
        return out

    def one(self) -> list[Fraction]:
        return self.coords(self.ring.const(1))


def charpoly(m: RatMatrix) -> RatUniPoly:
    """Characteristic polynomial det(tI - m) by exact interpolation."""
    n = m.rows
    nodes = list(range(n + 1))
    values = [(RatMatrix.identity(n).scale(t) - m).det() for t in nodes]
    from .rational import lagrange_interpolate

    return lagrange_interpolate(nodes, values)


def root_multiplicity(p: RatUniPoly, root) -> int:
    """Order of vanishing of ``p`` at a rational ``root``."""
    lin = RatUniPoly([-Fraction(root), 1])
    k = 0
    while not p.is_zero() and p(root) == 0:
        p = p.divmod(lin)[0]
        k += 1
    return k


@dataclass(frozen=True)
class ShapeBasis:
    """Triangular description: p(t)=0 and x_v = q_v(t) for a separating form t.

    ``weights`` define ``t = sum(w_v x_v)``; when ``weights`` is a unit vector
    this is exactly the lex basis {p(x_i), x_v - q_v(x_i)}.
    """

    ring: PolyRing
    weights: tuple
    minpoly: RatUniPoly
    coordinates: tuple  # one RatUniPoly per ring variable

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    def separating_variable(self) -> int | None:
        nz = [i for i, w in enumerate(self.weights) if w]
        if len(nz) == 1 and self.weights[nz[0]] == 1:
            return nz[0]
        return None


def _krylov_dependency(vectors: list[list[Fraction]], target: list[Fraction]) -> list[Fraction] | None:
    """Solve sum(c_i vectors[i]) = target exactly; None if inconsistent."""
    d = len(target)
    k = len(vectors)
    aug = RatMatrix(d, k + 1, [x for i in range(d) for x in [v[i] for v in vectors] + [target[i]]])
    red, pivots = aug.rref()
    if k in pivots:
        return None
    sol = [Fraction(0)] * k
    for r, p in enumerate(pivots):
        sol[p] = red[r, k]
    return sol


def shape_basis(gb: GroebnerBasis, weights: Sequence | None = None) -> ShapeBasis | None:
    """Shape-position description of a zero-dimensional ideal, or None.

    Uses the Krylov sequence of the multiplication-by-t map on the quotient
    algebra; succeeds when the minimal polynomial of t has degree equal to
    the quotient dimension (t separates the points and the ideal is radical).
    """
    alg = QuotientAlgebra(gb)
    n = gb.ring.nvars
    d = alg.dimension
    if d == 0:
        return None
    if weights is None:
        weights = [1] + [0] * (n - 1)
    weights = tuple(Fraction(w) for w in weights)
    mt = alg.linear_form_matrix(weights)
    v = alg.one()
    krylov = [v]
    for _ in range(d):
        v = [sum((mt[i, j] * v[j] for j in range(d) if v[j]), Fraction(0)) for i in range(d)]
        krylov.append(v)
    # the first d vectors must be independent for shape position
    if RatMatrix(d, d, [krylov[j][i] for i in range(d) for j in range(d)]).det() == 0:
        return None
    c = _krylov_dependency(krylov[:d], krylov[d])
    minpoly = RatUniPoly([-x for x in c] + [1])
    coords = []
    for var in range(n):
        target = [row for row in alg.multiplication_matrix(var).to_rows()]
        col0 = [target[i][0] for i in range(d)]  # NF(x_var * 1)
        sol = _krylov_dependency(krylov[:d], col0)
        coords.append(RatUniPoly(sol))
    return ShapeBasis(gb.ring, weights, minpoly, tuple(coords))


def find_shape_basis(gb: GroebnerBasis, attempts: int = 6, seed: int = 0) -> ShapeBasis | None:
    """Try each variable, then a few random integer linear forms."""
    import random

    n = gb.ring.nvars
    for var in range(n):
        w = [0] * n
        w[var] = 1
        sb = shape_basis(gb, w)
        if sb is not None:
            return sb
    rng = random.Random(seed)
    for _ in range(attempts):
        w = [rng.randint(-5, 5) or 1 for _ in range(n)]
        sb = shape_basis(gb, w)
        if sb is not None:
            return sb
    return None


def point_multiplicity(gb: GroebnerBasis, point: Sequence, seed: int = 1) -> int:
    """Multiplicity of a rational point of V(I), via a generic linear form.

    The characteristic polynomial of multiplication by t = sum(w_v x_v) on
    Q[x]/I is prod (s - t(P))^mult(P); for a generic w the points stay
    separated, so the root multiplicity at t(point) is mult(point).
    """
    import random

    alg = QuotientAlgebra(gb)
    rng = random.Random(seed)
    n = gb.ring.nvars
    point = [Fraction(p) for p in point]
    w = [Fraction(rng.randint(1, 97)) for _ in range(n)]
    cp = charpoly(alg.linear_form_matrix(w))
    return root_multiplicity(cp, sum(a * b for a, b in zip(w, point)))
