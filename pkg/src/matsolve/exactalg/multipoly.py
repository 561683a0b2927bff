"""Sparse multivariate polynomials over Q with a fixed monomial order."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..errors import DimensionMismatch, ParseError
from .rational import format_rat, parse_rat

Monomial = tuple  # exponent vector, one entry per ring variable

ORDERS = ("grevlex", "lex")


def grevlex_key(exp: Monomial):
    return (sum(exp), tuple(-e for e in reversed(exp)))


def lex_key(exp: Monomial):
    return exp


def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


class PolyRing:
    """Variable names plus a monomial order tag."""

    __slots__ = ("vars", "order", "key")

    def __init__(self, variables: Sequence[str], order: str = "grevlex"):
        if order not in ORDERS:
            raise ValueError(f"unknown monomial order {order!r}")
        self.vars = tuple(variables)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable names")
        self.order = order
        self.key = grevlex_key if order == "grevlex" else lex_key

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def with_order(self, order: str) -> "PolyRing":
        return PolyRing(self.vars, order)

    def zero_exp(self) -> Monomial:
        return (0,) * len(self.vars)

    def var_exp(self, i: int) -> Monomial:
        e = [0] * len(self.vars)
        e[i] = 1
        return tuple(e)

    def gen(self, name_or_index) -> "MultiPoly":
        i = self.vars.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        return MultiPoly(self, {self.var_exp(i): Fraction(1)})

    def gens(self) -> list["MultiPoly"]:
        return [self.gen(i) for i in range(self.nvars)]

    def const(self, c) -> "MultiPoly":
        return MultiPoly(self, {self.zero_exp(): parse_rat(c)})

    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {})

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.vars == other.vars and self.order == other.order

    def __hash__(self):
        return hash((self.vars, self.order))

    def __repr__(self):
        return f"PolyRing({list(self.vars)}, {self.order!r})"


class MultiPoly:
    """Polynomial stored as an order-sorted dict ``exponent tuple -> Fraction``.

    Zero coefficients are never stored. Instances are treated as immutable.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Mapping[Monomial, object] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        n = ring.nvars
        for exp, c in items:
            exp = tuple(exp)
            if len(exp) != n:
                raise DimensionMismatch(f"monomial {exp} does not fit ring with {n} variables")
            c = parse_rat(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
        self.ring = ring
        self.terms = {e: clean[e] for e in sorted(clean, key=ring.key, reverse=True) if clean[e]}

    # basic queries --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def lm(self) -> Monomial:
        return next(iter(self.terms))

    @property
    def lc(self) -> Fraction:
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.ring.vars == other.ring.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.vars, frozenset(self.terms.items())))

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.ring.vars != self.ring.vars:
                raise DimensionMismatch("polynomials live in different rings")
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = mono_mul(e1, e2)
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.ring.const(1)
        for _ in range(k):
            out = out * self
        return out

    def mul_term(self, exp: Monomial, c) -> "MultiPoly":
        return MultiPoly(self.ring, {mono_mul(e, exp): c * v for e, v in self.terms.items()})

    def monic(self) -> "MultiPoly":
        if self.is_zero():
            return self
        inv = 1 / self.lc
        return MultiPoly(self.ring, {e: c * inv for e, c in self.terms.items()})

    def diff(self, var) -> "MultiPoly":
        i = self.ring.vars.index(var) if isinstance(var, str) else var
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        return MultiPoly(self.ring, out)

    def evaluate(self, point: Sequence):
        """Evaluate at a point given in ring variable order (any numeric type)."""
        if len(point) != self.ring.nvars:
            raise DimensionMismatch("point has the wrong number of coordinates")
        total = 0
        for e, c in self.terms.items():
            t = c if all(isinstance(p, (int, Fraction)) for p in point) else complex(c)
            for p, k in zip(point, e):
                if k:
                    t = t * p ** k
            total = total + t
        return total

    def reorder(self, ring: PolyRing) -> "MultiPoly":
        if ring.vars != self.ring.vars:
            raise DimensionMismatch("reorder only changes the monomial order")
        return MultiPoly(ring, self.terms)

    def variables_used(self) -> set[int]:
        return {i for e in self.terms for i, k in enumerate(e) if k}

    # printing -------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.ring.vars, e) if k
            )
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{format_rat(mag)}*{mono}"
            else:
                body = format_rat(mag)
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"MultiPoly({str(self)!r})"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def parse_poly(text: str, ring: PolyRing) -> MultiPoly:
    """Parse human syntax such as ``"x^2*y - 3/2*x + 1"``.

    Supports ``+ - * / ^`` and parentheses; ``/`` only divides by a
    constant.
    """
    text = text.replace("−", "-").replace("**", "^")
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        pos = m.end()
        num, name, sym = m.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif name is not None:
            if name not in ring.vars:
                raise ParseError(f"unknown variable {name!r} in {text!r}")
            tokens.append(("var", name))
        elif sym is not None and not sym.isspace():
            if sym not in "+-*/^()":
                raise ParseError(f"unexpected character {sym!r} in {text!r}")
            tokens.append(("sym", sym))
    tokens.append(("end", None))
    idx = 0

    def peek():
        return tokens[idx]

    def take(expected=None):
        nonlocal idx
        tok = tokens[idx]
        if expected is not None and tok != ("sym", expected):
            raise ParseError(f"expected {expected!r} in {text!r}")
        idx += 1
        return tok

    def expr():
        sign = 1
        if peek() in (("sym", "+"), ("sym", "-")):
            sign = -1 if take()[1] == "-" else 1
        out = term() * sign
        while peek() in (("sym", "+"), ("sym", "-")):
            op = take()[1]
            t = term()
            out = out + t if op == "+" else out - t
        return out

    def term():
        out = factor()
        while peek() in (("sym", "*"), ("sym", "/")):
            op = take()[1]
            f = factor()
            if op == "*":
                out = out * f
            else:
                if not f.is_constant() or f.is_zero():
                    raise ParseError(f"can only divide by a non-zero constant in {text!r}")
                out = out * (1 / f.lc)
        return out

    def factor():
        base = atom()
        if peek() == ("sym", "^"):
            take()
            kind, val = take()
            if kind != "num":
                raise ParseError(f"exponent must be a non-negative integer in {text!r}")
            base = base ** val
        return base

    def atom():
        kind, val = peek()
        if kind == "num":
            take()
            return ring.const(val)
        if kind == "var":
            take()
            return ring.gen(val)
        if (kind, val) == ("sym", "("):
            take()
            inner = expr()
            take(")")
            return inner
        if (kind, val) == ("sym", "-"):
            take()
            return -atom()
        raise ParseError(f"unexpected token {val!r} in {text!r}")

    result = expr()
    if peek()[0] != "end":
        raise ParseError(f"trailing input in {text!r}")
    return result


def ideal_from_json(data: Mapping, order: str = "grevlex") -> tuple[PolyRing, list[MultiPoly]]:
    """Read the ``{"vars": [...], "polys": [...]}`` ideal file format."""
    try:
        names = data["vars"]
        texts = data["polys"]
    except (KeyError, TypeError) as exc:
        raise ParseError("ideal file needs 'vars' and 'polys'") from exc
    ring = PolyRing(names, order)
    return ring, [parse_poly(t, ring) for t in texts]


def ideal_to_json(ring: PolyRing, polys: Sequence[MultiPoly]) -> dict:
    return {"vars": list(ring.vars), "polys": [str(p) for p in polys]}
