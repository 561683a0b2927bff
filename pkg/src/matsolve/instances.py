"""Seeded random instances with integer entries in [-2, 2], plus file I/O.

Every instance carries its shape tag and named rational matrices, and can be
turned into an :class:`EquationSpec` for the counting pipeline.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import MatSolveError, ParseError
from .exactalg.groebner import charpoly
from .exactalg.rational import RatMatrix, RatUniPoly, format_rat, parse_rat
from .syscount import EquationSpec, Term, homogeneous_infinity_check, word_spec

SHAPES = ("unilateral", "riccati", "plex1", "plex2", "degmax", "commuting", "symmetric", "binome")
ENTRY_RANGE = (-2, 2)
GENERIC_COND = 1e8

# words of each equation family; constants are named by the instance
_WORDS = {
    "riccati": ["XAX", "B1X", "XB2", "C"],
    "plex1": ["XX", "BXC", "D"],
    "plex2": ["XX", "BXB", "C"],
    "degmax": ["AXB1X", "XB2X", "XXC", "DX", "F"],
    "symmetric": ["XX", "BX", "XB", "C"],
    "binome": ["XX", "TX"],
}


@dataclass
class Instance:
    shape: str
    n: int
    matrices: dict
    k: int = 2
    seed: int | None = None
    attempt: int = 0
    extra: dict = field(default_factory=dict)

    def __getitem__(self, name) -> RatMatrix:
        return self.matrices[name]

    def coefficient_list(self) -> list[RatMatrix]:
        """A_0..A_k for unilateral shapes, B_0..B_{k-1} for commuting ones."""
        if self.shape == "unilateral":
            return [self.matrices[f"A{i}"] for i in range(self.k + 1)]
        if self.shape == "commuting":
            return [self.matrices[f"B{i}"] for i in range(self.k)]
        raise ValueError(f"shape {self.shape} has no coefficient list")

    def to_equation_spec(self) -> EquationSpec:
        n = self.n
        if self.shape == "unilateral":
            terms = [Term(("A0",))] + [Term((f"A{i}",) + ("X",) * i) for i in range(1, self.k + 1)]
            return EquationSpec(n, tuple(terms), dict(self.matrices))
        if self.shape == "commuting":
            terms = [Term(("X",) * self.k)] + [Term((f"B{i}",) + ("X",) * i) for i in range(self.k)]
            return EquationSpec(n, tuple(terms), dict(self.matrices))
        words = _WORDS[self.shape]
        consts = dict(self.matrices)
        f = None
        # a word made of a single constant is the constant term F
        plain = [w for w in words if "X" not in w]
        words = [w for w in words if "X" in w]
        for w in plain:
            f = consts[w] if f is None else f + consts[w]
        return word_spec(n, words, consts, f)

    def to_json(self) -> dict:
        out = {"shape": self.shape, "n": self.n}
        if self.shape in ("unilateral", "commuting"):
            out["k"] = self.k
        if self.seed is not None:
            out["seed"] = self.seed
            out["attempt"] = self.attempt
        out["matrices"] = {k: v.to_json() for k, v in self.matrices.items()}
        out.update(self.extra)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, data: Mapping) -> "Instance":
        try:
            shape = data["shape"]
            n = int(data["n"])
            mats = {k: RatMatrix.from_rows(v) for k, v in data["matrices"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed instance file: {exc}") from exc
        if shape not in SHAPES:
            raise ParseError(f"unknown shape {shape!r}")
        extra = {k: v for k, v in data.items() if k not in ("shape", "n", "k", "matrices", "seed", "attempt")}
        return cls(shape, n, mats, int(data.get("k", 2)), data.get("seed"), int(data.get("attempt", 0)), extra)


def _rng(seed: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, attempt])


def random_matrix(rng: np.random.Generator, n: int, lo: int = ENTRY_RANGE[0], hi: int = ENTRY_RANGE[1]) -> RatMatrix:
    return RatMatrix(n, n, [int(v) for v in rng.integers(lo, hi + 1, size=n * n)])


def random_diagonal(rng: np.random.Generator, n: int) -> RatMatrix:
    return RatMatrix.diag([int(v) for v in rng.integers(ENTRY_RANGE[0], ENTRY_RANGE[1] + 1, size=n)])


def is_generic_matrix(m: RatMatrix) -> bool:
    """Invertible with pairwise distinct eigenvalues (exact test)."""
    if m.det() == 0:
        return False
    return charpoly(m).is_squarefree()


def _poly_of_rat_matrix(p: RatUniPoly, m: RatMatrix) -> RatMatrix:
    out = RatMatrix.zeros(m.rows)
    for c in reversed(p.coeffs):
        out = out @ m + RatMatrix.identity(m.rows).scale(c)
    return out


def draw(shape: str, n: int, k: int = 2, seed: int = 0, attempt: int = 0) -> Instance:
    """One random draw; no genericity filtering."""
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape!r}")
    rng = _rng(seed, attempt)
    mats: dict[str, RatMatrix] = {}
    extra: dict = {}
    if shape == "unilateral":
        for i in range(k + 1):
            mats[f"A{i}"] = random_matrix(rng, n)
    elif shape == "riccati":
        for name in ("A", "B1", "B2", "C"):
            mats[name] = random_matrix(rng, n)
    elif shape == "plex1":
        for name in ("B", "C", "D"):
            mats[name] = random_matrix(rng, n)
    elif shape == "plex2":
        for name in ("B", "C"):
            mats[name] = random_matrix(rng, n)
    elif shape == "degmax":
        for name in ("A", "B1", "B2", "C", "D", "F"):
            mats[name] = random_matrix(rng, n)
    elif shape == "symmetric":
        for name in ("B", "C"):
            mats[name] = random_matrix(rng, n)
    elif shape == "binome":
        mats["T"] = random_matrix(rng, n)
    elif shape == "commuting":
        b0 = random_matrix(rng, n)
        mats["B0"] = b0
        polys = []
        for j in range(1, k):
            # random rational P_j of degree n-1, numerators in [-2, 2], denominators in 1..3
            nums = rng.integers(ENTRY_RANGE[0], ENTRY_RANGE[1] + 1, size=n)
            dens = rng.integers(1, 4, size=n)
            p = RatUniPoly(Fraction(int(a), int(b)) for a, b in zip(nums, dens))
            polys.append(p)
            mats[f"B{j}"] = _poly_of_rat_matrix(p, b0)
        extra["p_polys"] = [[format_rat(c) for c in p.coeffs] for p in polys]
    return Instance(shape, n, mats, k, seed, attempt, extra)


def _structurally_generic(inst: Instance) -> bool:
    if inst.shape == "commuting":
        return is_generic_matrix(inst["B0"])
    if inst.shape == "unilateral":
        return _unilateral_generic(inst)
    if inst.shape == "riccati":
        return _riccati_generic(inst)
    if inst.shape == "symmetric":
        b, c = inst["B"], inst["C"]
        return is_generic_matrix(b @ b - c)
    if not all(is_generic_matrix(m) for m in inst.matrices.values()):
        return False
    if inst.shape == "degmax":
        # no solutions at infinity: the top-degree part has only the zero root
        return homogeneous_infinity_check(inst.to_equation_spec()).only_zero
    return True


def _well_conditioned_subsets(vectors: np.ndarray, n: int, top: slice | None = None) -> bool:
    for subset in itertools.combinations(range(vectors.shape[1]), n):
        w = vectors[:, list(subset)]
        if top is not None:
            w = w[top]
        if np.linalg.cond(w) > GENERIC_COND:
            return False
    return True


def _unilateral_generic(inst: Instance) -> bool:
    # solver preconditions: phi of full degree and squarefree, one-dimensional
    # kernels, every eigenvector matrix P_J comfortably invertible
    from .matpoly import MatPolynomial, eigen_data

    if inst[f"A{inst.k}"].det() == 0:
        return False
    try:
        data = eigen_data(MatPolynomial(inst.coefficient_list()))
    except MatSolveError:
        return False
    return _well_conditioned_subsets(data.vectors, inst.n)


def _riccati_generic(inst: Instance) -> bool:
    # A invertible, M with distinct eigenvalues, every n-subset of eigenvectors
    # complementary to {0} x K^n
    from .numlin import eigen
    from .riccati import HamiltonianM, RiccatiProblem

    if not is_generic_matrix(inst["A"]):
        return False
    hm = HamiltonianM.of(RiccatiProblem.from_instance(inst))
    if not charpoly(hm.m).is_squarefree():
        return False
    try:
        eig = eigen(hm.numeric())
    except MatSolveError:
        return False
    return not eig.deficient and _well_conditioned_subsets(eig.vectors, inst.n, slice(0, inst.n))


def random_instance(shape: str, n: int, k: int = 2, seed: int = 0, max_retries: int = 50) -> Instance:
    """First draw (attempt 0, 1, ...) passing the cheap exact genericity checks.

    The checks are proper algebraic conditions only: invertible coefficients
    with distinct eigenvalues, the stated preconditions of the eigenvalue
    solvers for the unilateral and Riccati shapes, and for the quartic shape
    no nonzero root of the top-degree part.
    """
    for attempt in range(max_retries + 1):
        inst = draw(shape, n, k, seed, attempt)
        if _structurally_generic(inst):
            return inst
    raise RuntimeError(f"no generic {shape} instance after {max_retries} retries (seed {seed})")


def load_instance(path) -> Instance:
    with open(path) as fh:
        return Instance.from_json(json.load(fh))


def parse_matrix(rows) -> RatMatrix:
    return RatMatrix.from_rows([[parse_rat(v) for v in r] for r in rows])
