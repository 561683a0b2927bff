"""Command-line front end.

Every command writes one JSON report (or, for ``random-instance``, the
instance file itself). Complex numbers are {"re", "im"} objects and
rationals "p/q" strings. Errors are reported as JSON objects with distinct
exit codes: 2 parse, 3 not generic, 4 Groebner budget, 5 no convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import __version__
from .errors import MatSolveError, ParseError
from .exactalg.rational import RatMatrix, format_rat
from .instances import SHAPES, Instance, random_instance
from .matpoly import MatPolynomial, solve_unilateral
from .numlin import DEDUP_TOL, RANK_TOL, ROOT_RESIDUAL_TOL, dedup_matrices, max_norm
from .syscount import EquationSpec, count_solutions, jacobian_at, matricize

COMMANDS = (
    "solve-unilateral",
    "solve-riccati",
    "solve-commuting",
    "solve-symmetric",
    "families",
    "count",
    "jacobian",
    "fixtures",
    "random-instance",
)
BUNDLED = ("riccati_2x2",)


@dataclass
class RunConfig:
    command: str
    input_path: str | None = None
    output_path: str | None = None
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    pair_budget: int = 200_000
    order: str = "grevlex"
    shape: str | None = None
    n: int = 2
    k: int = 2
    method: str = "hamiltonian"
    threads: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParseError(f"unknown command {self.command!r}")

    def tol(self, name: str) -> float:
        defaults = {"root": ROOT_RESIDUAL_TOL, "rank": RANK_TOL, "dedup": DEDUP_TOL}
        return self.tolerances.get(name, defaults[name])


# --------------------------------------------------------------------------
# JSON encoding


def enc_complex(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def enc_matrix(m) -> list:
    if isinstance(m, RatMatrix):
        return m.to_json()
    return [[enc_complex(v) for v in row] for row in np.asarray(m)]


def _read_input(cfg: RunConfig) -> tuple[dict, bytes]:
    if cfg.input_path is None:
        raise ParseError(f"{cfg.command} needs --input")
    if cfg.input_path.startswith("bundled:"):
        name = cfg.input_path.split(":", 1)[1]
        if name not in BUNDLED:
            raise ParseError(f"unknown bundled instance {name!r}; have {', '.join(BUNDLED)}")
        raw = resources.files("matsolve.data").joinpath(f"{name}.json").read_bytes()
    else:
        try:
            with open(cfg.input_path, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read {cfg.input_path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("input must be a JSON object")
    return data, raw


def _instance(data: dict, *shapes: str) -> Instance:
    inst = Instance.from_json(data)
    if shapes and inst.shape not in shapes:
        raise ParseError(f"expected an instance of shape {' or '.join(shapes)}, got {inst.shape}")
    return inst


def _equation(data: dict) -> EquationSpec:
    if "shape" in data:
        return Instance.from_json(data).to_equation_spec()
    return EquationSpec.from_json(data)


def _solution_entries(spec: EquationSpec | None, mats, residuals) -> list[dict]:
    system = matricize(spec) if spec is not None else None
    out = []
    for x, r in zip(mats, residuals):
        entry = {"x": enc_matrix(x), "residual": float(r)}
        if system is not None:
            # independent check through the scalar polynomial system
            entry["verified_residual"] = float(np.max(np.abs(system.evaluate(np.asarray(x)))))
        out.append(entry)
    return out


# --------------------------------------------------------------------------
# commands


def cmd_solve_unilateral(cfg: RunConfig, data: dict) -> dict:
    if "coeffs" in data:
        mp = MatPolynomial([RatMatrix.from_rows(a) for a in data["coeffs"]])
        inst = None
    else:
        inst = _instance(data, "unilateral")
        mp = MatPolynomial(inst.coefficient_list())
    sols = solve_unilateral(mp, rank_tol=cfg.tol("rank"), root_tol=cfg.tol("root"), dedup_tol=cfg.tol("dedup"))
    names = {f"A{i}": c for i, c in enumerate(mp.coeffs)}
    from .syscount import Term

    spec = EquationSpec(mp.n, tuple(Term((f"A{i}",) + ("X",) * i) for i in range(mp.k + 1)), names)
    return {
        "method": "eigen",
        "count": {"solutions": len(sols), "expected": sols.count_expected, "all_simple": sols.all_simple},
        "roots": [enc_complex(r) for r in sols.notes["roots"]],
        "solutions": [
            dict(e, subset=list(s.subset))
            for e, s in zip(_solution_entries(spec, sols.matrices(), [s.residual for s in sols]), sols)
        ],
    }


def cmd_solve_riccati(cfg: RunConfig, data: dict) -> dict:
    from .riccati import RiccatiProblem, hamiltonian_solve, solve_by_reduction

    inst = _instance(data, "riccati")
    p = RiccatiProblem.from_instance(inst)
    if cfg.method == "reduction":
        sols = solve_by_reduction(p)
    else:
        sols = hamiltonian_solve(p)
    out = {
        "method": sols.method,
        "count": {
            "solutions": len(sols),
            "expected": sols.count_expected,
            "all_simple": len(dedup_matrices(sols.matrices(), cfg.tol("dedup"))) == len(sols),
        },
        "solutions": _solution_entries(p.to_equation_spec(), sols.matrices(), sols.notes["residuals"]),
    }
    if "at_infinity" in sols.notes:
        out["at_infinity"] = [list(s) for s in sols.notes["at_infinity"]]
    return out


def cmd_solve_commuting(cfg: RunConfig, data: dict) -> dict:
    from .structured import CommutingFamily, commuting_solve

    inst = _instance(data, "commuting")
    fam = CommutingFamily.from_instance(inst)
    sols = commuting_solve(fam)
    return {
        "method": "eigen",
        "count": {"solutions": len(sols), "expected": sols.count_expected, "all_simple": sols.all_simple},
        "max_commutator": max(sols.notes["commutators"]),
        "solutions": _solution_entries(inst.to_equation_spec(), sols.matrices(), sols.notes["residuals"]),
    }


def cmd_solve_symmetric(cfg: RunConfig, data: dict) -> dict:
    from .structured import symmetric_quadratic_solve

    inst = _instance(data, "symmetric")
    sols = symmetric_quadratic_solve(inst["B"], inst["C"])
    return {
        "method": "eigen",
        "count": {
            "solutions": len(sols),
            "expected": sols.count_expected,
            "all_simple": sols.all_simple,
            "complete": sols.notes["complete"],
        },
        "solutions": _solution_entries(inst.to_equation_spec(), sols.matrices(), sols.notes["residuals"]),
    }


def cmd_families(cfg: RunConfig, data: dict) -> dict:
    import itertools

    from .structured import BinomeFamilyDescriptor, binome_family_emit, binome_residual, binome_strata, binome_stratum_count

    inst = _instance(data, "binome")
    t = inst["T"]
    n = inst.n
    strata = []
    for r, (dim, count) in binome_strata(n).items():
        members = []
        for chosen in itertools.combinations(range(n), n - r):
            y = RatMatrix(n - r, r, [1] * ((n - r) * r)) if r * (n - r) else None
            z = binome_family_emit(BinomeFamilyDescriptor(t, r, chosen, y))
            members.append({"chosen": list(chosen), "member": enc_matrix(z), "residual": binome_residual(t, z)})
        strata.append({"r": r, "dimension": dim, "families": count, "sample_members": members})
    top_dim, top_count = binome_stratum_count(n)
    return {"method": "eigen", "top_stratum": {"dimension": top_dim, "components": top_count}, "strata": strata}


def cmd_count(cfg: RunConfig, data: dict) -> dict:
    spec = _equation(data)
    res = count_solutions(spec, order=cfg.order, pair_budget=cfg.pair_budget)
    s = res.summary
    out = {
        "method": "groebner",
        "count": {
            "nu": s.quotient_dimension,
            "is_zero_dimensional": s.is_zero_dimensional,
            "hilbert_dimension": s.hilbert_dimension,
            "basis_size": len(res.basis.generators),
            "effective": res.effective,
        },
    }
    if res.solutions is not None:
        out["solutions"] = _solution_entries(spec, res.solutions.matrices(), res.solutions.notes["residuals"])
    return out


def cmd_jacobian(cfg: RunConfig, data: dict) -> dict:
    try:
        spec = _equation(data["equation"])
        point = RatMatrix.from_rows(data["point"])
    except KeyError as exc:
        raise ParseError(f"jacobian input needs 'equation' and 'point': missing {exc}") from exc
    rep = jacobian_at(spec, point)
    det = rep.determinant
    return {
        "method": "exact",
        "jacobian": enc_matrix(rep.jacobian),
        "determinant": format_rat(det) if not isinstance(det, complex) else enc_complex(det),
        "singular": rep.singular,
    }


def cmd_fixtures(cfg: RunConfig, data: dict | None) -> dict:
    from .riccati import catalogue_fixtures, classify_fixture

    fixtures = catalogue_fixtures()
    with ThreadPoolExecutor(max_workers=max(1, cfg.threads)) as pool:
        outcomes = list(pool.map(lambda fx: classify_fixture(fx, cfg.pair_budget), fixtures))
    table = [o.to_json() for o in outcomes]
    return {"method": "groebner", "all_passed": all(o.passed for o in outcomes), "fixtures": table}


HANDLERS = {
    "solve-unilateral": cmd_solve_unilateral,
    "solve-riccati": cmd_solve_riccati,
    "solve-commuting": cmd_solve_commuting,
    "solve-symmetric": cmd_solve_symmetric,
    "families": cmd_families,
    "count": cmd_count,
    "jacobian": cmd_jacobian,
}


def run(cfg: RunConfig) -> tuple[str, int]:
    """Execute one command; returns (text to write, exit status)."""
    if cfg.command == "random-instance":
        if cfg.shape not in SHAPES:
            return _error_text(ParseError(f"--shape must be one of {', '.join(SHAPES)}")), 2
        inst = random_instance(cfg.shape, cfg.n, cfg.k, seed=cfg.seed)
        return inst.dumps(), 0
    t0 = time.perf_counter()
    report: dict = {"command": cfg.command, "version": __version__}
    try:
        if cfg.command == "fixtures":
            report["digest"] = None
            body = cmd_fixtures(cfg, None)
        else:
            data, raw = _read_input(cfg)
            report["digest"] = "sha256:" + hashlib.sha256(raw).hexdigest()
            body = HANDLERS[cfg.command](cfg, data)
    except MatSolveError as exc:
        report["error"] = _error_object(exc)
        report["timings"] = {"wall_seconds": time.perf_counter() - t0}
        return json.dumps(report, indent=2) + "\n", exc.exit_code
    report.update(body)
    report["timings"] = {"wall_seconds": time.perf_counter() - t0}
    status = 0
    if cfg.command == "fixtures" and not body["all_passed"]:
        status = 1
    return json.dumps(report, indent=2) + "\n", status


def _error_object(exc: MatSolveError) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
    check = getattr(exc, "check", None)
    if check:
        out["check"] = check
    residuals = getattr(exc, "residuals", None)
    if residuals is not None:
        out["residuals"] = [float(r) for r in np.ravel(residuals)]
    return out


def _error_text(exc: MatSolveError) -> str:
    return json.dumps({"error": _error_object(exc)}, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="matsolve", description="Solve and count polynomial matrix equations.")
    ap.add_argument("command", help="one of: " + ", ".join(COMMANDS))
    ap.add_argument("--input", help="JSON input file, or bundled:NAME for a packaged instance")
    ap.add_argument("--output", help="write the report here instead of stdout")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol-root", type=float)
    ap.add_argument("--tol-rank", type=float)
    ap.add_argument("--tol-dedup", type=float)
    ap.add_argument("--pair-budget", type=int, default=200_000)
    ap.add_argument("--order", choices=("grevlex", "lex"), default="grevlex")
    ap.add_argument("--shape", choices=SHAPES)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--method", choices=("hamiltonian", "reduction"), default="hamiltonian",
                    help="solver for solve-riccati")
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    tols = {}
    for name in ("root", "rank", "dedup"):
        v = getattr(args, f"tol_{name}")
        if v is not None:
            if v <= 0:
                raise ParseError(f"--tol-{name} must be positive")
            tols[name] = v
    threads = os.environ.get("MATSOLVE_THREADS", "1")
    try:
        threads = max(1, int(threads))
    except ValueError as exc:
        raise ParseError(f"MATSOLVE_THREADS must be an integer, got {threads!r}") from exc
    return RunConfig(
        command=args.command,
        input_path=args.input,
        output_path=args.output,
        seed=args.seed,
        tolerances=tols,
        pair_budget=args.pair_budget,
        order=args.order,
        shape=args.shape,
        n=args.n,
        k=args.k,
        method=args.method,
        threads=threads,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ParseError as exc:
        sys.stdout.write(_error_text(exc))
        return exc.exit_code
    text, status = run(cfg)
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
