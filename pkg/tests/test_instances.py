import json

import pytest

from matsolve.errors import ParseError
from matsolve.exactalg import RatMatrix
from matsolve.instances import SHAPES, Instance, draw, load_instance, random_instance


@pytest.mark.parametrize("shape", SHAPES)
def test_deterministic_and_in_range(shape):
    a = random_instance(shape, 2, 2, seed=17)
    b = random_instance(shape, 2, 2, seed=17)
    assert a.dumps() == b.dumps()
    if shape != "commuting":
        for m in a.matrices.values():
            assert all(-2 <= v <= 2 and v.denominator == 1 for v in m.entries)
    else:
        assert all(-2 <= v <= 2 for v in a["B0"].entries)


def test_different_seeds_differ():
    assert random_instance("riccati", 2, seed=1).dumps() != random_instance("riccati", 2, seed=2).dumps()


def test_commuting_exact_by_construction():
    for seed in range(5):
        inst = random_instance("commuting", 3, 3, seed=seed)
        b = inst.coefficient_list()
        assert (b[0] @ b[1] - b[1] @ b[0]).is_zero()
        assert (b[1] @ b[2] - b[2] @ b[1]).is_zero()
        assert len(inst.extra["p_polys"]) == 2


def test_json_round_trip(tmp_path):
    inst = random_instance("degmax", 2, seed=3)
    path = tmp_path / "inst.json"
    path.write_text(inst.dumps())
    again = load_instance(path)
    assert again.dumps() == inst.dumps()
    assert again.to_equation_spec().dumps() == inst.to_equation_spec().dumps()


def test_malformed_instance_rejected():
    with pytest.raises(ParseError):
        Instance.from_json({"shape": "riccati"})
    with pytest.raises(ParseError):
        Instance.from_json({"shape": "nope", "n": 2, "matrices": {}})


def test_equation_spec_of_unilateral_matches_evaluation():
    inst = random_instance("unilateral", 2, 3, seed=0)
    spec = inst.to_equation_spec()
    x = RatMatrix.from_rows([[1, 2], [0, -1]])
    direct = RatMatrix.zeros(2)
    power = RatMatrix.identity(2)
    for a in inst.coefficient_list():
        direct = direct + a @ power
        power = power @ x
    assert spec.evaluate_exact(x) == direct


def test_unknown_shape():
    with pytest.raises(ValueError):
        draw("nope", 2)


def test_unilateral_end_to_end():
    from matsolve.matpoly import MatPolynomial, solve_unilateral

    inst = random_instance("unilateral", 2, 2, seed=7)
    assert len(solve_unilateral(MatPolynomial(inst.coefficient_list()))) == 6
