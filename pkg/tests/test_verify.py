import json

import pytest
from conftest import modular, table

from submin.acceptance import MUTATIONS, mutate
from submin.errors import PreconditionError
from submin.instances import generate
from submin.oracle import SetFunctionOracle
from submin.scaling import sfm
from submin.verify import brute_force_min, check_certificate, exchange_capacity_bruteforce, in_base_polyhedron


def test_brute_force_examples(fx):
    assert brute_force_min(fx) == (0b01, -1, [0b01])
    zero = table([0] * 8)
    assert brute_force_min(zero) == (0, 0, list(range(8)))
    assert brute_force_min(modular([-1, -1, -1])) == (0b111, -3, [0b111])


def test_brute_force_refuses_large_ground_sets():
    with pytest.raises(PreconditionError):
        brute_force_min(SetFunctionOracle(lambda m: 0, 25))


def test_exchange_capacity_examples(edge):
    assert exchange_capacity_bruteforce(edge, [1, -1], 1, 0) == 2
    assert exchange_capacity_bruteforce(modular([1, 2, 3]), [1, 2, 3], 0, 2) == 0
    with pytest.raises(ValueError):
        exchange_capacity_bruteforce(edge, [5, -5], 1, 0)


def test_base_polyhedron_membership(edge):
    assert in_base_polyhedron(edge, [1, -1])
    assert in_base_polyhedron(edge, [0, 0])
    assert not in_base_polyhedron(edge, [2, -2])
    assert not in_base_polyhedron(edge, [1, 0])


@pytest.fixture(scope="module")
def solved():
    f = generate("coverage", 6, 11).oracle()
    return f, json.loads(json.dumps(sfm(f).to_json()["certificate"]))


def test_emitted_certificate_passes(solved):
    f, cert = solved
    report = check_certificate(f, cert)
    assert report.ok and report.clause is None


@pytest.mark.parametrize("kind,clause", [
    ("lambda_negated", "positivity"),
    ("y_plus_one", "greedy"),
    ("gap_plus_one", "gap"),
    ("lambda_doubled", "sum"),
    ("phi_asymmetric", "flow"),
])
def test_mutations_fail_at_their_clause(solved, kind, clause):
    f, cert = solved
    report = check_certificate(f, mutate(cert, kind))
    assert not report
    assert report.clause == clause


def test_all_mutations_are_covered():
    assert len(MUTATIONS) == 5


def test_structure_errors(solved):
    f, cert = solved
    broken = dict(cert, X=["nope"])
    assert check_certificate(f, broken).clause == "structure"
    assert check_certificate(f, {"X": []}).clause == "structure"


def test_gap_bound_is_enforced():
    # a valid but loose certificate: the greedy base of the identity ordering and X = V
    f = table([0, 3, 3, 2], ["a", "b"])
    cert = {"X": ["a", "b"], "lambda": ["1"], "bases": [{"ordering": ["a", "b"], "y": ["3", "-1"]}],
            "phi": [["0", "0"], ["0", "0"]], "gap": "3"}
    report = check_certificate(f, cert)
    assert report.clause == "bound"
    assert check_certificate(f, cert, threshold=None)


def test_certificate_of_a_wrong_function_fails(solved):
    _, cert = solved
    other = generate("coverage", 6, 12).oracle()
    assert not check_certificate(other, cert)
