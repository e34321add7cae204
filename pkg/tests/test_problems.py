import random
from itertools import product

import pytest

from mram.ndtm import Bounds, oracle_accepts, validate_spec
from mram.problems import (
    SORT_C1,
    SORT_C2,
    SORT_C3,
    CnfFormula,
    DimacsError,
    cnf_to_ndtm,
    direct_sort_program,
    parse_dimacs,
    random_formula,
    sat_oracle,
    scaling_formula,
    sort_layout,
    state_bound,
    sweep_formulas,
)
from mram.vm import DivisionByZero, run


def messages(text):
    with pytest.raises(DimacsError) as err:
        parse_dimacs(text)
    return [d.message for d in err.value.diagnostics]


def test_dimacs_basic():
    f = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0")
    assert f.num_vars == 2
    assert f.clauses == ((1, -2), (2,))


def test_dimacs_comments_and_spanning_clauses():
    f = parse_dimacs("c hello\np cnf 3 2\n1 2\n -3 0 3\n0\n")
    assert f.clauses == ((1, 2, -3), (3,))


def test_dimacs_diagnostics():
    assert messages("p cnf 1 1\n0") == ["empty clause"]
    assert messages("p cnf 2 1\n1 3 0") == ["literal out of range: 3"]
    assert any("malformed header" in m for m in messages("p dnf 2 1\n1 0"))
    assert any("count mismatch" in m for m in messages("p cnf 2 3\n1 0\n2 0"))
    assert any("missing" in m for m in messages("c only a comment\n"))
    assert any("bad token" in m for m in messages("p cnf 2 1\n1 x 0"))


def test_dimacs_reports_every_defect():
    assert len(messages("p cnf 2 3\n0\n1 5 0\n2 y 0\n")) >= 3


def test_sat_oracle_examples():
    res = sat_oracle(CnfFormula(2, ((1, -2), (2,))))
    assert res.assignment == (True, True)
    assert res.tested == 4
    assert sat_oracle(CnfFormula(1, ((1,), (-1,)))).assignment is None
    assert sat_oracle(CnfFormula(3, ())).assignment == (False, False, False)


def test_sat_oracle_guard():
    with pytest.raises(ValueError):
        sat_oracle(CnfFormula(21, ()))


def test_single_positive_clause():
    spec, bounds = cnf_to_ndtm(CnfFormula(1, ((1,),)))
    assert validate_spec(spec) == []
    res = oracle_accepts(spec, "", bounds)
    assert res.accepted
    assert res.witness[-1].tape == ("1",)


def test_contradiction_rejects():
    spec, bounds = cnf_to_ndtm(CnfFormula(1, ((1,), (-1,))))
    assert not oracle_accepts(spec, "", bounds).accepted
    assert not oracle_accepts(spec, "", Bounds(bounds.space, bounds.time + 10)).accepted


def test_empty_formula_machine_accepts():
    spec, bounds = cnf_to_ndtm(CnfFormula(2, ()))
    assert oracle_accepts(spec, "", bounds).accepted


def test_sweep_agrees_with_sat_oracle():
    formulas = sweep_formulas()
    assert len(formulas) == 100
    for f in formulas:
        assert f.num_vars <= 3 and len(f.clauses) <= 3 and all(len(c) <= 2 for c in f.clauses)
        spec, bounds = cnf_to_ndtm(f)
        assert oracle_accepts(spec, "", bounds).accepted == (sat_oracle(f).assignment is not None)


def test_time_bound_covers_every_branch():
    rng = random.Random(3)
    for _ in range(40):
        f = random_formula(rng, 3, 3, 2)
        spec, bounds = cnf_to_ndtm(f)
        S, T = bounds
        full = oracle_accepts(spec, "", bounds)
        assert full.accepted == (sat_oracle(f).assignment is not None)
        # every branch has halted by step T
        assert oracle_accepts(spec, "", Bounds(S, T + 5)).explored == full.explored


def test_generated_state_count():
    for f in sweep_formulas():
        spec, _ = cnf_to_ndtm(f)
        assert len(spec.states) <= state_bound(f)
        assert len(spec.states) <= 3 * (f.num_vars + f.literal_count)


def test_scaling_formula_shape():
    for n in (1, 2, 3, 4, 5):
        f = scaling_formula(7, n)
        assert f.num_vars == n and len(f.clauses) == 2 * n
        assert all(len(c) == 3 for c in f.clauses)
    assert scaling_formula(7, 4) == scaling_formula(7, 4)
    # common random numbers: the sign pattern is shared across sizes
    signs = lambda f: [x > 0 for c in f.clauses for x in c]
    assert signs(scaling_formula(7, 2)) == signs(scaling_formula(7, 3))[:12]


def sort_run(keys, max_key):
    lay = sort_layout(len(keys), max_key)
    state, rep = run(direct_sort_program(len(keys), max_key), lay.input_image(keys))
    return lay.read_output(state), rep


def test_sort_examples():
    out, rep = sort_run([3, 1, 2], 3)
    assert out == [1, 2, 3]
    out, rep = sort_run([], 50)
    assert out == []
    assert rep.executed <= SORT_C2 * 50 + SORT_C3
    out, _ = sort_run([2, 2, 1], 2)
    assert out == sorted([2, 2, 1])


def test_sort_exact_cost():
    for keys, k in [([0], 0), ([5, 0, 5], 5), (list(range(20, 0, -1)), 30)]:
        out, rep = sort_run(keys, k)
        assert out == sorted(keys)
        assert rep.executed == 8 * len(keys) + 6 * k + 7
        assert rep.executed <= SORT_C1 * len(keys) + SORT_C2 * k + SORT_C3


def test_sort_key_out_of_range_faults():
    lay = sort_layout(2, 4)
    with pytest.raises(DivisionByZero):
        run(direct_sort_program(2, 4), lay.input_image([1, 9]))


def test_sort_small_exhaustive():
    for n in range(4):
        for keys in product(range(3), repeat=n):
            assert sort_run(list(keys), 2)[0] == sorted(keys)
