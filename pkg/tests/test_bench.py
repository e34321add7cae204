import csv
import json

import pytest

from mram.bench import (
    FIELDS,
    ScalingRow,
    classify,
    fit_report,
    parse_sizes,
    rows_to_csv,
    run_scaling,
    run_scaling_detailed,
    write_report,
)
from mram.transpile import Disagreement, triple_check


def synthetic(unit, log, nodes, ns=(1, 2, 3, 4, 5)):
    return [ScalingRow(n, n, n, 1, nodes(n), unit(n), unit(n), log(n), 0.0) for n in ns]


def test_polynomial_series():
    rows = synthetic(lambda n: 10 * n**3, lambda n: 10 * n**3, lambda n: 10 * n**3)
    rep = fit_report(rows)
    assert rep["unit_cost"]["loglog_slopes"] == pytest.approx([3, 3, 3, 3])
    assert rep["unit_cost"]["classification"] == "polynomial-consistent"
    assert rep["unit_cost"]["values"] == [10 * n**3 for n in range(1, 6)]


def test_exponential_series():
    rows = synthetic(lambda n: n, lambda n: n, lambda n: 2**n)
    rep = fit_report(rows)["oracle_nodes"]
    slopes = rep["loglog_slopes"]
    assert all(b > a for a, b in zip(slopes, slopes[1:]))
    assert rep["classification"] == "superpolynomial"
    assert rep["semilog_increments"] == pytest.approx([0.693147] * 4, rel=1e-5)


def test_constant_series_is_polynomial():
    assert classify([1, 2, 3], [5, 5, 5])["classification"] == "polynomial-consistent"


def test_fit_needs_three_rows():
    with pytest.raises(ValueError):
        fit_report(synthetic(lambda n: n, lambda n: n, lambda n: n, ns=(1, 2)))


def test_parse_sizes():
    assert parse_sizes("1..4") == [1, 2, 3, 4]
    assert parse_sizes("3,1,2..2") == [1, 2, 3]
    with pytest.raises(ValueError):
        parse_sizes("0..2")


@pytest.fixture(scope="module")
def sat_rows():
    return run_scaling_detailed("sat", [1, 2, 3], 7)


def test_scaling_rows(sat_rows):
    rows, details = sat_rows
    assert [r.n for r in rows] == [1, 2, 3]
    for r, d in zip(rows, details):
        assert r.unit_cost == r.executed
        assert r.executed <= d["bound"]
        assert r.S == r.n


def test_sat_rows_small_classification(sat_rows):
    rep = fit_report(sat_rows[0])
    assert rep["unit_cost"]["classification"] == "polynomial-consistent"
    assert rep["log_cost"]["classification"] == "superpolynomial"


def test_corpus_scaling():
    rows = run_scaling("parity", [1, 2, 3], 1)
    assert [r.S for r in rows] == [2, 3, 4]


def test_injected_disagreement_aborts():
    def lying(spec, word, bounds, **kw):
        rep = triple_check(spec, word, bounds, **kw)
        rep.vm = not rep.vm
        return rep

    with pytest.raises(Disagreement) as err:
        run_scaling("sat", [1, 2], 7, checker=lying)
    assert "divergent level: vm" in str(err.value)


def test_write_report(tmp_path, sat_rows):
    rows, _ = sat_rows
    out = tmp_path / "r.csv"
    sidecar = write_report(rows, fit_report(rows), out, {"seed": 7})
    lines = out.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0].split(",") == FIELDS
    assert [int(r["n"]) for r in csv.DictReader(out.open())] == [1, 2, 3]
    doc = json.loads(sidecar.read_text())
    assert doc["config"]["seed"] == 7
    assert doc["fit"]["unit_cost"]["classification"] == "polynomial-consistent"


def test_csv_is_deterministic_except_wall_time(sat_rows):
    rows, _ = sat_rows
    again = run_scaling("sat", [1, 2, 3], 7)
    strip = lambda text: [line.rsplit(",", 1)[0] for line in text.splitlines()]
    assert strip(rows_to_csv(rows)) == strip(rows_to_csv(again))
