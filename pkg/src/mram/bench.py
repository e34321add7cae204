"""Scaling experiments and their CSV/JSON reports."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import random
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

from . import transpile
from .ndtm import CORPUS, Bounds, load_corpus
from .problems import cnf_to_ndtm, scaling_formula
from .transpile import DEFAULT_BIT_BUDGET, Disagreement, triple_check
from .vm import DEFAULT_FUEL


@dataclass(frozen=True)
class ScalingRow:
    n: int
    S: int
    T: int
    N_bits: int
    oracle_nodes: int
    executed: int
    unit_cost: int
    log_cost: int
    wall_ms: float


FIELDS = [f.name for f in dataclasses.fields(ScalingRow)]


def make_instance(problem: str, n: int, seed: int):
    """``(spec, input, bounds, description)`` for one scaling point."""
    if problem == "sat":
        f = scaling_formula(seed, n)
        spec, bounds = cnf_to_ndtm(f)
        return spec, "", bounds, {"clauses": [list(c) for c in f.clauses]}
    if problem not in CORPUS:
        raise ValueError(f"unknown problem {problem!r}")
    spec = load_corpus(problem)
    if problem == "parity":
        rng = random.Random(f"{seed}:{n}")
        word = "".join(rng.choice("01") for _ in range(n))
        return spec, word, Bounds(n + 1, n + 1), {"input": word}
    return spec, "", Bounds(n, n), {"input": ""}


def run_scaling_detailed(problem, sizes, seed, checker=triple_check, fuel=DEFAULT_FUEL, bit_budget=DEFAULT_BIT_BUDGET):
    """Rows plus the per-instance triple-check reports. Aborts with
    :class:`Disagreement` the moment the three verdicts differ."""
    rows, details = [], []
    for n in sorted(sizes):
        spec, word, bounds, desc = make_instance(problem, n, seed)
        t0 = time.perf_counter()
        rep = checker(spec, word, bounds, fuel=fuel, bit_budget=bit_budget)
        wall = (time.perf_counter() - t0) * 1000
        if not rep.agree:
            raise Disagreement(rep)
        rows.append(
            ScalingRow(
                n=n,
                S=bounds.space,
                T=bounds.time,
                N_bits=rep.stats.universe_bits,
                oracle_nodes=rep.explored,
                executed=rep.cost.executed,
                unit_cost=rep.cost.unit_cost,
                log_cost=rep.cost.log_cost,
                wall_ms=round(wall, 3),
            )
        )
        details.append(
            {
                "n": n,
                "states": len(spec.states),
                "transitions": len(spec.transitions),
                "rules": rep.stats.rules,
                "emitted_instructions": rep.stats.instructions,
                "per_iteration": rep.stats.per_iteration,
                "bound": rep.stats.bound,
                "verdict": "accept" if rep.verdict else "reject",
                **desc,
            }
        )
    return rows, details


def run_scaling(problem, sizes, seed, **kw) -> list[ScalingRow]:
    return run_scaling_detailed(problem, sizes, seed, **kw)[0]


def _rss(xs, ys):
    slope, intercept = statistics.linear_regression(xs, ys)
    return sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))


def classify(ns, ys) -> dict:
    """Growth summary for one metric.

    Reports successive log-log slopes (the local polynomial degree) and
    successive semi-log increments. A polynomial is a straight line in
    log-log coordinates, an exponential in semi-log ones, where its log-log
    slope grows in proportion to n. The series is called superpolynomial when
    the exponential line fits ``log y`` with smaller squared residuals than
    the power law; ties go to polynomial.
    """
    ln_n = [math.log(n) for n in ns]
    ln_y = [math.log(y) for y in ys]
    slopes = [(ln_y[i + 1] - ln_y[i]) / (ln_n[i + 1] - ln_n[i]) for i in range(len(ns) - 1)]
    increments = [(ln_y[i + 1] - ln_y[i]) / (ns[i + 1] - ns[i]) for i in range(len(ns) - 1)]
    power = _rss(ln_n, ln_y)
    expo = _rss([float(n) for n in ns], ln_y)
    label = "superpolynomial" if expo < power - 1e-12 else "polynomial-consistent"
    return {
        "values": list(ys),
        "loglog_slopes": slopes,
        "semilog_increments": increments,
        "power_rss": power,
        "exponential_rss": expo,
        "classification": label,
    }


METRICS = ("unit_cost", "log_cost", "oracle_nodes")


def fit_report(rows) -> dict:
    if len(rows) < 3:
        raise ValueError("fit_report needs at least 3 rows")
    rows = sorted(rows, key=lambda r: r.n)
    ns = [r.n for r in rows]
    if len(set(ns)) != len(ns) or ns[0] < 1:
        raise ValueError("sizes must be distinct and positive")
    report = {"n": ns}
    for metric in METRICS:
        ys = [getattr(r, metric) for r in rows]
        if min(ys) <= 0:
            raise ValueError(f"{metric} must be positive to fit")
        report[metric] = classify(ns, ys)
    report["log_to_unit_ratio"] = [r.log_cost / r.unit_cost for r in rows]
    return report


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in rows:
        w.writerow([f"{r.wall_ms:.3f}" if k == "wall_ms" else getattr(r, k) for k in FIELDS])
    return buf.getvalue()


def constants() -> dict:
    return {
        "bound_C": transpile.BOUND_C,
        "K_per_rule": transpile.K_PER_RULE,
        "B_per_rule": transpile.B_PER_RULE,
    }


def write_report(rows, report, path, config=None) -> Path:
    """Write ``path`` (CSV) and a ``.json`` sidecar holding the fit report and
    the run configuration. Both are byte-deterministic apart from wall_ms."""
    path = Path(path)
    path.write_text(rows_to_csv(rows), encoding="utf-8", newline="")
    sidecar = path.with_suffix(".json")
    doc = {"config": {**(config or {}), "constants": constants()}, "fit": report}
    sidecar.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return sidecar


def parse_sizes(text: str) -> list[int]:
    """``"1..4"`` or ``"1,2,5"`` (or a mix, ``"1..3,6"``)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out or min(out) < 1:
        raise ValueError(f"bad size list {text!r}")
    return sorted(set(out))


def scaling(problem, sizes, seed, report_path=None, **kw):
    """Run, fit, and optionally write; what ``mram bench scaling`` does."""
    rows, details = run_scaling_detailed(problem, sizes, seed, **kw)
    fit = fit_report(rows) if len(rows) >= 3 else None
    if report_path is not None:
        config = {
            "problem": problem,
            "sizes": list(sizes),
            "seed": seed,
            "fuel": kw.get("fuel", DEFAULT_FUEL),
            "bit_budget": kw.get("bit_budget", DEFAULT_BIT_BUDGET),
            "instances": details,
        }
        write_report(rows, fit, report_path, config)
    return rows, details, fit
