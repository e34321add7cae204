"""Problem front ends: CNF satisfiability and the direct-address sort."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .asm import Diagnostic
from .isa import Program, cell, ind, lit
from .ndtm import Bounds, NdtmSpec
from .transpile import Builder

SAT_ORACLE_MAX_VARS = 20
SWEEP_SEED = 20161
SWEEP_SIZE = 100


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple

    def __post_init__(self):
        for clause in self.clauses:
            if not clause:
                raise ValueError("empty clause")
            for literal in clause:
                if literal == 0 or abs(literal) > self.num_vars:
                    raise ValueError(f"literal {literal} out of range")

    @property
    def literal_count(self):
        return sum(len(c) for c in self.clauses)

    def satisfied_by(self, assignment) -> bool:
        return all(any(assignment[abs(x) - 1] == (x > 0) for x in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


class DimacsError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


def parse_dimacs(text: str) -> CnfFormula:
    """Read DIMACS CNF. Raises :class:`DimacsError` with every diagnostic."""
    diags = []
    header = None
    clauses = []
    current = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            fields = line.split()
            if header is not None:
                diags.append(Diagnostic(lineno, "duplicate header"))
                continue
            if len(fields) != 4 or fields[1] != "cnf" or not all(f.isdigit() for f in fields[2:]):
                diags.append(Diagnostic(lineno, "malformed header, expected 'p cnf <vars> <clauses>'"))
                header = (None, None)
                continue
            try:
                header = (int(fields[2]), int(fields[3]))
            except ValueError:
                diags.append(Diagnostic(lineno, "header count too large"))
                header = (None, None)
            continue
        if header is None:
            diags.append(Diagnostic(lineno, "clause before 'p cnf' header"))
            header = (None, None)
        for tok in line.split():
            try:
                x = int(tok)
            except ValueError:
                diags.append(Diagnostic(lineno, f"bad token {tok[:20]!r}"))
                continue
            if x == 0:
                if not current:
                    diags.append(Diagnostic(lineno, "empty clause"))
                else:
                    clauses.append(tuple(current))
                current = []
                continue
            nv = header[0]
            if nv is not None and abs(x) > nv:
                diags.append(Diagnostic(lineno, f"literal out of range: {x}"))
                continue
            current.append(x)
    if current:
        clauses.append(tuple(current))
    if header is None:
        diags.append(Diagnostic(0, "missing 'p cnf' header"))
    elif header[1] is not None and header[1] != len(clauses) and not diags:
        diags.append(Diagnostic(0, f"clause count mismatch: header says {header[1]}, found {len(clauses)}"))
    if diags:
        raise DimacsError(diags)
    return CnfFormula(header[0], tuple(clauses))


class SatResult(NamedTuple):
    assignment: Optional[tuple]
    tested: int


def sat_oracle(f: CnfFormula) -> SatResult:
    """Try every assignment in lexicographic order (x1 first, False < True)."""
    if f.num_vars > SAT_ORACLE_MAX_VARS:
        raise ValueError(f"{f.num_vars} variables exceeds the oracle guard of {SAT_ORACLE_MAX_VARS}")
    tested = 0
    for assignment in itertools.product((False, True), repeat=f.num_vars):
        tested += 1
        if f.satisfied_by(assignment):
            return SatResult(assignment, tested)
    return SatResult(None, tested)


# |Q| <= max(2, n) * (n + total literals) for generated machines
STATE_FACTOR_FLOOR = 2


def state_bound(f: CnfFormula) -> int:
    return max(STATE_FACTOR_FLOOR, f.num_vars) * (f.num_vars + f.literal_count)


def cnf_to_ndtm(f: CnfFormula):
    """Guess-and-verify machine for ``f``.

    Guess states ``g<i>`` write 0 or 1 into cell i moving right (the last one
    stays put). Verify states ``c<clause>l<literal>@<pos>`` track the head
    position so every walk to a variable's cell is deterministic; a satisfied
    literal jumps to the next clause, a failed one to the next literal. Runs
    on an empty input with S = num_vars.

    Returns ``(spec, bounds)`` where ``bounds.time`` is the longest run of
    any branch.
    """
    n = f.num_vars
    if n < 1:
        raise ValueError("need at least one variable")
    blank = "_"
    transitions = []
    guess = [f"g{i}" for i in range(n)]
    for i in range(n - 1):
        for bit in "01":
            transitions.append((guess[i], blank, guess[i + 1], bit, "R"))

    def vname(c, j, pos):
        return f"c{c}l{j}@{pos}"

    def after(c, j, t, satisfied):
        if satisfied:
            return ("acc", None) if c + 1 == len(f.clauses) else (vname(c + 1, 0, t), (c + 1, 0, t))
        return ("rej", None) if j + 1 == len(f.clauses[c]) else (vname(c, j + 1, t), (c, j + 1, t))

    verify_states = []
    if f.clauses:
        first = vname(0, 0, n - 1)
        work = [(0, 0, n - 1)]
    else:
        first = "acc"
        work = []
    for bit in "01":
        transitions.append((guess[n - 1], blank, first, bit, "N"))
    seen = set(work)
    while work:
        c, j, pos = work.pop(0)
        name = vname(c, j, pos)
        verify_states.append(name)
        literal = f.clauses[c][j]
        t = abs(literal) - 1
        for bit in "01":
            if pos != t:
                step = 1 if t > pos else -1
                nxt, key = vname(c, j, pos + step), (c, j, pos + step)
                transitions.append((name, bit, nxt, bit, "R" if step > 0 else "L"))
            else:
                nxt, key = after(c, j, t, (bit == "1") == (literal > 0))
                transitions.append((name, bit, nxt, bit, "N"))
            if key is not None and key not in seen:
                seen.add(key)
                work.append(key)

    spec = NdtmSpec.build(
        states=guess + verify_states + ["acc", "rej"],
        tape_alphabet=[blank, "0", "1"],
        blank=blank,
        input_alphabet=["0", "1"],
        transitions=transitions,
        start="g0",
        accept=["acc"],
        reject=["rej"],
        name="cnf",
    )
    return spec, Bounds(n, n + _longest_run(spec, first))


def _longest_run(spec: NdtmSpec, state: str) -> int:
    """Longest transition chain from ``state`` to a halting state (acyclic)."""
    out: dict[str, set] = {}
    for t in spec.transitions:
        out.setdefault(t.state, set()).add(t.next_state)
    memo: dict[str, int] = {}
    # iterative post-order over the state DAG
    stack = [(state, False)]
    while stack:
        q, done = stack.pop()
        if done:
            memo[q] = max((1 + memo[r] for r in out.get(q, ())), default=0)
            continue
        if q in memo:
            continue
        stack.append((q, True))
        for r in out.get(q, ()):
            if r not in memo:
                stack.append((r, False))
    return memo[state]


def random_formula(rng: random.Random, num_vars: int, num_clauses: int, clause_len: int) -> CnfFormula:
    clauses = []
    for _ in range(num_clauses):
        clauses.append(tuple(rng.choice((1, -1)) * rng.randint(1, num_vars) for _ in range(clause_len)))
    return CnfFormula(num_vars, tuple(clauses))


def scaling_formula(seed: int, num_vars: int, clauses_per_var: int = 2, clause_len: int = 3) -> CnfFormula:
    """Pseudorandom formula with ``num_vars`` variables for scaling runs.

    Every literal slot draws its (variable, sign) from one seeded stream of
    uniforms that does not depend on ``num_vars``, so instances at successive
    sizes share their randomness (common random numbers) and growth trends are
    not swamped by instance-to-instance noise.
    """
    rng = random.Random(seed)
    clauses = []
    for _ in range(clauses_per_var * num_vars):
        lits = []
        for _ in range(clause_len):
            u, v = rng.random(), rng.random()
            lits.append((1 if v < 0.5 else -1) * (1 + int(u * num_vars)))
        clauses.append(tuple(lits))
    return CnfFormula(num_vars, tuple(clauses))


def sweep_formulas(seed: int = SWEEP_SEED, count: int = SWEEP_SIZE):
    """The fixed small-formula sweep: 1-3 variables, 1-3 clauses, 1-2 literals."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, 3)
        clauses = []
        for _ in range(rng.randint(1, 3)):
            k = rng.randint(1, 2)
            clauses.append(tuple(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(k)))
        out.append(CnfFormula(n, tuple(clauses)))
    return out


# direct-address sort: executed <= SORT_C1*n + SORT_C2*max_key + SORT_C3
SORT_C1, SORT_C2, SORT_C3 = 8, 8, 8


@dataclass(frozen=True)
class SortLayout:
    n: int
    max_key: int
    scratch: int
    table: int
    output: int

    def input_image(self, keys) -> dict:
        if len(keys) != self.n:
            raise ValueError(f"program sorts exactly {self.n} keys, got {len(keys)}")
        image = {1: len(keys)}
        image.update({2 + j: k for j, k in enumerate(keys)})
        return image

    def read_output(self, state) -> list:
        return [state[self.output + j] for j in range(self.n)]


def sort_layout(n: int, max_key: int) -> SortLayout:
    scratch = 2 + n
    table = scratch + 8
    return SortLayout(n, max_key, scratch, table, table + max_key + 1)


def direct_sort_program(n: int, max_key: int) -> Program:
    """Counting sort for exactly ``n`` keys in ``[0, max_key]``.

    The counting pass is unrolled over the ``n`` input cells; the sweep walks
    the table from ``max_key`` down, filling the output region from its end.
    A key above ``max_key`` faults through a division by zero. Executes
    ``8n + 6*max_key + 7`` instructions on valid input.
    """
    lay = sort_layout(n, max_key)
    t, p, o, k, m = (cell(lay.scratch + i) for i in range(5))
    asm = Builder()
    for j in range(n):
        key = cell(2 + j)
        asm.emit("SUB", t, key, lit(max_key))
        asm.emit("JNZ", t, target="key_fault")
        asm.emit("ADD", t, key, lit(lay.table))
        asm.emit("ADD", ind(t.value), ind(t.value), lit(1))
    asm.emit("LOAD", p, lit(lay.table + max_key))
    asm.emit("LOAD", o, lit(lay.output + n - 1))
    asm.emit("LOAD", k, lit(max_key))
    asm.label("slot")
    asm.emit("LOAD", m, ind(p.value))
    asm.emit("JZ", m, target="advance")
    asm.label("put")
    asm.emit("LOAD", ind(o.value), k)
    asm.emit("SUB", o, o, lit(1))
    asm.emit("SUB", m, m, lit(1))
    asm.emit("JNZ", m, target="put")
    asm.label("advance")
    asm.emit("JZ", k, target="done")
    asm.emit("SUB", k, k, lit(1))
    asm.emit("SUB", p, p, lit(1))
    asm.emit("JUMP", target="slot")
    asm.label("done")
    asm.emit("HALT")
    asm.label("key_fault")
    asm.emit("DIV", t, lit(1), lit(0))
    return asm.program()
