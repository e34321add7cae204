"""Compile an NDTM and its bounds into an MRAM program that runs the
configuration-set simulation, and check all three decision routes agree.

The caller seeds cell 1 with 1 and cell 2 with the initial configuration
index. The program builds every mask in memory with SHL/ADD/MUL/AND/OR,
loops over a rule table by indirect addressing, and halts with cell 0 = 1
(accept) or 0 (reject). DIV is never emitted.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

from .confset import accept_mask, reachable_accepts, step_rules
from .isa import SHAPE, Instruction, Opcode, Program, cell, ind, lit
from .ndtm import Bounds, ConfigSetCodec, NdtmSpec, initial_config, oracle_accepts
from .vm import CostReport, Machine, initial_state
from .word import doubling_steps

DEFAULT_BIT_BUDGET = 2**27

# bound contract: executed <= C * (B + T*K)
BOUND_C = 4
K_PER_RULE = 8
B_PER_RULE = 64


class SizingError(ValueError):
    """The configuration universe is wider than the bit budget allows."""


class Builder:
    """Instruction list with symbolic jump targets, resolved by :meth:`program`."""

    def __init__(self):
        self.code = []
        self.labels: dict[str, int] = {}

    def label(self, name):
        self.labels[name] = len(self.code)

    def emit(self, op, dst=None, a=None, b=None, target=None):
        op = Opcode[op]
        if not SHAPE[op][0]:
            dst, a = None, dst
        self.code.append((op, dst, a, b, target))

    def __len__(self):
        return len(self.code)

    def program(self) -> Program:
        out = []
        for op, dst, a, b, target in self.code:
            out.append(Instruction(op, dst, a, b, None if target is None else self.labels[target]))
        return Program(out, dict(self.labels))


def emit_replicate(asm: Builder, dst, pattern, width: int, count: int, tmp):
    """``dst = replicate(pattern, width, count)``; mirrors :func:`mram.word.replicate`."""
    if count == 0:
        asm.emit("LOAD", dst, lit(0))
        return
    asm.emit("LOAD", dst, pattern)
    for k, add_one in doubling_steps(count):
        asm.emit("SHL", tmp, lit(1), lit(k * width))
        asm.emit("ADD", tmp, tmp, lit(1))
        asm.emit("MUL", dst, dst, tmp)
        if add_one:
            asm.emit("SHL", dst, dst, lit(width))
            asm.emit("ADD", dst, dst, pattern)


@dataclass(frozen=True)
class LayoutMap:
    output: int
    input_length: int
    input_index: int
    universe_bits: int
    current_set: int
    accept_mask: int
    universe_mask: int
    next_set: int
    loop_scratch: tuple
    rule_table_base: int
    rules: int
    scratch_base: int

    def to_json(self):
        keys = ("output", "input_index", "universe_bits", "current_set", "accept_mask", "rule_table_base", "rules", "scratch_base")
        return json.dumps({k: getattr(self, k) for k in keys}, indent=2) + "\n"


def make_layout(n_rules: int) -> LayoutMap:
    table = 16
    return LayoutMap(
        output=0,
        input_length=1,
        input_index=2,
        universe_bits=3,
        current_set=4,
        accept_mask=5,
        universe_mask=6,
        next_set=7,
        loop_scratch=tuple(range(8, 14)),
        rule_table_base=table,
        rules=n_rules,
        scratch_base=table + 3 * n_rules,
    )


@dataclass(frozen=True)
class EmitStats:
    rules: int
    instructions: int
    prologue: int  # straight-line instructions before the first accept test
    per_iteration: int  # executed per full loop iteration
    universe_bits: int
    space: int
    time: int
    symbols: int

    @property
    def mask_budget(self) -> float:
        """B: allowed mask-build instructions."""
        S, g = self.space, self.symbols
        return B_PER_RULE * max(self.rules, 1) * (S * math.log2(g) + math.log2(S) + 4)

    @property
    def loop_budget(self) -> int:
        """K: allowed instructions per iteration."""
        return K_PER_RULE * max(self.rules, 1)

    @property
    def bound(self) -> float:
        return BOUND_C * (self.mask_budget + self.time * self.loop_budget)

    @property
    def predicted_max(self) -> int:
        """Exact worst case: prologue, T full iterations, then the exit path."""
        return self.prologue + 2 + 1 + self.time * self.per_iteration + 1 + 2


@dataclass(frozen=True)
class TranspileArtifact:
    program: Program
    layout: LayoutMap
    stats: EmitStats
    codec: ConfigSetCodec

    def input_image(self, input) -> dict:
        c = initial_config(self.codec.spec, input, self.codec.S)
        return {self.layout.input_length: 1, self.layout.input_index: self.codec.index(c)}


def emit(codec: ConfigSetCodec, spec: NdtmSpec, bounds: Bounds, bit_budget: int = DEFAULT_BIT_BUDGET) -> TranspileArtifact:
    S, T = bounds
    if S != codec.S:
        raise ValueError("codec and bounds disagree on space")
    if codec.N > bit_budget:
        raise SizingError(f"universe of {codec.N} bits exceeds bit budget {bit_budget}")
    g = codec.g
    rules = step_rules(codec, spec)
    lay = make_layout(len(rules))
    R, ACC, UNI, NXT = cell(lay.current_set), cell(lay.accept_mask), cell(lay.universe_mask), cell(lay.next_set)
    ITER, PTR, LEFT, SEL, AMT, DIFF = (cell(a) for a in lay.loop_scratch)
    # ones(g**p) for p < S, then temporaries
    ones_at = [cell(lay.scratch_base + p) for p in range(S)]
    MULT, PAT, ACC_BLOCK = (cell(lay.scratch_base + S + k) for k in range(3))

    asm = Builder()
    asm.emit("SHL", R, lit(1), cell(lay.input_index))
    asm.emit("LOAD", cell(lay.universe_bits), lit(codec.N))
    emit_replicate(asm, UNI, lit(1), 1, codec.N, MULT)
    for p in range(S):
        emit_replicate(asm, ones_at[p], lit(1), 1, g**p, MULT)

    for i, rule in enumerate(rules):
        mask, amount, flag = (cell(lay.rule_table_base + 3 * i + k) for k in range(3))
        src = rule.mask & -rule.mask  # lowest selected bit = block base
        src = src.bit_length() - 1
        if rule.scanned is None:
            asm.emit("SHL", mask, ones_at[S - 1], lit(src))
        else:
            h2 = rule.head + (1 if rule.transition.move == "R" else -1)
            p = min(rule.head, h2)
            a2 = codec.digit[rule.scanned]
            run = g**p
            asm.emit("SHL", PAT, ones_at[p], lit(a2 * run))
            emit_replicate(asm, mask, PAT, run * g, g ** (S - p - 2), MULT)
            asm.emit("SHL", mask, mask, lit(src - a2 * run))
        asm.emit("LOAD", amount, lit(abs(rule.shift)))
        asm.emit("LOAD", flag, lit(1 if rule.shift >= 0 else 0))

    if spec.accept:
        span = S * g**S
        emit_replicate(asm, ACC_BLOCK, lit(1), 1, span, MULT)
        for q in sorted(codec.qnum[q] for q in spec.accept):
            asm.emit("SHL", PAT, ACC_BLOCK, lit(q * span))
            asm.emit("OR", ACC, ACC, PAT)
    prologue = len(asm)

    asm.emit("AND", SEL, R, ACC)
    asm.emit("JNZ", SEL, target="accept")
    asm.emit("LOAD", ITER, lit(T))
    asm.label("iter")
    asm.emit("JZ", ITER, target="reject")
    asm.emit("SUB", ITER, ITER, lit(1))
    asm.emit("LOAD", NXT, R)
    asm.emit("LOAD", PTR, lit(lay.rule_table_base))
    asm.emit("LOAD", LEFT, lit(len(rules)))
    asm.label("rule")
    asm.emit("JZ", LEFT, target="endrules")
    asm.emit("AND", SEL, R, ind(PTR.value))
    asm.emit("ADD", PTR, PTR, lit(1))
    asm.emit("LOAD", AMT, ind(PTR.value))
    asm.emit("ADD", PTR, PTR, lit(1))
    asm.emit("JZ", ind(PTR.value), target="right")
    asm.emit("SHL", SEL, SEL, AMT)
    asm.emit("JUMP", target="merge")
    asm.label("right")
    asm.emit("SHR", SEL, SEL, AMT)
    asm.label("merge")
    asm.emit("OR", NXT, NXT, SEL)
    asm.emit("ADD", PTR, PTR, lit(1))
    asm.emit("SUB", LEFT, LEFT, lit(1))
    asm.emit("JUMP", target="rule")
    asm.label("endrules")
    asm.emit("AND", NXT, NXT, UNI)
    asm.emit("AND", SEL, NXT, ACC)
    asm.emit("JNZ", SEL, target="accept")
    asm.emit("XOR", DIFF, NXT, R)
    asm.emit("JZ", DIFF, target="reject")
    asm.emit("LOAD", R, NXT)
    asm.emit("JUMP", target="iter")
    asm.label("accept")
    asm.emit("LOAD", cell(lay.output), lit(1))
    asm.emit("HALT")
    asm.label("reject")
    asm.emit("LOAD", cell(lay.output), lit(0))
    asm.emit("HALT")

    per_rule = sum(12 if r.shift >= 0 else 11 for r in rules)
    stats = EmitStats(
        rules=len(rules),
        instructions=len(asm),
        prologue=prologue,
        per_iteration=5 + per_rule + 1 + 7,
        universe_bits=codec.N,
        space=S,
        time=T,
        symbols=g,
    )
    return TranspileArtifact(asm.program(), lay, stats, codec)


def compile_machine(spec: NdtmSpec, bounds: Bounds, bit_budget: int = DEFAULT_BIT_BUDGET) -> TranspileArtifact:
    return emit(ConfigSetCodec(spec, bounds.space), spec, bounds, bit_budget)


class Disagreement(RuntimeError):
    def __init__(self, report):
        self.report = report
        super().__init__(report.describe())


@dataclass
class TripleReport:
    oracle: bool
    confset: bool
    vm: bool
    explored: int
    iterations: int
    cost: CostReport
    stats: EmitStats

    @property
    def agree(self) -> bool:
        return self.oracle == self.confset == self.vm

    @property
    def verdict(self) -> Optional[bool]:
        return self.oracle if self.agree else None

    def divergent(self) -> Optional[str]:
        """Name of the level outvoted by the other two, or None."""
        if self.agree:
            return None
        votes = {"oracle": self.oracle, "confset": self.confset, "vm": self.vm}
        majority = sum(votes.values()) >= 2
        return next(k for k, v in votes.items() if v != majority)

    def describe(self) -> str:
        word = {True: "accept", False: "reject"}
        text = f"oracle={word[self.oracle]} confset={word[self.confset]} vm={word[self.vm]}"
        if not self.agree:
            text += f"; divergent level: {self.divergent()}"
        return text

    def to_dict(self):
        d = asdict(self)
        d["agree"] = self.agree
        return d


def triple_check(spec: NdtmSpec, input, bounds: Bounds, fuel: int = 10**8, bit_budget: int = DEFAULT_BIT_BUDGET) -> TripleReport:
    """Decide ``input`` three ways: breadth-first oracle, host configuration-set
    simulation, and the transpiled program on the VM."""
    oracle = oracle_accepts(spec, input, bounds)
    art = compile_machine(spec, bounds, bit_budget)
    sim = reachable_accepts(art.codec, spec, input, bounds)
    machine = Machine(art.program)
    state = machine.run(initial_state(art.input_image(input)), fuel)
    out = state[art.layout.output]
    if out not in (0, 1):
        raise RuntimeError(f"emitted program left {out} in the output cell")
    return TripleReport(
        oracle=oracle.accepted,
        confset=sim.accepted,
        vm=bool(out),
        explored=oracle.explored,
        iterations=sim.iterations,
        cost=CostReport.of(state),
        stats=art.stats,
    )
