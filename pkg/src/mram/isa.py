"""The MRAM instruction set, programs, and the two cost models."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from .word import bitlen


class Opcode(enum.Enum):
    LOAD = "LOAD"
    ADD = "ADD"
    SUB = "SUB"
    MUL = "MUL"
    DIV = "DIV"
    AND = "AND"
    OR = "OR"
    XOR = "XOR"
    SHL = "SHL"
    SHR = "SHR"
    JUMP = "JUMP"
    JZ = "JZ"
    JNZ = "JNZ"
    HALT = "HALT"


ARITH = frozenset(
    {
        Opcode.ADD,
        Opcode.SUB,
        Opcode.MUL,
        Opcode.DIV,
        Opcode.AND,
        Opcode.OR,
        Opcode.XOR,
        Opcode.SHL,
        Opcode.SHR,
    }
)
JUMPS = frozenset({Opcode.JUMP, Opcode.JZ, Opcode.JNZ})

# (has dst, number of sources, has jump target)
SHAPE = {
    Opcode.LOAD: (True, 1, False),
    Opcode.JUMP: (False, 0, True),
    Opcode.JZ: (False, 1, True),
    Opcode.JNZ: (False, 1, True),
    Opcode.HALT: (False, 0, False),
    **{op: (True, 2, False) for op in ARITH},
}


def operand_count(op: Opcode) -> int:
    """Number of textual operands, the jump target included."""
    has_dst, nsrc, has_target = SHAPE[op]
    return has_dst + nsrc + has_target


class Mode(enum.Enum):
    LITERAL = "literal"
    DIRECT = "direct"
    INDIRECT = "indirect"


@dataclass(frozen=True)
class Operand:
    mode: Mode
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("operand values are naturals")

    def __str__(self):
        if self.mode is Mode.LITERAL:
            return f"#{self.value}"
        if self.mode is Mode.DIRECT:
            return f"[{self.value}]"
        return f"[[{self.value}]]"


def lit(v: int) -> Operand:
    return Operand(Mode.LITERAL, v)


def cell(a: int) -> Operand:
    return Operand(Mode.DIRECT, a)


def ind(a: int) -> Operand:
    return Operand(Mode.INDIRECT, a)


@dataclass(frozen=True)
class Instruction:
    op: Opcode
    dst: Optional[Operand] = None
    src1: Optional[Operand] = None
    src2: Optional[Operand] = None
    target: Optional[int] = None

    def sources(self):
        return [s for s in (self.src1, self.src2) if s is not None]


@dataclass
class Program:
    """An instruction sequence plus label names.

    Labels are presentation only, so two programs compare equal when their
    instructions do.
    """

    instructions: list[Instruction]
    labels: dict[str, int] = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def __getitem__(self, i):
        return self.instructions[i]


class CostModel(enum.Enum):
    UNIT = "unit"
    LOG = "log"


class Defect(NamedTuple):
    index: int
    message: str


def instruction_cost(
    instr: Instruction,
    operand_values: Sequence[int],
    operand_addresses: Sequence[int],
    model: CostModel,
) -> int:
    """Cost of one executed instruction.

    ``operand_values`` holds every value the instruction read or wrote and
    ``operand_addresses`` every effective address it touched.
    """
    if model is CostModel.UNIT:
        return 1
    return 1 + sum(bitlen(v) for v in operand_values) + sum(bitlen(a) for a in operand_addresses)


def check_instruction(ins: Instruction, n: int) -> list[str]:
    has_dst, nsrc, has_target = SHAPE[ins.op]
    problems = []
    if (ins.dst is not None) != has_dst:
        problems.append(f"arity: {ins.op.value} {'requires' if has_dst else 'takes no'} destination")
    srcs = [ins.src1, ins.src2]
    for k in range(2):
        if (srcs[k] is not None) != (k < nsrc):
            problems.append(f"arity: {ins.op.value} requires {nsrc} source operand(s)")
            break
    if has_target:
        if ins.target is None:
            problems.append(f"arity: {ins.op.value} requires a jump target")
        elif not 0 <= ins.target < n:
            problems.append("target out of range")
    elif ins.target is not None:
        problems.append(f"arity: {ins.op.value} takes no jump target")
    if ins.dst is not None and ins.dst.mode is Mode.LITERAL:
        problems.append("literal destination")
    return problems


def validate(program: Program) -> list[Defect]:
    """All structural defects of ``program``; empty means runnable."""
    n = len(program.instructions)
    report = []
    for i, ins in enumerate(program.instructions):
        report.extend(Defect(i, msg) for msg in check_instruction(ins, n))
    for name, idx in program.labels.items():
        if not 0 <= idx <= n:
            report.append(Defect(idx, f"label {name} out of range"))
    return report
