"""Textual MRAM assembly (``.masm``): parser and canonical printer.

Grammar, one item per line::

    name:                       ; defines a label at the next instruction
    OPCODE dst, src1, src2      ; operands: #k literal, [a] direct, [[a]] indirect
    JZ [3], name                ; jump targets are label names

Opcodes are case-insensitive and ``;`` starts a comment.
"""

from __future__ import annotations

import re
from typing import NamedTuple

from .isa import SHAPE, Instruction, Mode, Opcode, Operand, Program, operand_count, validate

_LABEL = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")
_OPERAND = re.compile(r"(#|\[\[|\[)\s*([0-9]+)\s*(\]\]|\])?\Z")


class Diagnostic(NamedTuple):
    line: int
    message: str

    def __str__(self):
        return f"line {self.line}: {self.message}"


class AsmError(ValueError):
    """Raised by :func:`parse`; ``diagnostics`` lists every defect found."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


def _operand(text):
    m = _OPERAND.match(text)
    if not m:
        raise ValueError(f"bad operand {text!r}")
    opener, digits, closer = m.groups()
    want = {"#": None, "[": "]", "[[": "]]"}[opener]
    if closer != want:
        raise ValueError(f"bad operand {text!r}")
    try:
        value = int(digits)
    except ValueError:
        raise ValueError(f"operand {text[:20]!r}... too long") from None
    mode = {"#": Mode.LITERAL, "[": Mode.DIRECT, "[[": Mode.INDIRECT}[opener]
    return Operand(mode, value)


def diagnose(text: str):
    """Parse ``text``; return ``(program_or_None, diagnostics)``. Never raises."""
    diags = []
    labels: dict[str, int] = {}
    pending = []  # (instruction index, line, opcode, operands, target label)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if ":" in line:
            name, _, line = line.partition(":")
            name = name.strip()
            line = line.strip()
            if not _LABEL.match(name):
                diags.append(Diagnostic(lineno, f"bad label name {name[:40]!r}"))
            elif name in labels:
                diags.append(Diagnostic(lineno, f"duplicate label {name}"))
            else:
                labels[name] = len(pending)
            if not line:
                continue
        mnemonic, _, rest = line.replace("\t", " ").partition(" ")
        try:
            op = Opcode(mnemonic.upper())
        except ValueError:
            diags.append(Diagnostic(lineno, f"unknown opcode {mnemonic[:40]!r}"))
            pending.append(None)
            continue
        args = [a.strip() for a in rest.split(",")] if rest.strip() else []
        need = operand_count(op)
        if len(args) != need:
            diags.append(Diagnostic(lineno, f"arity: {op.value} requires {need} operands"))
            pending.append(None)
            continue
        has_dst, nsrc, has_target = SHAPE[op]
        target = args.pop() if has_target else None
        try:
            operands = [_operand(a) for a in args]
        except ValueError as err:
            diags.append(Diagnostic(lineno, str(err)))
            pending.append(None)
            continue
        if has_target and not _LABEL.match(target):
            diags.append(Diagnostic(lineno, f"bad jump target {target[:40]!r}"))
            pending.append(None)
            continue
        if has_dst and operands[0].mode is Mode.LITERAL:
            diags.append(Diagnostic(lineno, "literal destination"))
            pending.append(None)
            continue
        pending.append((lineno, op, operands, target))

    instructions = []
    for item in pending:
        if item is None:
            instructions.append(None)
            continue
        lineno, op, operands, target = item
        idx = None
        if target is not None:
            idx = labels.get(target)
            if idx is None:
                diags.append(Diagnostic(lineno, f"undefined label {target}"))
            elif idx >= len(pending):
                diags.append(Diagnostic(lineno, f"target out of range: label {target}"))
        has_dst = SHAPE[op][0]
        dst = operands[0] if has_dst else None
        srcs = operands[1:] if has_dst else operands
        srcs += [None] * (2 - len(srcs))
        instructions.append(Instruction(op, dst, srcs[0], srcs[1], idx))

    if diags:
        diags.sort(key=lambda d: d.line)
        return None, diags
    program = Program(instructions, labels)
    defects = validate(program)
    if defects:
        return None, [Diagnostic(0, f"instruction {d.index}: {d.message}") for d in defects]
    return program, []


def parse(text: str) -> Program:
    """Parse ``.masm`` text into a validated :class:`Program`.

    Raises :class:`AsmError` listing every diagnostic (not just the first).
    """
    program, diags = diagnose(text)
    if diags:
        raise AsmError(diags)
    return program


def label_names(program: Program) -> dict[int, str]:
    """Index to printed label name, one per jump target.

    Uses an existing label when the program has one (alphabetically first),
    else ``L<index>``.
    """
    by_index: dict[int, list[str]] = {}
    for name, idx in program.labels.items():
        by_index.setdefault(idx, []).append(name)
    taken = set(program.labels)
    names = {}
    for ins in program.instructions:
        t = ins.target
        if t is None or t in names:
            continue
        if t in by_index:
            names[t] = min(by_index[t])
            continue
        name = f"L{t}"
        k = 0
        while name in taken:
            k += 1
            name = f"L{t}_{k}"
        taken.add(name)
        names[t] = name
    return names


def format_instruction(ins: Instruction, names: dict[int, str]) -> str:
    parts = [str(o) for o in (ins.dst, ins.src1, ins.src2) if o is not None]
    if ins.target is not None:
        parts.append(names[ins.target])
    if not parts:
        return ins.op.value
    return f"{ins.op.value} {', '.join(parts)}"


def print_program(program: Program) -> str:
    """Canonical text: uppercase opcodes, ``", "`` separators, a label line
    before every jump target, LF line endings."""
    defects = validate(program)
    if defects:
        raise ValueError(f"refusing to print invalid program: {defects[0]}")
    names = label_names(program)
    out = []
    for i, ins in enumerate(program.instructions):
        if i in names:
            out.append(f"{names[i]}:")
        out.append(format_instruction(ins, names))
    return "".join(line + "\n" for line in out)
