"""Deterministic MRAM executor with fuel, a bit budget, and dual cost accounting.

Memory convention used by every program in this package: cell 0 is the
output, cell 1 the input length n, cells 2..n+1 the input items, and cells
8..15 scratch for emitted code (when the input is short enough to leave them
free). Acceptance is signalled by HALT with cell 0 in {0, 1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Optional

from .isa import Instruction, Mode, Opcode, Program, validate

# dispatch codes, kept as small ints for the hot loop
_LOAD, _ADD, _SUB, _MUL, _DIV, _AND, _OR, _XOR, _SHL, _SHR, _JUMP, _JZ, _JNZ, _HALT = range(14)
_CODE = {
    Opcode.LOAD: _LOAD,
    Opcode.ADD: _ADD,
    Opcode.SUB: _SUB,
    Opcode.MUL: _MUL,
    Opcode.DIV: _DIV,
    Opcode.AND: _AND,
    Opcode.OR: _OR,
    Opcode.XOR: _XOR,
    Opcode.SHL: _SHL,
    Opcode.SHR: _SHR,
    Opcode.JUMP: _JUMP,
    Opcode.JZ: _JZ,
    Opcode.JNZ: _JNZ,
    Opcode.HALT: _HALT,
}
_MODE = {None: -1, Mode.LITERAL: 0, Mode.DIRECT: 1, Mode.INDIRECT: 2}

DEFAULT_FUEL = 10**8


class VMError(Exception):
    """Base class for execution faults. Carries the state at the fault."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class InvalidProgram(VMError):
    pass


class DivisionByZero(VMError):
    pass


class PcOutOfRange(VMError):
    pass


class FuelExhausted(VMError):
    pass


class BitBudgetExceeded(VMError):
    pass


@dataclass
class MachineState:
    pc: int = 0
    memory: dict[int, int] = field(default_factory=dict)
    halted: bool = False
    executed: int = 0
    unit_cost: int = 0
    log_cost: int = 0
    max_cell_bits: int = 0
    stored_bits: int = 0
    touched: set[int] = field(default_factory=set, repr=False)

    def __getitem__(self, addr):
        return self.memory.get(addr, 0)


@dataclass(frozen=True)
class CostReport:
    executed: int
    unit_cost: int
    log_cost: int
    max_cell_bits: int
    cells_touched: int

    @classmethod
    def of(cls, state: MachineState) -> "CostReport":
        return cls(
            state.executed,
            state.unit_cost,
            state.log_cost,
            state.max_cell_bits,
            len(state.touched),
        )


class TraceRecord(NamedTuple):
    pc: int
    op: Opcode
    addresses: tuple
    written_bits: Optional[int]


def _decode(ins: Instruction):
    d, s1, s2 = ins.dst, ins.src1, ins.src2
    return (
        _CODE[ins.op],
        _MODE[d and d.mode],
        d.value if d else 0,
        _MODE[s1 and s1.mode],
        s1.value if s1 else 0,
        _MODE[s2 and s2.mode],
        s2.value if s2 else 0,
        ins.target,
    )


def initial_state(input_image: Optional[Mapping[int, int]] = None) -> MachineState:
    state = MachineState()
    for addr, value in (input_image or {}).items():
        if addr < 0 or value < 0:
            raise ValueError("addresses and values must be naturals")
        if value:
            state.memory[addr] = value
            state.stored_bits += value.bit_length()
    return state


class Machine:
    """Executes one program; owns nothing but the decoded instruction table."""

    def __init__(self, program: Program, bit_budget: Optional[int] = None):
        defects = validate(program)
        if defects:
            raise InvalidProgram(f"invalid program: {defects[0].index}: {defects[0].message}")
        self.program = program
        self.code = [_decode(ins) for ins in program.instructions]
        self.bit_budget = bit_budget

    def step(self, state: MachineState, record: Optional[list] = None) -> MachineState:
        """Execute one instruction in place and return ``state``."""
        if state.halted:
            raise VMError("machine is halted", state)
        pc = state.pc
        try:
            op, dm, dv, m1, v1, m2, v2, target = self.code[pc]
        except IndexError:
            raise PcOutOfRange(f"pc {pc} outside program without HALT", state) from None
        mem = state.memory
        touched = state.touched
        addrs = []
        log = 1

        # sources
        if m1 == 0:
            x = v1
        elif m1 == 1:
            x = mem.get(v1, 0)
            addrs.append(v1)
        elif m1 == 2:
            a = mem.get(v1, 0)
            x = mem.get(a, 0)
            addrs.append(v1)
            addrs.append(a)
        else:
            x = 0
        if m1 >= 0:
            log += x.bit_length() or 1
        if m2 == 0:
            y = v2
        elif m2 == 1:
            y = mem.get(v2, 0)
            addrs.append(v2)
        elif m2 == 2:
            a = mem.get(v2, 0)
            y = mem.get(a, 0)
            addrs.append(v2)
            addrs.append(a)
        else:
            y = 0
        if m2 >= 0:
            log += y.bit_length() or 1

        next_pc = pc + 1
        result = None
        if op == _LOAD:
            result = x
        elif op == _ADD:
            result = x + y
        elif op == _SUB:
            result = x - y if x > y else 0
        elif op == _MUL:
            if self.bit_budget is not None and x and y and x.bit_length() + y.bit_length() - 1 > self.bit_budget:
                self._fault(state, log, addrs, record, BitBudgetExceeded("product exceeds bit budget", state))
            result = x * y
        elif op == _DIV:
            if y == 0:
                self._fault(state, log, addrs, record, DivisionByZero(f"division by zero at pc {pc}", state))
            result = x // y
        elif op == _AND:
            result = x & y
        elif op == _OR:
            result = x | y
        elif op == _XOR:
            result = x ^ y
        elif op == _SHL:
            if self.bit_budget is not None and x and x.bit_length() + y > self.bit_budget:
                self._fault(state, log, addrs, record, BitBudgetExceeded("shift exceeds bit budget", state))
            result = x << y
        elif op == _SHR:
            result = x >> y
        elif op == _JUMP:
            next_pc = target
        elif op == _JZ:
            if x == 0:
                next_pc = target
        elif op == _JNZ:
            if x != 0:
                next_pc = target
        else:
            state.halted = True

        written = None
        if result is not None:
            if dm == 1:
                addr = dv
                addrs.append(dv)
            else:
                addr = mem.get(dv, 0)
                addrs.append(dv)
                addrs.append(addr)
            written = result.bit_length() or 1
            log += written
            old = mem.get(addr, 0)
            if result:
                mem[addr] = result
            elif old:
                del mem[addr]
            state.stored_bits += result.bit_length() - old.bit_length()
            if written > state.max_cell_bits:
                state.max_cell_bits = written
            if self.bit_budget is not None and state.stored_bits > self.bit_budget:
                err = BitBudgetExceeded(f"stored bits {state.stored_bits} exceed budget {self.bit_budget}", state)
                self._fault(state, log, addrs, record, err, written)

        for a in addrs:
            log += a.bit_length() or 1
        state.executed += 1
        state.unit_cost += 1
        state.log_cost += log
        touched.update(addrs)
        state.pc = next_pc
        if record is not None:
            record.append(TraceRecord(pc, self.program.instructions[pc].op, tuple(addrs), written))
        return state

    def _fault(self, state, log, addrs, record, err, written=None):
        """Charge the faulting step, record it, and raise ``err``. pc stays on it."""
        self._charge(state, log, addrs)
        state.touched.update(addrs)
        if record is not None:
            record.append(TraceRecord(state.pc, self.program.instructions[state.pc].op, tuple(addrs), written))
        raise err

    @staticmethod
    def _charge(state, log, addrs):
        for a in addrs:
            log += a.bit_length() or 1
        state.executed += 1
        state.unit_cost += 1
        state.log_cost += log

    def run(self, state: MachineState, fuel: int = DEFAULT_FUEL, record: Optional[list] = None):
        step = self.step
        while not state.halted:
            if state.executed >= fuel:
                raise FuelExhausted(f"fuel {fuel} exhausted at pc {state.pc}", state)
            step(state, record)
        return state


def step(state: MachineState, program: Program) -> MachineState:
    """Advance ``state`` by one instruction of ``program`` (in place)."""
    return Machine(program).step(state)


def run(
    program: Program,
    input_image: Optional[Mapping[int, int]] = None,
    fuel: int = DEFAULT_FUEL,
    bit_budget: Optional[int] = None,
):
    """Run to HALT. Returns ``(state, CostReport)``; faults raise :class:`VMError`."""
    machine = Machine(program, bit_budget)
    state = machine.run(initial_state(input_image), fuel)
    return state, CostReport.of(state)


def trace(program: Program, input_image=None, fuel: int = DEFAULT_FUEL, bit_budget=None):
    """Per-step ``TraceRecord`` list. Written values appear by bit length only.

    On a fault the records up to and including the faulting step are attached
    to the raised error as ``err.trace``.
    """
    machine = Machine(program, bit_budget)
    record: list[TraceRecord] = []
    try:
        machine.run(initial_state(input_image), fuel, record)
    except VMError as err:
        err.trace = record
        raise
    return record
