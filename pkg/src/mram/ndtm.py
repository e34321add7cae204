"""Space/time-bounded single-tape nondeterministic Turing machines.

Holds the machine description and its JSON form, configurations, the
configuration-to-index codec, and the brute-force breadth-first acceptance
oracle that every faster route is checked against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import NamedTuple, Optional, Sequence

MOVES = {"L": -1, "R": 1, "N": 0}


class Transition(NamedTuple):
    state: str
    read: str
    next_state: str
    write: str
    move: str


class Bounds(NamedTuple):
    space: int
    time: int


class Configuration(NamedTuple):
    state: str
    head: int
    tape: tuple


@dataclass(frozen=True)
class NdtmSpec:
    states: tuple
    tape_alphabet: tuple
    blank: str
    input_alphabet: tuple
    transitions: tuple
    start: str
    accept: frozenset
    reject: frozenset
    name: str = field(default="", compare=False)

    @classmethod
    def build(cls, states, tape_alphabet, blank, input_alphabet, transitions, start, accept, reject, name=""):
        return cls(
            tuple(states),
            tuple(tape_alphabet),
            blank,
            tuple(input_alphabet),
            tuple(Transition(*t) for t in transitions),
            start,
            frozenset(accept),
            frozenset(reject),
            name,
        )

    @classmethod
    def from_dict(cls, d, name=""):
        return cls.build(
            d["states"],
            d["tape_alphabet"],
            d["blank"],
            d["input_alphabet"],
            d["transitions"],
            d["start"],
            d["accept"],
            d["reject"],
            name or d.get("name", ""),
        )

    @classmethod
    def loads(cls, text, name=""):
        return cls.from_dict(json.loads(text), name)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls.loads(f.read())

    def to_dict(self):
        return {
            "states": list(self.states),
            "tape_alphabet": list(self.tape_alphabet),
            "blank": self.blank,
            "input_alphabet": list(self.input_alphabet),
            "transitions": [list(t) for t in self.transitions],
            "start": self.start,
            "accept": sorted(self.accept, key=self.states.index),
            "reject": sorted(self.reject, key=self.states.index),
        }

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @property
    def halting(self):
        return self.accept | self.reject

    def table(self):
        """(state, read) -> transitions, in declaration order."""
        t: dict[tuple, list] = {}
        for tr in self.transitions:
            t.setdefault((tr.state, tr.read), []).append(tr)
        return t


def validate_spec(spec: NdtmSpec) -> list[str]:
    defects = []
    Q = set(spec.states)
    G = set(spec.tape_alphabet)
    if len(Q) != len(spec.states):
        defects.append("duplicate state names")
    if len(G) != len(spec.tape_alphabet):
        defects.append("duplicate tape symbols")
    if spec.start not in Q:
        defects.append(f"start state {spec.start!r} not in states")
    if spec.blank not in G:
        defects.append(f"blank {spec.blank!r} not in tape alphabet")
    for s in spec.input_alphabet:
        if s == spec.blank:
            defects.append("blank in input alphabet")
        elif s not in G:
            defects.append(f"input symbol {s!r} not in tape alphabet")
    for q in sorted(spec.accept - Q):
        defects.append(f"accepting state {q!r} not in states")
    for q in sorted(spec.reject - Q):
        defects.append(f"rejecting state {q!r} not in states")
    for q in sorted(spec.accept & spec.reject):
        defects.append(f"state {q!r} both accepting and rejecting")
    for i, t in enumerate(spec.transitions):
        if len(t) != 5:
            defects.append(f"transition {i}: expected 5 fields")
            continue
        for q in (t.state, t.next_state):
            if q not in Q:
                defects.append(f"transition {i}: unknown state {q!r}")
        for a in (t.read, t.write):
            if a not in G:
                defects.append(f"transition {i}: unknown symbol {a!r}")
        if t.move not in MOVES:
            defects.append(f"transition {i}: bad move {t.move!r}")
        if t.state in spec.accept or t.state in spec.reject:
            defects.append(f"transition {i}: leaves halting state {t.state!r}")
    return defects


def initial_config(spec: NdtmSpec, input: Sequence[str], S: int) -> Configuration:
    if len(input) > S:
        raise ValueError(f"input of length {len(input)} does not fit in {S} cells")
    for s in input:
        if s not in spec.input_alphabet:
            raise ValueError(f"symbol {s!r} not in input alphabet")
    return Configuration(spec.start, 0, tuple(input) + (spec.blank,) * (S - len(input)))


def successors(spec: NdtmSpec, c: Configuration, S: int, table=None) -> set:
    """One layer of the computation tree. Branches whose head would leave
    ``[0, S)`` die; halting configurations have no successors."""
    if c.state in spec.accept or c.state in spec.reject:
        return set()
    table = table if table is not None else spec.table()
    out = set()
    for t in table.get((c.state, c.tape[c.head]), ()):
        h = c.head + MOVES[t.move]
        if not 0 <= h < S:
            continue
        tape = c.tape[: c.head] + (t.write,) + c.tape[c.head + 1 :]
        out.add(Configuration(t.next_state, h, tape))
    return out


class OracleResult(NamedTuple):
    accepted: bool
    witness: Optional[list]
    explored: int


def oracle_accepts(spec: NdtmSpec, input, bounds: Bounds) -> OracleResult:
    """Layered breadth-first search over configurations for at most
    ``bounds.time`` steps.

    The witness is a shortest accepting path. The search always runs to the
    time bound (or until no new configurations appear) so ``explored`` is the
    size of the whole bounded computation graph, independent of where the
    first accepting configuration sits.
    """
    S, T = bounds
    start = initial_config(spec, input, S)
    table = spec.table()
    parent = {start: None}
    frontier = [start]
    hit = start if start.state in spec.accept else None
    t = 0
    while frontier and t < T:
        t += 1
        layer = []
        for c in frontier:
            for n in sorted(successors(spec, c, S, table)):
                if n in parent:
                    continue
                parent[n] = c
                layer.append(n)
                if hit is None and n.state in spec.accept:
                    hit = n
        frontier = layer
    if hit is None:
        return OracleResult(False, None, len(parent))
    path = []
    while hit is not None:
        path.append(hit)
        hit = parent[hit]
    return OracleResult(True, path[::-1], len(parent))


class ConfigSetCodec:
    """Bijection between configurations and ``[0, N)``.

    Symbols are numbered with blank = 0 then tape-alphabet order; states with
    start = 0 then declaration order. The index of ``(q, h, tape)`` is
    ``base(q, h, tape[h])`` plus the remaining cells read as base-``g`` digits,
    lowest cell least significant, with cell ``h`` skipped.
    """

    def __init__(self, spec: NdtmSpec, S: int):
        if S < 1:
            raise ValueError("space bound must be at least 1")
        self.spec = spec
        self.S = S
        self.symbols = [spec.blank] + [a for a in spec.tape_alphabet if a != spec.blank]
        self.states = [spec.start] + [q for q in spec.states if q != spec.start]
        self.digit = {a: i for i, a in enumerate(self.symbols)}
        self.qnum = {q: i for i, q in enumerate(self.states)}
        self.g = len(self.symbols)
        self.block = self.g ** (S - 1)
        self.N = len(self.states) * S * self.g**S

    def base(self, q: int, h: int, a: int) -> int:
        return ((q * self.S + h) * self.g + a) * self.block

    def index(self, c: Configuration) -> int:
        h = c.head
        rest = 0
        for j in reversed(range(self.S)):
            if j != h:
                rest = rest * self.g + self.digit[c.tape[j]]
        return self.base(self.qnum[c.state], h, self.digit[c.tape[h]]) + rest

    def unindex(self, i: int) -> Configuration:
        if not 0 <= i < self.N:
            raise ValueError(f"index {i} outside [0, {self.N})")
        i, rest = divmod(i, self.block)
        i, a = divmod(i, self.g)
        q, h = divmod(i, self.S)
        tape = []
        for j in range(self.S):
            if j == h:
                tape.append(self.symbols[a])
            else:
                rest, d = divmod(rest, self.g)
                tape.append(self.symbols[d])
        return Configuration(self.states[q], h, tuple(tape))

    def to_dict(self):
        return {"symbols": self.symbols, "states": self.states, "space": self.S, "universe_bits": self.N}


def config_index(codec: ConfigSetCodec, c: Configuration) -> int:
    return codec.index(c)


def config_unindex(codec: ConfigSetCodec, i: int) -> Configuration:
    return codec.unindex(i)


CORPUS = ("guess_bit", "always_reject", "parity")


def load_corpus(name: str) -> NdtmSpec:
    """One of the shipped machines: ``guess_bit``, ``always_reject``, ``parity``."""
    key = name.replace("-", "_")
    if key not in CORPUS:
        raise KeyError(f"unknown corpus machine {name!r}; known: {', '.join(CORPUS)}")
    text = resources.files("mram.corpus").joinpath(f"{key}.json").read_text(encoding="utf-8")
    return NdtmSpec.loads(text, name=key)


def parity_time(word) -> int:
    """Steps the parity machine needs on ``word``: one per symbol plus the verdict."""
    return len(word) + 1
