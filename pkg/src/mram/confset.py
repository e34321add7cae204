"""Configuration-set simulation on the host.

The set of configurations reachable within t steps is one integer whose bit i
is set iff configuration i (under :class:`ConfigSetCodec`) is reachable. One
step of the whole set is a fixed list of mask-and-shift rules. The transpiler
emits this same algorithm as MRAM code.
"""

from __future__ import annotations

from typing import NamedTuple

from .ndtm import MOVES, Bounds, ConfigSetCodec, NdtmSpec, Transition, initial_config
from .word import blockmask, digitmask


class StepRule(NamedTuple):
    mask: int
    shift: int
    transition: Transition
    head: int
    scanned: object  # symbol under the head after the move, None for N-moves


def accept_mask(codec: ConfigSetCodec, spec: NdtmSpec) -> int:
    m = 0
    for q in spec.accept:
        qn = codec.qnum[q]
        for h in range(codec.S):
            for a in range(codec.g):
                m |= blockmask(codec.base(qn, h, a), codec.block)
    return m


def step_rules(codec: ConfigSetCodec, spec: NdtmSpec) -> list[StepRule]:
    """Mask/shift rules realising one step of every transition at every head
    position that keeps the head on the tape.

    Moving the head from h to h' = h +- 1 only swaps which of the two cells is
    stored in the block header; the other cell's digit sits at rest position
    ``min(h, h')`` both before and after, so the move is a constant shift
    within the sub-block whose digit there is the newly scanned symbol.
    """
    S, g, block = codec.S, codec.g, codec.block
    rules = []
    for t in spec.transitions:
        q, a = codec.qnum[t.state], codec.digit[t.read]
        q2, b = codec.qnum[t.next_state], codec.digit[t.write]
        d = MOVES[t.move]
        for h in range(S):
            h2 = h + d
            if not 0 <= h2 < S:
                continue
            src = codec.base(q, h, a)
            if d == 0:
                rules.append(StepRule(blockmask(src, block), codec.base(q2, h, b) - src, t, h, None))
                continue
            p = min(h, h2)
            for a2 in range(g):
                mask = digitmask(g, p, a2, S - 1) << src
                shift = codec.base(q2, h2, a2) - src + (b - a2) * g**p
                rules.append(StepRule(mask, shift, t, h, codec.symbols[a2]))
    return rules


def apply_rule(R: int, rule: StepRule) -> int:
    sel = R & rule.mask
    return sel << rule.shift if rule.shift >= 0 else sel >> -rule.shift


def step_set(R: int, rules, universe: int) -> int:
    """``R`` together with every one-step successor of a member of ``R``,
    clipped to the ``universe`` mask."""
    out = R
    for rule in rules:
        out |= apply_rule(R, rule)
    return out & universe


class SimResult(NamedTuple):
    accepted: bool
    iterations: int


def reachable_accepts(codec: ConfigSetCodec, spec: NdtmSpec, input, bounds: Bounds, rules=None) -> SimResult:
    S, T = bounds
    if S != codec.S:
        raise ValueError("codec and bounds disagree on space")
    rules = step_rules(codec, spec) if rules is None else rules
    acc = accept_mask(codec, spec)
    universe = blockmask(0, codec.N)
    R = 1 << codec.index(initial_config(spec, input, S))
    if R & acc:
        return SimResult(True, 0)
    for t in range(1, T + 1):
        nxt = step_set(R, rules, universe)
        if nxt & acc:
            return SimResult(True, t)
        if nxt == R:
            return SimResult(False, t)
        R = nxt
    return SimResult(False, T)


def rule_mismatches(spec: NdtmSpec, S: int) -> list:
    """Configurations where applying every rule to the singleton set differs
    from :func:`successors`; empty means the rules are sound for ``S``."""
    from .ndtm import successors
    from .word import bits

    codec = ConfigSetCodec(spec, S)
    rules = step_rules(codec, spec)
    table = spec.table()
    bad = []
    for i in range(codec.N):
        c = codec.unindex(i)
        got = 0
        for rule in rules:
            got |= apply_rule(1 << i, rule)
        want = {codec.index(n) for n in successors(spec, c, S, table)}
        if set(bits(got)) != want:
            bad.append((c, sorted(bits(got)), sorted(want)))
    return bad
