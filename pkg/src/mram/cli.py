"""``mram`` command line. Every command is a thin wrapper over library calls.

Exit codes: 0 success, 1 fault or verdict disagreement, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import asm, bench, problems, vm
from .confset import reachable_accepts
from .ndtm import CORPUS, Bounds, ConfigSetCodec, NdtmSpec, load_corpus, oracle_accepts, validate_spec
from .transpile import DEFAULT_BIT_BUDGET, Disagreement, SizingError, compile_machine, triple_check


class UsageError(Exception):
    pass


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8", errors="replace")
    except OSError as err:
        raise UsageError(str(err)) from None


def _program(path):
    try:
        return asm.parse(_read(path))
    except asm.AsmError as err:
        raise UsageError(f"{path}:\n{err}") from None


def _spec(ref):
    if not Path(ref).exists() and ref.replace("-", "_") in CORPUS:
        return load_corpus(ref)
    try:
        spec = NdtmSpec.loads(_read(ref))
    except (ValueError, KeyError, TypeError) as err:
        raise UsageError(f"{ref}: not an NDTM spec: {err}") from None
    defects = validate_spec(spec)
    if defects:
        raise UsageError(f"{ref}:\n" + "\n".join(defects))
    return spec


def _cnf(path):
    try:
        return problems.parse_dimacs(_read(path))
    except problems.DimacsError as err:
        raise UsageError(f"{path}:\n{err}") from None


def _ints(text):
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated naturals, got {text!r}") from None


def _word(args, spec):
    word = args.input or ""
    if " " in spec.input_alphabet or any(len(a) != 1 for a in spec.input_alphabet):
        word = tuple(word.split(",")) if word else ()
    return word


def _bounds(args, word):
    S = args.space if args.space is not None else max(len(word), 1)
    T = args.time if args.time is not None else S
    return Bounds(S, T)


def _verdict(b):
    return "accept" if b else "reject"


def cmd_run(args):
    program = _program(args.program)
    items = _ints(args.input)
    image = {1: len(items), **{2 + i: v for i, v in enumerate(items)}}
    machine = vm.Machine(program, args.bit_budget)
    state = vm.initial_state(image)
    record = [] if args.trace else None
    try:
        machine.run(state, args.fuel, record)
        code = 0
    except vm.VMError as err:
        print(f"fault: {type(err).__name__}: {err}", file=sys.stderr)
        code = 1
    if record is not None:
        for r in record:
            addrs = ",".join(map(str, r.addresses)) or "-"
            bits = "-" if r.written_bits is None else r.written_bits
            print(f"{r.pc}\t{r.op.value}\t{addrs}\t{bits}")
    rep = vm.CostReport.of(state)
    print(f"output: {state[0]}")
    print(f"executed: {rep.executed}")
    if args.cost in ("unit", "both"):
        print(f"unit_cost: {rep.unit_cost}")
    if args.cost in ("log", "both"):
        print(f"log_cost: {rep.log_cost}")
    print(f"max_cell_bits: {rep.max_cell_bits}")
    print(f"cells_touched: {rep.cells_touched}")
    return code


def cmd_fmt(args):
    sys.stdout.write(asm.print_program(_program(args.program)))
    return 0


def _write_artifact(art, out, layout):
    text = asm.print_program(art.program)
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)
    if layout:
        Path(layout).write_text(art.layout.to_json(), encoding="utf-8", newline="")


def cmd_ndtm(args):
    spec = _spec(args.spec)
    if args.action == "validate":
        print(f"ok: {len(spec.states)} states, {len(spec.tape_alphabet)} symbols, {len(spec.transitions)} transitions")
        return 0
    word = _word(args, spec)
    bounds = _bounds(args, word)
    try:
        if args.action == "oracle":
            res = oracle_accepts(spec, word, bounds)
            print(f"{_verdict(res.accepted)} (explored {res.explored} configurations)")
            for c in res.witness or ():
                print(f"  {c.state} head={c.head} tape={''.join(c.tape)}")
        elif args.action == "simulate":
            codec = ConfigSetCodec(spec, bounds.space)
            res = reachable_accepts(codec, spec, word, bounds)
            print(f"{_verdict(res.accepted)} after {res.iterations} iterations (universe {codec.N} bits)")
        elif args.action == "compile":
            art = compile_machine(spec, bounds, args.bit_budget)
            _write_artifact(art, args.output, args.layout)
            print(f"seed cell 2 with {art.input_image(word)[2]}", file=sys.stderr)
        else:
            rep = triple_check(spec, word, bounds, fuel=args.fuel, bit_budget=args.bit_budget)
            print(rep.describe())
            print(json.dumps(rep.to_dict(), indent=2, default=str))
            return 0 if rep.agree else 1
    except SizingError as err:
        raise UsageError(str(err)) from None
    except ValueError as err:
        raise UsageError(str(err)) from None
    return 0


def cmd_sat(args):
    f = _cnf(args.cnf)
    if args.action == "oracle":
        res = problems.sat_oracle(f)
        if res.assignment is None:
            print(f"UNSAT (tested {res.tested} assignments)")
        else:
            lits = [i + 1 if v else -(i + 1) for i, v in enumerate(res.assignment)]
            print(f"SAT {' '.join(map(str, lits))} (tested {res.tested} assignments)")
        return 0
    spec, bounds = problems.cnf_to_ndtm(f)
    if args.action == "compile":
        text = spec.dumps()
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        print(f"bounds: space={bounds.space} time={bounds.time}", file=sys.stderr)
        if args.masm:
            _write_artifact(compile_machine(spec, bounds, args.bit_budget), args.masm, args.layout)
        return 0
    rep = triple_check(spec, "", bounds, bit_budget=args.bit_budget)
    truth = problems.sat_oracle(f).assignment is not None
    print(rep.describe() + f" sat_oracle={'SAT' if truth else 'UNSAT'}")
    return 0 if rep.agree and rep.verdict == truth else 1


def cmd_sort(args):
    program = problems.direct_sort_program(args.n, args.max_key)
    if args.action == "emit":
        text = asm.print_program(program)
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8", newline="")
        else:
            sys.stdout.write(text)
        return 0
    keys = _ints(args.keys)
    lay = problems.sort_layout(len(keys), args.max_key)
    program = problems.direct_sort_program(len(keys), args.max_key)
    try:
        state, rep = vm.run(program, lay.input_image(keys), fuel=args.fuel)
    except vm.VMError as err:
        print(f"fault: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    print(",".join(map(str, lay.read_output(state))))
    print(f"executed: {rep.executed}")
    return 0


def cmd_bench(args):
    try:
        sizes = bench.parse_sizes(args.sizes)
    except ValueError as err:
        raise UsageError(str(err)) from None
    try:
        rows, _, fit = bench.scaling(args.problem, sizes, args.seed, report_path=args.report, fuel=args.fuel, bit_budget=args.bit_budget)
    except Disagreement as err:
        print(f"verdict disagreement: {err}", file=sys.stderr)
        return 1
    except SizingError as err:
        raise UsageError(str(err)) from None
    if not args.report:
        sys.stdout.write(bench.rows_to_csv(rows))
    if fit:
        for metric in bench.METRICS:
            m = fit[metric]
            slopes = " ".join(f"{s:.2f}" for s in m["loglog_slopes"])
            print(f"{metric}: {m['classification']} (log-log slopes {slopes})", file=sys.stderr)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="mram", description="MRAM workbench")
    sub = p.add_subparsers(dest="command", required=True)

    def limits(sp):
        sp.add_argument("--fuel", type=int, default=vm.DEFAULT_FUEL)
        sp.add_argument("--bit-budget", type=int, default=DEFAULT_BIT_BUDGET)

    r = sub.add_parser("run", help="execute a .masm program")
    r.add_argument("program")
    r.add_argument("--input", help="comma-separated input items (cells 2..)")
    r.add_argument("--cost", choices=("unit", "log", "both"), default="both")
    r.add_argument("--trace", action="store_true")
    limits(r)
    r.set_defaults(func=cmd_run)

    f = sub.add_parser("fmt", help="print a .masm program in canonical form")
    f.add_argument("program")
    f.set_defaults(func=cmd_fmt)

    n = sub.add_parser("ndtm", help="NDTM tools")
    n.add_argument("action", choices=("validate", "oracle", "simulate", "compile", "check"))
    n.add_argument("spec", help=f"spec JSON path or corpus name ({', '.join(CORPUS)})")
    n.add_argument("--input", default="")
    n.add_argument("--space", type=int)
    n.add_argument("--time", type=int)
    n.add_argument("-o", "--output")
    n.add_argument("--layout")
    limits(n)
    n.set_defaults(func=cmd_ndtm)

    s = sub.add_parser("sat", help="DIMACS CNF tools")
    s.add_argument("action", choices=("oracle", "compile", "check"))
    s.add_argument("cnf")
    s.add_argument("-o", "--output", help="machine JSON (compile)")
    s.add_argument("--masm", help="also write the transpiled program")
    s.add_argument("--layout")
    limits(s)
    s.set_defaults(func=cmd_sat)

    so = sub.add_parser("sort", help="direct-address counting sort")
    so.add_argument("action", choices=("emit", "run"))
    so.add_argument("--n", type=int, default=0)
    so.add_argument("--max-key", type=int, default=255)
    so.add_argument("--keys", default="", help="keys for 'run'")
    so.add_argument("-o", "--output")
    limits(so)
    so.set_defaults(func=cmd_sort)

    b = sub.add_parser("bench", help="scaling experiments")
    b.add_argument("action", choices=("scaling",))
    b.add_argument("--problem", default="sat", choices=("sat",) + CORPUS)
    b.add_argument("--sizes", default="1..4")
    b.add_argument("--seed", type=int, default=7)
    b.add_argument("--report", help="CSV path; a .json sidecar is written next to it")
    limits(b)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
