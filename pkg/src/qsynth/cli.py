"""Command-line entry point: ``qsynth synth|train|verify``."""
from __future__ import annotations

import argparse
import json
import sys

from . import blocks, qasm, sim, verify
from .circuit import Circuit
from .errors import CircuitError
from .perceptron import (
    PerceptronSpec,
    build_training_circuit,
    encode_weights,
    enumerate_solutions,
    oracle_marked,
    satisfies,
    split_measured,
)

BLOCKS = ("adder", "multiplier", "comparator", "mct", "mcz")
# exhaustive oracle check over weights is skipped above this many search bits
MAX_ORACLE_CHECK_BITS = 16


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"qsynth: {msg}", file=sys.stderr)


def _emit_options(args) -> qasm.EmitOptions:
    mode = qasm.NATIVE_C3X if args.cccx == "native" else qasm.DECOMPOSE_CCX
    return qasm.EmitOptions(cccx_mode=mode, include_comments=not args.no_comments)


def build_block(block: str, widths: list[int]) -> Circuit:
    if any(w < 1 for w in widths):
        raise UsageError("widths must be positive")
    need = 2 if block == "multiplier" else 1
    if len(widths) != need:
        raise UsageError(f"{block} takes {need} width(s), got {len(widths)}")
    c = Circuit()
    if block == "adder":
        n, = widths
        i1, i2 = c.add_register("i1", n), c.add_register("i2", n)
        blocks.adder(c, i1, i2)
        c.measure(i2)
    elif block == "multiplier":
        n1, n2 = widths
        i1, i2 = c.add_register("i1", n1), c.add_register("i2", n2)
        result = c.add_register("result", n1 + n2)
        blocks.multiplier_asymmetric(c, i1, i2, result)
        c.measure(result)
    elif block == "comparator":
        n, = widths
        i1, i2 = c.add_register("i1", n), c.add_register("i2", n)
        flag = c.add_register("flag", 1)
        blocks.if_equal(c, i1, i2, flag[0])
        c.measure(flag)
    else:
        k, = widths
        ctrl, tgt = c.add_register("ctrl", k), c.add_register("tgt", 1)
        if block == "mct":
            blocks.multi_control_gate_3cx(c, ctrl, tgt[0])
        else:
            blocks.multi_control_z(c, ctrl, tgt[0])
        c.measure(tgt)
    c.plot_ancilla()
    return c


def cmd_synth(args) -> int:
    c = build_block(args.block, args.widths)
    qasm.write(c, args.out, _emit_options(args))
    print(f"qubits: {c.total_qubits}")
    print(f"gates: {len(c.gates)}")
    print(f"ancillas: {c.ancilla_watermark}")
    return 0


def _load_spec(args) -> PerceptronSpec:
    values = {}
    if args.config:
        with open(args.config, encoding="utf-8") as f:
            values.update(json.load(f))
    for key, attr in (("i1_value", "i1"), ("i2_value", "i2"), ("ac_value", "ac"),
                      ("weight_bits", "weight_bits"), ("ac_bits", "ac_bits"),
                      ("input_bits", "input_bits")):
        if getattr(args, attr) is not None:
            values[key] = getattr(args, attr)
    missing = {"i1_value", "i2_value", "ac_value"} - values.keys()
    if missing:
        raise UsageError("missing " + ", ".join(sorted(missing)) + " (flags or --config)")
    return PerceptronSpec(**values)


def _describe(spec: PerceptronSpec, bits: str) -> str:
    w = split_measured(bits, spec)
    lhs = f"({spec.i1_value}*{w.w1} + {spec.i2_value}*{w.w2})*{w.w3}"
    value = (spec.i1_value * w.w1 + spec.i2_value * w.w2) * w.w3
    verdict = "ok" if satisfies(spec, w) else "no"
    return f"{bits} -> w1={w.w1} w2={w.w2} w3={w.w3}: {lhs} = {value} [{verdict}]"


def cmd_train(args) -> int:
    if args.shots < 1:
        raise UsageError("--shots must be positive")
    if args.iterations is not None and args.iterations < 0:
        raise UsageError("--iterations must be nonnegative")
    spec = _load_spec(args)
    c = build_training_circuit(spec, args.iterations)
    if not args.emit_only and c.total_qubits > args.max_qubits:
        _err(f"circuit needs {c.total_qubits} qubits, above the dense-simulation cap of "
             f"{args.max_qubits}; rerun with --emit-only to just write the QASM")
        return 2
    qasm.write(c, args.out, _emit_options(args))
    print(f"wrote {args.out}: {c.total_qubits} qubits, {len(c.gates)} gates, "
          f"{c.ancilla_watermark} ancillas")

    solutions = enumerate_solutions(spec)
    expected = sorted(encode_weights(w, spec) for w in solutions)
    print(f"{len(solutions)} solutions" + (f": {', '.join(expected)}" if expected else ""))
    status = 0
    if spec.search_bits <= MAX_ORACLE_CHECK_BITS:
        marked = sorted(encode_weights(w, spec) for w in oracle_marked(spec))
        agree = marked == expected
        print(f"oracle check over {2 ** spec.search_bits} weight strings: marks "
              f"{', '.join(marked) or 'nothing'} [{'ok' if agree else 'MISMATCH'}]")
        if not agree:
            status = 1
    for bits in expected:
        print(_describe(spec, bits))

    if args.emit_only:
        return status
    psi = sim.simulate(c, max_qubits=args.max_qubits)
    measured = [c.resolve(q) for q in c.measured]
    hist = sim.measure_all(psi, args.shots, args.seed, measured)
    print(f"histogram (shots={args.shots}, seed={args.seed}):")
    sys.stdout.write(hist.to_text())
    if args.histogram_out:
        with open(args.histogram_out, "w", encoding="utf-8", newline="\n") as f:
            f.write(hist.to_text())
    print("most frequent outcomes:")
    for bits, _ in hist.most_common()[:max(1, len(solutions))]:
        print(_describe(spec, bits))
    return status


def cmd_verify(args) -> int:
    results = verify.run(args.scope)
    for r in results:
        print(r.summary())
        for case in r.failures[:10]:
            _err(f"failed: {r.family} {case}")
    return 0 if all(r.ok for r in results) else 1


def _add_emit_flags(p):
    p.add_argument("--cccx", choices=("native", "decompose"), default="native",
                   help="emit CCCX as c3x or lower it to ccx with one extra ancilla")
    p.add_argument("--no-comments", action="store_true", help="omit block annotations")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsynth", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate one block as OPENQASM 2.0")
    p.add_argument("block", choices=BLOCKS)
    p.add_argument("--widths", type=int, nargs="+", required=True,
                   help="register width(s); multiplier takes two, mct/mcz the control count")
    p.add_argument("--out", required=True)
    _add_emit_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="build and simulate the perceptron weight search")
    p.add_argument("--config", help="JSON file with i1_value, i2_value, ac_value, ...")
    p.add_argument("--i1", type=int)
    p.add_argument("--i2", type=int)
    p.add_argument("--ac", type=int)
    p.add_argument("--weight-bits", type=int)
    p.add_argument("--ac-bits", type=int)
    p.add_argument("--input-bits", type=int)
    p.add_argument("--shots", type=int, default=4096)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int)
    p.add_argument("--emit-only", action="store_true")
    p.add_argument("--max-qubits", type=int, default=sim.DEFAULT_MAX_QUBITS)
    p.add_argument("--histogram-out")
    p.add_argument("--out", required=True)
    _add_emit_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("verify", help="exhaustive block checks")
    p.add_argument("scope", choices=(*verify.SUITES, "all"))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CircuitError, ValueError, OSError) as exc:
        _err(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
