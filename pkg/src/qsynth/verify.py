"""Exhaustive block checks against classical arithmetic, for the ``verify`` command."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import blocks
from .circuit import Circuit
from .sim import apply_basis_many, decode, encode


@dataclass
class SuiteResult:
    family: str
    passed: int = 0
    total: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def check(self, cond: bool, case: str) -> None:
        self.total += 1
        if cond:
            self.passed += 1
        else:
            self.failures.append(case)

    def summary(self) -> str:
        status = "pass" if self.ok else "FAIL"
        return f"{self.family}: {self.passed}/{self.total} cases {status}"


def _ancillas_zero(c: Circuit, state: int) -> bool:
    anc = c.ancilla_register
    return anc is None or decode(c, state, anc) == 0


def verify_adder(widths=range(1, 5)) -> SuiteResult:
    widths = list(widths)
    res = SuiteResult(f"adder n={widths[0]}..{widths[-1]}")
    for n in widths:
        c = Circuit()
        i1, i2 = c.add_register("i1", n), c.add_register("i2", n)
        blocks.adder(c, i1, i2)
        c.plot_ancilla()
        pairs = list(itertools.product(range(2 ** n), repeat=2))
        outs = apply_basis_many(c, [encode(c, {i1: a, i2: b}) for a, b in pairs])
        for (a, b), out in zip(pairs, outs):
            ok = decode(c, out, i1) == a and decode(c, out, i2) == (a + b) % 2 ** n
            res.check(ok, f"n={n} {a}+{b}")
    return res


def verify_multiplier(max_width: int = 3) -> SuiteResult:
    res = SuiteResult(f"multiplier n1,n2=1..{max_width}")
    for n1, n2 in itertools.product(range(1, max_width + 1), repeat=2):
        c = Circuit()
        i1, i2 = c.add_register("i1", n1), c.add_register("i2", n2)
        r = c.add_register("result", n1 + n2)
        blocks.multiplier_asymmetric(c, i1, i2, r)
        c.plot_ancilla()
        pairs = list(itertools.product(range(2 ** n1), range(2 ** n2)))
        outs = apply_basis_many(c, [encode(c, {i1: a, i2: b}) for a, b in pairs])
        for (a, b), out in zip(pairs, outs):
            ok = (decode(c, out, i1) == a and decode(c, out, i2) == b
                  and decode(c, out, r) == a * b and _ancillas_zero(c, out))
            res.check(ok, f"n1={n1} n2={n2} {a}*{b}")
    return res


def verify_comparator(max_width: int = 3) -> SuiteResult:
    res = SuiteResult(f"comparator n=1..{max_width}")
    for n in range(1, max_width + 1):
        c = Circuit()
        i1, i2 = c.add_register("i1", n), c.add_register("i2", n)
        flag = c.add_register("flag", 1)
        blocks.if_equal(c, i1, i2, flag[0])
        c.plot_ancilla()
        pairs = list(itertools.product(range(2 ** n), repeat=2))
        outs = apply_basis_many(c, [encode(c, {i1: a, i2: b}) for a, b in pairs])
        for (a, b), out in zip(pairs, outs):
            ok = (decode(c, out, i1) == a and decode(c, out, i2) == b
                  and decode(c, out, flag) == int(a == b) and _ancillas_zero(c, out))
            res.check(ok, f"n={n} {a}=={b}")
    return res


def verify_mct(ks=range(3, 9)) -> SuiteResult:
    ks = list(ks)
    res = SuiteResult(f"mct k={ks[0]}..{ks[-1]}")
    for k in ks:
        c = Circuit()
        ctrl, tgt = c.add_register("ctrl", k), c.add_register("tgt", 1)
        frag = blocks.multi_control_gate_3cx(c, ctrl, tgt[0])
        c.plot_ancilla()
        res.check(frag.ancilla_used == max(0, (k - 2) // 2), f"k={k} ancilla count")
        patterns = range(2 ** k)
        outs = apply_basis_many(c, [encode(c, {ctrl: v}) for v in patterns])
        for v, out in zip(patterns, outs):
            ok = (decode(c, out, ctrl) == v and decode(c, out, tgt) == int(v == 2 ** k - 1)
                  and _ancillas_zero(c, out))
            res.check(ok, f"k={k} pattern={v:0{k}b}")
    return res


SUITES = {
    "adder": verify_adder,
    "multiplier": verify_multiplier,
    "comparator": verify_comparator,
    "mct": verify_mct,
}


def run(scope: str) -> list[SuiteResult]:
    if scope == "all":
        return [fn() for fn in SUITES.values()]
    return [SUITES[scope]()]
