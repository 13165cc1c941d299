"""
Weight search for a fixed two-input perceptron.

Finds (w1, w2, w3) with (I1*w1 + I2*w2) * w3 == Ac by Grover search. Inputs
and Ac are loaded as constant registers; the oracle's compute chain is

    p1 = I1 * w1;  p2 = I2 * w2;  p2 += p1 (with carry);  prod = w3 * p2;
    flag ^= (prod == Ac)

Registers are declared w1, w2, w3 first so the measured 3*weight_bits string
reads "w3 w2 w1" most-significant-left.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

from . import blocks
from .circuit import BlockFragment, Circuit, QubitRef, RegisterHandle, Role
from .errors import LengthError, RangeError
from .grover import GroverParams, OracleSpec, grover_search, iteration_count
from .sim import apply_basis_many, bitstring, decode, encode


@dataclass(frozen=True)
class PerceptronSpec:
    i1_value: int
    i2_value: int
    ac_value: int
    weight_bits: int = 2
    ac_bits: int | None = None
    input_bits: int | None = None

    def __post_init__(self):
        for name in ("i1_value", "i2_value", "ac_value"):
            if getattr(self, name) < 0:
                raise RangeError(f"{name} must be nonnegative")
        if self.weight_bits < 1:
            raise RangeError("weight_bits must be >= 1")
        if self.ac_bits is None:
            object.__setattr__(self, "ac_bits", max(1, self.ac_value.bit_length()))
        if self.input_bits is None:
            widest = max(self.i1_value, self.i2_value).bit_length()
            object.__setattr__(self, "input_bits", max(1, widest))
        if self.ac_bits < 1 or self.input_bits < 1:
            raise RangeError("register widths must be >= 1")
        if self.ac_value >> self.ac_bits:
            raise RangeError(f"ac_value {self.ac_value} does not fit in {self.ac_bits} bits")
        if max(self.i1_value, self.i2_value) >> self.input_bits:
            raise RangeError(f"inputs do not fit in {self.input_bits} bits")

    @property
    def search_bits(self) -> int:
        return 3 * self.weight_bits


REFERENCE_SPEC = PerceptronSpec(i1_value=3, i2_value=2, ac_value=6, weight_bits=2, ac_bits=6)


class WeightAssignment(NamedTuple):
    w1: int
    w2: int
    w3: int


def satisfies(spec: PerceptronSpec, w: WeightAssignment) -> bool:
    return (spec.i1_value * w.w1 + spec.i2_value * w.w2) * w.w3 == spec.ac_value


def enumerate_solutions(spec: PerceptronSpec) -> set[WeightAssignment]:
    """Brute-force every weight triple; ground truth for the oracle."""
    span = range(2 ** spec.weight_bits)
    return {w for w in map(WeightAssignment._make, itertools.product(span, repeat=3))
            if satisfies(spec, w)}


def encode_weights(w: WeightAssignment, spec: PerceptronSpec) -> str:
    b = spec.weight_bits
    return bitstring(w.w3, b) + bitstring(w.w2, b) + bitstring(w.w1, b)


def split_measured(bits: str, spec: PerceptronSpec) -> WeightAssignment:
    """Split a measured "w3 w2 w1" bitstring into weights."""
    b = spec.weight_bits
    if len(bits) != 3 * b or set(bits) - {"0", "1"}:
        raise LengthError(f"expected {3 * b} binary digits, got {bits!r}")
    w3, w2, w1 = (int(bits[i:i + b], 2) for i in range(0, 3 * b, b))
    return WeightAssignment(w1, w2, w3)


@dataclass
class TrainingLayout:
    circuit: Circuit
    weights: tuple[RegisterHandle, RegisterHandle, RegisterHandle]
    prepare: BlockFragment
    oracle: OracleSpec
    flag: QubitRef

    @property
    def search(self) -> list[QubitRef]:
        return [q for reg in self.weights for q in reg]


def build_layout(spec: PerceptronSpec) -> TrainingLayout:
    """Declare registers and build (without appending) the constant loads and oracle."""
    c = Circuit()
    wb, nb = spec.weight_bits, spec.input_bits
    w1 = c.add_register("w1", wb)
    w2 = c.add_register("w2", wb)
    w3 = c.add_register("w3", wb)
    i1 = c.add_register("i1", nb)
    i2 = c.add_register("i2", nb)
    p1 = c.add_register("p1", nb + wb)
    # p2 holds I2*w2 in its low bits, then the sum with one extra carry bit
    p2 = c.add_register("p2", nb + wb + 1)
    prod_width = p2.width + wb
    cmp_width = max(prod_width, spec.ac_bits)
    prod = c.add_register("prod", cmp_width)
    ac = c.add_register("ac", cmp_width)
    flag = c.add_register("flag", 1, Role.FLAG)[0]

    prepare = BlockFragment("prepare", [
        *blocks.set_constant(c, i1, spec.i1_value, append=False).gates,
        *blocks.set_constant(c, i2, spec.i2_value, append=False).gates,
        *blocks.set_constant(c, ac, spec.ac_value, append=False).gates,
    ], {"i1": spec.i1_value, "i2": spec.i2_value, "ac": spec.ac_value})

    steps = [
        blocks.multiplier_asymmetric(c, i1, w1, p1, append=False),
        blocks.multiplier_asymmetric(c, i2, w2, p2[:-1], append=False),
        blocks.adder(c, p1, p2[:-1], carry=p2[-1], append=False),
        blocks.multiplier_asymmetric(c, w3, p2, prod[:prod_width], append=False),
        blocks.if_equal(c, prod, ac, flag, append=False),
    ]
    compute = BlockFragment("perceptron_compute", [g for s in steps for g in s.gates],
                            {"weight_bits": wb}, max(s.ancilla_used for s in steps))
    return TrainingLayout(c, (w1, w2, w3), prepare, OracleSpec(compute, [flag]), flag)


def build_training_circuit(spec: PerceptronSpec, iterations: int | None = None) -> Circuit:
    """Full Grover circuit over the weight registers, measured and finalized.

    Without an explicit ``iterations`` the count is the optimal one for the
    classically enumerated number of solutions (one if there are none).
    """
    layout = build_layout(spec)
    c = layout.circuit
    N = 2 ** spec.search_bits
    M = max(1, len(enumerate_solutions(spec)))
    if iterations is None:
        iterations = iteration_count(N, M)
    c.append_fragment(layout.prepare)
    grover_search(c, GroverParams(layout.search, M, iterations), layout.oracle)
    c.measure(layout.search)
    c.plot_ancilla()
    return c


def oracle_marked(spec: PerceptronSpec) -> set[WeightAssignment]:
    """Weights whose compute chain raises the flag, by basis-state evaluation.

    Also checks the chain leaves the weights untouched and every ancilla at zero.
    """
    layout = build_layout(spec)
    c = layout.circuit
    c.extend(layout.prepare.gates)
    c.extend(layout.oracle.compute.gates)
    w1, w2, w3 = layout.weights
    triples = [WeightAssignment._make(t)
               for t in itertools.product(range(2 ** spec.weight_bits), repeat=3)]
    inputs = [encode(c, {w1: t.w1, w2: t.w2, w3: t.w3}) for t in triples]
    outputs = apply_basis_many(c, inputs)
    anc = [QubitRef(c.pool.register, i) for i in range(c.pool.watermark)]
    marked = set()
    for t, out in zip(triples, outputs):
        if (decode(c, out, w1), decode(c, out, w2), decode(c, out, w3)) != t:
            raise AssertionError(f"compute chain modified the weights for {t}")
        if anc and decode(c, out, anc):
            raise AssertionError(f"ancillas left dirty for {t}")
        if decode(c, out, [layout.flag]):
            marked.add(t)
    return marked
