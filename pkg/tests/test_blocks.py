import itertools

import numpy as np
import pytest

from qsynth import blocks
from qsynth.circuit import Circuit, GateKind, reverse
from qsynth.errors import OverlapError, RangeError, WidthMismatchError
from qsynth.sim import apply_basis, apply_basis_many, decode, encode, unitary_of

from oracles import controlled_flip, ideal_c3x


def adder_circuit(n):
    c = Circuit()
    i1, i2 = c.add_register("i1", n), c.add_register("i2", n)
    frag = blocks.adder(c, i1, i2)
    c.plot_ancilla()
    return c, i1, i2, frag


def multiplier_circuit(n1, n2):
    c = Circuit()
    i1, i2 = c.add_register("i1", n1), c.add_register("i2", n2)
    r = c.add_register("result", n1 + n2)
    frag = blocks.multiplier_asymmetric(c, i1, i2, r)
    c.plot_ancilla()
    return c, i1, i2, r, frag


def comparator_circuit(n):
    c = Circuit()
    i1, i2 = c.add_register("i1", n), c.add_register("i2", n)
    flag = c.add_register("flag", 1)
    frag = blocks.if_equal(c, i1, i2, flag[0])
    c.plot_ancilla()
    return c, i1, i2, flag, frag


def mct_circuit(k, kind="X"):
    c = Circuit()
    ctrl, tgt = c.add_register("ctrl", k), c.add_register("tgt", 1)
    frag = blocks.multi_control_gate_3cx(c, ctrl, tgt[0], kind)
    c.plot_ancilla()
    return c, ctrl, tgt, frag


def ancilla_value(c, state):
    anc = c.ancilla_register
    return 0 if anc is None else decode(c, state, anc)


# -- adder -------------------------------------------------------------------

@pytest.mark.parametrize("n,a,b,expect", [(2, 1, 2, 3), (2, 3, 3, 2)])
def test_adder_examples(n, a, b, expect):
    c, i1, i2, frag = adder_circuit(n)
    out = apply_basis(c, encode(c, {i1: a, i2: b}))
    assert decode(c, out, i2) == expect
    assert decode(c, out, i1) == a
    assert frag.ancilla_used == 0 and c.ancilla_register is None


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_adder_exhaustive(n):
    c, i1, i2, _ = adder_circuit(n)
    pairs = list(itertools.product(range(2 ** n), repeat=2))
    outs = apply_basis_many(c, [encode(c, {i1: a, i2: b}) for a, b in pairs])
    for (a, b), out in zip(pairs, outs):
        assert decode(c, out, i1) == a
        assert decode(c, out, i2) == (a + b) % 2 ** n


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_adder_with_carry_out(n):
    c = Circuit()
    i1, i2 = c.add_register("i1", n), c.add_register("i2", n)
    carry = c.add_register("carry", 1)
    blocks.adder(c, i1, i2, carry=carry[0])
    for a, b in itertools.product(range(2 ** n), repeat=2):
        out = apply_basis(c, encode(c, {i1: a, i2: b}))
        assert decode(c, out, i2) + (decode(c, out, carry) << n) == a + b
        assert decode(c, out, i1) == a


def test_adder_zero_is_identity():
    c, i1, i2, _ = adder_circuit(3)
    for b in range(8):
        assert decode(c, apply_basis(c, encode(c, {i2: b})), i2) == b


def test_adder_uses_closed_gate_set():
    _, _, _, frag = adder_circuit(4)
    assert {g.kind for g in frag.gates} <= {GateKind.CX, GateKind.CCX}


def test_adder_width_mismatch():
    c = Circuit()
    with pytest.raises(WidthMismatchError):
        blocks.adder(c, c.add_register("a", 2), c.add_register("b", 3))


# -- multiplier --------------------------------------------------------------

@pytest.mark.parametrize("n1,n2,a,b,expect", [(2, 2, 3, 2, 6), (2, 3, 3, 5, 15), (2, 2, 0, 3, 0)])
def test_multiplier_examples(n1, n2, a, b, expect):
    c, i1, i2, r, _ = multiplier_circuit(n1, n2)
    out = apply_basis(c, encode(c, {i1: a, i2: b}))
    assert decode(c, out, r) == expect
    assert ancilla_value(c, out) == 0


@pytest.mark.parametrize("n1,n2", list(itertools.product([1, 2, 3], repeat=2)))
def test_multiplier_exhaustive(n1, n2):
    c, i1, i2, r, frag = multiplier_circuit(n1, n2)
    pairs = list(itertools.product(range(2 ** n1), range(2 ** n2)))
    outs = apply_basis_many(c, [encode(c, {i1: a, i2: b}) for a, b in pairs])
    for (a, b), out in zip(pairs, outs):
        assert (decode(c, out, i1), decode(c, out, i2)) == (a, b)
        assert decode(c, out, r) == a * b
        assert ancilla_value(c, out) == 0
    assert frag.ancilla_used == n1 == c.ancilla_watermark


def test_multiplier_restores_pool():
    c = Circuit()
    i1, i2 = c.add_register("i1", 2), c.add_register("i2", 3)
    r = c.add_register("r", 5)
    held = c.pool.acquire(1)
    blocks.multiplier_asymmetric(c, i1, i2, r)
    assert c.pool.live == 1
    c.pool.release(held)


def test_multiplier_result_width():
    c = Circuit()
    i1, i2 = c.add_register("i1", 2), c.add_register("i2", 2)
    with pytest.raises(WidthMismatchError):
        blocks.multiplier_asymmetric(c, i1, i2, c.add_register("r", 3))


# -- comparator --------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_if_equal_exhaustive(n):
    c, i1, i2, flag, _ = comparator_circuit(n)
    pairs = list(itertools.product(range(2 ** n), repeat=2))
    outs = apply_basis_many(c, [encode(c, {i1: a, i2: b}) for a, b in pairs])
    for (a, b), out in zip(pairs, outs):
        assert decode(c, out, flag) == int(a == b)
        assert (decode(c, out, i1), decode(c, out, i2)) == (a, b)
        assert ancilla_value(c, out) == 0


def test_if_equal_examples():
    c, i1, i2, flag, _ = comparator_circuit(3)
    assert decode(c, apply_basis(c, encode(c, {i1: 5, i2: 5})), flag) == 1
    assert decode(c, apply_basis(c, 0), flag) == 1
    out = apply_basis(c, encode(c, {i1: 1, i2: 2}))
    assert decode(c, out, flag) == 0 and decode(c, out, i2) == 2


def test_if_equal_errors():
    c = Circuit()
    a, b = c.add_register("a", 2), c.add_register("b", 3)
    with pytest.raises(WidthMismatchError):
        blocks.if_equal(c, a, b[:3], b[0])
    with pytest.raises(OverlapError):
        blocks.if_equal(c, a, b[:2], b[1])


# -- multi-controlled gates --------------------------------------------------

def test_toffoli_4q_unitary_exact():
    c = Circuit()
    q = c.add_register("q", 4)
    frag = blocks.toffoli_4q(c, q[0], q[1], q[2], q[3])
    assert frag.ancilla_used == 0
    assert np.max(np.abs(unitary_of(c) - ideal_c3x())) < 1e-12
    assert apply_basis(c, 0b0111) == 0b1111
    assert apply_basis(c, 0b0110) == 0b0110


def test_toffoli_4q_overlap():
    c = Circuit()
    q = c.add_register("q", 4)
    with pytest.raises(OverlapError):
        blocks.toffoli_4q(c, q[0], q[1], q[1], q[3])


def test_mct_small_cases():
    _, ctrl, tgt, frag = mct_circuit(1)
    assert [g.kind for g in frag.gates] == [GateKind.CX]
    _, ctrl, tgt, frag = mct_circuit(3)
    assert [g.kind for g in frag.gates] == [GateKind.CCCX]
    assert frag.ancilla_used == 0


@pytest.mark.parametrize("k", range(1, 10))
def test_mct_truth_table_and_ancilla_count(k):
    c, ctrl, tgt, frag = mct_circuit(k)
    assert frag.ancilla_used == max(0, (k - 2) // 2)
    if k >= 5:
        assert frag.ancilla_used < k - 2
    inputs = [encode(c, {ctrl: v, tgt: t}) for v in range(2 ** k) for t in (0, 1)]
    outs = apply_basis_many(c, inputs)
    for s, out in zip(inputs, outs):
        v, t = decode(c, s, ctrl), decode(c, s, tgt)
        assert decode(c, out, ctrl) == v
        assert decode(c, out, tgt) == t ^ (v == 2 ** k - 1)
        assert ancilla_value(c, out) == 0


def test_mct_k6_example():
    c, ctrl, tgt, frag = mct_circuit(6)
    out = apply_basis(c, encode(c, {ctrl: 63}))
    assert decode(c, out, tgt) == 1 and ancilla_value(c, out) == 0
    assert frag.ancilla_used == 2


def test_mct_duplicate_qubit():
    c = Circuit()
    q = c.add_register("q", 5)
    with pytest.raises(OverlapError):
        blocks.multi_control_gate_3cx(c, [q[0], q[1], q[0]], q[4])
    with pytest.raises(OverlapError):
        blocks.multi_control_gate_3cx(c, q[:4], q[3])


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_multi_control_z_diagonal(k):
    c = Circuit()
    ctrl, tgt = c.add_register("ctrl", k), c.add_register("tgt", 1)
    blocks.multi_control_z(c, ctrl, tgt[0])
    c.plot_ancilla()
    n_data = k + 1
    u = unitary_of(c)
    # restrict to the ancilla-zero subspace: indices below 2**n_data
    sub = u[: 2 ** n_data, : 2 ** n_data]
    expect = np.eye(2 ** n_data)
    expect[-1, -1] = -1
    assert np.max(np.abs(sub - expect)) < 1e-12
    # nothing leaks out of the ancilla-zero subspace
    assert np.max(np.abs(u[2 ** n_data:, : 2 ** n_data]), initial=0) < 1e-12


def test_multi_control_z_k2_on_111():
    c = Circuit()
    q = c.add_register("q", 3)
    blocks.multi_control_z(c, q[:2], q[2])
    u = unitary_of(c)
    assert np.allclose(u[:, 7], -np.eye(8)[:, 7], atol=1e-12)
    assert np.allclose(u[:, 0], np.eye(8)[:, 0], atol=1e-12)


def test_mct_kind_z_wraps_target_with_hadamards():
    _, _, tgt, frag = mct_circuit(4, "Z")
    assert frag.gates[0].kind is GateKind.H and frag.gates[-1].kind is GateKind.H
    assert frag.gates[0].target == tgt[0]


def test_mct_dense_against_oracle():
    c, ctrl, tgt, _ = mct_circuit(5)
    n = c.total_qubits
    expect = controlled_flip(n, list(range(5)), [5])
    u = unitary_of(c)
    # columns with clean ancillas must match the ideal gate on those columns
    clean = [i for i in range(2 ** n) if i >> 6 == 0]
    assert np.max(np.abs(u[:, clean] - expect[:, clean])) < 1e-12


# -- constants ---------------------------------------------------------------

def test_set_constant():
    c = Circuit()
    r2, r6 = c.add_register("r2", 2), c.add_register("r6", 6)
    frag = blocks.set_constant(c, r2, 3)
    assert [g.target.index for g in frag.gates] == [0, 1]
    assert len(blocks.set_constant(c, r2, 0)) == 0
    frag = blocks.set_constant(c, r6, 6)
    assert [g.target.index for g in frag.gates] == [1, 2]
    with pytest.raises(RangeError):
        blocks.set_constant(c, r2, 4)


# -- reversibility of every generator ----------------------------------------

def _generators():
    yield "adder", adder_circuit(3)[-1]
    yield "multiplier", multiplier_circuit(2, 2)[-1]
    yield "comparator", comparator_circuit(4)[-1]
    yield "mct", mct_circuit(6)[-1]
    yield "mcz", mct_circuit(5, "Z")[-1]


@pytest.mark.parametrize("name,frag", list(_generators()), ids=[g[0] for g in _generators()])
def test_block_then_reversed_is_identity(name, frag):
    # rebuild the touched registers in a fresh circuit; "anc" becomes a plain register
    c = Circuit(ancilla_register="spare")
    for reg in sorted({q.register for q in frag.touched}):
        c.add_register(reg, max(q.index for q in frag.touched if q.register == reg) + 1)
    c.extend(frag.gates + reverse(frag.gates))
    assert c.total_qubits <= 10
    if name == "mcz":
        assert np.max(np.abs(unitary_of(c) - np.eye(2 ** c.total_qubits))) < 1e-12
    else:
        states = list(range(2 ** c.total_qubits))
        assert apply_basis_many(c, states) == states
