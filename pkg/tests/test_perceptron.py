import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsynth.errors import LengthError, RangeError
from qsynth.perceptron import (
    REFERENCE_SPEC,
    PerceptronSpec,
    WeightAssignment,
    build_training_circuit,
    encode_weights,
    enumerate_solutions,
    oracle_marked,
    satisfies,
    split_measured,
)
from qsynth.sim import marginal_probabilities, simulate

REFERENCE_SOLUTIONS = {(2, 0, 1), (0, 3, 1), (1, 0, 2), (0, 1, 3)}


def test_enumerate_reference_instance():
    assert enumerate_solutions(REFERENCE_SPEC) == REFERENCE_SOLUTIONS


def test_enumerate_brute_force_all_64():
    # recomputed here without the library's own predicate
    expect = {(a, b, c) for a in range(4) for b in range(4) for c in range(4)
              if (3 * a + 2 * b) * c == 6}
    got = {w for w in (WeightAssignment(a, b, c) for a in range(4) for b in range(4)
                       for c in range(4)) if satisfies(REFERENCE_SPEC, w)}
    assert got == expect == REFERENCE_SOLUTIONS


def test_enumerate_zero_target():
    sols = enumerate_solutions(PerceptronSpec(1, 1, 0, weight_bits=1))
    # w3 = 0 always works (4 triples), plus w1 = w2 = 0 with w3 = 1
    assert sols == {(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1)}


def test_enumerate_single_solution():
    assert enumerate_solutions(PerceptronSpec(1, 1, 2, weight_bits=1)) == {(1, 1, 1)}


def test_spec_validation():
    with pytest.raises(RangeError):
        PerceptronSpec(1, 1, 8, ac_bits=3)
    with pytest.raises(RangeError):
        PerceptronSpec(-1, 1, 2)
    with pytest.raises(RangeError):
        PerceptronSpec(1, 1, 2, weight_bits=0)
    assert REFERENCE_SPEC.input_bits == 2 and REFERENCE_SPEC.search_bits == 6


@pytest.mark.parametrize("bits,weights", [
    ("010010", (2, 0, 1)),
    ("011100", (0, 3, 1)),
    ("100001", (1, 0, 2)),
    ("110100", (0, 1, 3)),
])
def test_split_measured_rows(bits, weights):
    assert split_measured(bits, REFERENCE_SPEC) == weights
    assert encode_weights(WeightAssignment(*weights), REFERENCE_SPEC) == bits


def test_split_measured_length_error():
    with pytest.raises(LengthError):
        split_measured("01001", REFERENCE_SPEC)
    with pytest.raises(LengthError):
        split_measured("01001x", REFERENCE_SPEC)


@settings(max_examples=100)
@given(st.integers(1, 4).flatmap(lambda b: st.tuples(
    st.just(b), *[st.integers(0, 2 ** b - 1)] * 3)))
def test_encode_split_roundtrip(case):
    b, *w = case
    spec = PerceptronSpec(1, 1, 1, weight_bits=b)
    assert split_measured(encode_weights(WeightAssignment(*w), spec), spec) == tuple(w)


def test_oracle_marks_reference_solutions():
    assert oracle_marked(REFERENCE_SPEC) == REFERENCE_SOLUTIONS
    strings = {encode_weights(w, REFERENCE_SPEC) for w in oracle_marked(REFERENCE_SPEC)}
    assert strings == {"010010", "011100", "100001", "110100"}


@pytest.mark.parametrize("spec", [
    PerceptronSpec(1, 1, 2, weight_bits=1),
    PerceptronSpec(1, 1, 0, weight_bits=1),
    PerceptronSpec(3, 1, 5, weight_bits=1),
    PerceptronSpec(2, 3, 12, weight_bits=2),
    PerceptronSpec(1, 2, 9, weight_bits=2, ac_bits=5),
    PerceptronSpec(3, 3, 7, weight_bits=2),
])
def test_oracle_matches_enumeration(spec):
    assert oracle_marked(spec) == enumerate_solutions(spec)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 31))
def test_oracle_matches_enumeration_random(i1, i2, ac):
    spec = PerceptronSpec(i1, i2, ac, weight_bits=1, input_bits=2, ac_bits=5)
    assert oracle_marked(spec) == enumerate_solutions(spec)


def test_reference_circuit_shape():
    c = build_training_circuit(REFERENCE_SPEC)
    assert c.total_qubits == 36
    assert c.ancilla_register.width == 2
    assert len(c.measured) == 6


def test_reduced_instance_simulation():
    spec = PerceptronSpec(1, 1, 2, weight_bits=1)
    c = build_training_circuit(spec)
    assert c.total_qubits <= 20
    w = [c.resolve(q) for q in c.measured]
    probs = marginal_probabilities(simulate(c), w)
    # measured order is w1, w2, w3 so index 0b111 is (1, 1, 1)
    assert int(np.argmax(probs)) == 0b111
    assert abs(probs[0b111] - 0.9453) < 0.02


def test_no_solution_instance_stays_uniform():
    spec = PerceptronSpec(1, 1, 3, weight_bits=1)
    assert enumerate_solutions(spec) == set()
    c = build_training_circuit(spec)
    probs = marginal_probabilities(simulate(c), [c.resolve(q) for q in c.measured])
    # an oracle that marks nothing leaves diffusion acting on its own fixed point
    assert np.allclose(probs, 1 / 8, atol=1e-12)
