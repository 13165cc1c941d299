"""
Verification engines.

apply_basis / apply_basis_many evaluate permutation circuits on computational
basis states at any width (one integer per state, bit q = global qubit q).
apply_full / unitary_of run a dense statevector for small circuits; amplitudes
are indexed little-endian in the same way, so bit q of an index is qubit q.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, GateKind, QubitRef, Qubits, RegisterHandle, as_qubits
from .errors import CapacityError, LengthError, NonPermutationGateError

DEFAULT_MAX_QUBITS = 20
MAX_UNITARY_QUBITS = 12

_SQRT1_2 = 1 / np.sqrt(2)


def _compile(c: Circuit) -> list[tuple[GateKind, tuple[int, ...], int]]:
    index = c.index_map()
    return [(g.kind, tuple(index[q] for q in g.controls), index[g.target]) for g in c.gates]


# -- basis-state evaluation -------------------------------------------------

def _compile_permutation(c: Circuit) -> list[tuple[int, int]]:
    ops = []
    for i, (kind, controls, target) in enumerate(_compile(c)):
        if not kind.is_permutation:
            raise NonPermutationGateError(i, kind.name)
        cmask = 0
        for q in controls:
            cmask |= 1 << q
        ops.append((cmask, 1 << target))
    return ops


def apply_basis(c: Circuit, state: int) -> int:
    """Run a permutation circuit on one basis state; linear in gate count."""
    if state < 0 or state >> c.total_qubits:
        raise LengthError(f"basis state {state} does not fit in {c.total_qubits} qubits")
    for cmask, tbit in _compile_permutation(c):
        if state & cmask == cmask:
            state ^= tbit
    return state


def apply_basis_many(c: Circuit, states: Sequence[int]) -> list[int]:
    """Vectorized apply_basis over many inputs."""
    ops = _compile_permutation(c)
    if c.total_qubits > 63:
        out = []
        for s in states:
            for cmask, tbit in ops:
                if s & cmask == cmask:
                    s ^= tbit
            out.append(s)
        return out
    arr = np.asarray(list(states), dtype=np.uint64)
    for cmask, tbit in ops:
        cm = np.uint64(cmask)
        arr ^= np.where(arr & cm == cm, np.uint64(tbit), np.uint64(0))
    return [int(v) for v in arr]


def encode(c: Circuit, values: Mapping[RegisterHandle | str, int] | None = None,
           qubit_values: Mapping[QubitRef, int] | None = None) -> int:
    """Pack register values into a basis-state integer."""
    index = c.index_map()
    state = 0
    for reg, value in (values or {}).items():
        if isinstance(reg, str):
            reg = c.register(reg)
        if value < 0 or value >> reg.width:
            raise ValueError(f"value {value} does not fit in {reg.name}[{reg.width}]")
        for i, q in enumerate(reg):
            if value >> i & 1:
                state |= 1 << index[q]
    for q, bit in (qubit_values or {}).items():
        if bit:
            state |= 1 << index[q]
    return state


def decode(c: Circuit, state: int, reg: Qubits | str) -> int:
    """Read a register (or qubit list, LSB first) out of a basis-state integer."""
    if isinstance(reg, str):
        reg = c.register(reg)
    index = c.index_map()
    return sum(((state >> index[q]) & 1) << i for i, q in enumerate(as_qubits(reg)))


def bitstring(value: int, width: int) -> str:
    """Most-significant bit on the left."""
    return format(value, f"0{width}b") if width else ""


# -- dense statevector ------------------------------------------------------

def zero_state(n: int) -> np.ndarray:
    psi = np.zeros(2 ** n, dtype=np.complex128)
    psi[0] = 1
    return psi


def basis_vector(n: int, index: int) -> np.ndarray:
    psi = np.zeros(2 ** n, dtype=np.complex128)
    psi[index] = 1
    return psi


def _apply_gate(psi: np.ndarray, n: int, kind: GateKind, controls, target: int) -> None:
    # psi has shape (2,)*n + (batch,); qubit q lives on axis n-1-q
    idx = [slice(None)] * (n + 1)
    for q in controls:
        idx[n - 1 - q] = 1
    idx0, idx1 = list(idx), list(idx)
    idx0[n - 1 - target] = 0
    idx1[n - 1 - target] = 1
    idx0, idx1 = tuple(idx0), tuple(idx1)
    if kind is GateKind.Z:
        psi[idx1] *= -1
    elif kind is GateKind.H:
        a = psi[idx0].copy()
        b = psi[idx1].copy()
        psi[idx0] = (a + b) * _SQRT1_2
        psi[idx1] = (a - b) * _SQRT1_2
    else:
        a = psi[idx0].copy()
        psi[idx0] = psi[idx1]
        psi[idx1] = a


def apply_full(c: Circuit, psi: np.ndarray, max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """Apply the circuit to a statevector (or a matrix of column states).

    Returns a new array; the input is left untouched.
    """
    n = c.total_qubits
    if n > max_qubits:
        raise CapacityError(f"{n} qubits exceeds the dense-simulation cap of {max_qubits}")
    psi = np.array(psi, dtype=np.complex128)
    if psi.shape[0] != 2 ** n:
        raise LengthError(f"state has {psi.shape[0]} amplitudes, circuit needs 2**{n}")
    work = psi.reshape((2,) * n + (-1,))
    for kind, controls, target in _compile(c):
        _apply_gate(work, n, kind, controls, target)
    out = work.reshape(psi.shape)
    return out


def unitary_of(c: Circuit, max_qubits: int = MAX_UNITARY_QUBITS) -> np.ndarray:
    """Dense unitary; column j is the circuit applied to basis state j."""
    n = c.total_qubits
    if n > max_qubits:
        raise CapacityError(f"{n} qubits exceeds the unitary cap of {max_qubits}")
    return apply_full(c, np.eye(2 ** n, dtype=np.complex128), max_qubits=max_qubits)


def simulate(c: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """Statevector after running c on |0...0>."""
    if c.total_qubits > max_qubits:
        raise CapacityError(
            f"{c.total_qubits} qubits exceeds the dense-simulation cap of {max_qubits}"
        )
    return apply_full(c, zero_state(c.total_qubits), max_qubits=max_qubits)


def marginal_probabilities(psi: np.ndarray, qubits: Sequence[int] | None = None) -> np.ndarray:
    """Probability of each value of the given qubits (bit k of the index = qubits[k])."""
    probs = np.abs(psi) ** 2
    n = int(np.log2(probs.size))
    if qubits is None:
        return probs
    qubits = list(qubits)
    t = probs.reshape((2,) * n)
    keep_axes = [n - 1 - q for q in qubits]
    drop = tuple(ax for ax in range(n) if ax not in keep_axes)
    t = t.sum(axis=drop)
    # remaining axes are in ascending axis order; put the most significant first
    remaining = sorted(keep_axes)
    order = [remaining.index(n - 1 - q) for q in reversed(qubits)]
    return np.transpose(t, order).reshape(-1)


@dataclass
class Histogram:
    counts: dict[str, int] = field(default_factory=dict)
    shots: int = 0

    def most_common(self) -> list[tuple[str, int]]:
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))

    def to_text(self) -> str:
        return "".join(f"{bits} {count}\n" for bits, count in self.most_common())

    @classmethod
    def from_text(cls, text: str) -> Histogram:
        counts = {}
        for line in text.splitlines():
            if line.strip():
                bits, count = line.split()
                counts[bits] = int(count)
        return cls(counts, sum(counts.values()))


def measure_all(psi: np.ndarray, shots: int, seed: int,
                qubits: Sequence[int] | None = None) -> Histogram:
    """Sample measurement outcomes by inverse CDF.

    Uniform variates come from numpy's PCG64 generator seeded with ``seed``
    (``numpy.random.default_rng(seed).random(shots)``); each variate selects
    the first outcome whose cumulative probability exceeds it. Outcomes are
    rendered most-significant-left; with ``qubits`` only those qubits are
    measured and character k from the right is qubits[k].
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    probs = marginal_probabilities(np.asarray(psi).reshape(-1), qubits)
    width = int(np.log2(probs.size))
    cdf = np.cumsum(probs)
    u = np.random.default_rng(seed).random(shots) * cdf[-1]
    outcomes = np.minimum(np.searchsorted(cdf, u, side="right"), probs.size - 1)
    values, counts = np.unique(outcomes, return_counts=True)
    hist = {bitstring(int(v), width): int(k) for v, k in zip(values, counts)}
    return Histogram(hist, shots)
