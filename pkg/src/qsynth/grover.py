"""Grover search assembly: phase oracles, diffusion and the iteration loop."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .blocks import multi_control_z
from .circuit import (
    AncillaPool,
    BlockFragment,
    Circuit,
    QubitRef,
    Qubits,
    as_qubits,
    h,
    reverse,
    x,
)
from .errors import RangeError


def iteration_count(N: int, M: int) -> int:
    """Optimal Grover iterations, floor(pi/4 * sqrt(N/M))."""
    if N < 1 or M < 1:
        raise RangeError(f"need N >= 1 and M >= 1, got N={N}, M={M}")
    if M > N:
        raise RangeError(f"more solutions ({M}) than search space ({N})")
    return math.floor(math.pi / 4 * math.sqrt(N / M))


@dataclass
class GroverParams:
    search: list[QubitRef]
    num_solutions: int
    iterations: int | None = None

    def __post_init__(self):
        self.search = as_qubits(self.search)
        N = 2 ** len(self.search)
        if not 1 <= self.num_solutions <= N:
            raise RangeError(f"num_solutions must be in [1, {N}], got {self.num_solutions}")
        if self.iterations is None:
            self.iterations = iteration_count(N, self.num_solutions)
        elif self.iterations < 0:
            raise RangeError("iterations must be nonnegative")

    @property
    def search_space(self) -> int:
        return 2 ** len(self.search)


@dataclass
class OracleSpec:
    """compute must leave phase_qubits all-ones exactly on solutions."""

    compute: BlockFragment
    phase_qubits: list[QubitRef] = field(default_factory=list)

    def __post_init__(self):
        self.phase_qubits = as_qubits(self.phase_qubits)
        if not self.phase_qubits:
            raise ValueError("oracle needs at least one phase qubit")


def build_oracle(c: Circuit, spec: OracleSpec, pool: AncillaPool | None = None, *,
                 append: bool = True) -> BlockFragment:
    """compute, multi-controlled Z over the phase qubits, compute reversed."""
    *controls, target = spec.phase_qubits
    mark = multi_control_z(c, controls, target, pool, append=False)
    gates = spec.compute.gates + mark.gates + reverse(spec.compute.gates)
    frag = BlockFragment("oracle", gates, {"compute": spec.compute.name},
                         max(spec.compute.ancilla_used, mark.ancilla_used))
    if append:
        c.append_fragment(frag)
    return frag


def diffusion(c: Circuit, reg: Qubits, pool: AncillaPool | None = None, *,
              append: bool = True) -> BlockFragment:
    """Inversion about the mean; equals -(2|s><s| - I), i.e. correct up to global phase."""
    qubits = as_qubits(reg)
    if not qubits:
        raise ValueError("diffusion needs at least one qubit")
    hs = [h(q) for q in qubits]
    xs = [x(q) for q in qubits]
    mark = multi_control_z(c, qubits[:-1], qubits[-1], pool, append=False)
    frag = BlockFragment("diffusion", hs + xs + mark.gates + xs + hs,
                         {"n": len(qubits)}, mark.ancilla_used)
    if append:
        c.append_fragment(frag)
    return frag


def grover_search(c: Circuit, params: GroverParams, oracle: OracleSpec,
                  pool: AncillaPool | None = None) -> Circuit:
    c.append_fragment(BlockFragment("hadamard", [h(q) for q in params.search],
                                    {"n": len(params.search)}))
    for _ in range(params.iterations):
        build_oracle(c, oracle, pool)
        diffusion(c, params.search, pool)
    return c


def success_probability(N: int, M: int, iterations: int) -> float:
    """sin^2((2k+1) theta) with sin(theta) = sqrt(M/N)."""
    theta = math.asin(math.sqrt(M / N))
    return math.sin((2 * iterations + 1) * theta) ** 2
