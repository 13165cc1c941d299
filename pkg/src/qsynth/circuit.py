"""
Gate-level intermediate representation.

Contains:
    - GateKind / Gate: the closed primitive set {X, H, Z, CX, CCX, CCCX}
    - QubitRef / RegisterHandle: qubits are always addressed through a register
    - AncillaPool: shared, reusable ancilla slots with a high-water mark
    - BlockFragment: a named flat gate sequence produced by a block generator
    - Circuit: register table + gate list; ``plot_ancilla`` materializes the pool

Qubit ordering: registers are laid out in declaration order, index 0 of each
register is its least-significant bit, and the shared ancilla register always
sits after every data/flag register.
"""
from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    DanglingReferenceError,
    DoubleReleaseError,
    FinalizedCircuitError,
    InvalidWidthError,
    NameCollisionError,
    OverlapError,
    UnbalancedAncillaError,
)

_IDENT = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


class GateKind(str, Enum):
    X = "x"
    H = "h"
    Z = "z"
    CX = "cx"
    CCX = "ccx"
    CCCX = "c3x"

    @property
    def num_controls(self) -> int:
        return _NUM_CONTROLS[self]

    @property
    def is_permutation(self) -> bool:
        return self not in (GateKind.H, GateKind.Z)


_NUM_CONTROLS = {
    GateKind.X: 0, GateKind.H: 0, GateKind.Z: 0,
    GateKind.CX: 1, GateKind.CCX: 2, GateKind.CCCX: 3,
}
# X-family kind indexed by number of controls
_X_BY_CONTROLS = (GateKind.X, GateKind.CX, GateKind.CCX, GateKind.CCCX)


class Role(str, Enum):
    DATA = "data"
    ANCILLA = "ancilla"
    FLAG = "flag"


@dataclass(frozen=True, order=True)
class QubitRef:
    register: str
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"negative qubit index {self.index}")

    def __str__(self) -> str:
        return f"{self.register}[{self.index}]"


@dataclass(frozen=True)
class RegisterHandle:
    """A named, ordered group of qubits. Index 0 is the least-significant bit."""

    name: str
    width: int
    role: Role = Role.DATA
    order: int = 0

    def __len__(self) -> int:
        return self.width

    def __iter__(self) -> Iterator[QubitRef]:
        return (QubitRef(self.name, i) for i in range(self.width))

    def __getitem__(self, key):
        if isinstance(key, slice):
            return [QubitRef(self.name, i) for i in range(self.width)[key]]
        if key < 0:
            key += self.width
        if not 0 <= key < self.width:
            raise IndexError(f"{self.name}[{key}] out of range (width {self.width})")
        return QubitRef(self.name, key)

    @property
    def qubits(self) -> list[QubitRef]:
        return list(self)


Qubits = Union[RegisterHandle, Sequence[QubitRef]]


def as_qubits(reg: Qubits) -> list[QubitRef]:
    """Accept a register handle or an explicit qubit list (e.g. a slice)."""
    if isinstance(reg, QubitRef):
        return [reg]
    return list(reg)


def _check_distinct(qubits: Iterable[QubitRef], what: str = "gate") -> None:
    seen = set()
    for q in qubits:
        if q in seen:
            raise OverlapError(f"qubit {q} used more than once in {what}")
        seen.add(q)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    controls: tuple[QubitRef, ...]
    target: QubitRef

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "controls", tuple(self.controls))
        if len(self.controls) != self.kind.num_controls:
            raise ValueError(
                f"{self.kind.name} takes {self.kind.num_controls} controls, "
                f"got {len(self.controls)}"
            )
        _check_distinct(self.qubits, self.kind.name)

    @property
    def qubits(self) -> tuple[QubitRef, ...]:
        return (*self.controls, self.target)

    def __str__(self) -> str:
        return f"{self.kind.value} " + ", ".join(map(str, self.qubits))


def x(q: QubitRef) -> Gate:
    return Gate(GateKind.X, (), q)


def h(q: QubitRef) -> Gate:
    return Gate(GateKind.H, (), q)


def z(q: QubitRef) -> Gate:
    return Gate(GateKind.Z, (), q)


def cx(c: QubitRef, t: QubitRef) -> Gate:
    return Gate(GateKind.CX, (c,), t)


def ccx(c1: QubitRef, c2: QubitRef, t: QubitRef) -> Gate:
    return Gate(GateKind.CCX, (c1, c2), t)


def cccx(c1: QubitRef, c2: QubitRef, c3: QubitRef, t: QubitRef) -> Gate:
    return Gate(GateKind.CCCX, (c1, c2, c3), t)


def controlled_x(controls: Sequence[QubitRef], target: QubitRef) -> Gate:
    """X with 0-3 controls, picking the matching primitive."""
    if len(controls) > 3:
        raise ValueError(f"no primitive X gate with {len(controls)} controls")
    return Gate(_X_BY_CONTROLS[len(controls)], tuple(controls), target)


def reverse(gates: Sequence[Gate]) -> list[Gate]:
    """Inverse of a primitive gate sequence.

    Every primitive is self-inverse, so reversing the order is exact.
    """
    return list(reversed(gates))


def multi_target_gate(controls: Sequence[QubitRef], targets: Sequence[QubitRef]) -> list[Gate]:
    """Split a controlled-X with several targets into one gate per target."""
    controls, targets = list(controls), list(targets)
    if not targets:
        raise ValueError("multi_target_gate needs at least one target")
    _check_distinct(controls + targets, "multi-target gate")
    return [controlled_x(controls, t) for t in targets]


@dataclass
class BlockFragment:
    """Flat gate sequence emitted by one block generator."""

    name: str
    gates: list[Gate] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    ancilla_used: int = 0

    @property
    def touched(self) -> set[QubitRef]:
        return {q for g in self.gates for q in g.qubits}

    def reversed(self) -> BlockFragment:
        return BlockFragment(self.name + "_reversed", reverse(self.gates),
                             dict(self.params), self.ancilla_used)

    def label(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({args})"

    def __len__(self) -> int:
        return len(self.gates)


class _PeakTracker:
    def __init__(self, base: int):
        self.base = base
        self.peak = 0


class AncillaPool:
    """Reusable ancilla slots shared by sequential blocks.

    Slots are handed out lowest-free-first; ``watermark`` is the largest
    number of slots ever live at once and becomes the ancilla register width.
    """

    def __init__(self, register: str = "anc"):
        self.register = register
        self.watermark = 0
        self._live: set[int] = set()
        self._trackers: list[_PeakTracker] = []
        self._capacity: int | None = None

    @property
    def live(self) -> int:
        return len(self._live)

    def acquire(self, n: int) -> list[QubitRef]:
        if n < 0:
            raise ValueError("cannot acquire a negative number of ancillas")
        slots = []
        i = 0
        while len(slots) < n:
            if i not in self._live:
                slots.append(i)
            i += 1
        if self._capacity is not None and slots and slots[-1] >= self._capacity:
            raise FinalizedCircuitError("ancilla register already materialized")
        self._live.update(slots)
        self.watermark = max(self.watermark, self.live)
        for t in self._trackers:
            t.peak = max(t.peak, self.live - t.base)
        return [QubitRef(self.register, s) for s in slots]

    def release(self, refs: Iterable[QubitRef]) -> None:
        refs = list(refs)
        for r in refs:
            if r.register != self.register or r.index not in self._live:
                raise DoubleReleaseError(f"{r} is not a live ancilla")
            if refs.count(r) > 1:
                raise DoubleReleaseError(f"{r} released twice")
        self._live.difference_update(r.index for r in refs)

    @contextmanager
    def track(self):
        """Measure peak acquisition inside a block; checks the block is balanced."""
        tracker = _PeakTracker(self.live)
        self._trackers.append(tracker)
        try:
            yield tracker
        finally:
            self._trackers.remove(tracker)
        if self.live != tracker.base:
            raise UnbalancedAncillaError(
                f"block left {self.live - tracker.base} ancilla(s) live"
            )


def acquire_ancilla(pool: AncillaPool, n: int) -> list[QubitRef]:
    return pool.acquire(n)


def release_ancilla(pool: AncillaPool, refs: Iterable[QubitRef]) -> None:
    pool.release(refs)


class Circuit:
    """Register table plus ordered gate list."""

    def __init__(self, ancilla_register: str = "anc"):
        if not _IDENT.match(ancilla_register):
            raise ValueError(f"invalid register name {ancilla_register!r}")
        self.registers: list[RegisterHandle] = []
        self.gates: list[Gate] = []
        self.pool = AncillaPool(ancilla_register)
        # (gate position, label) pairs; purely informational
        self.annotations: list[tuple[int, str]] = []
        self.measured: list[QubitRef] = []
        self.finalized = False

    def __repr__(self) -> str:
        regs = ", ".join(f"{r.name}[{r.width}]" for r in self.registers)
        return f"Circuit({regs}; {len(self.gates)} gates)"

    @property
    def ancilla_watermark(self) -> int:
        return self.pool.watermark

    def _check_mutable(self):
        if self.finalized:
            raise FinalizedCircuitError("circuit is finalized")

    def add_register(self, name: str, width: int, role: Role = Role.DATA) -> RegisterHandle:
        self._check_mutable()
        role = Role(role)
        if not isinstance(name, str) or not _IDENT.match(name):
            raise ValueError(f"invalid register name {name!r}")
        if any(r.name == name for r in self.registers) or name == self.pool.register:
            raise NameCollisionError(f"register {name!r} already exists")
        if not isinstance(width, int) or width < 1:
            raise InvalidWidthError(f"register width must be >= 1, got {width!r}")
        if role is Role.ANCILLA:
            raise ValueError("the ancilla register is created by plot_ancilla()")
        reg = RegisterHandle(name, width, role, len(self.registers))
        self.registers.append(reg)
        return reg

    def register(self, name: str) -> RegisterHandle:
        for r in self.registers:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def ancilla_register(self) -> RegisterHandle | None:
        for r in self.registers:
            if r.role is Role.ANCILLA:
                return r
        return None

    def _layout(self) -> dict[str, tuple[int, int]]:
        layout = {}
        offset = 0
        for r in self.registers:
            layout[r.name] = (offset, r.width)
            offset += r.width
        if not self.finalized and self.pool.watermark:
            layout[self.pool.register] = (offset, self.pool.watermark)
        return layout

    @property
    def total_qubits(self) -> int:
        """Qubit count, including ancillas not yet materialized by plot_ancilla."""
        return sum(w for _, w in self._layout().values())

    def index_map(self) -> dict[QubitRef, int]:
        return {
            QubitRef(name, i): off + i
            for name, (off, width) in self._layout().items()
            for i in range(width)
        }

    def resolve(self, ref: QubitRef) -> int:
        layout = self._layout()
        if ref.register not in layout or ref.index >= layout[ref.register][1]:
            raise DanglingReferenceError(f"qubit {ref} does not resolve in this circuit")
        return layout[ref.register][0] + ref.index

    def append(self, gate: Gate) -> None:
        self._check_mutable()
        for q in gate.qubits:
            self.resolve(q)
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def append_fragment(self, frag: BlockFragment) -> BlockFragment:
        self.annotations.append((len(self.gates), frag.label()))
        self.extend(frag.gates)
        return frag

    def measure(self, qubits: Qubits) -> None:
        """Mark qubits for measurement; classical bit i receives qubits[i]."""
        self._check_mutable()
        qubits = as_qubits(qubits)
        for q in qubits:
            self.resolve(q)
        _check_distinct(self.measured + qubits, "measurement")
        self.measured.extend(qubits)

    def plot_ancilla(self) -> RegisterHandle | None:
        """Materialize the shared ancilla register (declared last) and finalize."""
        if self.pool.live:
            raise UnbalancedAncillaError(f"{self.pool.live} ancilla slot(s) still live")
        if self.finalized:
            return self.ancilla_register
        reg = None
        if self.pool.watermark:
            reg = RegisterHandle(self.pool.register, self.pool.watermark,
                                 Role.ANCILLA, len(self.registers))
            self.registers.append(reg)
        self.pool._capacity = self.pool.watermark
        self.finalized = True
        return reg

    def copy(self) -> Circuit:
        other = Circuit(self.pool.register)
        other.registers = list(self.registers)
        other.gates = list(self.gates)
        other.annotations = list(self.annotations)
        other.measured = list(self.measured)
        other.finalized = self.finalized
        other.pool.watermark = self.pool.watermark
        other.pool._live = set(self.pool._live)
        other.pool._capacity = self.pool._capacity
        return other


def new_circuit(ancilla_register: str = "anc") -> Circuit:
    return Circuit(ancilla_register)


def add_register(c: Circuit, name: str, width: int, role: Role = Role.DATA) -> RegisterHandle:
    return c.add_register(name, width, role)


def append_gate(c: Circuit, g: Gate) -> None:
    c.append(g)


def plot_ancilla(c: Circuit) -> RegisterHandle | None:
    return c.plot_ancilla()
