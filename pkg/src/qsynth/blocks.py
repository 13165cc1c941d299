"""
Parametric block generators.

Every generator builds a flat BlockFragment over the primitive gate set and,
unless ``append=False``, appends it to the circuit. Ancillas come from the
circuit's shared pool (or an explicit ``pool``) and are always uncomputed and
released before the generator returns.
"""
from __future__ import annotations

from typing import Sequence

from .circuit import (
    AncillaPool,
    BlockFragment,
    Circuit,
    Gate,
    QubitRef,
    Qubits,
    _check_distinct,
    as_qubits,
    ccx,
    cccx,
    controlled_x,
    cx,
    h,
    reverse,
    x,
    z,
)
from .errors import RangeError, WidthMismatchError


def _emit(c: Circuit, frag: BlockFragment, append: bool) -> BlockFragment:
    if append:
        c.append_fragment(frag)
    return frag


def _ripple_add(a: list[QubitRef], b: list[QubitRef], carry: QubitRef | None) -> list[Gate]:
    """b += a in place with no ancillas (Takahashi-Tani-Kunihiro ripple).

    With ``carry`` the carry-out is XORed into that qubit, otherwise the sum
    wraps mod 2**n. ``a`` doubles as the carry chain and is restored.
    """
    n = len(a)
    if n == 1:
        gates = [ccx(b[0], a[0], carry)] if carry is not None else []
        return gates + [cx(a[0], b[0])]
    gates = [cx(a[i], b[i]) for i in range(1, n)]
    if carry is not None:
        gates.append(cx(a[n - 1], carry))
    gates += [cx(a[i], a[i + 1]) for i in range(n - 2, 0, -1)]
    gates += [ccx(b[i], a[i], a[i + 1]) for i in range(n - 1)]
    if carry is not None:
        gates.append(ccx(b[n - 1], a[n - 1], carry))
    for i in range(n - 1, 0, -1):
        gates.append(cx(a[i], b[i]))
        gates.append(ccx(b[i - 1], a[i - 1], a[i]))
    gates += [cx(a[i], a[i + 1]) for i in range(1, n - 1)]
    gates += [cx(a[i], b[i]) for i in range(n)]
    return gates


def adder(c: Circuit, i1: Qubits, i2: Qubits, *, carry: QubitRef | None = None,
          append: bool = True) -> BlockFragment:
    """i2 <- (i1 + i2) mod 2**n, i1 unchanged, zero ancillas.

    If ``carry`` is given the addition is not modular: the carry-out bit is
    XORed into it (so a zeroed carry qubit extends i2 by one bit).
    """
    a, b = as_qubits(i1), as_qubits(i2)
    if len(a) != len(b):
        raise WidthMismatchError(f"adder needs equal widths, got {len(a)} and {len(b)}")
    if not a:
        raise WidthMismatchError("adder needs width >= 1")
    _check_distinct(a + b + ([carry] if carry is not None else []), "adder")
    frag = BlockFragment("adder", _ripple_add(a, b, carry), {"n": len(a)})
    return _emit(c, frag, append)


def multiplier_asymmetric(c: Circuit, i1: Qubits, i2: Qubits, result: Qubits,
                          pool: AncillaPool | None = None, *,
                          append: bool = True) -> BlockFragment:
    """result <- i1 * i2 by binary long multiplication; result must start at zero.

    Rows run over i2 from least significant bit up. Each row writes the
    partial product i1 & i2[k] into n1 pooled ancillas with CCX gates, adds
    them into result[k:k+n1] (carry into result[k+n1]), then clears them by
    repeating the CCX layer. Peak ancilla use is n1.
    """
    pool = pool or c.pool
    a, b, res = as_qubits(i1), as_qubits(i2), as_qubits(result)
    n1, n2 = len(a), len(b)
    if n1 < 1 or n2 < 1:
        raise WidthMismatchError("multiplier operands need width >= 1")
    if len(res) != n1 + n2:
        raise WidthMismatchError(f"result width must be {n1 + n2}, got {len(res)}")
    _check_distinct(a + b + res, "multiplier")
    gates: list[Gate] = []
    with pool.track() as usage:
        for k in range(n2):
            anc = pool.acquire(n1)
            layer = [ccx(a[j], b[k], anc[j]) for j in range(n1)]
            gates += layer
            gates += _ripple_add(anc, res[k:k + n1], res[k + n1])
            gates += reverse(layer)
            pool.release(anc)
    frag = BlockFragment("multiplier_asymmetric", gates, {"n1": n1, "n2": n2}, usage.peak)
    return _emit(c, frag, append)


def multi_control_gate_3cx(c: Circuit, controls: Sequence[QubitRef], target: QubitRef,
                           kind: str = "X", pool: AncillaPool | None = None, *,
                           append: bool = True) -> BlockFragment:
    """X (or Z) on target iff all controls are 1, built from a CCCX chain.

    Up to three controls map onto a single primitive. Beyond that, the first
    CCCX folds three controls into an ancilla and each following CCCX folds
    the previous ancilla plus two fresh controls into the next one; the last
    ancilla and the leftover one or two controls drive the payload gate. This
    uses floor((k - 2) / 2) ancillas for k >= 4.
    """
    pool = pool or c.pool
    kind = kind.upper()
    if kind not in ("X", "Z"):
        raise ValueError(f"kind must be 'X' or 'Z', got {kind!r}")
    controls = as_qubits(controls)
    _check_distinct(controls + [target], "multi-controlled gate")
    k = len(controls)
    with pool.track() as usage:
        if k <= 3:
            core = [controlled_x(controls, target)]
        else:
            anc = pool.acquire((k - 2) // 2)
            chain = [cccx(controls[0], controls[1], controls[2], anc[0])]
            used = 3
            for i in range(1, len(anc)):
                chain.append(cccx(anc[i - 1], controls[used], controls[used + 1], anc[i]))
                used += 2
            core = chain + [controlled_x([anc[-1], *controls[used:]], target)] + reverse(chain)
            pool.release(anc)
    if kind == "Z":
        core = [h(target), *core, h(target)]
    frag = BlockFragment("multi_control_gate_3cx", core, {"k": k, "kind": kind}, usage.peak)
    return _emit(c, frag, append)


def multi_control_z(c: Circuit, controls: Sequence[QubitRef], target: QubitRef,
                    pool: AncillaPool | None = None, *, append: bool = True) -> BlockFragment:
    """Phase -1 on the all-ones pattern of controls + target.

    With no controls this degenerates to a plain Z on the target.
    """
    controls = as_qubits(controls)
    if not controls:
        return _emit(c, BlockFragment("multi_control_z", [z(target)], {"k": 0}), append)
    inner = multi_control_gate_3cx(c, controls, target, "Z", pool, append=False)
    frag = BlockFragment("multi_control_z", inner.gates, {"k": len(controls)},
                         inner.ancilla_used)
    return _emit(c, frag, append)


def toffoli_4q(c: Circuit, c1: QubitRef, c2: QubitRef, c3: QubitRef, target: QubitRef, *,
               append: bool = True) -> BlockFragment:
    """Three-control Toffoli as a single CCCX primitive.

    The IR keeps CCCX native so its unitary is exact; lowering happens only
    at QASM emission time.
    """
    frag = BlockFragment("toffoli_4q", [cccx(c1, c2, c3, target)])
    return _emit(c, frag, append)


def if_equal(c: Circuit, i1: Qubits, i2: Qubits, flag: QubitRef,
             pool: AncillaPool | None = None, *, append: bool = True) -> BlockFragment:
    """Flip flag iff i1 == i2; both registers are restored afterwards.

    Per-bit XNOR is computed into i2 (CX then X), an all-ones test drives the
    flag through a multi-controlled X, and the XNOR layer is undone.
    """
    a, b = as_qubits(i1), as_qubits(i2)
    if len(a) != len(b):
        raise WidthMismatchError(f"comparator needs equal widths, got {len(a)} and {len(b)}")
    _check_distinct(a + b + [flag], "comparator")
    compute: list[Gate] = []
    for qa, qb in zip(a, b):
        compute += [cx(qa, qb), x(qb)]
    mct = multi_control_gate_3cx(c, b, flag, "X", pool, append=False)
    frag = BlockFragment("if_equal", compute + mct.gates + reverse(compute),
                         {"n": len(a)}, mct.ancilla_used)
    return _emit(c, frag, append)


def set_constant(c: Circuit, reg: Qubits, value: int, *, append: bool = True) -> BlockFragment:
    """Load a classical constant into a zeroed register."""
    qubits = as_qubits(reg)
    if value < 0 or value >> len(qubits):
        raise RangeError(f"value {value} does not fit in {len(qubits)} qubits")
    gates = [x(q) for i, q in enumerate(qubits) if value >> i & 1]
    return _emit(c, BlockFragment("set_constant", gates, {"value": value}), append)
