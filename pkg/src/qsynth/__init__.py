"""Parametric synthesis of reversible arithmetic blocks and Grover circuits."""
from .circuit import (
    AncillaPool,
    BlockFragment,
    Circuit,
    Gate,
    GateKind,
    QubitRef,
    RegisterHandle,
    Role,
    multi_target_gate,
    new_circuit,
    reverse,
)
from .blocks import (
    adder,
    if_equal,
    multi_control_gate_3cx,
    multi_control_z,
    multiplier_asymmetric,
    set_constant,
    toffoli_4q,
)
from .grover import GroverParams, OracleSpec, build_oracle, diffusion, grover_search, iteration_count
from .qasm import EmitOptions, emit, parse

__version__ = "0.1.0"

__all__ = [
    "AncillaPool", "BlockFragment", "Circuit", "Gate", "GateKind", "QubitRef",
    "RegisterHandle", "Role", "multi_target_gate", "new_circuit", "reverse",
    "adder", "if_equal", "multi_control_gate_3cx", "multi_control_z",
    "multiplier_asymmetric", "set_constant", "toffoli_4q",
    "GroverParams", "OracleSpec", "build_oracle", "diffusion", "grover_search",
    "iteration_count", "EmitOptions", "emit", "parse",
]
