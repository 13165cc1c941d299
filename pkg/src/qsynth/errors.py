"""Exception types raised across the synthesizer."""


class CircuitError(Exception):
    """Base class for circuit construction errors."""


class NameCollisionError(CircuitError, ValueError):
    pass


class InvalidWidthError(CircuitError, ValueError):
    pass


class WidthMismatchError(CircuitError, ValueError):
    pass


class DanglingReferenceError(CircuitError, LookupError):
    pass


class OverlapError(CircuitError, ValueError):
    """A qubit was used twice where distinct qubits are required."""


class DoubleReleaseError(CircuitError):
    pass


class UnbalancedAncillaError(CircuitError):
    """Ancilla slots are still live where the pool must be empty."""


class FinalizedCircuitError(CircuitError):
    pass


class RangeError(CircuitError, ValueError):
    pass


class LengthError(ValueError):
    pass


class NonPermutationGateError(ValueError):
    def __init__(self, index: int, kind: str):
        super().__init__(f"gate #{index} ({kind}) is not a permutation gate")
        self.index = index
        self.kind = kind


class CapacityError(RuntimeError):
    pass


class QasmParseError(ValueError):
    """Error while parsing OPENQASM input, with source position."""

    def __init__(self, msg: str, line: int, column: int, token: str = ""):
        self.msg = msg
        self.line = line
        self.column = column
        self.token = token
        where = f"line {line}, column {column}"
        if token:
            where += f", near {token!r}"
        super().__init__(f"{msg} ({where})")


class QasmSyntaxError(QasmParseError):
    pass


class QasmUnknownInstructionError(QasmParseError):
    pass


class QasmIndexError(QasmParseError):
    """Qubit or bit index outside its declared register."""
