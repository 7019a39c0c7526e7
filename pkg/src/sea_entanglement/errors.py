"""Exception types raised by the library."""


class SeaError(Exception):
    """Base class for all library errors."""


class ZeroWedge(SeaError, ValueError):
    """Exterior product of linearly dependent fermion states vanishes."""


class SizeLimit(SeaError, ValueError):
    """Input exceeds a desk-scale size guard."""


class TypeMismatch(SeaError, TypeError):
    """Operands carry different statistics or mode spaces."""


class LocalityViolation(SeaError, ValueError):
    """A state declared local has support outside its subsystem."""


class Unsupported(SeaError, ValueError):
    """Requested operation is outside the supported regime."""


class DegenerateInput(SeaError, ValueError):
    """Input state has zero norm."""


class NotNormalized(SeaError, ValueError):
    """Density matrix trace deviates from one."""


class EmptySector(SeaError, ValueError):
    """Requested superselection sector carries zero weight."""


class NotCoPurifications(SeaError, ValueError):
    """Two states do not share the same reduced density matrix."""


class NotAnEnsembleOf(SeaError, ValueError):
    """Ensemble does not reproduce the reduced density matrix."""


class EncodingViolation(SeaError, ValueError):
    """State leaks outside the {vac, up-down} qubit encoding."""


class NumericalContractViolation(SeaError, AssertionError):
    """An internal numerical consistency check failed."""


class SpecError(SeaError, ValueError):
    """Malformed state specification; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message
