"""Exception hierarchy shared by all stages of the pipeline."""


class RedCarDError(Exception):
    """Base class; the CLI maps any subclass to a nonzero exit."""


class DimensionError(RedCarDError, ValueError):
    """Operands act on different numbers of qubits."""


class HermiticityError(RedCarDError, ValueError):
    """A Pauli sum would acquire an imaginary coefficient."""


class CapacityError(RedCarDError):
    """The Lie closure outgrew ``max_dim``."""

    def __init__(self, message: str, partial_size: int):
        super().__init__(message)
        self.partial_size = partial_size


class WitnessError(RedCarDError):
    """No distance-2 witness is guaranteed for the requested pair."""


class PreconditionError(RedCarDError, ValueError):
    """An operation was called outside its stated domain."""


class InvolutionError(RedCarDError):
    """A Hamiltonian term lies in k under the chosen involution."""


class ConsistencyError(RedCarDError):
    """An internal structural invariant failed (indicates a bug)."""


class TheoremViolation(ConsistencyError):
    """Fragment sizes contradict the ordering theorem (indicates a bug)."""


class StagingError(RedCarDError):
    """A stage Hamiltonian does not commute with the earlier generators."""


class UnsupportedAnsatzError(RedCarDError):
    """The compressed ladder ansatz was requested for a non-TFXY structure."""


class MetricError(RedCarDError, ValueError):
    """A metric is undefined for the given input (e.g. zero norm)."""


class CapExceededError(RedCarDError):
    """Dense verification requested beyond the configured qubit cap."""
