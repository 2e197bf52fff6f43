"""
Exception hierarchy for the neural DNF toolkit.

Oracle violations are reported as data (see evaluation.oracle.CoverageReport);
the exceptions below are reserved for contract failures.
"""

from typing import Any, Optional


class NdnfError(Exception):
    """Base class for all toolkit errors."""


class InputShapeError(NdnfError, ValueError):
    """Input width does not match the layer's in_features."""


class DomainError(NdnfError, ValueError):
    """Input values outside the domain an operation accepts."""


class BudgetExceededError(NdnfError):
    """A per-node enumeration or search budget was exceeded.

    Attributes:
        node: Index (or label) of the offending node, if known
        partial: Partial results gathered before the budget ran out
    """

    def __init__(self, message: str, node: Optional[Any] = None, partial: Optional[Any] = None):
        super().__init__(message)
        self.node = node
        self.partial = partial


class TrainingDivergedError(NdnfError):
    """Loss became NaN or infinite during training."""

    def __init__(self, epoch: int, message: Optional[str] = None):
        super().__init__(message or f"Training diverged at epoch {epoch}")
        self.epoch = epoch


class TranslationError(NdnfError, ValueError):
    """A weight tensor could not be translated into a rule."""

    def __init__(self, index: int, value: float):
        super().__init__(f"Non-lattice weight {value!r} at index {index}")
        self.index = index
        self.value = value


class EvaluationError(NdnfError):
    """A logic program could not be evaluated (e.g. an unassigned atom)."""


class DatasetError(NdnfError, ValueError):
    """Malformed dataset file or schema mismatch."""


class CheckpointError(NdnfError):
    """Checkpoint file is unreadable or has an unsupported format version."""


class ReconnectError(NdnfError, ValueError):
    """Split sets do not match the downstream usage of a conjunctive node."""
