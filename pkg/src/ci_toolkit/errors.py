"""Exception types raised across the toolkit."""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for every error this package raises on purpose."""


class InvalidMatrix(ToolkitError):
    """Matrix input is not square / not Hermitian / wrong shape."""


class NotPSD(ToolkitError):
    """Matrix has an eigenvalue below the PSD tolerance."""


class NotPure(ToolkitError):
    """State expected to be pure has Tr(rho^2) < 1 - 1e-9."""


class NotRankOne(ToolkitError):
    """POVM element expected to be rank one is not."""


class DuplicateParty(ToolkitError):
    """Two parties in a layout share a label."""


class UnknownParty(ToolkitError):
    """A label does not occur in the state's layout."""


class InvalidPartition(ToolkitError):
    """Partition sides overlap or do not form a valid cut."""


class LayoutMismatch(ToolkitError):
    """Two states (or a state and an operation) disagree on the layout."""


class ShapeMismatch(ToolkitError):
    """State does not have the structural form the operation requires."""


class InvalidPreset(ToolkitError):
    """Unknown preset name or parameters outside the preset's domain."""


class InvalidArgument(ToolkitError):
    """Scalar or flag argument outside its documented domain."""


class AncillaTooLarge(ToolkitError):
    """Purification would need an ancilla beyond the supported size."""


class DimensionTooLarge(ToolkitError):
    """Total dimension exceeds the configured cap (CI_TOOLKIT_DIM_CAP)."""


class StateFileError(ToolkitError):
    """State file failed validation; message names the offending field."""


class ObjectiveError(ToolkitError):
    """Objective returned a non-finite value during optimization."""

    def __init__(self, message: str, param=None):
        super().__init__(message)
        self.param = param


class InternalInvariantError(ToolkitError):
    """A mathematical invariant the code guarantees was violated (a bug)."""
