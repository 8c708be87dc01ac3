"""Exception types shared across the package.

Every error carries a stable ``code`` string so the CLI and HTTP layers can
emit machine-parsable ``error_code: message`` diagnostics.
"""


class GradRecError(Exception):
    """Base class for all errors raised by this package."""

    code = "GradRecError"


class MalformedHeader(GradRecError):
    """Catalog bundle is structurally invalid (magic, version, sidecar rows)."""

    code = "MalformedHeader"


class DimMismatch(GradRecError):
    """Vector dimensionality disagrees with the catalog."""

    code = "DimMismatch"


class NonFiniteVector(GradRecError):
    """A vector contains NaN or infinite entries."""

    code = "NonFiniteVector"


class NonUnitVector(GradRecError):
    """A stored vector deviates from unit length beyond repairable tolerance."""

    code = "NonUnitVector"


class DuplicateId(GradRecError):
    code = "DuplicateId"


class DuplicatePrompt(GradRecError):
    code = "DuplicatePrompt"


class IoFailure(GradRecError):
    code = "IoFailure"


class InvalidSpec(GradRecError):
    """Synthetic-catalog parameters violate their constraints."""

    code = "InvalidSpec"


class EmptyCatalog(GradRecError):
    code = "EmptyCatalog"


class DegenerateMean(GradRecError):
    """Neighbor mean collapsed to (near) zero and cannot be normalized."""

    code = "DegenerateMean"


class DegenerateStep(GradRecError):
    """Traversal update produced a (near) zero vector."""

    code = "DegenerateStep"


class UnknownPrompt(GradRecError):
    code = "UnknownPrompt"


class UnknownSeed(GradRecError):
    code = "UnknownSeed"


class InsufficientCatalog(GradRecError):
    """Catalog has fewer products than a retrieval request needs."""

    code = "InsufficientCatalog"


class ZeroSignal(GradRecError):
    """Class sets are indistinguishable; no direction can be extracted."""

    code = "ZeroSignal"


class InvalidParameter(GradRecError):
    """A parameter violates its documented precondition."""

    code = "InvalidParameter"
