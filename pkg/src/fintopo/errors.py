"""Exception types shared across the package."""


class FintopoError(Exception):
    """Base class for all package errors."""


class SizeGuardExceeded(FintopoError):
    """An exhaustive operation was asked to run beyond its size guard."""


class NotAPreorder(FintopoError):
    """A relation failed reflexivity or transitivity; carries a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotATopology(FintopoError):
    """An open-set family is not closed under union/intersection."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class MissingExtremes(FintopoError):
    """An open-set family lacks the empty set or the full set."""


class PointOutOfRange(FintopoError):
    """A point index fell outside 0..n-1."""


class DomainMismatch(FintopoError):
    """A point set or table does not live on the expected space."""


class SpaceMismatch(FintopoError):
    """Two maps were composed but the middle spaces differ."""


class MalformedSeries(FintopoError):
    """A candidate vanishing series violates its structural shape."""


class HeightExceeded(FintopoError):
    """A tree-space operation was asked to run beyond its height guard."""


class NotStablyConvergent(FintopoError):
    """A map family has a shape whose values never stabilize."""

    def __init__(self, message, shape=None):
        super().__init__(message)
        self.shape = shape


class MemberDiscontinuous(FintopoError):
    """A map family contains a discontinuous member."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UnknownPattern(FintopoError):
    """The miner was asked for a search pattern it does not know."""


class CoverVerificationFailed(FintopoError):
    """A computed cover failed one of its own certificate checks."""


class DocumentError(FintopoError):
    """Base class for text-format errors; carries a 1-based line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class DocumentSyntaxError(DocumentError):
    pass


class NotTransitive(DocumentError):
    """A space document omits a forced le pair; carries the witness triple."""

    def __init__(self, message, witness=None, line=None):
        super().__init__(message, line)
        self.witness = witness


class PartialTable(DocumentError):
    """A map or treemap document leaves some point or shape without a value."""


class ValueOutOfRange(DocumentError):
    """A document refers to a point outside the declared range."""


class UnknownSpaceRef(DocumentError):
    """A map document refers to a space name not defined in the input."""
