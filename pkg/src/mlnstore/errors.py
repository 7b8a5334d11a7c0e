"""Exception hierarchy shared by stores, operators, parsers and the CLI."""


class MLNError(Exception):
    """Base class for every error raised by mlnstore."""


# -- schema -----------------------------------------------------------------

class UnknownDimension(MLNError, LookupError):
    pass


class DuplicateDimension(MLNError, ValueError):
    pass


class DimensionNotSingleton(MLNError, ValueError):
    """Deleting a dimension with more than one layer would merge node-layers."""


class LastDimension(MLNError, ValueError):
    pass


class UnknownLayer(MLNError, LookupError):
    pass


class DuplicateLayer(MLNError, ValueError):
    pass


class LastLayerInDimension(MLNError, ValueError):
    pass


class InvalidName(MLNError, ValueError):
    pass


# -- data -------------------------------------------------------------------

class InvalidCoordinate(MLNError, ValueError):
    pass


class DuplicateNode(MLNError, ValueError):
    pass


class UnknownNode(MLNError, LookupError):
    pass


class UnknownEndpoint(MLNError, LookupError):
    pass


class SelfLoop(MLNError, ValueError):
    pass


class DuplicateEdge(MLNError, ValueError):
    pass


class UnknownEdge(MLNError, LookupError):
    pass


class EmptyKey(MLNError, ValueError):
    pass


class InvalidAttributeValue(MLNError, TypeError):
    pass


class CapacityExceeded(MLNError, MemoryError):
    """A dense layout refused to grow past its hard node-layer cap."""


# -- operators / predicates -------------------------------------------------

class LayerIdentical(MLNError, ValueError):
    pass


class PredicateTypeError(MLNError, TypeError):
    pass


class PredicateSyntaxError(MLNError, SyntaxError):
    """Raised with a 1-based character offset into the predicate text."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.message = message
        self.position = offset
        self.source = text
        super().__init__(f"{message} at offset {offset}")

    def __str__(self) -> str:
        return f"{self.message} at offset {self.position}"


class UnknownKeyword(PredicateSyntaxError):
    pass


# -- generator / io / bench -------------------------------------------------

class InvalidConfig(MLNError, ValueError):
    pass


class NonEmptyStore(MLNError, ValueError):
    pass


class ParseError(MLNError, ValueError):
    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ArityMismatch(ParseError):
    pass


class DuplicateRecord(ParseError):
    pass


class SinkFailure(MLNError, OSError):
    pass


class UnknownBackend(MLNError, LookupError):
    pass


class UnknownOperator(MLNError, LookupError):
    pass


class InsufficientData(MLNError, ValueError):
    pass
