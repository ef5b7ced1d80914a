"""Exception types shared across the toolkit."""


class IdealimitError(Exception):
    pass


class DslSyntaxError(IdealimitError):
    """Malformed DSL text; carries the byte offset of the offending token."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ArityError(IdealimitError):
    pass


class SchematicExpression(IdealimitError):
    """Operation requires a concrete set but got a SelectorSchema."""


class UnknownMap(IdealimitError):
    pass


class UnknownPartition(IdealimitError):
    pass


class GroundSetMismatch(IdealimitError):
    pass


class UnsupportedIdeal(IdealimitError):
    pass


class NotPositive(IdealimitError):
    pass


class OrientationMismatch(IdealimitError):
    pass


class NotBijective(IdealimitError):
    pass


class ExplosionGuard(IdealimitError):
    pass


class DepthExceeded(IdealimitError):
    pass


class AlgebraEscape(IdealimitError):
    """An image left the exactly analyzable algebra."""


class UnknownExample(IdealimitError):
    pass


class NoBranching(IdealimitError):
    pass


class PreconditionFailed(IdealimitError):
    pass


class ChainNotDecreasing(IdealimitError):
    pass


class NotAlmostContained(IdealimitError):
    pass


class ChainBroken(IdealimitError):
    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class NotDense(IdealimitError):
    pass


class UnsupportedShape(IdealimitError):
    pass
