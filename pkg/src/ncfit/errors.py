"""Exception hierarchy shared by all ncfit modules."""


class ArtifactError(Exception):
    """Base class for every error raised by ncfit."""


class DivisionByZero(ArtifactError, ZeroDivisionError):
    pass


class PrecisionError(ArtifactError):
    pass


class ReconstructionFailure(ArtifactError):
    pass


class InvalidRepresentation(ArtifactError):
    pass


class ShapeError(ArtifactError):
    pass


class NotAUnit(ArtifactError):
    pass


class NotAComplex(ArtifactError):
    pass


class LiftObstruction(ArtifactError):
    def __init__(self, msg, order=None):
        super().__init__(msg)
        self.order = order


class RangeError(ArtifactError):
    pass


class NotFiner(ArtifactError):
    pass


class PresentationMismatch(ArtifactError):
    pass


class NotSurjective(ArtifactError):
    pass


class InvalidTrivialisation(ArtifactError):
    pass


class SingularTransport(ArtifactError):
    pass


class ClassificationError(ArtifactError):
    pass


class IncompleteData(ArtifactError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__("missing inputs: " + ", ".join(self.missing))


class SchemaError(ArtifactError):
    pass


class ParseError(ArtifactError):
    def __init__(self, msg, field=None):
        self.field = field
        super().__init__(f"{field}: {msg}" if field else msg)


class RationalityFailure(ArtifactError):
    """Raised when a value that must be Galois-stable is not.

    This can only happen through an implementation bug, so callers should
    treat it as critical rather than as a verdict.
    """
