"""Exception hierarchy shared by all quditport modules."""


class QuditportError(Exception):
    """Base class for every error raised by the package."""


class DimensionMismatch(QuditportError, ValueError):
    pass


class NotNormalized(QuditportError, ValueError):
    pass


class LabelOutOfRange(QuditportError, ValueError):
    pass


class NotScalar(QuditportError, ArithmeticError):
    """A product expected to be proportional to the identity is not."""


class NormalizationViolation(QuditportError, ValueError):
    """Channel deformation does not satisfy Tr(T^dagger T) = s."""


class FamilyNormalizationError(QuditportError, ValueError):
    """Measurement operators violate Tr(O_kl O_k'l'^dagger) = s delta delta."""


class NotOrthonormal(QuditportError, ValueError):
    pass


class UnreliableScheme(QuditportError):
    """The channel or measurement family is not unitary, so recovery cannot be exact."""
