"""Exception hierarchy.

Every error raised by the library derives from :class:`ShadowError`, so
callers (and the command line) can catch one type and report ``kind``.
"""


class ShadowError(Exception):
    """Base class for all library errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class DimensionError(ShadowError, ValueError):
    pass


class SizeLimitError(ShadowError, ValueError):
    pass


class HermiticityError(ShadowError, ValueError):
    pass


class PositivityError(ShadowError, ValueError):
    pass


class NormalizationError(ShadowError, ValueError):
    pass


class UnknownSolidError(ShadowError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NonUnitaryError(ShadowError, ValueError):
    pass


class RangeError(ShadowError, ValueError):
    pass


class ApproximationError(ShadowError, ValueError):
    pass


class NotUniformError(ShadowError, ValueError):
    pass


class DegenerateError(ShadowError, ValueError):
    pass


class NotInformationallyCompleteError(ShadowError, ValueError):
    pass


class NotRigidlySymmetricError(ShadowError, ValueError):
    pass


class SingularHError(ShadowError, ValueError):
    pass


class InvalidStateError(ShadowError, ValueError):
    pass


class EmptyDataError(ShadowError, ValueError):
    pass


class ConfigError(ShadowError, ValueError):
    pass


class NotFactorizedError(ShadowError, ValueError):
    pass
