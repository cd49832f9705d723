class FlexSliceError(Exception):
    pass


class ParameterError(FlexSliceError, ValueError):
    """Argument outside its allowed domain (unknown node, gamma not in [0, 1], ...)."""


class SpecificationError(FlexSliceError, ValueError):
    """A slice or network description is internally inconsistent."""


class CapacityError(FlexSliceError):
    """Committing an embedding would drive a remaining capacity negative."""


class ParseError(FlexSliceError, ValueError):
    pass


class SizeError(FlexSliceError):
    """Instance too large for exhaustive search."""


class ConfigurationError(FlexSliceError, ValueError):
    """A scenario description cannot be resolved."""
