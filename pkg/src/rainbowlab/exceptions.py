"""Exception types shared across the package."""


class RainbowError(Exception):
    """Base class for all errors raised by rainbowlab."""


class DomainError(RainbowError, ValueError):
    """Inputs fall outside the region where a model or formula is defined."""


class CapacityError(RainbowError, ValueError):
    """Color count exceeds what a 64-bit color mask can hold."""


class GraphFormatError(RainbowError, ValueError):
    """A colored-edge-list file could not be parsed.

    ``code`` is one of ``MALFORMED_LINE``, ``DUPLICATE_EDGE_COLOR``,
    ``DUPLICATE_EDGE``, ``OUT_OF_RANGE`` or ``SELF_LOOP``; ``lineno`` is
    1-based, or ``None`` for whole-file problems.
    """

    def __init__(self, code, message, lineno=None):
        self.code = code
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(f"{code}: {where}{message}")
