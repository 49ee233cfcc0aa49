"""Exception types shared across the package."""


class SarascanError(Exception):
    """Base class for every package-specific error."""


class InvalidSeries(SarascanError):
    """Series input violates a structural requirement (length, finiteness, order)."""


class BandwidthError(SarascanError):
    """Bandwidth incompatible with the series length or the weight scheme."""


class BandwidthNonPositive(BandwidthError):
    """Bandwidth below 1."""


class BandwidthTooSmall(BandwidthError):
    """Bandwidth below the minimum the weight scheme supports."""


class BandwidthTooLarge(BandwidthError):
    """Bandwidth above floor(n / 2), so no full window fits."""


class DegenerateDesign(SarascanError):
    """Local-linear weight denominator is not positive at an evaluated position."""


class InvalidChangepoints(SarascanError):
    """Change-point vector is unsorted, duplicated, or out of (0, n)."""


class SeriesTooShort(SarascanError):
    """Series shorter than an operation's minimum length."""


class SeriesTooLong(SarascanError):
    """Series longer than an operation's guard (exact search oracle)."""


class InvalidSpec(SarascanError):
    """Simulation truth specification is inconsistent."""


class ParseError(SarascanError):
    """Malformed row in an input file."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NonFiniteValue(ParseError):
    """Input row carries a missing or non-finite value."""

    def __init__(self, line: int, message: str = "non-finite value"):
        super().__init__(line, message)


class EmptyGroup(SarascanError):
    """A label groups fewer than two usable rows."""

    def __init__(self, label: str):
        super().__init__(f"label {label!r} has fewer than two rows")
        self.label = label
