"""Small input-validation helpers, in the spirit of ``sklearn.utils.validation``."""

import numbers

from .exceptions import CapacityError

MAX_COLORS = 64


def check_int(value, name, *, min_value=None, max_value=None):
    """Return ``value`` as a Python int, rejecting bools, floats and out-of-range values."""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if min_value is not None and value < min_value:
        raise ValueError(f"{name} must be >= {min_value}, got {value}")
    if max_value is not None and value > max_value:
        raise ValueError(f"{name} must be <= {max_value}, got {value}")
    return value


def check_real(value, name, *, gt=None, ge=None, le=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    if value != value:
        raise ValueError(f"{name} must not be NaN")
    if gt is not None and not value > gt:
        raise ValueError(f"{name} must be > {gt}, got {value}")
    if ge is not None and not value >= ge:
        raise ValueError(f"{name} must be >= {ge}, got {value}")
    if le is not None and not value <= le:
        raise ValueError(f"{name} must be <= {le}, got {value}")
    return value


def check_vertex(v, n, name="vertex"):
    return check_int(v, name, min_value=0, max_value=n - 1)


def check_color_count(s):
    """Validate a color count against the 64-bit mask capacity."""
    s = check_int(s, "s", min_value=1)
    if s > MAX_COLORS:
        raise CapacityError(f"s={s} exceeds the color-mask capacity of {MAX_COLORS}")
    return s


def check_s_range(s_range):
    """Normalize an explicit scan range to a sorted tuple of distinct positive ints."""
    values = sorted({check_int(s, "s", min_value=1) for s in s_range})
    if not values:
        raise ValueError("scan range must be nonempty")
    return tuple(values)
