"""Closed-form threshold bounds and the exact first-moment path count.

All logarithms are natural. The triple-log terms need ``ln ln ln n > 0``,
i.e. ``n > e^e``, so those formulas reject ``n < 16``.
"""

import dataclasses
import math

from .exceptions import DomainError
from .validation import MAX_COLORS, check_int, check_real

MIN_N = 16


def _logs(n, c, *, min_n=MIN_N):
    try:
        n = check_int(n, "n", min_value=min_n)
        c = check_real(c, "c", gt=1)
    except (TypeError, ValueError) as exc:
        raise DomainError(str(exc)) from None
    ln = math.log(n)
    lnln = math.log(ln)
    return ln, lnln, math.log(lnln) if lnln > 0 else float("nan"), math.log(c)


def _lead(n, c):
    ln, lnln, lnlnln, lnc = _logs(n, c)
    denom = lnc - 1.0 + lnln
    if denom <= 0:
        raise DomainError(f"ln c - 1 + ln ln n = {denom:.6g} <= 0 for n={n}, c={c}")
    return ln / denom, lnln, lnlnln


def ub_nonconnect_s(n, c):
    """Largest ``s`` for which the family is a.a.s. *not* rainbow connected.

    ``ln n / (ln c - 1 + ln ln n) - 1/2 + ln ln ln n / (3 ln ln n)``
    """
    lead, lnln, lnlnln = _lead(n, c)
    return lead - 0.5 + lnlnln / (3.0 * lnln)


def lb_connect_s(n, c):
    """Smallest ``s`` from which the family is a.a.s. rainbow connected.

    ``ln n / (ln c - 1 + ln ln n) + 3/2 + 2 sqrt(ln ln ln n) / ln ln n``
    """
    lead, lnln, lnlnln = _lead(n, c)
    return lead + 1.5 + 2.0 * math.sqrt(lnlnln) / lnln


def s0_window(n, c):
    """The three candidate threshold values ``(s0, s0 + 1, s0 + 2)``."""
    lead, lnln, lnlnln = _lead(n, c)
    s0 = math.floor(lead + 0.5 + lnlnln / (3.0 * lnln))
    return s0, s0 + 1, s0 + 2


def chung_lu_window(n, c):
    """Interval that a.a.s. contains the diameter of G(n, c ln n / n)."""
    ln, lnln, _, lnc = _logs(n, c, min_n=3)
    denom = lnc + lnln
    if denom <= 0:
        raise DomainError(f"ln c + ln ln n = {denom:.6g} <= 0")
    lower = (math.log(c / 11.0) + ln) / denom
    upper = (math.log(33.0 * c * c / 400.0) + lnln + ln) / denom + 2.0
    return lower, upper


def sweep_hint(n):
    """Default scan range ``(s_min, s_max)`` for threshold experiments.

    Values of ``s`` outside ``[ln n / (2 ln ln n), 3 ln n / ln ln n]`` are
    settled by the bounds alone.
    """
    try:
        n = check_int(n, "n", min_value=MIN_N)
    except (TypeError, ValueError) as exc:
        raise DomainError(str(exc)) from None
    ln = math.log(n)
    lnln = math.log(ln)
    return max(1, math.floor(ln / (2.0 * lnln))), math.ceil(3.0 * ln / lnln)


def degree_bound(n, c):
    """``2 c ln n / ln ln n``, the a.a.s. cap on any single layer's max degree."""
    ln, lnln, _, _ = _logs(n, c, min_n=MIN_N)
    return 2.0 * c * ln / lnln


def doubling_depth(n):
    """``ceil(ln ln ln ln n)``: excluded color sets may have up to this + 1 colors."""
    _, _, lnlnln, _ = _logs(n, 2.0)
    return math.ceil(math.log(lnlnln))


@dataclasses.dataclass(frozen=True)
class BoundsReport:
    n: int
    c: float
    ub_s: float
    lb_s: float
    s0: int
    scan_hint_min_s: int
    scan_hint_max_s: int
    diam_window: tuple

    @property
    def window(self):
        return self.s0, self.s0 + 1, self.s0 + 2

    def to_dict(self):
        out = dataclasses.asdict(self)
        out["diam_window"] = list(self.diam_window)
        out["window"] = list(self.window)
        return out


def bounds_report(n, c):
    lo, hi = sweep_hint(n)
    return BoundsReport(
        n=n,
        c=float(c),
        ub_s=ub_nonconnect_s(n, c),
        lb_s=lb_connect_s(n, c),
        s0=s0_window(n, c)[0],
        scan_hint_min_s=lo,
        scan_hint_max_s=hi,
        diam_window=chung_lu_window(n, c),
    )


@dataclasses.dataclass(frozen=True)
class ExpectationReport:
    """Expected number of rainbow ``u``-``v`` paths, split by length.

    Entries are exact :class:`fractions.Fraction` values when ``p`` is a
    Fraction or an int, floats otherwise.
    """

    n: int
    s: int
    p: object
    per_length: tuple
    total: object
    crude_bound_total: object

    def to_dict(self):
        return {
            "n": self.n,
            "s": self.s,
            "p": float(self.p),
            "per_length": [float(x) for x in self.per_length],
            "total": float(self.total),
            "crude_bound_total": float(self.crude_bound_total),
        }


def expected_rainbow_paths(n, s, p):
    """Expected count of rainbow paths between two fixed vertices of the family model.

    A length-``t`` path picks ``t - 1`` distinct interior vertices in order
    (``(n-2)(n-3)...(n-t)`` ways) and an injective coloring of its edges
    (``s(s-1)...(s-t+1)`` ways); each such colored path is present with
    probability ``p**t``. The crude count ``n**(t-1) * s!`` is reported
    alongside for comparison.
    """
    try:
        n = check_int(n, "n", min_value=2)
        s = check_int(s, "s", min_value=1, max_value=MAX_COLORS)
        check_real(p, "p", ge=0, le=1)
    except (TypeError, ValueError) as exc:
        raise DomainError(str(exc)) from None
    per_length = []
    bound = 0
    s_fact = math.factorial(s)
    for t in range(1, s + 1):
        pt = p**t
        per_length.append(math.perm(n - 2, t - 1) * math.perm(s, t) * pt)
        bound += n ** (t - 1) * s_fact * pt
    return ExpectationReport(
        n=n, s=s, p=p, per_length=tuple(per_length), total=sum(per_length), crude_bound_total=bound
    )
