import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracle import expected_paths_by_enumeration
from rainbowlab.exceptions import DomainError
from rainbowlab.graphs import derive_params
from rainbowlab.theory import (
    bounds_report,
    chung_lu_window,
    degree_bound,
    doubling_depth,
    expected_rainbow_paths,
    lb_connect_s,
    s0_window,
    sweep_hint,
    ub_nonconnect_s,
)

mpmath.mp.dps = 50

GRID = [(10**6, 2), (10**9, 2), (10**6, math.e), (10**6, 11)]


def ref_bounds(n, c):
    """Independent 50-digit evaluation of every closed-form bound."""
    n, c = mpmath.mpf(n), mpmath.mpf(c)
    L = mpmath.log(n)
    LL = mpmath.log(L)
    LLL = mpmath.log(LL)
    lead = L / (mpmath.log(c) - 1 + LL)
    return {
        "ub": lead - mpmath.mpf(1) / 2 + LLL / (3 * LL),
        "lb": lead + mpmath.mpf(3) / 2 + 2 * mpmath.sqrt(LLL) / LL,
        "s0": int(mpmath.floor(lead + mpmath.mpf(1) / 2 + LLL / (3 * LL))),
        "cl_lo": (mpmath.log(c / 11) + L) / (mpmath.log(c) + LL),
        "cl_hi": (mpmath.log(33 * c * c / 400) + LL + L) / (mpmath.log(c) + LL) + 2,
    }


def rel(a, b):
    return abs(mpmath.mpf(a) - b) / abs(b)


@pytest.mark.parametrize("n, c", GRID)
def test_bounds_match_high_precision(n, c):
    ref = ref_bounds(n, c)
    assert rel(ub_nonconnect_s(n, c), ref["ub"]) < 1e-9
    assert rel(lb_connect_s(n, c), ref["lb"]) < 1e-9
    assert s0_window(n, c) == (ref["s0"], ref["s0"] + 1, ref["s0"] + 2)
    lo, hi = chung_lu_window(n, c)
    assert rel(lo, ref["cl_lo"]) < 1e-9
    assert rel(hi, ref["cl_hi"]) < 1e-9


def test_documented_values():
    assert ub_nonconnect_s(10**6, 2) == pytest.approx(5.580229, abs=1e-5)
    assert lb_connect_s(10**6, 2) == pytest.approx(8.206054, abs=1e-5)
    assert s0_window(10**6, 2) == (6, 7, 8)
    assert s0_window(10**9, 2)[0] == 8
    lo, hi = chung_lu_window(10**6, 2)
    assert lo == pytest.approx(3.648984, abs=1e-5)
    assert hi == pytest.approx(6.619735, abs=1e-5)
    # ln(c/11) = 0 leaves ln n / (ln 11 + ln ln n)
    L = math.log(10**6)
    assert chung_lu_window(10**6, 11)[0] == pytest.approx(L / (math.log(11) + math.log(L)), rel=1e-14)
    assert chung_lu_window(10**6, 11)[0] == pytest.approx(2.750073, abs=1e-6)
    assert lb_connect_s(10**6, 2) - ub_nonconnect_s(10**6, 2) == pytest.approx(2.625825, abs=1e-5)


def test_c_equals_e():
    # ln c - 1 vanishes, leaving ln n / ln ln n in the leading term
    L = math.log(10**6)
    expected = L / math.log(L) - 0.5 + math.log(math.log(L)) / (3 * math.log(L))
    assert ub_nonconnect_s(10**6, math.e) == pytest.approx(expected, rel=1e-12)
    assert ub_nonconnect_s(10**6, math.e) == pytest.approx(4.884016, abs=1e-6)


def test_sweep_hint():
    assert sweep_hint(10**6) == (2, 16)
    assert sweep_hint(10**9) == (3, 21)
    assert sweep_hint(2000) == (1, 12)
    assert all(sweep_hint(n)[0] >= 1 for n in range(16, 200))


@pytest.mark.parametrize(
    "fn", [ub_nonconnect_s, lb_connect_s, s0_window, degree_bound, lambda n, c: sweep_hint(n)]
)
def test_small_n_rejected(fn):
    with pytest.raises(DomainError):
        fn(15, 2)
    fn(16, 2)


@pytest.mark.parametrize("c", [1.0, 0.5, -2])
def test_c_must_exceed_one(c):
    with pytest.raises(DomainError):
        ub_nonconnect_s(1000, c)


def test_denominator_positive_on_domain():
    # ln ln 16 > 1, so ln c - 1 + ln ln n > 0 whenever n >= 16 and c > 1
    assert ub_nonconnect_s(16, 1 + 1e-12) > 0


def test_chung_lu_small_n():
    lo, hi = chung_lu_window(3, 2)
    assert lo <= hi
    with pytest.raises(DomainError):
        chung_lu_window(2, 2)


@given(st.integers(16, 10**12), st.floats(1.01, 50))
def test_algebraic_identities(n, c):
    ub, lb = ub_nonconnect_s(n, c), lb_connect_s(n, c)
    LL = math.log(math.log(n))
    LLL = math.log(LL)
    assert lb - ub == pytest.approx(2 + 2 * math.sqrt(LLL) / LL - LLL / (3 * LL), rel=1e-9, abs=1e-9)
    assert ub < lb
    assert s0_window(n, c)[0] == math.floor(ub + 1) or abs(ub + 1 - round(ub + 1)) < 1e-9
    lo, hi = chung_lu_window(n, c)
    assert lo <= hi
    assert hi - lo == pytest.approx((math.log(363 * c / 400) + LL) / (math.log(c) + LL) + 2, rel=1e-9)


@given(st.integers(16, 10**12), st.floats(1.01, 20), st.floats(0.01, 5))
def test_decreasing_in_c(n, c, dc):
    assert ub_nonconnect_s(n, c + dc) < ub_nonconnect_s(n, c)
    assert lb_connect_s(n, c + dc) < lb_connect_s(n, c)


def test_window_width_below_three():
    for n in [16, 100, 10**4, 10**6, 10**9, 10**15]:
        for c in [1.01, 2, 5, 50]:
            assert lb_connect_s(n, c) - ub_nonconnect_s(n, c) < 3


def test_degree_bound_and_depth():
    assert degree_bound(20000, 2) == pytest.approx(
        float(4 * mpmath.log(20000) / mpmath.log(mpmath.log(20000))), rel=1e-12
    )
    assert degree_bound(20000, 2) == pytest.approx(17.277, abs=1e-3)
    assert doubling_depth(20000) == 0
    assert doubling_depth(10**100) == 1


def test_bounds_report():
    rep = bounds_report(10**6, 2)
    assert rep.s0 == 6 and rep.window == (6, 7, 8)
    assert (rep.scan_hint_min_s, rep.scan_hint_max_s) == (2, 16)
    d = rep.to_dict()
    assert d["diam_window"] == list(chung_lu_window(10**6, 2))
    assert d["ub_s"] == ub_nonconnect_s(10**6, 2)


class TestFirstMoment:
    def test_example(self):
        rep = expected_rainbow_paths(4, 2, Fraction(1, 2))
        assert rep.per_length == (1, 1) and rep.total == 2

    @given(st.integers(2, 50), st.floats(0, 1))
    def test_single_color(self, n, p):
        assert expected_rainbow_paths(n, 1, p).total == p

    @pytest.mark.parametrize(
        "n, s, p",
        [(n, s, p) for n in range(2, 8) for s in range(1, 4) for p in (Fraction(1, 4), Fraction(1, 2))],
    )
    def test_enumeration_oracle(self, n, s, p):
        rep = expected_rainbow_paths(n, s, p)
        assert list(rep.per_length) == expected_paths_by_enumeration(n, s, p)
        assert isinstance(rep.total, Fraction)

    def test_bound_dominates(self):
        rng = random.Random(2)
        for _ in range(1000):
            n, s = rng.randint(2, 500), rng.randint(1, 64)
            p = Fraction(rng.randint(0, 1000), 1000)
            rep = expected_rainbow_paths(n, s, p)
            assert 0 <= rep.total <= rep.crude_bound_total
            assert all(x >= 0 for x in rep.per_length)

    def test_vanishes_below_threshold(self):
        totals = []
        for n in (10**6, 10**8, 10**12):
            s = math.floor(ub_nonconnect_s(n, 2))
            totals.append(expected_rainbow_paths(n, s, derive_params(n, s, 2).p).total)
        assert totals[0] > totals[1] > totals[2]

    @pytest.mark.parametrize("args", [(1, 2, 0.5), (4, 0, 0.5), (4, 65, 0.5), (4, 2, 1.5), (4, 2, -0.1)])
    def test_rejects(self, args):
        with pytest.raises(DomainError):
            expected_rainbow_paths(*args)

    def test_to_dict(self):
        d = expected_rainbow_paths(4, 2, Fraction(1, 2)).to_dict()
        assert d == {"n": 4, "s": 2, "p": 0.5, "per_length": [1.0, 1.0], "total": 2.0, "crude_bound_total": 3.0}
