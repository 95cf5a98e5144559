from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nilbal import bounds, nq, witt
from nilbal.errors import InputError, RejectedError
from nilbal.presentations import FinitePresentation


def test_mobius():
    assert [witt.mobius(n) for n in (1, 2, 4, 6, 30, 12)] == [1, -1, 0, 1, -1, 0]


def test_witt_examples():
    assert witt.witt_rank(2, 3) == 2
    assert witt.witt_rank(2, 4) == 3
    assert witt.witt_rank(3, 2) == 3
    assert [witt.witt_rank(2, k) for k in range(1, 6)] == [2, 1, 2, 3, 6]


def test_hirsch_examples():
    assert witt.free_nilpotent_hirsch(2, 3) == 5
    assert witt.free_nilpotent_hirsch(2, 4) == 8
    assert witt.free_nilpotent_hirsch(5, 1) == 5


def test_relatively_free_balanced():
    assert witt.relatively_free_balanced(2, 2)
    assert not witt.relatively_free_balanced(2, 3)
    assert witt.relatively_free_balanced(3, 1)
    assert witt.relatively_free_balanced(1, 4)
    assert not witt.relatively_free_balanced(3, 2)


def test_witt_rejects_bad_input():
    with pytest.raises(ValueError):
        witt.witt_rank(0, 2)
    with pytest.raises(ValueError):
        witt.mobius(0)


@given(st.integers(1, 12), st.integers(1, 12))
def test_witt_integral_and_necklace_identity(r, k):
    # sum over d | k of d * witt(r, d) = r^k
    assert sum(d * witt.witt_rank(r, d) for d in witt.divisors(k)) == r ** k
    assert witt.witt_rank(r, k) >= 0


@pytest.mark.parametrize("r", [1, 2, 3])
@pytest.mark.parametrize("c", [1, 2, 3])
def test_relatively_free_agrees_with_balance(r, c):
    pres = FinitePresentation(tuple("xyz"[:r]), ())
    assert nq.is_homologically_balanced(pres, c)[0] == witt.relatively_free_balanced(r, c)


def test_e2_examples():
    assert bounds.e2_bounds(bounds.QuotientBettiData(2, 3, 3, 1)) == (2, 4)
    assert bounds.e2_bounds(bounds.QuotientBettiData(2, 2, 0, 2)) == (4, 5)


@given(st.integers(0, 6), st.integers(1, 8), st.integers(0, 8))
def test_e2_with_z1_is_gysin_display(b1, b2, b3):
    lo, hi = bounds.e2_bounds(bounds.QuotientBettiData(b1, b2, b3, 1))
    assert hi == b2 - 1 + b1
    assert b2 - 1 <= lo <= hi


@given(st.integers(0, 6), st.integers(0, 10), st.integers(0, 10), st.integers(1, 4))
def test_e2_lower_le_upper(b1, b2, b3, z):
    if b2 < z:
        with pytest.raises(RejectedError):
            bounds.QuotientBettiData(b1, b2, b3, z)
        return
    lo, hi = bounds.e2_bounds(bounds.QuotientBettiData(b1, b2, b3, z))
    assert lo <= hi


def test_relfree_lower_bound():
    assert bounds.relfree_lower_bound(2, 4) == 2
    assert bounds.relfree_lower_bound(2, 3) == 1
    assert all(bounds.relfree_lower_bound(1, k) == 0 for k in range(2, 7))


def test_lubotzky():
    assert bounds.lubotzky_check(2, 2, 6)
    assert bounds.lubotzky_check(3, 3, 3)
    assert not bounds.lubotzky_check(3, 2, 4)
    assert bounds.lubotzky_check(2, 1, 2)


def test_fht():
    assert bounds.fht_check(2, 2, 2)
    assert not bounds.fht_check(2, 5, 2)
    assert bounds.fht_threshold(2, 5) == Fraction(8192, 3125)
    assert bounds.fht_check(2, 4, 3)
    assert bounds.fht_threshold(2, 4) == Fraction(27, 16)
    with pytest.raises(InputError):
        bounds.fht_check(2, 1, 2)


def test_pd_examples():
    assert bounds.pd_complete_betti(6, 2, 2) == (1, 2, 2, 2, 2, 2, 1)
    assert bounds.pd_complete_betti(4, 2) == (1, 2, 2, 2, 1)
    assert bounds.pd_complete_betti(3, 3) == (1, 3, 3, 1)
    assert bounds.pd_complete_betti(2, 2) == (1, 2, 1)


def test_pd_rejections():
    with pytest.raises(RejectedError):
        bounds.pd_complete_betti(4, 2, 3)
    with pytest.raises(RejectedError):
        bounds.pd_complete_betti(6, 5, 1)
    with pytest.raises(InputError):
        bounds.pd_complete_betti(7, 2, 2)
    with pytest.raises(InputError):
        bounds.pd_complete_betti(5, 2)


@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 12))
def test_pd_output_is_dual_with_zero_euler(h, b1, b2):
    try:
        b = bounds.pd_complete_betti(h, b1, b2)
    except (InputError, RejectedError):
        return
    assert b == b[::-1]
    assert sum((-1) ** k * x for k, x in enumerate(b)) == 0
    assert min(b) >= 0


def test_metabelian_trivial_module():
    I2 = [[1, 0], [0, 1]]
    m = bounds.metabelian_homology(bounds.MetabelianModule(I2, I2))
    assert (m.b0, m.b1, m.b2) == (2, 4, 2)


def test_metabelian_free_class3_betti():
    X = [[1, 0, 0], [1, 1, 0], [0, 0, 1]]
    Y = [[1, 0, 0], [0, 1, 0], [1, 0, 1]]
    m = bounds.metabelian_homology(bounds.MetabelianModule(X, Y))
    assert (m.b0, m.b1, m.b2) == (1, 3, 2)
    assert m.lower_bound == 3


def test_metabelian_filiform_rho():
    X = [[1, 0, 0], [1, 1, 0], [0, 1, 1]]
    I3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert bounds.metabelian_homology(bounds.MetabelianModule(X, I3)).rho == 1


def test_metabelian_rejections():
    with pytest.raises(RejectedError):
        bounds.MetabelianModule([[1, 1], [0, 1]], [[1, 0], [1, 1]])
    with pytest.raises(RejectedError):
        bounds.MetabelianModule([[2, 0], [0, 1]], [[1, 0], [0, 1]])
    with pytest.raises(InputError):
        bounds.MetabelianModule([[1, 0], [0, 1]], [[1]])


def unipotent_pairs(max_r=4):
    """Commuting unipotent pairs as polynomials in one lower-triangular nilpotent N."""
    def build(args):
        r, entries, a, b = args
        N = [[0] * r for _ in range(r)]
        it = iter(entries)
        for i in range(r):
            for j in range(i):
                N[i][j] = next(it)

        def poly(coeffs):
            out = [[Fraction(int(i == j)) for j in range(r)] for i in range(r)]
            P = [[Fraction(int(i == j)) for j in range(r)] for i in range(r)]
            for c in coeffs:
                P = [[sum(P[i][k] * N[k][j] for k in range(r)) for j in range(r)] for i in range(r)]
                out = [[out[i][j] + c * P[i][j] for j in range(r)] for i in range(r)]
            return out
        return poly(a), poly(b)

    return st.integers(1, max_r).flatmap(lambda r: st.tuples(
        st.just(r),
        st.lists(st.integers(-2, 2), min_size=r * (r - 1) // 2, max_size=r * (r - 1) // 2),
        st.lists(st.integers(-2, 2), min_size=0, max_size=3),
        st.lists(st.integers(-2, 2), min_size=0, max_size=3),
    )).map(build)


@settings(max_examples=100, deadline=None)
@given(unipotent_pairs())
def test_metabelian_euler_characteristic_zero(pair):
    X, Y = pair
    m = bounds.metabelian_homology(bounds.MetabelianModule(X, Y))
    assert m.b0 - m.b1 + m.b2 == 0
    assert m.lower_bound >= m.b1
