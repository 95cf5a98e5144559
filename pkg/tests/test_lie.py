import json
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from nilbal import exactla, lie, nq
from nilbal.catalog import G6_PRES, HEIS3, K5L, L4, L6GRAD, NAIVE6, Q5
from nilbal.errors import InputError, RejectedError
from nilbal.presentations import FinitePresentation

ALGEBRAS = {"L4": L4, "HEIS3": HEIS3, "K5L": K5L, "Q5": Q5, "L6grad": L6GRAD}
A4 = lie.LieAlgebra.abelian("ycde")


def _matmul(a, b):
    return [[sum(x * b[k][j] for k, x in enumerate(row)) for j in range(len(b[0]))] for row in a]


def test_check_lie_accepts_catalog():
    for L in ALGEBRAS.values():
        assert lie.check_lie(L).ok
    assert lie.check_lie(lie.LieAlgebra.abelian("abcd")).ok


def test_naive_fixture_fails_at_xyc():
    rep = lie.check_lie(NAIVE6)
    assert not rep.ok
    assert ("x", "y", "c") in rep.failing_triples()


def test_non_nilpotent_detected():
    sl2 = lie.LieAlgebra.from_table("efh", {("e", "f"): {"h": 1}, ("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}})
    rep = lie.check_lie(sl2)
    assert not rep.failures and not rep.nilpotent


def test_abelian_differential_is_zero():
    A = lie.LieAlgebra.abelian("abc")
    for k in range(4):
        assert all(not any(r) for r in lie.ce_differential(A, k))


def test_heisenberg_differential():
    d1 = lie.ce_differential(HEIS3, 1)
    # rows: x*y*, x*u*, y*u*; columns: x*, y*, u*
    assert [row[2] for row in d1] == [-1, 0, 0]
    assert all(row[0] == row[1] == 0 for row in d1)


@pytest.mark.parametrize("name", sorted(ALGEBRAS))
def test_d_squared_zero(name):
    L = ALGEBRAS[name]
    for k in range(L.dim - 1):
        prod = _matmul(lie.ce_differential(L, k + 1), lie.ce_differential(L, k))
        assert all(not any(r) for r in prod)


def test_betti_examples():
    assert lie.betti_lie(lie.LieAlgebra.abelian("abcd")) == (1, 4, 6, 4, 1)
    assert lie.betti_lie(L4) == (1, 2, 2, 2, 1)
    assert lie.betti_lie(Q5)[1:3] == (2, 3)
    assert lie.betti_lie(HEIS3, 2) == (1, 2, 2, 1)


@pytest.mark.parametrize("name", sorted(ALGEBRAS))
@pytest.mark.parametrize("p", [None, 2, 3])
def test_duality_and_euler(name, p):
    b = lie.betti_lie(ALGEBRAS[name], p)
    assert b == b[::-1]
    assert sum((-1) ** k * x for k, x in enumerate(b)) == 0


@pytest.mark.parametrize("name", sorted(ALGEBRAS))
def test_beta1_is_abelianization_dimension(name):
    L = ALGEBRAS[name]
    derived = lie.lower_central_dims(L)[1] if len(lie.lower_central_dims(L)) > 1 else 0
    assert lie.betti_lie(L)[1] == L.dim - derived


def test_cohomology_basis_examples():
    h1 = lie.cohomology_basis(L4, 1)
    assert [lie.format_cochain(L4, 1, c.vector) for c in h1] == ["x*", "y*"]
    (h0,) = lie.cohomology_basis(L4, 0)
    assert lie.format_cochain(L4, 0, h0.vector) == "1"
    (top,) = lie.cohomology_basis(L4, 4)
    assert lie.format_cochain(L4, 4, top.vector) == "x*y*u*z*"


def test_cup_identities_on_abelian():
    _, eta = lie.parse_cochain(A4, "y*d* + y*e* - c*d*")
    e = lie.cohomology_class(A4, 2, eta)
    assert lie.format_cochain(A4, 4, lie.cup(A4, e, e).vector) == "-2 y*c*d*e*"
    y = lie.cohomology_class(A4, 1, lie.parse_cochain(A4, "y*")[1])
    assert lie.format_cochain(A4, 3, lie.cup(A4, y, e).vector) == "-y*c*d*"


def test_cup_of_one_class_with_itself_vanishes():
    for c in lie.cohomology_basis(L4, 1) + lie.cohomology_basis(L4, 1, 3):
        assert lie.cup(L4, c, c).is_zero()


@pytest.mark.parametrize("name", sorted(ALGEBRAS))
def test_cup_graded_commutative_and_associative(name):
    L = ALGEBRAS[name]
    h1 = lie.cohomology_basis(L, 1)
    h2 = lie.cohomology_basis(L, 2)
    for a in h1:
        for b in h2:
            ab = lie.cup(L, a, b)
            ba = lie.cup(L, b, a)
            assert ab.vector == ba.vector  # (-1)^(1*2) = 1
        for b in h1:
            ab = lie.cup(L, a, b).vector
            ba = lie.cup(L, b, a).vector
            assert ab == tuple(-x for x in ba)
            for c in h1:
                left = lie.cup(L, lie.cup(L, a, b), c)
                right = lie.cup(L, a, lie.cup(L, b, c))
                assert left == right


def test_class_equality_modulo_coboundaries():
    # u* is not closed in L4, but x*u* + d(...) style: d(z*) = -x*u*, so x*u* is exact
    d = lie.ce_differential(L4, 1)
    col = [row[3] for row in d]
    assert lie.cohomology_class(L4, 2, col).is_zero()


def test_cohomology_class_rejects_non_cocycle():
    with pytest.raises(RejectedError):
        lie.cohomology_class(HEIS3, 1, lie.parse_cochain(HEIS3, "u*")[1])


def test_central_extension_examples():
    Q2 = lie.LieAlgebra.abelian("xy")
    assert lie.central_extension(Q2, lie.ExtensionCocycle.from_names(Q2, {("x", "y"): 1}), "u") == HEIS3
    eta = lie.ExtensionCocycle.from_vector(A4, lie.parse_cochain(A4, "y*d* + y*e* - c*d*")[1])
    assert lie.central_extension(A4, eta) == K5L
    assert lie.central_extension(HEIS3, lie.ExtensionCocycle.from_names(HEIS3, {("x", "u"): 1}), "z") == L4


def test_central_extension_rejects_open_cocycle():
    with pytest.raises(RejectedError):
        # d(u*z*) = -x*y*z* in L4
        lie.central_extension(L4, lie.ExtensionCocycle.from_names(L4, {("u", "z"): 1}))


@pytest.mark.parametrize("name,z", [("HEIS3", "u"), ("L4", "z"), ("K5L", "f"), ("L6grad", "f")])
def test_extension_round_trip(name, z):
    L = ALGEBRAS[name]
    Q, e = lie.extension_cocycle(L, z)
    assert lie.central_extension(Q, e, z) == L


def test_extension_cocycle_rejects_non_central():
    with pytest.raises(RejectedError):
        lie.extension_cocycle(L4, "u")


def test_gysin_examples():
    Q2 = lie.LieAlgebra.abelian("xy")
    assert lie.gysin_beta2(Q2, lie.ExtensionCocycle.from_names(Q2, {("x", "y"): 1})) == 2
    assert lie.gysin_beta2(HEIS3, lie.ExtensionCocycle.from_names(HEIS3, {("x", "u"): 1})) == 2
    e = lie.ExtensionCocycle.from_names(Q5, {("y", "e"): 1, ("c", "d"): -1})
    assert lie.gysin_beta2(Q5, e) == lie.betti_lie(lie.central_extension(Q5, e))[2] == 2


def test_gysin_rejects_exact_class():
    e = lie.ExtensionCocycle.from_names(HEIS3, {("x", "y"): 1})  # d(u*) = -x*y*
    with pytest.raises(RejectedError):
        lie.gysin_beta2(HEIS3, e)


QUOTIENTS = [lie.LieAlgebra.abelian("ab"), lie.LieAlgebra.abelian("abc"), HEIS3, L4, Q5, lie.LieAlgebra.abelian("ycde")]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, len(QUOTIENTS) - 1), st.data(), st.sampled_from([None, 2, 3]))
def test_gysin_matches_direct(qi, data, p):
    Q = QUOTIENTS[qi]
    basis = exactla.kernel(lie.ce_differential(Q, 2), None, comb(Q.dim, 2)) if Q.dim > 2 else [[Fraction(1)]]
    coeffs = data.draw(st.lists(st.integers(-2, 2), min_size=len(basis), max_size=len(basis)))
    vec = [sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(comb(Q.dim, 2))]
    vec = [Fraction(x) for x in vec]
    if any(x.denominator != 1 for x in vec):
        vec = [x * max(y.denominator for y in vec) for x in vec]
    e = lie.ExtensionCocycle.from_vector(Q, vec)
    cls = lie.CohomologyClass(2, tuple(lie._cohomology(Q, p).reduce(2, e.vector(Q))), p)
    if cls.is_zero():
        with pytest.raises(RejectedError):
            lie.gysin_beta2(Q, e, p)
        return
    assert lie.gysin_beta2(Q, e, p) == lie.betti_lie(lie.central_extension(Q, e), p)[2]


def test_graded_from_quotients():
    q = nq.nilpotent_quotient(FinitePresentation(("x", "y"), ()), 2)
    g = lie.graded_from_quotient(q)
    assert lie.betti_lie(g) == lie.betti_lie(HEIS3)
    n4 = nq.nilpotent_quotient(FinitePresentation.from_strings(["x", "y"], ["[x,[x,[x,y]]]", "[y,[x,y]]"]), 3)
    assert lie.betti_lie(lie.graded_from_quotient(n4)) == lie.betti_lie(L4)


def test_graded_g6_is_l6grad():
    g = lie.graded_from_quotient(nq.nilpotent_quotient(G6_PRES, 5))
    assert lie.check_lie(g).ok
    signs = [1, 1, -1, 1, -1, 1]
    renamed = lie.LieAlgebra(L6GRAD.names, {
        k: {m: c * signs[k[0]] * signs[k[1]] * signs[m] for m, c in v.items()}
        for k, v in g.brackets.items()
    })
    assert renamed == L6GRAD


def test_graded_rejects_torsion():
    q = nq.nilpotent_quotient(FinitePresentation.from_strings(["a"], ["a^2"]), 1)
    with pytest.raises(RejectedError):
        lie.graded_from_quotient(q)


def test_l6grad_betti():
    assert lie.betti_lie(L6GRAD) == (1, 2, 2, 2, 2, 2, 1)


def test_json_round_trip():
    data = json.loads(json.dumps(L4.to_json()))
    assert data["brackets"][0] == {"left": "x", "right": "y", "value": {"u": "1"}}
    assert lie.LieAlgebra.from_json(data) == L4


def test_json_rationals():
    L = lie.LieAlgebra.from_json({"basis": ["a", "b", "c"],
                                  "brackets": [{"left": "b", "right": "a", "value": {"c": "1/2"}}]})
    assert L.bracket_basis(0, 1) == {2: Fraction(-1, 2)}


@pytest.mark.parametrize("bad", [
    {"basis": ["a", "a"]},
    {"basis": ["a"], "brackets": [{"left": "a", "right": "q", "value": {}}]},
    {"brackets": []},
    {"basis": ["a", "b"], "brackets": [{"left": "a", "right": "b", "value": {"a": "x"}}]},
])
def test_json_errors(bad):
    with pytest.raises(InputError):
        lie.LieAlgebra.from_json(bad)


def test_cochain_parser():
    k, v = lie.parse_cochain(A4, "d*y* + 2 c*e*")
    assert k == 2
    assert lie.format_cochain(A4, 2, v) == "-y*d* + 2 c*e*"
    with pytest.raises(InputError):
        lie.parse_cochain(A4, "y* + c*d*")
    with pytest.raises(InputError):
        lie.parse_cochain(A4, "q*")
