import pytest

from nilbal import nq, witt
from nilbal.errors import NonStabilizationError, RejectedError
from nilbal.presentations import AbelianInvariants, FinitePresentation, pc_to_finite_presentation, semidirect_z
from nilbal.catalog import G6_PRES, N4_PRES, torsion4_presentation
from oracles import hopf_multiplier

F = FinitePresentation.from_strings


def free(r):
    return FinitePresentation(tuple("xyz"[:r]), ())


def test_free_lcs_and_hirsch():
    q = nq.nilpotent_quotient(free(2), 3)
    assert nq.lcs_ranks(q) == (2, 1, 2)
    assert nq.hirsch(q) == 5
    assert nq.lcs_ranks(nq.nilpotent_quotient(free(2), 4)) == (2, 1, 2, 3)


@pytest.mark.parametrize("r", [2, 3])
@pytest.mark.parametrize("c", [1, 2, 3, 4])
def test_lcs_matches_witt(r, c):
    q = nq.nilpotent_quotient(free(r), c)
    assert nq.lcs_ranks(q) == tuple(witt.witt_rank(r, k) for k in range(1, c + 1))


def test_free_rank2_class5():
    q = nq.nilpotent_quotient(free(2), 5)
    assert nq.lcs_ranks(q) == (2, 1, 2, 3, 6)


@pytest.mark.parametrize("c", [3, 4])
def test_n4_same_data_at_class_3_and_4(c):
    q = nq.nilpotent_quotient(N4_PRES, c)
    assert nq.hirsch(q) == 4
    assert nq.lcs_ranks(q) == (2, 1, 1)


def test_g6_quotient():
    q = nq.nilpotent_quotient(G6_PRES, 5)
    assert nq.hirsch(q) == 6
    assert nq.lcs_ranks(q) == (2, 1, 1, 1, 1)
    assert nq.is_stable(G6_PRES, 5)


def test_small_cases():
    assert nq.lcs_ranks(nq.nilpotent_quotient(free(2), 1)) == (2,)
    assert nq.hirsch(nq.nilpotent_quotient(free(3), 1)) == 3
    heis = nq.nilpotent_quotient(F(["x", "y"], ["[x,[x,y]]", "[y,[x,y]]"]), 3)
    assert nq.lcs_ranks(heis) == (2, 1)


@pytest.mark.parametrize("c", [2, 3])
def test_relatively_free_multiplier(c):
    m = nq.schur_multiplier(free(2), c)
    assert m == AbelianInvariants(witt.witt_rank(2, c + 1))


def test_multiplier_examples():
    assert nq.schur_multiplier(N4_PRES, 3, require_stable=True) == AbelianInvariants(2)
    assert nq.schur_multiplier(F(["a", "b"], ["a^2", "b^2", "[a,b]"]), 1) == AbelianInvariants(0, (2,))
    assert nq.schur_multiplier(F(["i", "j"], ["i^4", "i^2 j^-2", "j^-1 i j i"]), 3) == AbelianInvariants(0)
    assert nq.schur_multiplier(F(["r", "s"], ["r^4", "s^2", "s r s^-1 r"]), 3) == AbelianInvariants(0, (2,))
    z3 = F(["a", "b", "c"], ["a^3", "b^3", "c^3", "[a,b]", "[a,c]", "[b,c]"])
    assert nq.schur_multiplier(z3, 1) == AbelianInvariants(0, (3, 3, 3))


def test_multiplier_requires_stability():
    with pytest.raises(NonStabilizationError):
        nq.schur_multiplier(free(2), 2, require_stable=True)


@pytest.mark.parametrize("name,pres,c", [
    ("N4", N4_PRES, 3),
    ("G6", G6_PRES, 5),
    ("D8", F(["r", "s"], ["r^4", "s^2", "s r s^-1 r"]), 3),
    ("Q8", F(["i", "j"], ["i^4", "i^2 j^-2", "j^-1 i j i"]), 3),
    ("TORSION4(2)", torsion4_presentation(2), 3),
    ("Z2xZ4", F(["a", "b"], ["a^2", "b^4", "[a,b]"]), 1),
])
def test_multiplier_matches_hopf_oracle(name, pres, c):
    ours = nq.schur_multiplier(pres, c, require_stable=True)
    assert (ours.free_rank, ours.factors) == hopf_multiplier(pres, c)


def test_multiplier_stabilizes():
    assert nq.schur_multiplier(N4_PRES, 3) == nq.schur_multiplier(N4_PRES, 4)


def test_uct_consistency():
    rep = nq.betti_report(torsion4_presentation(3), 3, (2, 3, 5))
    for p in (2, 3, 5):
        assert rep.beta1_p(p) - rep.beta1_q == rep.h1.r_p(p)
        assert rep.beta2_p(p) - rep.beta2_q == rep.h2.r_p(p) + rep.h1.r_p(p)


def test_betti_examples():
    rep = nq.betti_report(free(2), 3)
    assert (rep.beta1_q, rep.beta2_q) == (2, 3)
    t = nq.betti_report(torsion4_presentation(2), 3)
    assert t.beta2_p(2) > t.beta2_q


def test_balance_verdicts():
    assert nq.is_homologically_balanced(N4_PRES, 3)[0]
    assert not nq.is_homologically_balanced(free(2), 3)[0]
    assert nq.is_homologically_balanced(free(2), 1)[0]  # Z^2


def test_balance_allows_small_torsion_below_beta1():
    rep = nq.BettiReport(AbelianInvariants(3), AbelianInvariants(1, (2,)), ())
    assert rep.balanced_over_all_fields
    rep = nq.BettiReport(AbelianInvariants(2), AbelianInvariants(2, (2,)), ())
    assert not rep.balanced_over_all_fields


def test_min_generators():
    assert nq.min_generators(AbelianInvariants(1, (2, 6))) == 3
    assert nq.min_generators(AbelianInvariants(2)) == 2
    assert nq.min_generators(AbelianInvariants(0)) == 0


def test_n4_and_matrix_agree():
    a = nq.invariants(N4_PRES, 3)
    b = nq.invariants(pc_to_finite_presentation(semidirect_z([[1, 0, 0], [1, 1, 0], [0, 1, 1]])), 3)
    assert a == b


def test_central_quotient_of_free_gives_n4_invariants():
    q = nq.nilpotent_quotient(free(2), 3)
    top = [k for k, w in enumerate(q.pc.weights) if w == 3]
    v = [0] * q.pc.n
    v[top[0]] = 1
    qq = nq.central_quotient(q, v)
    assert nq.hirsch(qq) == 4
    assert nq.multiplier_of_pc(qq.pc) == AbelianInvariants(2)


def test_central_quotient_by_power_gives_torsion():
    q = nq.nilpotent_quotient(free(2), 3)
    top = [k for k, w in enumerate(q.pc.weights) if w == 3]
    v = [0] * q.pc.n
    v[top[0]] = 3
    qq = nq.central_quotient(q, v)
    assert 3 in qq.pc.orders


def test_central_quotient_of_heisenberg():
    q = nq.nilpotent_quotient(free(2), 2)
    qq = nq.central_quotient(q, nq.unit_vector(q, q.pc.names[2]))
    assert nq.lcs_ranks(qq) == (2,)


def test_central_quotient_rejects_non_central():
    q = nq.nilpotent_quotient(free(2), 3)
    with pytest.raises(RejectedError):
        nq.central_quotient(q, nq.unit_vector(q, "x"))
