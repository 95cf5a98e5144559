"""Betti-number inequalities for nilpotent groups.

Everything takes Betti data as plain integers; nothing here recomputes
homology of a group.  The metabelian complex is the exception: it is small
linear algebra on explicit module data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import exactla
from .errors import InputError, RejectedError
from .witt import witt_rank


def _nonneg(**kw):
    for name, v in kw.items():
        if not isinstance(v, int) or v < 0:
            raise InputError(f"{name} must be a non-negative integer, got {v!r}")


@dataclass(frozen=True)
class QuotientBettiData:
    """Betti numbers of a quotient G/Z, with z the Hirsch length of the central Z."""

    b1: int
    b2: int
    b3: int
    z: int

    def __post_init__(self):
        _nonneg(b1=self.b1, b2=self.b2, b3=self.b3, z=self.z)
        if self.z < 1:
            raise InputError("central subgroup must be infinite (z >= 1)")
        if self.b2 < self.z:
            raise RejectedError(f"quotient beta_2 = {self.b2} is smaller than z = {self.z}")


def e2_bounds(d: QuotientBettiData) -> Tuple[int, int]:
    """Lower and upper bounds for beta_2(G) from the E^2 page over G/Z."""
    lower = d.b2 - d.z + max(d.b1 * d.z - d.b3, 0)
    upper = d.b2 - d.z + d.b1 * d.z + math.comb(d.z, 2)
    return lower, upper


def relfree_lower_bound(beta: int, k: int) -> int:
    """Lower bound for beta_2 of a nilpotent group with beta_1 = beta and class k - 1 layers."""
    return 1 - beta + witt_rank(beta, k)


def lubotzky_check(b1: int, b2: int, h: int) -> bool:
    """Necessary condition ``b2 > b1^2 / 4`` for nilpotent groups with h > 2."""
    _nonneg(b1=b1, b2=b2, h=h)
    return h <= 2 or 4 * b2 > b1 * b1


def fht_threshold(beta: int, r: int) -> Fraction:
    return Fraction((r - 1) ** (r - 1), r ** r) * beta ** r


def fht_check(beta: int, r: int, b2: int) -> bool:
    """Exact test of ``b2 > (r-1)^(r-1) / r^r * beta^r``."""
    if r < 2:
        raise InputError("r must be at least 2")
    _nonneg(beta=beta, b2=b2)
    return b2 > fht_threshold(beta, r)


def pd_complete_betti(h: int, b1: int, b2: Optional[int] = None) -> Tuple[int, ...]:
    """Full Betti vector of a Hirsch-length-h nilpotent group from beta_1 (and beta_2).

    Uses Poincare duality and vanishing Euler characteristic.  Where those
    force beta_2 it may be omitted; a conflicting value is rejected.
    """
    if not isinstance(h, int) or not 1 <= h <= 6:
        raise InputError("h must be between 1 and 6")
    _nonneg(b1=b1)
    if b2 is not None:
        _nonneg(b2=b2)

    def fix_b2(value):
        if b2 is not None and b2 != value:
            raise RejectedError(f"beta_2 = {b2} contradicts duality and chi = 0 (forced {value})")
        return value

    if b1 > h:
        raise RejectedError(f"beta_1 = {b1} exceeds h = {h}")
    if h == 1:
        if b1 != 1:
            raise RejectedError("h = 1 forces beta_1 = 1")
        return (1, 1)
    if h == 2:
        if b1 != 2:
            raise RejectedError("h = 2 forces beta_1 = 2")
        fix_b2(1)
        return (1, 2, 1)
    if h == 3:
        return (1, b1, fix_b2(b1), 1)
    if h == 4:
        v = fix_b2(2 * b1 - 2)
        return (1, b1, v, b1, 1)
    if b2 is None:
        raise InputError(f"beta_2 is needed for h = {h}")
    if h == 5:
        return (1, b1, b2, b2, b1, 1)
    b3 = 2 * b2 - 2 * b1 + 2
    if b3 < 0:
        raise RejectedError(f"beta_3 = {b3} would be negative")
    return (1, b1, b2, b3, b2, b1, 1)


# --------------------------------------------------------------------------
# metabelian module complex


def _fr(m):
    return [[Fraction(x) for x in r] for r in m]


def _sub_identity(m):
    n = len(m)
    return [[m[i][j] - (i == j) for j in range(n)] for i in range(n)]


def _is_nilpotent(N) -> bool:
    n = len(N)
    P = N
    for _ in range(n):
        if not any(any(r) for r in P):
            return True
        P = exactla.matmul(P, N)
    return not any(any(r) for r in P)


@dataclass(frozen=True)
class MetabelianModule:
    """Commuting unipotent rational matrices X, Y acting on A = Q^r."""

    X: Tuple[Tuple[Fraction, ...], ...]
    Y: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        X, Y = _fr(self.X), _fr(self.Y)
        r = len(X)
        if len(Y) != r or any(len(row) != r for row in X + Y):
            raise InputError("X and Y must be square matrices of the same size")
        if exactla.matmul(X, Y) != exactla.matmul(Y, X):
            raise RejectedError("X and Y do not commute")
        if not (_is_nilpotent(_sub_identity(X)) and _is_nilpotent(_sub_identity(Y))):
            raise RejectedError("X and Y must be unipotent")
        object.__setattr__(self, "X", tuple(map(tuple, X)))
        object.__setattr__(self, "Y", tuple(map(tuple, Y)))

    @property
    def r(self) -> int:
        return len(self.X)


@dataclass(frozen=True)
class MetabelianHomology:
    b0: int
    b1: int
    b2: int
    rho: int
    lower_bound: int

    def to_json(self) -> dict:
        return {"b0": self.b0, "b1": self.b1, "b2": self.b2, "rho": self.rho,
                "lower_bound": self.lower_bound}


def _wedge2_action(M: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    """Matrix of M acting on Lambda^2 in the basis e_i ^ e_j, i < j."""
    r = len(M)
    pairs = [(i, j) for i in range(r) for j in range(i + 1, r)]
    idx = {p: k for k, p in enumerate(pairs)}
    out = [[Fraction(0)] * len(pairs) for _ in pairs]
    for col, (i, j) in enumerate(pairs):
        # M e_i ^ M e_j
        for a in range(r):
            for b in range(r):
                if a == b:
                    continue
                c = M[a][i] * M[b][j]
                if not c:
                    continue
                if a < b:
                    out[idx[(a, b)]][col] += c
                else:
                    out[idx[(b, a)]][col] -= c
    return out


def metabelian_homology(M: MetabelianModule) -> MetabelianHomology:
    """Homology of ``0 -> A -> A^2 -> A -> 0`` for the Z^2 action on A.

    ``d2(m) = ((I - Y) m, (X - I) m)`` and ``d1(m1, m2) = (X - I) m1 + (Y - I) m2``.
    """
    r = M.r
    XI = _sub_identity(M.X)
    YI = _sub_identity(M.Y)
    IY = [[-x for x in row] for row in YI]
    d2 = IY + XI                                   # 2r x r
    d1 = [XI[i] + YI[i] for i in range(r)]         # r x 2r
    rk2 = exactla.rank_q(d2) if r else 0
    rk1 = exactla.rank_q(d1) if r else 0
    b2 = r - rk2
    b1 = 2 * r - rk1 - rk2
    b0 = r - rk1
    # coinvariants of Lambda^2 A: quotient by the images of (g - 1)
    wX = _sub_identity(_wedge2_action(M.X))
    wY = _sub_identity(_wedge2_action(M.Y))
    n2 = len(wX)
    if n2:
        cols = [[wX[i][j] for i in range(n2)] for j in range(n2)]
        cols += [[wY[i][j] for i in range(n2)] for j in range(n2)]
        rho = n2 - exactla.rank_q(cols)
    else:
        rho = 0
    return MetabelianHomology(b0, b1, b2, rho, b1 + max(rho - b2, 0))
