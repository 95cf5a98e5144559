"""Exact integer and rational linear algebra.

Everything here works on Python ints and :class:`fractions.Fraction`, so
entries never overflow and ranks are exact.  Matrices are passed around as
lists of rows; :class:`IntegerMatrix` exists for the cases where the shape
cannot be recovered from the rows alone (zero rows, zero columns).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

Rows = List[List[int]]


@dataclass(frozen=True)
class IntegerMatrix:
    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    def to_rows(self) -> Rows:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]


MatrixLike = Union[IntegerMatrix, Sequence[Sequence[int]]]


def _shape_rows(m, cols=None):
    if isinstance(m, IntegerMatrix):
        return m.to_rows(), m.rows, m.cols
    rows = [list(r) for r in m]
    if cols is None:
        cols = len(rows[0]) if rows else 0
    return rows, len(rows), cols


@dataclass(frozen=True)
class SmithNormalForm:
    """Elementary divisors of an integer matrix.

    ``divisors`` keeps the unit divisors; callers interested only in torsion
    should drop the 1s themselves.
    """

    divisors: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.divisors)


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_decomposition(m: MatrixLike, cols: int | None = None):
    """Return ``(D, U, V, Vinv)`` with ``U @ M @ V == D`` and U, V unimodular.

    ``D`` is diagonal with positive diagonal entries ``d_1 | d_2 | ...``
    followed by zeros.  ``Vinv`` is the inverse of ``V``; it is needed to
    write lattice vectors in the column basis given by ``V``.
    """
    a, nr, nc = _shape_rows(m, cols)
    a = [[int(x) for x in r] for r in a]
    U = _identity(nr)
    V = _identity(nc)
    Vinv = _identity(nc)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        if q:
            ra, rs = a[dst], a[src]
            for k in range(nc):
                ra[k] += q * rs[k]
            ua, us = U[dst], U[src]
            for k in range(nr):
                ua[k] += q * us[k]

    def add_col(dst, src, q):
        # col_dst += q * col_src; inverse op on Vinv rows: row_src -= q * row_dst
        if q:
            for r in a:
                r[dst] += q * r[src]
            for r in V:
                r[dst] += q * r[src]
            vs, vd = Vinv[src], Vinv[dst]
            for k in range(nc):
                vs[k] -= q * vd[k]

    t = 0
    while t < min(nr, nc):
        # smallest nonzero entry in the trailing block becomes the pivot
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    if a[t][j]:
                        dirty = True
            if not dirty:
                # pivot must divide the whole trailing block
                bad = None
                for i in range(t + 1, nr):
                    for j in range(t + 1, nc):
                        if a[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(t, bad, 1)
                continue
            # move the smallest remainder into the pivot position
            best = None
            for i in range(t, nr):
                x = a[i][t]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, 'r')
            for j in range(t, nc):
                x = a[t][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), j, 'c')
            if best[2] == 'r':
                swap_rows(t, best[1])
            else:
                swap_cols(t, best[1])
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return a, U, V, Vinv


def smith_normal_form(m: MatrixLike, cols: int | None = None) -> SmithNormalForm:
    d, _, _, _ = smith_decomposition(m, cols)
    divs = []
    for i in range(min(len(d), len(d[0]) if d else 0)):
        if d[i][i]:
            divs.append(d[i][i])
    return SmithNormalForm(tuple(divs))


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    q = 3
    while q * q <= p:
        if p % q == 0:
            return False
        q += 2
    return True


def _as_fraction_rows(m):
    rows, nr, nc = _shape_rows(m)
    return [[Fraction(x) for x in r] for r in rows], nr, nc


def rref(rows: Sequence[Sequence], ncols: int, p: int | None = None):
    """Reduced row echelon form over Q (``p=None``) or GF(p).

    Returns ``(reduced_rows, pivot_columns)``; zero rows are dropped.
    """
    if p is None:
        a = [[Fraction(x) for x in r] for r in rows]
    else:
        a = [[int(_mod_p(x, p)) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        if p is None:
            inv = 1 / a[r][c]
            a[r] = [x * inv for x in a[r]]
        else:
            inv = pow(a[r][c], -1, p)
            a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                if p is None:
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
                else:
                    a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def _mod_p(x, p):
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError(f"entry {x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, p) % p


def rank_q(m: MatrixLike) -> int:
    rows, _, nc = _shape_rows(m)
    return len(rref(rows, nc)[1])


def rank_p(m: MatrixLike, p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    rows, _, nc = _shape_rows(m)
    return len(rref(rows, nc, p)[1])


def rank(m: MatrixLike, p: int | None = None) -> int:
    return rank_q(m) if p is None else rank_p(m, p)


def kernel(m: MatrixLike, p: int | None = None, cols: int | None = None) -> List[List]:
    """Basis of the right kernel, returned as a list of column vectors."""
    rows, _, nc = _shape_rows(m, cols)
    red, pivots = rref(rows, nc, p)
    free = [c for c in range(nc) if c not in pivots]
    zero = Fraction(0) if p is None else 0
    one = Fraction(1) if p is None else 1
    basis = []
    for f in free:
        v = [zero] * nc
        v[f] = one
        for r, pc in zip(red, pivots):
            v[pc] = -r[f] if p is None else (-r[f]) % p
        basis.append(v)
    return basis


def kernel_q(m: MatrixLike, cols: int | None = None) -> List[List[Fraction]]:
    """Rational kernel of ``m``; each basis vector is one column of K."""
    return kernel(m, None, cols)


def kernel_z(m: MatrixLike, cols: int | None = None) -> List[List[int]]:
    """A basis of the integer kernel lattice (saturated in Z^cols)."""
    d, _, V, _ = smith_decomposition(m, cols)
    _, nr, nc = _shape_rows(m, cols)
    r = sum(1 for i in range(min(nr, nc)) if d[i][i])
    return [[V[i][j] for i in range(nc)] for j in range(r, nc)]


def hermite_rows(rows: Sequence[Sequence[int]], ncols: int) -> Tuple[Rows, List[int]]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)``, zero
    rows are removed.  Returns ``(hnf_rows, pivot_columns)``.
    """
    a = [[int(x) for x in r] for r in rows if any(r)]
    out: Rows = []
    pivots: List[int] = []
    for c in range(ncols):
        live = [r for r in a if r[c]]
        if not live:
            continue
        rest = [r for r in a if not r[c]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            p = live[0]
            nxt = [p]
            for r in live[1:]:
                q = r[c] // p[c]
                r = [x - q * y for x, y in zip(r, p)]
                if r[c]:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = nxt
        piv = live[0]
        if piv[c] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        pivots.append(c)
        a = rest
    # reduce above pivots
    for k in range(len(out)):
        c = pivots[k]
        for i in range(k):
            q = out[i][c] // out[k][c]
            if q:
                out[i] = [x - q * y for x, y in zip(out[i], out[k])]
    return out, pivots


def matmul(a, b):
    if not a:
        return []
    nb = len(b[0]) if b else 0
    return [[sum(x * b[k][j] for k, x in enumerate(r)) for j in range(nb)] for r in a]


def transpose(a, ncols: int | None = None):
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*a)]


def abelian_invariants(rows: Sequence[Sequence[int]], ngens: int) -> Tuple[int, Tuple[int, ...]]:
    """Free rank and torsion invariants of Z^ngens / rowspace(rows)."""
    hnf, pivots = hermite_rows(rows, ngens)
    # a unit pivot of a reduced HNF is alone in its column, so it splits off
    keep = [k for k, r in enumerate(hnf) if r[pivots[k]] != 1]
    unit_cols = {pivots[k] for k, r in enumerate(hnf) if r[pivots[k]] == 1}
    cols = [c for c in range(ngens) if c not in unit_cols]
    sub = [[hnf[k][c] for c in cols] for k in keep]
    snf = smith_normal_form(IntegerMatrix.from_rows(sub, len(cols)) if sub else IntegerMatrix.zeros(0, len(cols)))
    free = ngens - len(hnf)
    return free, tuple(d for d in snf.divisors if d != 1)
