"""Nilpotent Lie algebras over Q and their Chevalley-Eilenberg cohomology.

Cochains live in the exterior algebra on the dual basis, with the k-th
wedge basis ordered lexicographically by index tuples.  The differential is

    (d w)(x_0, ..., x_k) = sum_{i<j} (-1)^(i+j) w([x_i, x_j], x_0, ..^i..^j.., x_k)

Over F_p the same integral matrices are reduced mod p, so structure
constants must be p-integral.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import exactla
from .errors import InputError, RejectedError

Bracket = Dict[int, Fraction]


def _frac(x) -> Fraction:
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InputError(f"bad rational {x!r}") from None


@dataclass(frozen=True)
class LieAlgebra:
    """Basis names plus structure constants ``[b_i, b_j] = sum_k c_ij^k b_k`` for i < j."""

    names: Tuple[str, ...]
    brackets: Mapping[Tuple[int, int], Mapping[int, Fraction]] = field(default_factory=dict)

    def __post_init__(self):
        names = tuple(self.names)
        if len(set(names)) != len(names):
            raise InputError("duplicate basis names")
        n = len(names)
        clean = {}
        for (i, j), val in self.brackets.items():
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise InputError(f"bad bracket index {(i, j)}")
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            row = dict(clean.get((i, j), {}))
            for k, c in val.items():
                if not 0 <= k < n:
                    raise InputError(f"bracket value index {k} out of range")
                row[k] = row.get(k, Fraction(0)) + sign * _frac(c)
            row = {k: c for k, c in row.items() if c}
            if row:
                clean[(i, j)] = row
            else:
                clean.pop((i, j), None)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "brackets", clean)

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"unknown basis element {name!r}") from None

    @classmethod
    def from_table(cls, names: Sequence[str], table: Mapping[Tuple[str, str], Mapping[str, object]]) -> "LieAlgebra":
        """Build from ``{(left, right): {name: coefficient}}``."""
        names = tuple(names)
        idx = {n: k for k, n in enumerate(names)}
        br = {}
        for (a, b), val in table.items():
            if a not in idx or b not in idx:
                raise InputError(f"unknown basis element in bracket [{a},{b}]")
            key = (idx[a], idx[b])
            if key in br or key[::-1] in br:
                raise InputError(f"bracket [{a},{b}] given twice")
            br[key] = {idx[k]: _frac(v) for k, v in val.items()}
        return cls(names, br)

    @classmethod
    def abelian(cls, names: Sequence[str]) -> "LieAlgebra":
        return cls(tuple(names), {})

    def bracket_basis(self, i: int, j: int) -> Bracket:
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), {}))
        return {k: -c for k, c in self.brackets.get((j, i), {}).items()}

    def bracket(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> Bracket:
        out: Bracket = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.bracket_basis(i, j).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: c for k, c in out.items() if c}

    def to_json(self) -> dict:
        out = []
        for (i, j), val in sorted(self.brackets.items()):
            out.append({
                "left": self.names[i],
                "right": self.names[j],
                "value": {self.names[k]: str(c) for k, c in sorted(val.items())},
            })
        return {"basis": list(self.names), "brackets": out}

    @classmethod
    def from_json(cls, data: Mapping) -> "LieAlgebra":
        try:
            basis = [str(b) for b in data["basis"]]
            entries = data.get("brackets", [])
            table = {}
            for ent in entries:
                key = (str(ent["left"]), str(ent["right"]))
                if key in table or key[::-1] in table:
                    raise InputError(f"bracket [{key[0]},{key[1]}] given twice")
                table[key] = {str(k): v for k, v in ent["value"].items()}
        except (KeyError, TypeError, AttributeError):
            raise InputError("lie-algebra JSON needs 'basis' and well-formed 'brackets'") from None
        return cls.from_table(basis, table)

    # -- cochain machinery, cached per algebra -------------------------------

    @cached_property
    def _wedge(self):
        n = self.dim
        bases = [list(itertools.combinations(range(n), k)) for k in range(n + 1)]
        index = [{t: i for i, t in enumerate(b)} for b in bases]
        return bases, index

    def wedge_basis(self, k: int) -> List[Tuple[int, ...]]:
        return self._wedge[0][k]

    @cached_property
    def _differentials(self):
        return [self._build_differential(k) for k in range(self.dim + 1)]

    def _build_differential(self, k: int):
        n = self.dim
        bases, index = self._wedge
        src = bases[k]
        if k + 1 > n:
            return []
        tgt = bases[k + 1]
        rows = [[Fraction(0)] * len(src) for _ in tgt]
        for r, J in enumerate(tgt):
            for a in range(k + 1):
                for b in range(a + 1, k + 1):
                    sgn_ab = -1 if (a + b) % 2 else 1
                    rest = J[:a] + J[a + 1:b] + J[b + 1:]
                    for m, c in self.bracket_basis(J[a], J[b]).items():
                        if m in rest:
                            continue
                        pos = sum(1 for x in rest if x < m)
                        tup = rest[:pos] + (m,) + rest[pos:]
                        sgn = -1 if pos % 2 else 1
                        rows[r][index[k][tup]] += sgn_ab * sgn * c
        return rows


def ce_differential(L: LieAlgebra, k: int) -> List[List[Fraction]]:
    """Matrix of ``d: Lambda^k L* -> Lambda^(k+1) L*`` (rows: target basis)."""
    if not 0 <= k <= L.dim:
        raise ValueError(f"degree {k} out of range 0..{L.dim}")
    return [row[:] for row in L._differentials[k]]


def _ncols(L, k):
    return comb(L.dim, k)


def _rank(L: LieAlgebra, k: int, p: Optional[int]) -> int:
    if k < 0 or k >= L.dim:
        return 0
    return len(exactla.rref(L._differentials[k], _ncols(L, k), p)[1])


def betti_lie(L: LieAlgebra, p: Optional[int] = None) -> Tuple[int, ...]:
    """Dimensions of H^k(L; F) for k = 0..dim, F = Q or GF(p)."""
    if p is not None and not exactla.is_prime(p):
        raise ValueError(f"{p} is not prime")
    n = L.dim
    ranks = [_rank(L, k, p) for k in range(n + 1)]
    return tuple(comb(n, k) - ranks[k] - (ranks[k - 1] if k else 0) for k in range(n + 1))


@dataclass(frozen=True)
class JacobiReport:
    failures: Tuple[Tuple[Tuple[str, str, str], Dict[str, Fraction]], ...]
    nilpotent: bool
    lcs_dims: Tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.failures and self.nilpotent

    def __bool__(self):
        return self.ok

    def failing_triples(self) -> List[Tuple[str, str, str]]:
        return [t for t, _ in self.failures]


def lower_central_dims(L: LieAlgebra) -> Tuple[int, ...]:
    """dim L^1 >= dim L^2 >= ... until it stops; the last entry repeats iff not nilpotent."""
    n = L.dim
    current = [{i: Fraction(1)} for i in range(n)]
    dims = [n]
    while True:
        vecs = []
        for u in current:
            for i in range(n):
                b = L.bracket({i: Fraction(1)}, u)
                if b:
                    vecs.append([b.get(k, Fraction(0)) for k in range(n)])
        red, piv = exactla.rref(vecs, n)
        d = len(piv)
        if d == dims[-1]:
            return tuple(dims)
        dims.append(d)
        if d == 0:
            return tuple(dims)
        current = [{k: c for k, c in enumerate(r) if c} for r in red]


def check_lie(L: LieAlgebra) -> JacobiReport:
    """Brute-force Jacobi over all basis triples, plus a nilpotency check."""
    n = L.dim
    fails = []
    for i, j, k in itertools.combinations(range(n), 3):
        e = lambda t: {t: Fraction(1)}
        tot: Bracket = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            inner = L.bracket(e(b), e(c))
            for m, v in L.bracket(e(a), inner).items():
                tot[m] = tot.get(m, 0) + v
        tot = {L.names[m]: v for m, v in tot.items() if v}
        if tot:
            fails.append(((L.names[i], L.names[j], L.names[k]), tot))
    dims = lower_central_dims(L)
    return JacobiReport(tuple(fails), dims[-1] == 0, dims)


# --------------------------------------------------------------------------
# cochains and classes


def _field_zero(p):
    return Fraction(0) if p is None else 0


def _coerce(v, p):
    if p is None:
        return [Fraction(x) for x in v]
    return [exactla._mod_p(x, p) for x in v]


def wedge(L: LieAlgebra, u: Sequence, k: int, v: Sequence, l: int, p: Optional[int] = None) -> List:
    """Exterior product of a k-cochain and an l-cochain (coordinate vectors)."""
    bases, index = L._wedge
    out = [_field_zero(p)] * comb(L.dim, k + l) if k + l <= L.dim else []
    if k + l > L.dim:
        return out
    for a, I in enumerate(bases[k]):
        if not u[a]:
            continue
        for b, J in enumerate(bases[l]):
            if not v[b] or set(I) & set(J):
                continue
            merged = I + J
            inv = sum(1 for x in range(len(merged)) for y in range(x + 1, len(merged)) if merged[x] > merged[y])
            sgn = -1 if inv % 2 else 1
            idx = index[k + l][tuple(sorted(merged))]
            out[idx] = out[idx] + sgn * u[a] * v[b]
    if p is not None:
        out = [x % p for x in out]
    return out


@dataclass(frozen=True)
class CohomologyClass:
    """A cohomology class, stored by its reduced representative.

    Representatives are reduced against a fixed echelon basis of the
    coboundaries, so two classes are equal iff their vectors are equal.
    """

    degree: int
    vector: Tuple
    field: Optional[int] = None

    def is_zero(self) -> bool:
        return not any(self.vector)


class _Cohomology:
    """Echelon data for cocycles and coboundaries of one algebra and field."""

    def __init__(self, L: LieAlgebra, p: Optional[int]):
        self.L = L
        self.p = p
        self._img = {}

    def coboundaries(self, k: int):
        """RREF rows spanning the image of d_{k-1} inside Lambda^k."""
        if k not in self._img:
            L, p = self.L, self.p
            n = comb(L.dim, k)
            if k == 0:
                self._img[k] = ([], [])
            else:
                D = L._differentials[k - 1]
                cols = [[D[r][c] for r in range(n)] for c in range(comb(L.dim, k - 1))]
                self._img[k] = exactla.rref(cols, n, p)
        return self._img[k]

    def reduce(self, k: int, v: Sequence) -> List:
        v = _coerce(v, self.p)
        rows, piv = self.coboundaries(k)
        for r, c in zip(rows, piv):
            if v[c]:
                f = v[c]
                if self.p is None:
                    v = [x - f * y for x, y in zip(v, r)]
                else:
                    v = [(x - f * y) % self.p for x, y in zip(v, r)]
        return v

    def d(self, k: int, v: Sequence) -> List:
        if k >= self.L.dim:
            return []
        D = self.L._differentials[k]
        v = _coerce(v, self.p)
        out = [sum(a * b for a, b in zip(row, v)) for row in D]
        if self.p is not None:
            out = [exactla._mod_p(x, self.p) for x in out]
        return out

    def is_cocycle(self, k: int, v: Sequence) -> bool:
        return not any(self.d(k, v))


def _cohomology(L: LieAlgebra, p: Optional[int]) -> _Cohomology:
    cache = L.__dict__.setdefault("_cohomology_cache", {})
    if p not in cache:
        cache[p] = _Cohomology(L, p)
    return cache[p]


def cohomology_class(L: LieAlgebra, k: int, vector: Sequence, p: Optional[int] = None) -> CohomologyClass:
    H = _cohomology(L, p)
    if not H.is_cocycle(k, vector):
        raise RejectedError("representative is not a cocycle")
    return CohomologyClass(k, tuple(H.reduce(k, vector)), p)


def cohomology_basis(L: LieAlgebra, k: int, p: Optional[int] = None) -> List[CohomologyClass]:
    H = _cohomology(L, p)
    n = comb(L.dim, k)
    cocycles = exactla.kernel(L._differentials[k], p, n) if k < L.dim else [
        [Fraction(int(i == j)) if p is None else int(i == j) for i in range(n)] for j in range(n)
    ]
    img_rows, _ = H.coboundaries(k)
    chosen: List[CohomologyClass] = []
    span = list(img_rows)
    rank = len(exactla.rref(span, n, p)[1])
    for z in cocycles:
        trial = span + [z]
        r = len(exactla.rref(trial, n, p)[1])
        if r > rank:
            span, rank = trial, r
            chosen.append(CohomologyClass(k, tuple(H.reduce(k, z)), p))
    return chosen


def cup(L: LieAlgebra, u: CohomologyClass, v: CohomologyClass) -> CohomologyClass:
    if u.field != v.field:
        raise ValueError("classes over different fields")
    k = u.degree + v.degree
    if k > L.dim:
        raise ValueError("degree exceeds the dimension")
    w = wedge(L, u.vector, u.degree, v.vector, v.degree, u.field)
    return CohomologyClass(k, tuple(_cohomology(L, u.field).reduce(k, w)), u.field)


_TERM = re.compile(r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*\*?\s*((?:[A-Za-z_][A-Za-z0-9_]*\*\s*\^?\s*)*)")


def parse_cochain(L: LieAlgebra, text: str) -> Tuple[int, List[Fraction]]:
    """Parse sums like ``y*d* + y*e* - c*d*`` into ``(degree, vector)``.

    Each factor is a basis name followed by ``*``; a bare number is a
    0-cochain.
    """
    text = text.strip()
    if not text:
        raise InputError("empty cochain")
    pos = 0
    terms = []
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise InputError(f"cannot parse cochain near {text[pos:]!r}")
        sign, coef, factors = m.groups()
        if not coef and not factors.strip():
            raise InputError(f"cannot parse cochain near {text[pos:]!r}")
        c = Fraction(coef) if coef else Fraction(1)
        if sign == "-":
            c = -c
        names = re.findall(r"([A-Za-z_][A-Za-z0-9_]*)\*", factors)
        terms.append((c, [L.index(nm) for nm in names]))
        pos = m.end()
    degrees = {len(f) for _, f in terms}
    if len(degrees) != 1:
        raise InputError("cochain terms have mixed degrees")
    k = degrees.pop()
    bases, index = L._wedge
    vec = [Fraction(0)] * comb(L.dim, k)
    for c, f in terms:
        if len(set(f)) != len(f):
            continue
        inv = sum(1 for x in range(len(f)) for y in range(x + 1, len(f)) if f[x] > f[y])
        vec[index[k][tuple(sorted(f))]] += -c if inv % 2 else c
    return k, vec


def format_cochain(L: LieAlgebra, k: int, vec: Sequence) -> str:
    bases = L.wedge_basis(k)
    parts = []
    for I, c in zip(bases, vec):
        if not c:
            continue
        c = Fraction(c)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if not I:
            parts.append((sign, f"{mag}"))
            continue
        mono = "".join(f"{L.names[i]}*" for i in I)
        parts.append((sign, mono if mag == 1 else f"{mag} {mono}"))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, t in parts[1:]:
        out += f" {s} {t}"
    return out


# --------------------------------------------------------------------------
# central extensions and the Gysin count


@dataclass(frozen=True)
class ExtensionCocycle:
    """An alternating 2-form ``e(b_i, b_j)`` (i < j) on a quotient algebra."""

    values: Mapping[Tuple[int, int], Fraction]

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.values.items():
            v = _frac(v)
            if i == j:
                raise InputError("2-form evaluated on equal arguments")
            if i > j:
                i, j, v = j, i, -v
            clean[(i, j)] = clean.get((i, j), 0) + v
        object.__setattr__(self, "values", {k: v for k, v in clean.items() if v})

    @classmethod
    def from_names(cls, Q: LieAlgebra, table: Mapping[Tuple[str, str], object]) -> "ExtensionCocycle":
        return cls({(Q.index(a), Q.index(b)): v for (a, b), v in table.items()})

    @classmethod
    def from_vector(cls, Q: LieAlgebra, vec: Sequence) -> "ExtensionCocycle":
        return cls({I: Fraction(c) for I, c in zip(Q.wedge_basis(2), vec) if c})

    def vector(self, Q: LieAlgebra) -> List[Fraction]:
        _, index = Q._wedge
        v = [Fraction(0)] * comb(Q.dim, 2)
        for key, c in self.values.items():
            v[index[2][key]] = c
        return v


def central_extension(Q: LieAlgebra, e: ExtensionCocycle, name: str = "f") -> LieAlgebra:
    """``Q + span(f)`` with ``[a, b] = [a, b]_Q + e(a, b) f`` and f central."""
    H = _cohomology(Q, None)
    if not H.is_cocycle(2, e.vector(Q)):
        raise RejectedError("extension cocycle is not closed")
    if name in Q.names:
        raise InputError(f"name {name!r} already used in the quotient")
    n = Q.dim
    br = {k: dict(v) for k, v in Q.brackets.items()}
    for (i, j), c in e.values.items():
        row = br.setdefault((i, j), {})
        row[n] = row.get(n, 0) + c
    return LieAlgebra(Q.names + (name,), br)


def extension_cocycle(L: LieAlgebra, z: int | str) -> Tuple[LieAlgebra, ExtensionCocycle]:
    """Split off a central basis direction: ``L`` as a central extension of ``L / <z>``."""
    if isinstance(z, str):
        z = L.index(z)
    n = L.dim
    for i in range(n):
        if L.bracket_basis(z, i):
            raise RejectedError(f"{L.names[z]} is not central")
    keep = [i for i in range(n) if i != z]
    pos = {old: new for new, old in enumerate(keep)}
    br = {}
    vals = {}
    for (i, j), val in L.brackets.items():
        row = {pos[k]: c for k, c in val.items() if k != z}
        if row:
            br[(pos[i], pos[j])] = row
        if z in val:
            vals[(pos[i], pos[j])] = val[z]
    Q = LieAlgebra(tuple(L.names[i] for i in keep), br)
    return Q, ExtensionCocycle(vals)


def gysin_beta2(Q: LieAlgebra, e: ExtensionCocycle, p: Optional[int] = None) -> int:
    """beta_2 of the central extension, from the Gysin sequence.

    ``beta_2(Q) - 1 + dim ker(cup e : H^1(Q) -> H^3(Q))``; requires e to be a
    nonzero class.
    """
    H = _cohomology(Q, p)
    ev = e.vector(Q)
    if not H.is_cocycle(2, ev):
        raise RejectedError("extension cocycle is not closed")
    ecls = CohomologyClass(2, tuple(H.reduce(2, ev)), p)
    if ecls.is_zero():
        raise RejectedError(
            "extension class is zero in H^2: the extension splits and the count differs"
        )
    b = betti_lie(Q, p)
    h1 = cohomology_basis(Q, 1, p)
    if Q.dim >= 3:
        images = [list(cup(Q, a, ecls).vector) for a in h1]
        r = len(exactla.rref(images, comb(Q.dim, 3), p)[1]) if images else 0
    else:
        r = 0
    return b[2] - 1 + (len(h1) - r)


def graded_from_quotient(q, name_map=None) -> LieAlgebra:
    """Associated graded Lie ring of a weighted quotient, over Q.

    ``[a_i, a_j]`` is the weight ``w_i + w_j`` part of the group commutator
    ``[a_i, a_j]``.  Accepts a ``WeightedQuotient`` or a ``PcPresentation``.
    """
    pc = getattr(q, "pc", q)
    if any(o is not None for o in pc.orders):
        raise RejectedError("torsion layers are not supported")
    n = pc.n
    br = {}
    for j in range(n):
        for i in range(j):
            v = pc.commutator(j, i)
            target = pc.weights[i] + pc.weights[j]
            row = {k: Fraction(-e) for k, e in enumerate(v) if e and pc.weights[k] == target}
            if row:
                br[(i, j)] = row
    names = pc.names if name_map is None else tuple(name_map.get(x, x) for x in pc.names)
    return LieAlgebra(names, br)
