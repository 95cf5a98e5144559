"""Nilpotent quotients, integral H_1/H_2 and Betti numbers of nilpotent groups.

The quotient algorithm builds ``G / gamma_{k+1} G`` one lower-central layer at
a time.  At each step every relation of the current pc presentation that is
not a definition gets a fresh central "tail" generator; enforcing the
overlap (consistency) conditions and the input relators yields a lattice of
relations among the tails, and its Hermite form produces the new layer.

The Schur multiplier uses the same tails construction on the quotient's own
pc relations, followed by the Hopf description ``(R n [F,F]) / [F,R]``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import exactla
from .errors import NonStabilizationError, RejectedError
from .presentations import (
    AbelianInvariants,
    Collector,
    FinitePresentation,
    PcPresentation,
    Word,
    abelianization,
    pc_relators,
    pc_to_finite_presentation,
)

log = logging.getLogger(__name__)

DEFAULT_PRIMES = (2, 3, 5, 7)


@dataclass(frozen=True)
class WeightedQuotient:
    """A class-c quotient ``G / gamma_{c+1} G`` with its epimorphism.

    ``images[l]`` is the normal word of the l-th input generator.
    ``definitions[k]`` says how pc generator k arose: ``("image", l)`` or
    ``("comm", j, i)`` meaning ``a_k = [a_j, a_i]``.
    """

    pc: PcPresentation
    images: Tuple[Tuple[int, ...], ...]
    source: FinitePresentation
    definitions: Tuple[tuple, ...]
    class_bound: int
    next_layer_empty: Optional[bool] = None

    @property
    def nilpotency_class(self) -> int:
        return max(self.pc.weights, default=0)

    def truncate(self, c: int) -> "WeightedQuotient":
        """The quotient by generators of weight > c, i.e. ``G / gamma_{c+1} G``."""
        keep = sum(1 for w in self.pc.weights if w <= c)
        pc = self.pc
        if keep == pc.n:
            return WeightedQuotient(pc, self.images, self.source, self.definitions, c, self.next_layer_empty)
        cut = lambda v: tuple(v[:keep])
        new = PcPresentation(
            pc.names[:keep], pc.weights[:keep], pc.orders[:keep],
            {i: cut(v) for i, v in pc.power_tails.items() if i < keep},
            {k: cut(v) for k, v in pc.commutator_tails.items() if k[0] < keep},
        )
        nxt = not any(w == c + 1 for w in pc.weights)
        return WeightedQuotient(new, tuple(cut(v) for v in self.images), self.source,
                                self.definitions[:keep], c, nxt)


def _fresh_name(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def nilpotent_quotient(pres: FinitePresentation, c: int) -> WeightedQuotient:
    """Consistent weighted pc presentation of ``pres / gamma_{c+1}``."""
    if c < 1:
        raise RejectedError("class bound must be at least 1")
    ngen = len(pres.generators)
    names: List[str] = []
    taken = set(pres.generators)
    weights: List[int] = []
    orders: List[Optional[int]] = []
    powers: Dict[int, List[int]] = {}
    comms: Dict[Tuple[int, int], List[int]] = {}
    images: List[List[int]] = [[] for _ in range(ngen)]
    definitions: List[tuple] = []
    def_pairs = set()
    def_images = set()
    next_empty = None

    for w in range(1, c + 1):
        n = len(names)
        tails = []
        for i in range(n):
            if orders[i]:
                tails.append(("pow", i))
        for j in range(n):
            for i in range(j):
                if (j, i) not in def_pairs:
                    tails.append(("comm", j, i))
        for l in range(ngen):
            if l not in def_images:
                tails.append(("img", l))

        def definable(t):
            if w == 1:
                return t[0] == "img"
            return t[0] == "comm" and weights[t[1]] == w - 1 and weights[t[2]] == 1

        tails.sort(key=definable)  # stable: definable tails go last
        T = len(tails)
        col = {t: n + k for k, t in enumerate(tails)}
        N = n + T

        def pad(v):
            return list(v) + [0] * (N - len(v))

        cpow = {}
        for i in range(n):
            if orders[i]:
                v = pad(powers.get(i, []))
                v[col[("pow", i)]] = 1
                cpow[i] = v
        ccomm = {}
        for j in range(n):
            for i in range(j):
                v = pad(comms.get((j, i), []))
                if (j, i) not in def_pairs:
                    v[col[("comm", j, i)]] += 1
                if any(v):
                    ccomm[(j, i)] = v
        cover = Collector(orders + [None] * T, cpow, ccomm)

        rel_rows = []
        for label, lhs, rhs in cover.consistency_pairs(n):
            if lhs[:n] != rhs[:n]:
                raise RejectedError(f"quotient presentation inconsistent at {label}")
            diff = [a - b for a, b in zip(lhs[n:], rhs[n:])]
            if any(diff):
                rel_rows.append(diff)
        cimages = []
        for l in range(ngen):
            v = pad(images[l])
            if l not in def_images:
                v[col[("img", l)]] += 1
            cimages.append(v)
        for r in pres.relators:
            acc = cover.identity()
            for g, e in r.letters:
                letters = [(k, x) for k, x in enumerate(cimages[g]) if x]
                if e < 0:
                    letters = [(k, -x) for k, x in reversed(letters)]
                for _ in range(abs(e)):
                    acc = cover.multiply(acc, letters)
            if any(acc[:n]):
                raise RejectedError("relator does not vanish in the previous quotient")
            if any(acc[n:]):
                rel_rows.append(acc[n:])

        hnf, pivots = exactla.hermite_rows(rel_rows, T)
        pivot_row = {p: r for p, r in zip(pivots, hnf)}
        survivors = [t for t in range(T) if t not in pivot_row or pivot_row[t][t] != 1]
        s = len(survivors)
        if s == 0:
            next_empty = True
            log.debug("layer %d is trivial; lower central series has stopped", w)
            break
        spos = {t: k for k, t in enumerate(survivors)}
        expr: Dict[int, List[int]] = {}
        for t in range(T - 1, -1, -1):
            if t in spos:
                v = [0] * s
                v[spos[t]] = 1
                expr[t] = v
                continue
            row = pivot_row[t]
            v = [0] * s
            for c2 in range(t + 1, T):
                if row[c2]:
                    e2 = expr[c2]
                    for q in range(s):
                        v[q] -= row[c2] * e2[q]
            expr[t] = v
        for t in survivors:
            if not definable(tails[t]):
                raise RejectedError(f"internal error: surviving tail {tails[t]} cannot serve as a definition")

        # the new layer on its own: central, with power relations among itself
        lorders = [pivot_row[t][t] if t in pivot_row else None for t in survivors]
        lpowers = {}
        for k, t in enumerate(survivors):
            if lorders[k]:
                row = pivot_row[t]
                v = [0] * s
                for c2 in range(t + 1, T):
                    if row[c2]:
                        for q in range(s):
                            v[q] -= row[c2] * expr[c2][q]
                lpowers[k] = v
        # normalise power words inside the layer, top first
        for k in range(s - 1, -1, -1):
            if k in lpowers:
                lc = Collector(lorders, {q: lpowers[q] for q in lpowers if q > k}, {})
                lpowers[k] = lc.collect([(q, e) for q, e in enumerate(lpowers[k]) if e])
        layer = Collector(lorders, lpowers, {})

        def layer_nf(v):
            return layer.collect([(q, e) for q, e in enumerate(v) if e])

        newgens = []
        for k, t in enumerate(survivors):
            kind = tails[t]
            if kind[0] == "img":
                l = kind[1]
                nm = pres.generators[l]
                definitions.append(("image", l))
                def_images.add(l)
            else:
                nm = _fresh_name(f"a{n + k + 1}", taken)
                definitions.append(("comm", kind[1], kind[2]))
                def_pairs.add((kind[1], kind[2]))
            newgens.append(nm)
        names.extend(newgens)
        weights.extend([w] * s)
        orders.extend(lorders)

        def extend(old, tail_col):
            v = list(old) + [0] * (n + s - len(old))
            if tail_col is not None:
                lv = layer_nf(expr[tail_col - n])
                for q in range(s):
                    v[n + q] = lv[q]
            return v

        for i in range(n):
            if orders[i]:
                powers[i] = extend(powers.get(i, []), col[("pow", i)])
        for j in range(n):
            for i in range(j):
                if (j, i) in def_pairs and ("comm", j, i) not in col:
                    comms[(j, i)] = extend(comms.get((j, i), []), None)
                else:
                    comms[(j, i)] = extend(comms.get((j, i), []), col[("comm", j, i)])
        for k in range(s):
            if lorders[k]:
                powers[n + k] = [0] * n + list(lpowers[k])
        for l in range(ngen):
            key = ("img", l)
            images[l] = extend(images[l], col.get(key))
        # pad everything to the new length
        total = n + s
        for d in (powers, comms):
            for key in d:
                d[key] = list(d[key]) + [0] * (total - len(d[key]))
        images = [list(v) + [0] * (total - len(v)) for v in images]
    pc = PcPresentation(
        tuple(names), tuple(weights), tuple(orders),
        {i: tuple(v) for i, v in powers.items()},
        {k: tuple(v) for k, v in comms.items()},
    )
    n = pc.n
    return WeightedQuotient(
        pc,
        tuple(tuple(v) + (0,) * (n - len(v)) for v in images),
        pres,
        tuple(definitions),
        c,
        next_empty,
    )


def lcs_ranks(q: WeightedQuotient) -> Tuple[int, ...]:
    """Torsion-free rank of each layer ``gamma_k / gamma_{k+1}``, k = 1..class."""
    pc = q.pc
    cls = q.nilpotency_class
    return tuple(
        sum(1 for w, o in zip(pc.weights, pc.orders) if w == k and o is None) for k in range(1, cls + 1)
    )


def layer_orders(q: WeightedQuotient, k: int) -> Tuple[Optional[int], ...]:
    return tuple(o for w, o in zip(q.pc.weights, q.pc.orders) if w == k)


def hirsch(q: WeightedQuotient | PcPresentation) -> int:
    pc = q.pc if isinstance(q, WeightedQuotient) else q
    return sum(1 for o in pc.orders if o is None)


# --------------------------------------------------------------------------
# homology


def multiplier_of_pc(pc: PcPresentation) -> AbelianInvariants:
    """H_2 of the group given by a consistent pc presentation.

    Every pc relation gets a central tail; the tails modulo the overlap
    relations form ``R/[F,R]`` for F free on the pc generators, and H_2 is the
    kernel of the exponent-sum map ``R/[F,R] -> F/F'``.
    """
    n = pc.n
    rels = pc_relators(pc)
    T = len(rels)
    if T == 0:
        return AbelianInvariants(0)
    N = n + T
    cpow = {}
    ccomm = {}
    t = 0
    for i, o in enumerate(pc.orders):
        if o:
            v = list(pc.power_tails.get(i, (0,) * n)) + [0] * T
            v[n + t] = 1
            cpow[i] = v
            t += 1
    for j in range(n):
        for i in range(j):
            v = list(pc.commutator(j, i)) + [0] * T
            v[n + t] = 1
            ccomm[(j, i)] = v
            t += 1
    cover = Collector(list(pc.orders) + [None] * T, cpow, ccomm)
    rows = []
    for label, lhs, rhs in cover.consistency_pairs(n):
        if lhs[:n] != rhs[:n]:
            raise RejectedError(f"pc presentation is inconsistent at {label}")
        diff = [a - b for a, b in zip(lhs[n:], rhs[n:])]
        if any(diff):
            rows.append(diff)
    # exponent sums of the relators, as an n x T matrix
    phi = [[0] * T for _ in range(n)]
    for k, r in enumerate(rels):
        for g, e in r.letters:
            phi[g][k] += e
    D, U, V, Vinv = exactla.smith_decomposition(phi, T)
    r = sum(1 for i in range(min(n, T)) if D[i][i])
    d = T - r
    coords = []
    for row in rows:
        nz = [(b, v) for b, v in enumerate(row) if v]
        x = [sum(Vinv[a][b] * v for b, v in nz) for a in range(T)]
        if any(x[:r]):
            raise RejectedError("internal error: consistency relation outside the Hopf kernel")
        coords.append(x[r:])
    free, tors = exactla.abelian_invariants(coords, d)
    return AbelianInvariants(free, tors)


def is_stable(pres: FinitePresentation, c: int) -> bool:
    """True when ``gamma_{c+1}`` of the presented group is trivial modulo gamma_{c+2}."""
    return nilpotent_quotient(pres, c + 1).truncate(c).next_layer_empty


def schur_multiplier(pres: FinitePresentation, c: int, *, require_stable: bool = False) -> AbelianInvariants:
    """H_2(G; Z) for ``G = pres / gamma_{c+1}``.

    When the caller knows the presented group has class <= c this is H_2 of
    the presented group itself.  With ``require_stable`` a
    :class:`NonStabilizationError` is raised if the class-(c+1) quotient is
    strictly larger.
    """
    if require_stable:
        q_big = nilpotent_quotient(pres, c + 1)
        q = q_big.truncate(c)
        if not q.next_layer_empty:
            raise NonStabilizationError(f"class bound {c} too small: layer {c + 1} is nontrivial")
    else:
        q = nilpotent_quotient(pres, c)
    return multiplier_of_pc(q.pc)


@dataclass(frozen=True)
class BettiReport:
    h1: AbelianInvariants
    h2: AbelianInvariants
    primes: Tuple[int, ...]
    stable: Optional[bool] = None
    hirsch_length: Optional[int] = None

    @property
    def beta1_q(self) -> int:
        return self.h1.free_rank

    @property
    def beta2_q(self) -> int:
        return self.h2.free_rank

    def beta1_p(self, p: int) -> int:
        return self.h1.free_rank + self.h1.r_p(p)

    def beta2_p(self, p: int) -> int:
        # universal coefficients: H_2 (x) F_p plus Tor(H_1, F_p)
        return self.h2.free_rank + self.h2.r_p(p) + self.h1.r_p(p)

    @property
    def per_prime(self) -> Tuple[Tuple[int, int, int], ...]:
        return tuple((p, self.beta1_p(p), self.beta2_p(p)) for p in self.primes)

    def torsion_primes(self) -> Tuple[int, ...]:
        """Primes dividing the torsion of H_2; only these can push beta_2(F_p) up."""
        out = set()
        for d in self.h2.factors:
            q = 2
            while q * q <= d:
                while d % q == 0:
                    out.add(q)
                    d //= q
                q += 1
            if d > 1:
                out.add(d)
        return tuple(sorted(out))

    @property
    def balanced_over_all_fields(self) -> bool:
        """beta_2(F) <= beta_1(F) for F = Q and every F_p.

        By universal coefficients this is ``beta_2 + r_p(H_2) <= beta_1`` for
        every p, and only primes dividing the torsion of H_2 need checking.
        """
        worst = max((self.h2.r_p(p) for p in self.torsion_primes()), default=0)
        return self.beta2_q + worst <= self.beta1_q

    def to_json(self) -> dict:
        out = {
            "h1": self.h1.to_json(),
            "h2": self.h2.to_json(),
            "beta1": self.beta1_q,
            "beta2": self.beta2_q,
            "primes": [{"p": p, "beta1": b1, "beta2": b2} for p, b1, b2 in self.per_prime],
            "balanced": self.balanced_over_all_fields,
        }
        if self.stable is not None:
            out["stable"] = self.stable
        if self.hirsch_length is not None:
            out["hirsch"] = self.hirsch_length
        return out


def betti_report_of_quotient(q: WeightedQuotient, primes: Sequence[int] = DEFAULT_PRIMES) -> BettiReport:
    for p in primes:
        if not exactla.is_prime(p):
            raise ValueError(f"{p} is not prime")
    h1 = abelianization(pc_to_finite_presentation(q.pc))
    h2 = multiplier_of_pc(q.pc)
    return BettiReport(h1, h2, tuple(primes), q.next_layer_empty, hirsch(q))


def betti_report(pres: FinitePresentation, c: int, primes: Sequence[int] = DEFAULT_PRIMES,
                 *, require_stable: bool = False) -> BettiReport:
    """Betti numbers of ``pres / gamma_{c+1}`` over Q and the given primes."""
    q = nilpotent_quotient(pres, c + 1).truncate(c)
    if require_stable and not q.next_layer_empty:
        raise NonStabilizationError(f"class bound {c} too small: layer {c + 1} is nontrivial")
    return betti_report_of_quotient(q, primes)


def is_homologically_balanced(pres: FinitePresentation, c: int, *,
                              require_stable: bool = False) -> Tuple[bool, str]:
    rep = betti_report(pres, c, (), require_stable=require_stable)
    return balance_verdict(rep)


def balance_verdict(rep: BettiReport) -> Tuple[bool, str]:
    b1, b2 = rep.beta1_q, rep.beta2_q
    if b2 > b1:
        return False, f"beta2 = {b2} exceeds beta1 = {b1} over Q"
    for p in rep.torsion_primes():
        if b2 + rep.h2.r_p(p) > b1:
            return False, (f"H2 has torsion {list(rep.h2.factors)}: "
                           f"beta2 = {rep.beta2_p(p)} exceeds beta1 = {rep.beta1_p(p)} over F_{p}")
    if rep.h2.factors:
        return True, f"beta2 <= beta1 over Q and every F_p despite H2 torsion {list(rep.h2.factors)}"
    return True, f"beta2 = {b2} <= beta1 = {b1} and H2 is torsion-free"


def min_generators(inv: AbelianInvariants) -> int:
    """max over primes p of dim H_1(G; F_p)."""
    return inv.free_rank + len(inv.factors)


def central_quotient(q: WeightedQuotient, element: Sequence[int]) -> WeightedQuotient:
    """Quotient of ``q`` by the cyclic subgroup of a central top-layer element.

    The result is presented on the pc generators of ``q``.
    """
    pc = q.pc
    g = tuple(int(x) for x in element)
    if len(g) != pc.n:
        raise ValueError("element has the wrong length")
    top = q.nilpotency_class
    if any(e for e, w in zip(g, pc.weights) if w < top):
        raise RejectedError("element is not in the last lower-central layer")
    col = pc.collector
    gl = [(k, e) for k, e in enumerate(g) if e]
    for i in range(pc.n):
        if col.multiply(col.collect(gl), [(i, 1)]) != col.multiply(col._unit(i), gl):
            raise RejectedError(f"element does not commute with {pc.names[i]}")
    pres = pc_to_finite_presentation(pc).add_relators(Word(tuple(gl)))
    return nilpotent_quotient(pres, max(top, 1))


def unit_vector(q: WeightedQuotient, name: str, power: int = 1) -> Tuple[int, ...]:
    v = [0] * q.pc.n
    v[q.pc.names.index(name)] = power
    return tuple(v)


def invariants(pres: FinitePresentation, c: int) -> dict:
    """The isomorphism-invariant tuple used to compare presentations."""
    q = nilpotent_quotient(pres, c)
    return {
        "hirsch": hirsch(q),
        "class": q.nilpotency_class,
        "lcs_ranks": lcs_ranks(q),
        "h1": abelianization(pres),
        "h2": multiplier_of_pc(q.pc),
    }
