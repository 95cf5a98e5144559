"""Words, finite presentations and polycyclic presentations.

Commutators follow ``[x, y] = x y x^-1 y^-1`` throughout, both in the word
grammar and in the stored pc relations.  Normal words are exponent vectors
``(e_1, ..., e_n)`` standing for ``a_1^e_1 ... a_n^e_n``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import exactla
from .errors import InputError, RejectedError

Letter = Tuple[int, int]


# --------------------------------------------------------------------------
# words


def free_reduce(letters: Iterable[Letter]) -> Tuple[Letter, ...]:
    out: List[Letter] = []
    for g, e in letters:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            e += out[-1][1]
            out.pop()
            if e:
                out.append((g, e))
        else:
            out.append((g, e))
    return tuple(out)


def invert_letters(letters: Sequence[Letter]) -> List[Letter]:
    return [(g, -e) for g, e in reversed(letters)]


@dataclass(frozen=True)
class Word:
    """A freely reduced word: a tuple of ``(generator index, exponent)`` pairs."""

    letters: Tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", free_reduce(self.letters))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(invert_letters(self.letters)))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k))

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def exponent_sums(self, ngens: int) -> List[int]:
        v = [0] * ngens
        for g, e in self.letters:
            v[g] += e
        return v

    def format(self, names: Sequence[str]) -> str:
        if not self.letters:
            return "1"
        return " ".join(names[g] if e == 1 else f"{names[g]}^{e}" for g, e in self.letters)


def commutator(u: Word, v: Word) -> Word:
    return u * v * u.inverse() * v.inverse()


_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>[+-]?\d+)|(?P<sym>[\[\](),=^*{}]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise InputError(f"unexpected character {text[pos:pos + 1]!r} at {pos} in {text!r}")
        pos = m.end()
        if m.group("name"):
            toks.append(("name", m.group("name")))
        elif m.group("int") is not None:
            toks.append(("int", int(m.group("int"))))
        else:
            toks.append(("sym", m.group("sym")))
    return toks


def _split_name(tok: str, names: Mapping[str, int]) -> List[int]:
    """Split a run such as ``xy`` into known generator names (longest match first)."""
    if tok in names:
        return [names[tok]]
    best: Optional[List[int]] = None
    for k in range(len(tok) - 1, 0, -1):
        head = tok[:k]
        if head in names:
            rest = _split_name(tok[k:], names) if tok[k:] else []
            if rest is not None:
                best = [names[head]] + rest
                break
    if best is None:
        raise InputError(f"unknown generator {tok!r}")
    return best


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.names = {n: k for k, n in enumerate(names)}

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, sym=None):
        tok = self.peek()
        if tok[0] is None:
            raise InputError(f"unexpected end of input in {self.text!r}")
        if sym is not None and tok != ("sym", sym):
            raise InputError(f"expected {sym!r} but found {tok[1]!r} in {self.text!r}")
        self.i += 1
        return tok

    def relation(self) -> List[Word]:
        sides = [self.word()]
        while self.peek() == ("sym", "="):
            self.take("=")
            sides.append(self.word())
        if self.peek()[0] is not None:
            raise InputError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        if len(sides) == 1:
            return [sides[0]]
        return [a * b.inverse() for a, b in zip(sides, sides[1:])]

    def word(self) -> Word:
        w = Word()
        while True:
            kind, val = self.peek()
            if kind == "sym" and val == "*":
                self.take()
                continue
            if kind == "name" or (kind == "int" and val == 1) or (kind == "sym" and val in "[("):
                w = w * self.factor()
            else:
                return w

    def factor(self) -> Word:
        kind, val = self.take()
        if kind == "name":
            gens = _split_name(val, self.names)
            # an exponent binds to the last letter of a run like "xy^2"
            head = Word(tuple((g, 1) for g in gens[:-1]))
            atom = Word(((gens[-1], 1),))
            return head * self._powers(atom)
        if kind == "int":
            return self._powers(Word())
        if val == "(":
            inner = self.word()
            self.take(")")
            return self._powers(inner)
        if val == "[":
            parts = [self.word()]
            while self.peek() == ("sym", ","):
                self.take(",")
                parts.append(self.word())
            self.take("]")
            if len(parts) < 2:
                raise InputError(f"commutator needs two entries in {self.text!r}")
            acc = parts[0]
            for p in parts[1:]:
                acc = commutator(acc, p)
            return self._powers(acc)
        raise InputError(f"unexpected {val!r} in {self.text!r}")

    def _powers(self, atom: Word) -> Word:
        while self.peek() == ("sym", "^"):
            self.take("^")
            kind, val = self.take()
            if kind == "int":
                k = val
            elif kind == "sym" and val in "({":
                close = ")" if val == "(" else "}"
                kind2, k = self.take()
                if kind2 != "int":
                    raise InputError(f"bad exponent in {self.text!r}")
                self.take(close)
            else:
                raise InputError(f"bad exponent in {self.text!r}")
            atom = atom ** k
        return atom


def parse_word(text: str, names: Sequence[str]) -> Word:
    """Parse a group word over ``names``.

    Juxtaposition multiplies, ``^k`` takes powers, ``[u,v]`` is the
    commutator ``u v u^-1 v^-1`` (``[u,v,w]`` means ``[[u,v],w]``), and ``1``
    is the identity.
    """
    p = _Parser(text, names)
    w = p.word()
    if p.peek()[0] is not None:
        raise InputError(f"trailing input {p.peek()[1]!r} in {text!r}")
    return w


def parse_relators(text: str, names: Sequence[str]) -> List[Word]:
    """Parse ``u``, ``u = v`` or ``u = v = w`` into relator words."""
    return _Parser(text, names).relation()


# --------------------------------------------------------------------------
# finite presentations


@dataclass(frozen=True)
class AbelianInvariants:
    free_rank: int
    factors: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.factors} do not form a divisibility chain")
        if any(d < 2 for d in self.factors):
            raise ValueError("invariant factors must be at least 2")

    @property
    def is_torsion_free(self) -> bool:
        return not self.factors

    def r_p(self, p: int) -> int:
        """dim over F_p of T/pT for the torsion part T."""
        return sum(1 for d in self.factors if d % p == 0)

    def to_json(self) -> dict:
        return {"rank": self.free_rank, "torsion": list(self.factors)}


@dataclass(frozen=True)
class FinitePresentation:
    generators: Tuple[str, ...]
    relators: Tuple[Word, ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise InputError(f"duplicate generator names in {gens}")
        for g in gens:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", g):
                raise InputError(f"bad generator name {g!r}")
        rels = tuple(self.relators)
        for r in rels:
            for g, _ in r.letters:
                if not 0 <= g < len(gens):
                    raise InputError(f"relator refers to undeclared generator index {g}")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", rels)

    @classmethod
    def from_strings(cls, generators: Sequence[str], relators: Sequence[str]) -> "FinitePresentation":
        gens = tuple(generators)
        rels: List[Word] = []
        for text in relators:
            rels.extend(parse_relators(text, gens))
        return cls(gens, tuple(rels))

    @classmethod
    def from_json(cls, data: Mapping) -> "FinitePresentation":
        try:
            gens = data["generators"]
            rels = data.get("relators", [])
        except (KeyError, TypeError, AttributeError):
            raise InputError("finite-presentation JSON needs a 'generators' list") from None
        if not isinstance(gens, list) or not isinstance(rels, list):
            raise InputError("'generators' and 'relators' must be lists")
        return cls.from_strings([str(g) for g in gens], [str(r) for r in rels])

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relators": [r.format(self.generators) for r in self.relators],
        }

    def add_relators(self, *words: Word) -> "FinitePresentation":
        return FinitePresentation(self.generators, self.relators + tuple(words))


def abelianization(pres: FinitePresentation) -> AbelianInvariants:
    """Free rank and invariant factors of G/G'."""
    n = len(pres.generators)
    rows = [r.exponent_sums(n) for r in pres.relators]
    free, tors = exactla.abelian_invariants(rows, n)
    return AbelianInvariants(free, tors)


# --------------------------------------------------------------------------
# collection


class Collector:
    """Collection from the left for a polycyclic presentation.

    ``powers[i]`` is the normal word of ``a_i^m_i`` and ``comms[(j, i)]`` the
    normal word of ``[a_j, a_i]`` (j > i); both are dense exponent vectors of
    length ``n``.  Conjugates ``a_i^-1 a_j a_i`` and ``a_i a_j a_i^-1`` are
    derived from the commutators once, top generator first.

    No consistency is assumed; on an inconsistent presentation the results
    depend on the order of rewriting, which is exactly what
    :meth:`consistency_pairs` exposes.
    """

    max_steps = 5_000_000

    def __init__(self, orders: Sequence[Optional[int]], powers: Mapping[int, Sequence[int]],
                 comms: Mapping[Tuple[int, int], Sequence[int]]):
        n = self.n = len(orders)
        self.orders = list(orders)
        self.powers = {i: self._letters(v) for i, v in powers.items() if self.orders[i]}
        self._comm = {k: list(v) for k, v in comms.items() if any(v)}
        self.conj: Dict[Tuple[int, int], List[Letter]] = {}
        self.iconj: Dict[Tuple[int, int], List[Letter]] = {}
        self.commutes = [[False] * n for _ in range(n)]
        for i in range(n):
            if self.orders[i] and i not in self.powers:
                self.powers[i] = []
        self._build()

    @staticmethod
    def _letters(vec: Sequence[int]) -> List[Letter]:
        return [(k, e) for k, e in enumerate(vec) if e]

    def _build(self):
        n = self.n
        for j in range(n - 1, -1, -1):
            for i in range(j):
                w = self._comm.get((j, i))
                if w is None:
                    self.conj[(j, i)] = [(j, 1)]
                    self.iconj[(j, i)] = [(j, 1)]
                    self.commutes[j][i] = True
                    continue
                # a_i a_j a_i^-1 = w^-1 a_j
                d = self.collect(invert_letters(self._letters(w)) + [(j, 1)])
                self.iconj[(j, i)] = self._letters(d)
                # a_i^-1 a_j a_i = a_j v with a_i v a_i^-1 = D^-1 a_j
                u = self.collect(invert_letters(self._letters(d)) + [(j, 1)])
                v: List[Letter] = []
                for k, e in self._letters(u):
                    word = self.conj[(k, i)]
                    v.extend((word if e > 0 else invert_letters(word)) * abs(e))
                c = self.collect([(j, 1)] + v)
                self.conj[(j, i)] = self._letters(c)
                self.commutes[j][i] = False
        # trailing run of central generators of infinite order
        c = n
        while c > 0:
            k = c - 1
            if self.orders[k] or not all(self.commutes[k][:k]) \
                    or not all(self.commutes[j][k] for j in range(k + 1, n)):
                break
            c = k
        self.central_from = c

    # -- core ---------------------------------------------------------------

    def identity(self) -> List[int]:
        return [0] * self.n

    def collect(self, letters: Sequence[Letter]) -> List[int]:
        return self.multiply(self.identity(), letters)

    def multiply(self, vec: Sequence[int], letters: Sequence[Letter]) -> List[int]:
        """Normal word of ``vec * letters``; ``vec`` must itself be normal."""
        vec = list(vec)
        stack = list(reversed([le for le in letters if le[1]]))
        n = getattr(self, "central_from", self.n)
        steps = 0
        while stack:
            steps += 1
            if steps > self.max_steps:
                raise RejectedError("collection did not terminate; presentation is not nilpotent-weighted")
            g, e = stack.pop()
            if e == 0:
                continue
            if g >= n:
                vec[g] += e
                continue
            higher = [(k, vec[k]) for k in range(g + 1, n) if vec[k]]
            row = self.commutes
            if all(row[k][g] for k, _ in higher):
                vec[g] += e
                self._reduce(vec, g, stack)
                continue
            s = 1 if e > 0 else -1
            if e != s:
                stack.append((g, e - s))
            table = self.conj if s > 0 else self.iconj
            for k, _ in higher:
                vec[k] = 0
            for k, ek in reversed(higher):
                word = table[(k, g)]
                if len(word) == 1 and word[0] == (k, 1):
                    stack.append((k, ek))
                    continue
                block = word if ek > 0 else invert_letters(word)
                for _ in range(abs(ek)):
                    stack.extend(reversed(block))
            vec[g] += s
            self._reduce(vec, g, stack)
        return vec

    def _reduce(self, vec, g, stack):
        m = self.orders[g]
        if not m:
            return
        q, r = divmod(vec[g], m)
        if q == 0:
            return
        vec[g] = r
        w = self.powers[g]
        block = w if q > 0 else invert_letters(w)
        for _ in range(abs(q)):
            stack.extend(reversed(block))

    def inverse(self, vec: Sequence[int]) -> List[int]:
        return self.collect(invert_letters(self._letters(vec)))

    def product(self, *vecs: Sequence[int]) -> List[int]:
        acc = self.identity()
        for v in vecs:
            acc = self.multiply(acc, self._letters(v))
        return acc

    def power(self, vec: Sequence[int], k: int) -> List[int]:
        letters = self._letters(vec)
        if k < 0:
            letters = invert_letters(letters)
        return self.collect(letters * abs(k))

    def consistency_pairs(self, gens: Optional[int] = None):
        """Yield ``(label, lhs, rhs)`` for the overlap test words.

        Only generators below ``gens`` are used to build test words; the
        default is all of them.
        """
        n = self.n if gens is None else gens
        e = self._unit
        nf = self.collect
        mul = self.multiply
        lt = self._letters
        orders = self.orders
        for k in range(n):
            for j in range(k):
                for i in range(j):
                    lhs = mul(nf([(k, 1), (j, 1)]), [(i, 1)])
                    rhs = mul(e(k), lt(nf([(j, 1), (i, 1)])))
                    yield ("kji", k, j, i), lhs, rhs
        for j in range(n):
            mj = orders[j]
            for i in range(j):
                mi = orders[i]
                if mj:
                    pw = nf(self.powers[j])
                    lhs = mul(pw, [(i, 1)])
                    start = e(j)
                    start[j] = mj - 1
                    rhs = mul(start, lt(nf([(j, 1), (i, 1)])))
                    yield ("jji", j, i), lhs, rhs
                if mi:
                    lhs = mul(nf([(j, 1), (i, mi - 1)]), [(i, 1)])
                    rhs = mul(e(j), self.powers[i])
                    yield ("jii", j, i), lhs, rhs
                for sj in ((1,) if mj else (1, -1)):
                    for si in ((1,) if mi else (1, -1)):
                        lhs = mul(nf([(j, sj), (i, si)]), [(i, -si)])
                        yield ("inv", j, i, sj, si), lhs, nf([(j, sj)])
            if mj:
                lhs = mul(nf(self.powers[j]), [(j, 1)])
                rhs = mul(e(j), self.powers[j])
                yield ("jjj", j), lhs, rhs

    def _unit(self, k):
        v = self.identity()
        v[k] = 1
        return v


# --------------------------------------------------------------------------
# pc presentations


def _vec(word, n) -> Tuple[int, ...]:
    v = tuple(int(x) for x in word)
    if len(v) != n:
        raise InputError(f"normal word {v} has wrong length (expected {n})")
    return v


@dataclass(frozen=True)
class PcPresentation:
    """Weighted polycyclic presentation.

    ``orders[i]`` is ``None`` for an infinite relative order.  Missing power or
    commutator entries mean the trivial word.  Commutator tails refer to the
    commutator ``[a_j, a_i] = a_j a_i a_j^-1 a_i^-1`` for j > i.
    """

    names: Tuple[str, ...]
    weights: Tuple[int, ...]
    orders: Tuple[Optional[int], ...]
    power_tails: Mapping[int, Tuple[int, ...]] = field(default_factory=dict)
    commutator_tails: Mapping[Tuple[int, int], Tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.names)
        names = tuple(self.names)
        weights = tuple(int(w) for w in self.weights)
        orders = tuple(None if (o is None or o == 0) else int(o) for o in self.orders)
        if len(weights) != n or len(orders) != n:
            raise InputError("names, weights and orders must have equal length")
        if len(set(names)) != n:
            raise InputError("duplicate generator names")
        if any(w < 1 for w in weights) or any(a > b for a, b in zip(weights, weights[1:])):
            raise InputError(f"weights must be positive and nondecreasing: {weights}")
        if any(o is not None and o < 2 for o in orders):
            raise InputError("finite relative orders must be at least 2")
        powers = {}
        for i, w in self.power_tails.items():
            i = int(i)
            v = _vec(w, n)
            if not 0 <= i < n or orders[i] is None:
                if any(v):
                    raise InputError(f"power tail given for generator {i} of infinite order")
                continue
            if any(v[:i + 1]):
                raise InputError(f"power tail of generator {names[i]} must use later generators only")
            self._check_bounds(v, orders)
            if any(v):
                powers[i] = v
        comms = {}
        for key, w in self.commutator_tails.items():
            j, i = (int(x) for x in key)
            v = _vec(w, n)
            if not (0 <= i < j < n):
                raise InputError(f"commutator key {(j, i)} must satisfy j > i")
            if any(v[:j + 1]):
                raise InputError(
                    f"tail of [{names[j]},{names[i]}] must use generators after {names[j]} only"
                )
            for k, e in enumerate(v):
                if e and weights[k] < weights[i] + weights[j]:
                    raise InputError(
                        f"tail of [{names[j]},{names[i]}] involves {names[k]} of weight "
                        f"{weights[k]} < {weights[i] + weights[j]}"
                    )
            self._check_bounds(v, orders)
            if any(v):
                comms[(j, i)] = v
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "power_tails", powers)
        object.__setattr__(self, "commutator_tails", comms)

    @staticmethod
    def _check_bounds(v, orders):
        for e, o in zip(v, orders):
            if o is not None and not 0 <= e < o:
                raise InputError(f"exponent {e} out of range for relative order {o}")

    @property
    def n(self) -> int:
        return len(self.names)

    @cached_property
    def collector(self) -> Collector:
        return Collector(self.orders, self.power_tails, self.commutator_tails)

    def identity(self) -> Tuple[int, ...]:
        return (0,) * self.n

    def commutator(self, j: int, i: int) -> Tuple[int, ...]:
        """Normal word of ``[a_j, a_i]`` for j > i as stored."""
        return self.commutator_tails.get((j, i), self.identity())

    def word_letters(self, w: Word | Sequence[int]) -> List[Letter]:
        if isinstance(w, Word):
            return list(w.letters)
        return [(k, e) for k, e in enumerate(w) if e]

    def format_normal(self, vec: Sequence[int]) -> str:
        return Word(tuple((k, e) for k, e in enumerate(vec) if e)).format(self.names)

    def to_json(self) -> dict:
        fmt = self.format_normal
        return {
            "generators": list(self.names),
            "weights": list(self.weights),
            "orders": [o for o in self.orders],
            "power_tails": {str(i + 1): fmt(v) for i, v in sorted(self.power_tails.items())},
            "commutator_tails": {
                f"{j + 1},{i + 1}": fmt(v) for (j, i), v in sorted(self.commutator_tails.items())
            },
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PcPresentation":
        """Build from the ``pc-presentation`` JSON schema (1-based indices).

        Tail words are parsed with the ordinary word grammar and collected,
        so they may be written in any order as long as the collected result
        satisfies the support conditions.
        """
        try:
            weights = list(data["weights"])
            orders_raw = list(data["orders"])
        except (KeyError, TypeError):
            raise InputError("pc-presentation JSON needs 'weights' and 'orders'") from None
        n = len(weights)
        names = list(data.get("generators") or [f"a{k + 1}" for k in range(n)])
        orders = []
        for o in orders_raw:
            if o in (None, 0, "inf", "infinity"):
                orders.append(None)
            else:
                orders.append(int(o))
        # parse words; a provisional collector over the declared relations
        # puts them into normal form
        powers_w = {int(k) - 1: parse_word(str(v), names) for k, v in (data.get("power_tails") or {}).items()}
        comms_w = {}
        for k, v in (data.get("commutator_tails") or {}).items():
            parts = str(k).split(",")
            if len(parts) != 2:
                raise InputError(f"commutator key {k!r} must look like 'j,i'")
            j, i = (int(p) - 1 for p in parts)
            comms_w[(j, i)] = parse_word(str(v), names)
        for (j, i) in comms_w:
            if not (0 <= i < j < n):
                raise InputError(f"commutator key {(j + 1, i + 1)} must satisfy j > i")
        for i in powers_w:
            if not 0 <= i < n:
                raise InputError(f"power tail index {i + 1} out of range")

        def normal(word: Word, lowest: int) -> Tuple[int, ...]:
            v = [0] * n
            if all(g > lowest for g, _ in word.letters) and _is_sorted(word):
                for g, e in word.letters:
                    v[g] += e
                return tuple(v)
            return None

        powers = {}
        comms = {}
        pending = []
        for i, w in powers_w.items():
            v = normal(w, i)
            if v is None:
                pending.append(("p", i, w))
            else:
                powers[i] = v
        for key, w in comms_w.items():
            v = normal(w, key[0])
            if v is None:
                pending.append(("c", key, w))
            else:
                comms[key] = v
        if pending:
            # collect unsorted tails top-down using relations among later generators
            pending.sort(key=lambda t: -(t[1] if t[0] == "p" else t[1][0]))
            for kind, key, w in pending:
                col = Collector(orders, powers, comms)
                v = tuple(col.collect(list(w.letters)))
                (powers if kind == "p" else comms)[key] = v
        return cls(tuple(names), tuple(weights), tuple(orders), powers, comms)


def _is_sorted(word: Word) -> bool:
    gens = [g for g, _ in word.letters]
    return gens == sorted(set(gens))


def collect(pc: PcPresentation, w) -> Tuple[int, ...]:
    """Normal form of ``w``: a :class:`Word`, a normal word, or a list of either."""
    col = pc.collector
    if isinstance(w, (list, tuple)) and w and isinstance(w[0], (Word, list, tuple)):
        acc = col.identity()
        for part in w:
            acc = col.multiply(acc, pc.word_letters(part))
        return tuple(acc)
    return tuple(col.collect(pc.word_letters(w)))


def is_consistent(pc: PcPresentation) -> bool:
    return not consistency_failures(pc)


def consistency_failures(pc: PcPresentation) -> list:
    return [(label, tuple(l), tuple(r)) for label, l, r in pc.collector.consistency_pairs() if l != r]


def pc_relators(pc: PcPresentation) -> List[Word]:
    """The defining relations of ``pc`` as relator words over its generators."""
    rels = []
    for i, o in enumerate(pc.orders):
        if o:
            tail = Word(tuple((k, e) for k, e in enumerate(pc.power_tails.get(i, ())) if e))
            rels.append(Word(((i, o),)) * tail.inverse())
    for j in range(pc.n):
        for i in range(j):
            tail = Word(tuple((k, e) for k, e in enumerate(pc.commutator(j, i)) if e))
            rels.append(commutator(Word(((j, 1),)), Word(((i, 1),))) * tail.inverse())
    return rels


def pc_to_finite_presentation(pc: PcPresentation) -> FinitePresentation:
    return FinitePresentation(pc.names, tuple(pc_relators(pc)))


def _is_nilpotent_matrix(N) -> bool:
    n = len(N)
    P = [row[:] for row in N]
    for _ in range(n):
        if not any(any(r) for r in P):
            return True
        P = exactla.matmul(P, N)
    return not any(any(r) for r in P)


def _unimodular_inverse(M):
    n = len(M)
    aug = [list(map(int, M[i])) + [int(i == j) for j in range(n)] for i in range(n)]
    red, piv = exactla.rref(aug, 2 * n)
    if piv[:n] != list(range(n)):
        raise RejectedError("matrix is not invertible")
    inv = [[r[n + j] for j in range(n)] for r in red]
    if any(x.denominator != 1 for r in inv for x in r):
        raise RejectedError("matrix is not unimodular")
    return [[int(x) for x in r] for r in inv]


def _adapted_basis(N, n):
    """Z-basis b_1..b_n with N b_j in span(b_{j+1}, ...), plus layer weights."""
    layers = []
    prev: List[List[int]] = []
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    k = 0
    while len(prev) < n:
        k += 1
        P = exactla.matmul(P, N)
        K = exactla.kernel_z(P, n)  # basis of V_k
        d = len(K)
        if d == len(prev):
            raise RejectedError("matrix is not unipotent")
        if prev:
            Kcols = exactla.transpose(K)
            D, U, V, _ = exactla.smith_decomposition(Kcols, d)
            # coordinates of previous basis vectors in the K basis
            X = []
            for b in prev:
                ub = [sum(U[r][c] * b[c] for c in range(n)) for r in range(n)][:d]
                X.append([sum(V[r][c] * ub[c] for c in range(d)) for r in range(d)])
            Xcols = exactla.transpose(X)
            D2, U2, V2, _ = exactla.smith_decomposition(Xcols, len(prev))
            if any(D2[i][i] != 1 for i in range(len(prev))):
                raise RejectedError("kernel flag is not saturated")
            P2 = _unimodular_inverse(U2)
            new = []
            for c in range(len(prev), d):
                coords = [P2[r][c] for r in range(d)]
                new.append([sum(K[t][row] * coords[t] for t in range(d)) for row in range(n)])
        else:
            new = K
        layers.append(new)
        prev = prev + new
    return layers


def semidirect_basis(A: Sequence[Sequence[int]]) -> Tuple[List[List[int]], List[int]]:
    """Lattice basis used by :func:`semidirect_z` for ``v1, v2, ...`` and their weights."""
    A = [[int(x) for x in r] for r in A]
    n = len(A)
    if any(len(r) != n for r in A):
        raise InputError("matrix must be square")
    N = [[A[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    if not _is_nilpotent_matrix(N):
        raise RejectedError("matrix is not unipotent: A - I is not nilpotent")
    if n == 0:
        return [], []
    layers = _adapted_basis(N, n)
    m = len(layers)
    basis: List[List[int]] = []
    weights = []
    for depth in range(m - 1, -1, -1):
        for b in layers[depth]:
            basis.append(b)
            weights.append(m - depth)
    return basis, weights


def semidirect_z(A: Sequence[Sequence[int]]) -> PcPresentation:
    """Pc presentation of ``Z^n x|_A Z`` for a unipotent integer matrix ``A``.

    The stable letter ``t`` comes first and acts by ``t v t^-1 = A v``.  The
    lattice gets a basis adapted to the kernel flag of ``A - I``, so every
    commutator ``[v, t] = v - A v`` only involves later basis vectors.
    """
    A = [[int(x) for x in r] for r in A]
    n = len(A)
    basis, weights = semidirect_basis(A)
    if n == 0:
        return PcPresentation(("t",), (1,), (None,))
    N = [[A[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    weights = [1] + weights
    B = exactla.transpose(basis)  # columns are basis vectors
    Binv = _unimodular_inverse(B)
    comms = {}
    for j, b in enumerate(basis):
        img = [-sum(N[r][c] * b[c] for c in range(n)) for r in range(n)]
        coords = [sum(Binv[r][c] * img[c] for c in range(n)) for r in range(n)]
        comms[(j + 1, 0)] = tuple([0] + coords)
    names = ("t",) + tuple(f"v{k + 1}" for k in range(n))
    return PcPresentation(names, tuple(weights), (None,) * (n + 1), {}, comms)


def load_presentation(data: Mapping):
    """Dispatch on the JSON schema: finite presentation, pc presentation or unipotent ``matrix``."""
    if not isinstance(data, Mapping):
        raise InputError("presentation JSON must be an object")
    if "matrix" in data:
        return semidirect_z(data["matrix"])
    if "relators" in data or ("generators" in data and "weights" not in data):
        return FinitePresentation.from_json(data)
    if "weights" in data:
        return PcPresentation.from_json(data)
    raise InputError("unrecognised presentation JSON")
