"""Ranks of the lower central factors of free groups."""
from __future__ import annotations


def _check_positive(**kw):
    for name, v in kw.items():
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")


def mobius(n: int) -> int:
    _check_positive(n=n)
    mu = 1
    q = 2
    while q * q <= n:
        if n % q == 0:
            n //= q
            if n % q == 0:
                return 0
            mu = -mu
        q += 1
    if n > 1:
        mu = -mu
    return mu


def divisors(n: int):
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def witt_rank(r: int, k: int) -> int:
    """Rank of the k-th lower central factor of the free group of rank r."""
    _check_positive(r=r, k=k)
    total = sum(mobius(d) * r ** (k // d) for d in divisors(k))
    assert total % k == 0, (r, k, total)
    return total // k


def free_nilpotent_hirsch(r: int, c: int) -> int:
    _check_positive(r=r, c=c)
    return sum(witt_rank(r, k) for k in range(1, c + 1))


def relatively_free_balanced(r: int, c: int) -> bool:
    """Whether the free nilpotent group of rank r and class c has beta_2 <= beta_1.

    Its Schur multiplier is free abelian of rank ``witt_rank(r, c + 1)``.
    """
    return witt_rank(r, c + 1) <= r
