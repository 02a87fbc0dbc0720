"""Independent combinatorial oracles: set partitions, Bell numbers, p-matchings.

These are deliberately simple enumeration-based counters used to cross-check
the model counter; keep them free of any dependency on the logic machinery.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence


def set_partitions(items: Sequence[int]) -> Iterator[list[list[int]]]:
    """Yield every partition of items into nonempty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]
        yield [[first]] + partition


def bell_number(n: int) -> int:
    """Number of set partitions of [n], by direct enumeration."""
    return sum(1 for _ in set_partitions(range(1, n + 1)))


def restricted_bell_number(n: int, r: int) -> int:
    """Partitions of [n + r] whose last r elements lie in pairwise distinct blocks.

    Equals the count with the *first* r elements distinguished, by relabeling.
    """
    special = set(range(n + 1, n + r + 1))
    total = 0
    for partition in set_partitions(range(1, n + r + 1)):
        if all(len(special & set(block)) <= 1 for block in partition):
            total += 1
    return total


def equal_bipartition_count(n: int) -> int:
    """Partitions of [n] into exactly two blocks of the same size."""
    if n < 2 or n % 2 == 1:
        return 0
    total = 0
    for partition in set_partitions(range(1, n + 1)):
        if len(partition) == 2 and len(partition[0]) == len(partition[1]):
            total += 1
    return total


def perfect_p_matchings(items: Sequence[int], p: int) -> Iterator[list[tuple[int, ...]]]:
    """Yield every partition of items into blocks of exactly p elements."""
    items = list(items)
    if not items:
        yield []
        return
    if len(items) % p != 0:
        return
    first, rest = items[0], items[1:]
    for partners in combinations(rest, p - 1):
        block = (first,) + partners
        remaining = [x for x in rest if x not in partners]
        for matching in perfect_p_matchings(remaining, p):
            yield [block] + matching


@lru_cache(maxsize=None)
def count_perfect_p_matchings(m: int, p: int) -> int:
    """Number of partitions of m labeled points into blocks of size p, by enumeration."""
    if m == 0:
        return 1
    if m % p != 0:
        return 0
    total = 0
    # Point 1 picks its p-1 partners; recurse on the remainder.
    for _partners in combinations(range(m - 1), p - 1):
        total += count_perfect_p_matchings(m - p, p)
    return total


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def fibonacci_prefix(length: int, modulus: int | None = None) -> list[int]:
    """F(1), F(2), ... = 1, 1, 2, 3, 5, ... optionally reduced mod modulus."""
    out: list[int] = []
    a, b = 1, 1
    for _ in range(length):
        out.append(a % modulus if modulus else a)
        a, b = b, a + b
    return out


def pisano_period(m: int) -> int:
    """Period of the Fibonacci sequence modulo m, by direct modular iteration."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    a, b = 1, 1
    for i in range(1, 6 * m * m + 1):
        a, b = b, (a + b) % m
        if (a, b) == (1, 1):
            return i
    raise RuntimeError(f"no Pisano period found for {m}")
