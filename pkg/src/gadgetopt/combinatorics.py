"""Partitions and monomial symmetric polynomials."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from typing import Sequence


def normalize_partition(parts: Sequence[int]) -> tuple[int, ...]:
    parts = tuple(int(p) for p in parts)
    if any(p <= 0 for p in parts):
        raise ValueError(f"partition parts must be positive: {parts}")
    return tuple(sorted(parts, reverse=True))


def equal_part_multiplicity(parts: Sequence[int]) -> int:
    """``prod_v (count of v)!`` -- orderings of equal parts."""
    return math.prod(math.factorial(c) for c in Counter(parts).values())


def injective_sum(parts: Sequence[int], values: Sequence[float]) -> float:
    """``sum_pi prod_q values[pi(q)] ** parts[q]`` over injective maps ``pi``.

    Each ordered slot is sent to a distinct variable, so repeated parts are
    counted once per ordering. Equals ``monomial_symmetric`` times
    :func:`equal_part_multiplicity`.
    """
    parts = tuple(parts)
    if len(parts) > len(values):
        return 0.0
    if not parts:
        return 1.0
    # Elementwise DP over variables: state = set of slots already used.
    n_slots = len(parts)
    acc = {0: 1.0}
    for x in values:
        nxt = dict(acc)
        for used, w in acc.items():
            for q in range(n_slots):
                if not used >> q & 1:
                    key = used | 1 << q
                    nxt[key] = nxt.get(key, 0.0) + w * x ** parts[q]
        acc = nxt
    return acc.get((1 << n_slots) - 1, 0.0)


def monomial_symmetric(parts: Sequence[int], values: Sequence[float]) -> float:
    """Monomial symmetric polynomial ``m_b(values)``.

    Every distinct monomial ``x_{i1}^{b1} x_{i2}^{b2} ...`` (distinct indices)
    is counted once, so ``m_(1,1)(a, b) = a*b``. Returns 0 when there are more
    parts than variables.
    """
    parts = normalize_partition(parts) if parts else ()
    return injective_sum(parts, values) / equal_part_multiplicity(parts)


def monomial_symmetric_bruteforce(parts: Sequence[int], values: Sequence[float]) -> float:
    """Direct enumeration of distinct exponent vectors; reference oracle."""
    parts = tuple(parts)
    n = len(values)
    if len(parts) > n:
        return 0.0
    exps = set()
    for idx in itertools.permutations(range(n), len(parts)):
        e = [0] * n
        for i, b in zip(idx, parts):
            e[i] = b
        exps.add(tuple(e))
    return float(sum(math.prod(x ** k for x, k in zip(values, e)) for e in exps))


def partitions(total: int, max_parts: int, max_part: int | None = None):
    """Non-increasing positive integer vectors summing to ``total``."""
    max_part = total if max_part is None else max_part
    if total == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(total, max_part), 0, -1):
        for rest in partitions(total - first, max_parts - 1, first):
            yield (first,) + rest


def enumerate_partitions_of_walk(r: int, k: int, m: int) -> list[tuple[int, ...]]:
    """All touch-count partitions an ``r``-step walk over ``m`` registers can have.

    ``k`` does not restrict the shape (a register may be touched any number
    of times); it is accepted for signature symmetry with the walk engine.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    return list(partitions(r, m, r))
