"""Exact counts of bounded-degree sequences and allocations.

``C_{2m}(t, k)`` is the coefficient of ``z^{2m}`` in ``R_t(z)^k``. All of
the arithmetic here is over Python integers: ``t! R_t(z)`` has integer
coefficients ``t!/i!``, so the k-th power of that polynomial is integral and
``C_{2m}(t, k)`` is one of its coefficients divided by ``t!^k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, OracleScaleError

__all__ = [
    "BigCount",
    "power_coefficients",
    "power_coefficients_convolve",
    "exact_C",
    "allocations_S",
    "pairing_bound",
    "brute_graph_count",
    "brute_graph_table",
    "BRUTE_MAX_K",
]

BRUTE_MAX_K = 8


@dataclass(frozen=True)
class BigCount:
    """A non-negative rational held as a reduced ``num / den`` pair."""

    num: int
    den: int = 1

    def __post_init__(self) -> None:
        if self.num < 0 or self.den <= 0:
            raise DomainError(f"BigCount needs num >= 0 and den > 0, got {self.num}/{self.den}")
        g = math.gcd(self.num, self.den)
        if g > 1:
            object.__setattr__(self, "num", self.num // g)
            object.__setattr__(self, "den", self.den // g)

    @classmethod
    def from_fraction(cls, q: Fraction | int) -> BigCount:
        q = Fraction(q)
        return cls(q.numerator, q.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def ln_value(self) -> float:
        """``ln(num) - ln(den)``; ``-inf`` for zero."""
        if self.num == 0:
            return -math.inf
        return math.log(self.num) - math.log(self.den)

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    def __float__(self) -> float:
        return self.num / self.den

    def __str__(self) -> str:
        return str(self.num) if self.den == 1 else f"{self.num}/{self.den}"


def _check_args(t: int, k: int, m: int) -> None:
    if t < 0 or k < 1 or m < 0:
        raise DomainError(f"need t >= 0, k >= 1, m >= 0, got t={t}, k={k}, m={m}")


def power_coefficients(t: int, k: int, max_degree: int) -> tuple[list[int], int]:
    """Integer coefficients of ``(t! R_t)^k`` up to ``max_degree``, and ``t!^k``.

    Uses the power recurrence for ``P(z)^k`` with ``P(0) != 0``:
    ``n a_0 c_n = sum_{i=1}^{t} ((k+1) i - n) a_i c_{n-i}``, which fills each
    coefficient from the previous ``t`` in ``O(t)`` operations. Every division
    is exact because the ``c_n`` are integers.
    """
    if t < 0 or k < 0 or max_degree < 0:
        raise DomainError("power_coefficients needs non-negative arguments")
    tf = math.factorial(t)
    a = [tf // math.factorial(i) for i in range(t + 1)]
    top = min(max_degree, t * k)
    c = [0] * (max_degree + 1)
    c[0] = tf**k
    for n in range(1, top + 1):
        acc = 0
        for i in range(1, min(t, n) + 1):
            acc += ((k + 1) * i - n) * a[i] * c[n - i]
        q, rem = divmod(acc, n * tf)
        assert rem == 0
        c[n] = q
    return c, tf**k


def power_coefficients_convolve(t: int, k: int, max_degree: int) -> tuple[list[int], int]:
    """Same as :func:`power_coefficients` by ``k`` truncated convolutions.

    Costs ``O(k t max_degree)``; kept as an independent route for checks.
    """
    tf = math.factorial(t)
    a = [tf // math.factorial(i) for i in range(t + 1)]
    c = [1] + [0] * max_degree
    for _ in range(k):
        new = [0] * (max_degree + 1)
        for j in range(max_degree + 1):
            acc = 0
            for i in range(min(t, j) + 1):
                acc += a[i] * c[j - i]
            new[j] = acc
        c = new
    return c, tf**k


def exact_C(t: int, k: int, m: int) -> BigCount:
    """Coefficient of ``z^{2m}`` in ``R_t(z)^k``; exact zero when ``2m > tk``."""
    _check_args(t, k, m)
    if 2 * m > t * k:
        return BigCount(0)
    c, den = power_coefficients(t, k, 2 * m)
    return BigCount(c[2 * m], den)


def allocations_S(t: int, k: int, m: int) -> BigCount:
    """Allocations of ``2m`` labelled balls into ``k`` bins of capacity ``t``."""
    q = exact_C(t, k, m).fraction * math.factorial(2 * m)
    assert q.denominator == 1
    return BigCount(q.numerator)


def pairing_factor(m: int) -> int:
    """Number of perfect matchings of ``2m`` points: ``(2m)! / (m! 2^m)``."""
    return math.factorial(2 * m) // (math.factorial(m) * 2**m)


def pairing_bound(t: int, k: int, m: int) -> BigCount:
    """Configuration-model upper bound on graphs with max degree <= t."""
    return BigCount.from_fraction(exact_C(t, k, m).fraction * pairing_factor(m))


def _popcount_table(k: int) -> np.ndarray:
    """``table[d, m]``: labelled graphs on ``k`` vertices, max degree d, m edges."""
    pairs = [(u, v) for u in range(k) for v in range(u + 1, k)]
    n_edges = len(pairs)
    incident = [sum(1 << e for e, (u, v) in enumerate(pairs) if w in (u, v)) for w in range(k)]
    table = np.zeros((max(k, 1), n_edges + 1), dtype=np.int64)
    chunk_bits = min(n_edges, 22)
    base = np.arange(1 << chunk_bits, dtype=np.uint32)
    for hi in range(1 << (n_edges - chunk_bits)):
        subsets = base | np.uint32(hi << chunk_bits)
        edges = np.bitwise_count(subsets).astype(np.int64)
        maxdeg = np.zeros(subsets.shape, dtype=np.uint8)
        for mask in incident:
            np.maximum(maxdeg, np.bitwise_count(subsets & np.uint32(mask)), out=maxdeg)
        flat = maxdeg.astype(np.int64) * (n_edges + 1) + edges
        table += np.bincount(flat, minlength=table.size).reshape(table.shape)
    return table


@lru_cache(maxsize=None)
def brute_graph_table(k: int) -> tuple[tuple[int, ...], ...]:
    """Exhaustive table over all ``2^{C(k,2)}`` labelled graphs on ``k`` vertices."""
    if k < 0:
        raise DomainError(f"k must be non-negative, got {k}")
    if k > BRUTE_MAX_K:
        raise OracleScaleError(f"brute force enumeration refuses k={k} > {BRUTE_MAX_K}")
    if k < 2:
        return ((1,),)
    return tuple(tuple(int(x) for x in row) for row in _popcount_table(k))


def brute_graph_count(k: int, m: int, t: int) -> BigCount:
    """Labelled graphs on ``k`` vertices with ``m`` edges and max degree <= t."""
    if k < 0 or m < 0 or t < 0:
        raise DomainError(f"need non-negative k, m, t, got k={k}, m={m}, t={t}")
    table = brute_graph_table(k)
    if m >= len(table[0]):
        return BigCount(0)
    return BigCount(sum(row[m] for row in table[: t + 1]))
