"""Closed-form reference curves for the t-stability number and chi_t.

All logarithms written ``log_b`` use base ``b = 1/(1-p)``. Terms carrying a
factor of ``t`` are dropped outright when ``t = 0`` (the ``0^0 = 1``
convention), never evaluated as ``0 * inf``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import DomainError, OracleScaleError
from .moments import Params

__all__ = [
    "StabilityWindow",
    "PartitionSpec",
    "PartitionCheck",
    "alpha_formula",
    "stability_window",
    "chi_bounds",
    "alpha_hat",
    "partition_h",
    "iter_partitions",
    "is_balanced",
    "check_balanced_max",
    "verify_balanced_max",
    "PARTITION_MAX_N",
]

log = logging.getLogger(__name__)

PARTITION_MAX_N = 40


def _log_b(params: Params, x: float) -> float:
    return math.log(x) / params.ln_b


def alpha_formula(params: Params, n: int) -> float:
    """Centre of the two-point concentration window for ``alpha_t(G(n, p))``."""
    if n < 2:
        raise DomainError(f"alpha formula needs n >= 2, got {n}")
    lbn = _log_b(params, n)
    if lbn <= 1.0:
        raise DomainError(f"log_b log_b n is undefined or non-positive at n={n}, b={params.b:.6g}")
    t = params.t
    value = 2 * lbn + (t - 2) * _log_b(params, lbn) + 2 * _log_b(params, math.e / 2) + 1
    if t > 0:
        value += (t * math.log(t) - 2 * math.lgamma(t + 1)) / params.ln_b
        value += t * _log_b(params, 2 * params.b * params.p / math.e)
    return value


@dataclass(frozen=True)
class StabilityWindow:
    alpha: float
    lo: int
    hi: int
    epsilon: float


def stability_window(params: Params, n: int, epsilon: float) -> StabilityWindow:
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    a = alpha_formula(params, n)
    return StabilityWindow(a, math.floor(a - epsilon), math.floor(a + epsilon), epsilon)


def chi_bounds(params: Params, n: int) -> tuple[float, float]:
    """Reference curves ``n / (alpha - 2/ln b - 1)`` and ``n / (alpha - 2/ln b - 2)``."""
    d = alpha_formula(params, n) - 2 / params.ln_b - 2
    if d <= 0:
        raise DomainError(f"n={n} is too small: chi denominator {d:.4g} <= 0")
    return n / (d + 1), n / d


def alpha_hat(params: Params, s: int, epsilon: float) -> int:
    """Target class size ``floor(alpha_{t,p}(s) - 1 - epsilon)`` for peeling."""
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    return math.floor(alpha_formula(params, s) - 1 - epsilon)


@dataclass(frozen=True)
class PartitionSpec:
    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(sorted(self.sizes))
        if not sizes or sizes[0] < 1:
            raise DomainError(f"partition parts must be positive, got {self.sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)


def _k_log_k(params: Params, k: int) -> float:
    return 0.0 if k == 1 else k * _log_b(params, k)


def partition_h(params: Params, spec: PartitionSpec | Sequence[int]) -> float:
    """``h(P) = -sum_i (k_i^2 / 2 - (t/2) k_i log_b k_i)``."""
    sizes = spec.sizes if isinstance(spec, PartitionSpec) else PartitionSpec(tuple(spec)).sizes
    t = params.t
    total = 0.0
    for k in sizes:
        total += k * k / 2
        if t:
            total -= t / 2 * _k_log_k(params, k)
    return -total


def iter_partitions(n: int, r: int, smallest: int = 1) -> Iterator[tuple[int, ...]]:
    """Partitions of ``n`` into exactly ``r`` parts, each non-decreasing."""
    if r == 1:
        if n >= smallest:
            yield (n,)
        return
    for a in range(smallest, n // r + 1):
        for rest in iter_partitions(n - a, r - 1, a):
            yield (a,) + rest


def is_balanced(sizes: Sequence[int]) -> bool:
    return max(sizes) - min(sizes) <= 1


@dataclass(frozen=True)
class PartitionCheck:
    """Outcome of the exhaustive balanced-maximiser check at one ``(n, r)``."""

    n: int
    r: int
    balanced_is_max: bool
    argmax: tuple[int, ...]
    h_max: float
    h_balanced: float
    swap_failures: tuple[tuple[int, ...], ...]

    @property
    def ok(self) -> bool:
        return self.balanced_is_max and not self.swap_failures


def _swap_gain(params: Params, sizes: tuple[int, ...]) -> float:
    """``h`` after moving one vertex from the largest to the smallest part, minus ``h``."""
    moved = list(sizes)
    moved[0] += 1
    moved[-1] -= 1
    return partition_h(params, moved) - partition_h(params, sizes)


def check_balanced_max(params: Params, n: int, r: int, swap_min_part: int = 2) -> PartitionCheck:
    """Enumerate every partition of ``n`` into ``r`` parts and inspect ``h``.

    Besides the global maximiser, the single-vertex swap from the largest to
    the smallest part is tested on every partition with ``k_1 < k_r - 1``.
    The swap is only required to help once the smallest part has at least
    ``swap_min_part`` vertices; below that the inequality is not expected to
    hold and failures are logged instead of counted.
    """
    if n > PARTITION_MAX_N:
        raise OracleScaleError(f"partition enumeration refuses n={n} > {PARTITION_MAX_N}")
    if not 1 <= r <= n:
        raise DomainError(f"need 1 <= r <= n, got r={r}, n={n}")
    best: tuple[int, ...] | None = None
    h_best = -math.inf
    winners: list[tuple[int, ...]] = []
    swap_failures = []
    for sizes in iter_partitions(n, r):
        h = partition_h(params, sizes)
        if h > h_best + 1e-12:
            best, h_best, winners = sizes, h, [sizes]
        elif abs(h - h_best) <= 1e-12:
            winners.append(sizes)
        if sizes[0] < sizes[-1] - 1 and _swap_gain(params, sizes) <= 0:
            if sizes[0] >= swap_min_part:
                swap_failures.append(sizes)
            else:
                log.debug("swap does not improve small partition %s (t=%d, b=%.4g)",
                          sizes, params.t, params.b)
    balanced = tuple(sorted([n // r + 1] * (n % r) + [n // r] * (r - n % r)))
    assert best is not None
    return PartitionCheck(
        n=n,
        r=r,
        balanced_is_max=all(is_balanced(w) for w in winners),
        argmax=best,
        h_max=h_best,
        h_balanced=partition_h(params, balanced),
        swap_failures=tuple(swap_failures),
    )


def verify_balanced_max(params: Params, n: int, r: int) -> bool:
    """True iff balanced partitions are the exact maximisers of ``h`` at ``(n, r)``."""
    return check_balanced_max(params, n, r).ok
