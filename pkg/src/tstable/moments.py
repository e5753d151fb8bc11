"""First-moment machinery for t-stable sets of order k in G(n, p).

For a fixed k-set A, ``P(A is t-stable)`` is split by the number m of edges
induced on A, and each term is bounded by

    f(m) = p^m (1-p)^(C(k,2) - m) C_{2m}(t, k) (2m)! / (m! 2^m).

Everything is carried in natural logs; at k around 2000 the values of
``f(m)`` span thousands of orders of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import exact_counts
from .errors import DomainError
from .poly_saddle import approx_log_C

__all__ = [
    "Params",
    "MomentProfile",
    "ProbBound",
    "ExpectedCount",
    "EXACT_TK_LIMIT",
    "log_f",
    "build_profile",
    "mstar_prediction",
    "log_prob_tstable_upper",
    "log_expected_count",
    "log_binom",
    "logsumexp",
]

EXACT_TK_LIMIT = 4000

Mode = Literal["exact", "saddle"]


@dataclass(frozen=True)
class Params:
    """Model constants: degree cap ``t``, edge probability ``p``, ``b = 1/(1-p)``."""

    t: int
    p: float
    b: float = field(init=False)

    def __post_init__(self) -> None:
        if self.t < 0:
            raise DomainError(f"t must be non-negative, got {self.t}")
        if not 0 < self.p < 1:
            raise DomainError(f"p must lie in (0, 1), got {self.p}")
        object.__setattr__(self, "b", 1.0 / (1.0 - self.p))

    @property
    def ln_b(self) -> float:
        return -math.log1p(-self.p)

    @property
    def ln_p(self) -> float:
        return math.log(self.p)

    @property
    def ln_q(self) -> float:
        """``ln(1 - p)``."""
        return math.log1p(-self.p)


def logsumexp(values) -> float:
    x = np.asarray(values, dtype=float)
    top = x.max()
    if not np.isfinite(top):
        return float(top)
    return float(top + np.log(np.exp(x - top).sum()))


def log_binom(n: int, k: int) -> float:
    if not 0 <= k <= n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_pairing(m: int) -> float:
    return math.lgamma(2 * m + 1) - math.lgamma(m + 1) - m * math.log(2)


def _edge_weight(params: Params, k: int, m: int) -> float:
    """``m ln p + (C(k,2) - m) ln(1-p)``."""
    pairs = k * (k - 1) // 2
    return (m * params.ln_p if m else 0.0) + (pairs - m) * params.ln_q


def _log_C_edges(t: int, k: int, m: int) -> float | None:
    """Closed forms for the two end coefficients, which have no saddle."""
    if m == 0:
        return 0.0
    if 2 * m == t * k:
        return -k * math.lgamma(t + 1)
    return None


def log_f(params: Params, k: int, m: int, mode: Mode = "exact") -> float:
    """``ln f(m)`` by exact rational counting or by the saddle approximation."""
    t = params.t
    if k < 1 or m < 0 or 2 * m > t * k:
        raise DomainError(f"need k >= 1 and 0 <= 2m <= tk, got k={k}, m={m}, t={t}")
    if mode == "exact":
        if t * k > EXACT_TK_LIMIT:
            raise DomainError(f"exact mode needs tk <= {EXACT_TK_LIMIT}, got {t * k}")
        log_c = exact_counts.exact_C(t, k, m).ln_value
    elif mode == "saddle":
        log_c = _log_C_edges(t, k, m)
        if log_c is None:
            log_c = approx_log_C(t, k, m).log_value
    else:
        raise DomainError(f"unknown mode {mode!r}")
    return _edge_weight(params, k, m) + log_c + _log_pairing(m)


@dataclass(frozen=True)
class MomentProfile:
    params: Params
    k: int
    mode: str
    log_f: np.ndarray
    m_star: int
    log_sum: float

    @property
    def ratios(self) -> np.ndarray:
        """``lambda_m = f(m+1) / f(m)`` for ``m = 0 .. len-2``."""
        return np.exp(np.diff(self.log_f))

    @property
    def log_ratios(self) -> np.ndarray:
        return np.diff(self.log_f)


def _profile_exact(params: Params, k: int) -> np.ndarray:
    t = params.t
    top = t * k // 2
    coeffs, den = exact_counts.power_coefficients(t, k, 2 * top)
    log_den = math.log(den)
    out = np.empty(top + 1)
    for m in range(top + 1):
        log_c = math.log(coeffs[2 * m]) - log_den
        out[m] = _edge_weight(params, k, m) + log_c + _log_pairing(m)
    return out


def build_profile(params: Params, k: int, mode: Mode | None = None,
                  exact_limit: int = EXACT_TK_LIMIT) -> MomentProfile:
    """Tabulate ``ln f(m)`` for ``0 <= 2m <= tk`` and locate its maximiser.

    ``mode=None`` picks exact counting while ``tk <= exact_limit`` and the
    saddle approximation beyond it.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    t = params.t
    if mode is None:
        mode = "exact" if t * k <= exact_limit else "saddle"
    if t == 0:
        values = np.array([_edge_weight(params, k, 0)])
    elif mode == "exact":
        values = _profile_exact(params, k)
    else:
        values = np.array([log_f(params, k, m, "saddle") for m in range(t * k // 2 + 1)])
    m_star = int(np.argmax(values))  # first maximiser on ties
    return MomentProfile(params, k, mode, values, m_star, logsumexp(values))


def mstar_prediction(params: Params, k: int) -> float:
    """Leading-order maximiser ``(tk - sqrt(tk / (b p))) / 2``."""
    t = params.t
    if t == 0:
        return 0.0
    return (t * k - math.sqrt(t * k / (params.b * params.p))) / 2


def _log_t_terms(params: Params, k: float) -> float:
    """``t ln(t b p k / e) - 2 ln t!`` with the t = 0 terms identically zero."""
    t = params.t
    if t == 0:
        return 0.0
    return t * math.log(t * params.b * params.p * k / math.e) - 2 * math.lgamma(t + 1)


@dataclass(frozen=True)
class ProbBound:
    log_bound: float
    log_closed_form: float


def log_prob_tstable_upper(params: Params, k: int, profile: MomentProfile | None = None) -> ProbBound:
    """``ln[(tk/2 + 1) f(m*)]`` next to its asymptotic closed form."""
    prof = profile or build_profile(params, k)
    bound = math.log(params.t * k / 2 + 1) + prof.log_f[prof.m_star]
    closed = (k / 2) * ((1 - k) * params.ln_b + _log_t_terms(params, k))
    return ProbBound(float(bound), closed)


@dataclass(frozen=True)
class ExpectedCount:
    log_value: float
    log_closed_form: float
    side: str


def log_expected_count(params: Params, n: int, k: int, side: Literal["upper", "lower"] = "upper",
                       profile: MomentProfile | None = None) -> ExpectedCount:
    """Bounds on ``ln E[number of t-stable k-sets in G(n, p)]``.

    ``upper`` adds the full profile sum to ``ln C(n, k)``. ``lower`` keeps
    only the dominant edge count and discounts it by ``e^{-t-t^2}/2``, the
    worst-case share of configurations that are simple graphs.
    """
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    t = params.t
    prof = profile or build_profile(params, k)
    head = log_binom(n, k)
    if side == "upper":
        value = head + prof.log_sum
    elif side == "lower":
        value = head - t - t * t - math.log(2) + prof.log_f[prof.m_star]
    else:
        raise DomainError(f"side must be 'upper' or 'lower', got {side!r}")
    closed = (k / 2) * (
        2 + 2 * math.log(n) + (1 - k) * params.ln_b + (t - 2) * math.log(k)
        + (_log_t_terms(params, 1.0) if t else 0.0)
    )
    return ExpectedCount(float(value), closed, side)
