"""Truncated exponential polynomial and the saddle-point machinery built on it.

``R_t(z) = sum_{i<=t} z^i / i!`` is the per-vertex degree generating function.
Its k-th power has ``C_{2m}(t, k)`` as the coefficient of ``z^{2m}``; this
module solves the saddle equation ``r R'(r) / R(r) = y`` and evaluates the
Gaussian (large powers) approximation of that coefficient, together with a
contour-integral evaluation used as an independent numeric check.

Every evaluation that involves large radii is carried out on polynomials
rescaled by a power of ``r`` so that nothing overflows when ``r0`` is of
order ``1e12`` (which happens as ``y`` approaches ``t``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, PrecisionLossError

__all__ = [
    "TruncExpPoly",
    "SaddleData",
    "SaddleApprox",
    "eval_poly",
    "phi",
    "variance_factor",
    "solve_r0",
    "r0_asymptotic",
    "saddle_window",
    "approx_log_C",
    "contour_log_C",
]

RESIDUAL_TOL = 1e-12
DEFAULT_NODES = 4096


@dataclass(frozen=True)
class TruncExpPoly:
    """``R_t(z) = sum_{i=0}^t z^i / i!`` with exact rational coefficients."""

    t: int
    coeffs: tuple[Fraction, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.t < 0:
            raise DomainError(f"t must be non-negative, got {self.t}")
        coeffs = [Fraction(1)]
        for i in range(1, self.t + 1):
            coeffs.append(coeffs[-1] / i)
        object.__setattr__(self, "coeffs", tuple(coeffs))
        # float views used by the numeric routines
        for name, exact in (
            ("_f", self.coeffs),
            ("_fmean", self.mean_coeffs()),
            ("_fgap", self.gap_coeffs()),
            ("_fvar", self.variance_coeffs()),
        ):
            object.__setattr__(self, name, tuple(float(c) for c in exact))

    @property
    def float_coeffs(self) -> tuple[float, ...]:
        return self._f

    def mean_coeffs(self) -> tuple[Fraction, ...]:
        """Coefficients of ``z R'(z)``: ``i / i!``."""
        return tuple(i * c for i, c in enumerate(self.coeffs))

    def gap_coeffs(self) -> tuple[Fraction, ...]:
        """Coefficients of ``t R(z) - z R'(z)``: ``(t - i) / i!``."""
        return tuple((self.t - i) * c for i, c in enumerate(self.coeffs))

    def variance_coeffs(self) -> tuple[Fraction, ...]:
        """Coefficients of ``z (N' R - N R')`` with ``N = z R'``.

        Expanding the product gives ``sum_{i<j} (j-i)^2 z^{i+j} / (i! j!)``,
        a polynomial with non-negative coefficients, so evaluating it never
        suffers from cancellation.
        """
        out = [Fraction(0)] * max(2 * self.t, 1)
        for j in range(self.t + 1):
            for i in range(j):
                out[i + j] += (j - i) ** 2 * self.coeffs[i] * self.coeffs[j]
        return tuple(out)


@dataclass(frozen=True)
class SaddleData:
    y: float
    r0: float
    s: float


@dataclass(frozen=True)
class SaddleApprox:
    """Log of the large-powers approximation and whether it is in its window."""

    log_value: float
    in_window: bool
    r0: float
    s: float


def _require_saddle_poly(poly: TruncExpPoly) -> None:
    if poly.t < 1:
        raise DomainError("the saddle equation needs t >= 1 (R_0 is constant)")


def _scaled(coeffs, r: float, shift: int) -> float:
    """``sum_i c_i r^(i - shift)`` evaluated by Horner's rule in ``1/r``."""
    if shift == 0:
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * r + c
        return acc
    u = 1.0 / r
    acc = 0.0
    for i in range(shift + 1):
        c = coeffs[i] if i < len(coeffs) else 0.0
        acc = acc * u + c
    return acc


def _shift(poly: TruncExpPoly, r: float) -> int:
    return poly.t if r > 1.0 else 0


def eval_poly(poly: TruncExpPoly, z: complex) -> complex:
    acc = 0j
    for c in reversed(poly.float_coeffs):
        acc = acc * z + c
    return acc


def _log_R(poly: TruncExpPoly, r: float) -> float:
    sh = _shift(poly, r)
    return math.log(_scaled(poly._f, r, sh)) + sh * math.log(r)


def phi(poly: TruncExpPoly, r: float) -> float:
    """The saddle map ``r R'(r) / R(r)``, strictly increasing from 0 to t."""
    _require_saddle_poly(poly)
    if not r > 0:
        raise DomainError(f"phi needs r > 0, got {r}")
    sh = _shift(poly, r)
    return _scaled(poly._fmean, r, sh) / _scaled(poly._f, r, sh)


def _gap(poly: TruncExpPoly, r: float) -> float:
    """``t - phi(r)`` computed without cancellation."""
    sh = _shift(poly, r)
    return _scaled(poly._fgap, r, sh) / _scaled(poly._f, r, sh)


def variance_factor(poly: TruncExpPoly, r: float) -> float:
    """``r * phi'(r)`` from the exact rational derivative of ``phi``."""
    _require_saddle_poly(poly)
    if not r > 0:
        raise DomainError(f"variance_factor needs r > 0, got {r}")
    sh = _shift(poly, r)
    den = _scaled(poly._f, r, sh)
    return _scaled(poly._fvar, r, 2 * sh) / (den * den)


def r0_asymptotic(t: int, y: float) -> float:
    """Leading-order saddle radius ``t / (t - y)``."""
    if t < 1 or not 0 < y < t:
        raise DomainError(f"need t >= 1 and 0 < y < t, got t={t}, y={y}")
    return t / (t - y)


def solve_r0(poly: TruncExpPoly, y: float) -> SaddleData:
    """Solve ``phi(r) = y`` for the unique positive root.

    Newton's method runs on ``log r`` against ``log phi`` (small y) or
    ``log(t - phi)`` (y near t); both are close to linear in ``log r`` so the
    iteration converges in a handful of steps. A bisection bracket guards
    every step, so a Newton step that would leave the bracket is replaced by
    a midpoint.
    """
    _require_saddle_poly(poly)
    t = poly.t
    if not 0 < y < t:
        raise DomainError(f"saddle equation has no positive root for y={y} (need 0 < y < {t})")

    upper_form = y > t / 2
    target = math.log(t - y) if upper_form else math.log(y)

    def residual(x: float) -> tuple[float, float]:
        r = math.exp(x)
        s = variance_factor(poly, r)
        if upper_form:
            g = _gap(poly, r)
            return target - math.log(g), s / g
        ph = phi(poly, r)
        return math.log(ph) - target, s / ph

    # phi(r) <= r, so r = y sits at or below the root.
    lo = math.log(y)
    hi = math.log(max(1e3 * t / (t - y), y))
    while residual(hi)[0] < 0:
        hi += math.log(10.0)
    x = min(max(math.log(max(t / (t - y), 1e-3)), lo), hi)

    for _ in range(200):
        f, df = residual(x)
        if f < 0:
            lo = x
        else:
            hi = x
        if abs(f) <= 1e-15:
            break
        xn = x - f / df
        if not lo < xn < hi:
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 4e-16 * max(1.0, abs(x)):
            x = xn
            break
        x = xn

    r0 = math.exp(x)
    got = phi(poly, r0)
    if abs(got - y) > RESIDUAL_TOL * y:
        raise PrecisionLossError(f"saddle solve residual {abs(got - y):.3e} at y={y}")
    return SaddleData(y=y, r0=r0, s=variance_factor(poly, r0))


def saddle_window(t: int, k: int) -> tuple[float, float]:
    """Range of ``2m/k`` where the large-powers approximation is guaranteed."""
    lk = math.log(k)
    sk = math.sqrt(k)
    return t - lk / sk, t - 1.0 / (sk * lk)


def approx_log_C(t: int, k: int, m: int) -> SaddleApprox:
    """``ln`` of ``R(r0)^k / (r0^{2m} sqrt(2 pi k s))`` with ``r0 = r0(2m/k)``."""
    if t < 1 or k < 2:
        raise DomainError(f"need t >= 1 and k >= 2, got t={t}, k={k}")
    if m <= 0 or 2 * m >= t * k:
        raise DomainError(f"need 0 < 2m < tk, got m={m}, tk={t * k}")
    poly = TruncExpPoly(t)
    y = 2 * m / k
    sd = solve_r0(poly, y)
    log_val = (
        k * _log_R(poly, sd.r0)
        - 2 * m * math.log(sd.r0)
        - 0.5 * math.log(2 * math.pi * k * sd.s)
    )
    lo, hi = saddle_window(t, k)
    return SaddleApprox(log_value=log_val, in_window=lo <= y <= hi, r0=sd.r0, s=sd.s)


def contour_log_C(t: int, k: int, m: int, n_nodes: int = DEFAULT_NODES) -> float:
    """``ln C_{2m}(t, k)`` by the trapezoid rule on a circle around 0.

    For interior ``m`` the circle is the saddle circle ``|z| = r0(2m/k)``.
    The integrand is normalised by ``R(r)^k / r^{2m}`` so its modulus is at
    most 1. The endpoints ``m = 0`` and ``2m = tk`` have no saddle; there a
    radius is chosen where the target term dominates ``R(r)^k``.
    """
    if t < 1 or k < 1:
        raise DomainError(f"need t >= 1 and k >= 1, got t={t}, k={k}")
    if m < 0 or 2 * m > t * k:
        raise DomainError(f"need 0 <= 2m <= tk, got m={m}, tk={t * k}")
    if n_nodes < 64:
        raise DomainError(f"need at least 64 quadrature nodes, got {n_nodes}")
    poly = TruncExpPoly(t)
    if m == 0:
        r = 1e-2 / (t * k)
    elif 2 * m == t * k:
        r = 1e2 * t * k
    else:
        r = solve_r0(poly, 2 * m / k).r0

    sh = _shift(poly, r)
    scaled = np.array([float(c) * r ** (i - sh) for i, c in enumerate(poly.coeffs)])
    angles = 2 * np.pi * np.arange(n_nodes) / n_nodes
    z = np.exp(1j * angles)
    vals = np.zeros(n_nodes, dtype=complex)
    for c in scaled[::-1]:
        vals = vals * z + c
    ratio = vals / scaled.sum()
    with np.errstate(under="ignore"):
        integrand = np.exp(k * np.log(ratio) - 2j * m * angles)
    resolved = np.count_nonzero(np.abs(integrand) > np.finfo(float).eps)
    if resolved < 5:
        raise PrecisionLossError(
            f"integrand underflows off the saddle ({resolved} live nodes of {n_nodes})"
        )
    mean = integrand.real.mean()
    if not mean > 0:
        raise PrecisionLossError(f"non-positive quadrature value {mean:.3e}")
    return k * _log_R(poly, r) - 2 * m * math.log(r) + math.log(mean)
