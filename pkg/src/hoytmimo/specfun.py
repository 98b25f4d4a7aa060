"""Scalar special functions used by the analytic eigenvalue formulas.

Everything here is pure and thread-safe.  The weighted Laguerre evaluators
return :class:`LogSigned` values so that high orders (n up to a few 10^4)
never overflow; conversion to plain floats happens only at summation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LogSigned",
    "log_gamma",
    "laguerre",
    "laguerre_weighted",
    "weighted_laguerre_table",
    "upper_incomplete_gamma",
    "log_upper_incomplete_gamma",
    "bessel_i0",
    "bessel_i0e",
    "erfc",
]


@dataclass(frozen=True)
class LogSigned:
    """A real number stored as sign and natural log of magnitude.

    ``sign`` is -1, 0 or +1; ``log`` is ignored when sign == 0.
    Products multiply signs and add logs, which is the whole point:
    quantities like x^b e^{-x} L_n(2x) stay representable for any n, x
    in the supported range even when the factors over/underflow floats.
    """

    sign: int
    log: float

    @staticmethod
    def from_value(v: float) -> "LogSigned":
        if v == 0.0:
            return LogSigned(0, 0.0)
        return LogSigned(1 if v > 0 else -1, math.log(abs(v)))

    def __mul__(self, other: "LogSigned") -> "LogSigned":
        s = self.sign * other.sign
        if s == 0:
            return LogSigned(0, 0.0)
        return LogSigned(s, self.log + other.log)

    def scaled(self, log_factor: float) -> "LogSigned":
        """Multiply by exp(log_factor) without leaving log space."""
        if self.sign == 0:
            return self
        return LogSigned(self.sign, self.log + log_factor)

    def value(self) -> float:
        """Convert to a plain float; may overflow to +/-inf by design."""
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log)
        except OverflowError:
            return self.sign * math.inf


# Lanczos approximation of ln Gamma, g = 607/128, 15 coefficients
# (Godfrey's tabulation; about 1e-15 relative accuracy on the real axis).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)

_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for x > 0."""
    if not x > 0.0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    if x < 0.5:
        # reflection keeps the Lanczos sum on its accurate branch
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    xm1 = x - 1.0
    s = _LANCZOS_C[0]
    for k in range(1, 15):
        s += _LANCZOS_C[k] / (xm1 + k)
    t = xm1 + _LANCZOS_G + 0.5
    return (xm1 + 0.5) * math.log(t) - t + _LN_SQRT_2PI + math.log(s)


def laguerre(n: int, alpha: float, x: float) -> float:
    """Associated Laguerre polynomial L_n^{(alpha)}(x), upward recurrence."""
    if n < 0:
        raise ValueError("laguerre: n must be a nonnegative integer")
    if alpha <= -1.0:
        raise ValueError("laguerre: alpha must be > -1")
    if n == 0:
        return 1.0
    lkm1 = 1.0
    lk = 1.0 + alpha - x
    for k in range(1, n):
        lkm1, lk = lk, ((2 * k + 1 + alpha - x) * lk - (k + alpha) * lkm1) / (k + 1)
    return lk


_RESCALE_LIMIT = 1e270


def weighted_laguerre_table(
    nmax: int, alpha: float, weight_order: float, x: float
) -> tuple[np.ndarray, np.ndarray]:
    """All of w_b(x) * L_k^{(alpha)}(2x) for k = 0..nmax in log-signed form.

    Returns (signs, logs) arrays of length nmax+1.  The recurrence runs on
    values rescaled whenever they pass 1e270, so the table is finite for
    any order; the weight w_b(x) = x^b e^{-x} is folded in at the end.
    """
    if nmax < 0:
        raise ValueError("weighted_laguerre_table: nmax must be >= 0")
    if x < 0.0:
        raise ValueError("weighted_laguerre_table: x must be >= 0")
    signs = np.zeros(nmax + 1, dtype=np.int8)
    logs = np.full(nmax + 1, -math.inf)

    if x == 0.0 and weight_order > 0.0:
        return signs, logs  # exact zeros: x^b = 0

    if x == 0.0:
        log_w = 0.0  # w_0(0) = 1
    elif weight_order == 0.0:
        log_w = -x
    else:
        log_w = weight_order * math.log(x) - x
    z = 2.0 * x

    offset = 0.0

    def record(k: int, v: float) -> None:
        if v != 0.0:
            signs[k] = 1 if v > 0.0 else -1
            logs[k] = math.log(abs(v)) + offset + log_w

    vkm1 = 1.0
    record(0, vkm1)
    if nmax == 0:
        return signs, logs
    vk = 1.0 + alpha - z
    record(1, vk)
    for k in range(1, nmax):
        vkp1 = ((2 * k + 1 + alpha - z) * vk - (k + alpha) * vkm1) / (k + 1)
        m = max(abs(vk), abs(vkp1))
        if m > _RESCALE_LIMIT:
            s = math.log(m)
            f = math.exp(-s)
            vk *= f
            vkp1 *= f
            offset += s
        vkm1, vk = vk, vkp1
        record(k + 1, vk)
    signs.flags.writeable = False
    logs.flags.writeable = False
    return signs, logs


def laguerre_weighted(n: int, alpha: float, weight_order: float, x: float) -> LogSigned:
    """w_b(x) * L_n^{(alpha)}(2x) as a LogSigned value (overflow-safe)."""
    signs, logs = weighted_laguerre_table(n, alpha, weight_order, x)
    return LogSigned(int(signs[n]), float(logs[n]))


def erfc(x: float) -> float:
    """Complementary error function on the real line."""
    if x < 0.0:
        return 2.0 - erfc(-x)
    if x < 1.5:
        return 1.0 - _erf_series(x)
    # erfc(x) = exp(-x^2)/sqrt(pi) * F(x) with F from the continued fraction
    return math.exp(-x * x - 0.5 * math.log(math.pi) + math.log(_erfc_cf_factor(x)))


def _erf_series(x: float) -> float:
    # Taylor series of erf; used only for |x| < 1.5 where it is well behaved.
    t = x
    s = x
    xx = x * x
    k = 0
    while True:
        k += 1
        t *= -xx / k
        term = t / (2 * k + 1)
        s += term
        if abs(term) <= 1e-18 * abs(s):
            return s * 2.0 / math.sqrt(math.pi)


def _erfc_cf_factor(x: float) -> float:
    """F(x) = erfc(x) * exp(x^2) * sqrt(pi), continued fraction for x >= 1.5.

    F(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))), modified Lentz.
    """
    tiny = 1e-300
    f = x if x != 0.0 else tiny
    c = f
    d = 0.0
    for k in range(1, 300):
        ak = 0.5 * k
        d = x + ak * d
        if d == 0.0:
            d = tiny
        c = x + ak / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            return 1.0 / f
    raise RuntimeError("erfc continued fraction failed to converge")


def log_upper_incomplete_gamma(s: float, x: float) -> float:
    """ln of the upper incomplete gamma Gamma(s, x), s a positive

    integer or half-integer, x >= 0.  Runs the upward recurrence
    Gamma(s+1, x) = s Gamma(s, x) + x^s e^{-x} entirely in log space so
    large s and x never overflow.
    """
    two_s = 2.0 * s
    if s <= 0.0 or abs(two_s - round(two_s)) > 1e-12:
        raise ValueError(
            f"upper incomplete gamma: s must be a positive integer or "
            f"half-integer, got {s}"
        )
    if x < 0.0:
        raise ValueError("upper incomplete gamma: x must be >= 0")
    if x == 0.0:
        return log_gamma(s)

    log_x = math.log(x)
    half = round(two_s) % 2 == 1
    if half:
        base = 0.5
        # Gamma(1/2, x) = sqrt(pi) erfc(sqrt(x)); keep it in logs so the
        # erfc underflow at large x never bites
        rx = math.sqrt(x)
        if rx < 1.5:
            cur = 0.5 * math.log(math.pi) + math.log(erfc(rx))
        else:
            cur = 0.5 * math.log(math.pi) + (
                -x - 0.5 * math.log(math.pi) + math.log(_erfc_cf_factor(rx))
            )
    else:
        base = 1.0
        cur = -x  # Gamma(1, x) = e^{-x}
    k = base
    while k < s - 0.5:
        cur = _logaddexp(math.log(k) + cur, k * log_x - x)
        k += 1.0
    return cur


def _logaddexp(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    if b == -math.inf:
        return a
    return a + math.log1p(math.exp(b - a))


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma Gamma(s, x) for positive (half-)integer s."""
    return math.exp(log_upper_incomplete_gamma(s, x))


_I0_SERIES_CUTOFF = 30.0


def bessel_i0e(x: float) -> float:
    """Exponentially scaled modified Bessel function e^{-x} I_0(x), x >= 0."""
    if x < 0.0:
        raise ValueError("bessel_i0e: x must be >= 0")
    if x < _I0_SERIES_CUTOFF:
        # power series; all terms positive, no cancellation
        t = 1.0
        s = 1.0
        q = 0.25 * x * x
        k = 0
        while True:
            k += 1
            t *= q / (k * k)
            s += t
            if t < 1e-18 * s:
                break
        return s * math.exp(-x)
    # asymptotic series: I_0(x) ~ e^x/sqrt(2 pi x) sum_k ((2k-1)!!)^2/(k! (8x)^k)
    t = 1.0
    s = 1.0
    for k in range(1, 40):
        t_next = t * (2 * k - 1) ** 2 / (8.0 * x * k)
        if t_next >= t:
            break  # past the smallest term; stop before divergence
        t = t_next
        s += t
        if t < 1e-18 * s:
            break
    return s / math.sqrt(2.0 * math.pi * x)


def bessel_i0(x: float) -> float:
    """Modified Bessel function I_0(x); saturates to +inf past ~709."""
    if x < 0.0:
        raise ValueError("bessel_i0: x must be >= 0")
    scaled = bessel_i0e(x)
    try:
        return scaled * math.exp(x)
    except OverflowError:
        return math.inf
