"""Analytic eigenvalue statistics of the Wishart crossover family.

The channel gram matrix of an N_t x N_r Hoyt-faded array has a joint
eigenvalue density that interpolates between the real-gaussian (q = 0) and
complex-gaussian (q = 1) Wishart ensembles as the crossover parameter tau
runs from 0 to infinity.  This module evaluates that joint density (as a
Pfaffian), the skew-orthogonal polynomial system behind it, the two-point
kernels S/A/B, the exact level density with both endpoint closed forms,
the large-N asymptotic density and n-point correlation functions.

Numerics: every infinite series accumulates log-signed terms that are
converted to floats only at addition time, with Kahan compensation, and
stops once three consecutive terms fall below ``rel_tol`` relative to the
running sum.  Weighted-polynomial tables are cached per evaluation point.

Scaling convention: analytic kernels live on x = lambda / (2 omega); all
public densities are reported per unit lambda.  For square arrays
(nt == nr, a = -1/2) the q = 0 density and the joint density diverge like
x^{-1/2} at the origin; evaluation there returns +inf, and quadratures
over these functions should substitute lambda = u^2 near 0 (the capacity
module does).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .specfun import log_gamma, log_upper_incomplete_gamma, weighted_laguerre_table

__all__ = [
    "ChannelConfig",
    "SeriesControl",
    "DensityCurve",
    "SeriesTruncationError",
    "NumericalConsistencyError",
    "crossover_tau",
    "g_zero",
    "g_tau",
    "omega_tau",
    "jpd",
    "skew_phi",
    "skew_psi",
    "kernel_s",
    "kernel_a",
    "kernel_b",
    "level_density",
    "level_density_lue",
    "level_density_loe",
    "density_mp",
    "mp_support",
    "correlation_fn",
    "density_curve",
]


class SeriesTruncationError(RuntimeError):
    """A series failed to converge within the term budget."""

    def __init__(self, what: str, tau: float, max_terms: int):
        self.tau = tau
        super().__init__(
            f"{what} did not converge within {max_terms} terms at tau={tau:g}; "
            f"for very small tau evaluate the q=0 closed form instead"
        )


class NumericalConsistencyError(RuntimeError):
    """An internal cross-check failed (e.g. negative correlation determinant)."""


@dataclass(frozen=True)
class ChannelConfig:
    """Antenna counts and the derived ensemble parameters."""

    nt: int
    nr: int
    omega: float = 1.0

    def __post_init__(self):
        if self.nt < 1 or self.nr < 1:
            raise ValueError("antenna counts must be positive integers")
        if not self.omega > 0.0:
            raise ValueError("omega must be positive")

    @property
    def n(self) -> int:
        return min(self.nt, self.nr)

    @property
    def m_dim(self) -> int:
        return max(self.nt, self.nr)

    @property
    def a(self) -> float:
        return (abs(self.nt - self.nr) - 1) / 2.0

    @property
    def c(self) -> int:
        return self.n % 2


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for all infinite series."""

    rel_tol: float = 1e-10
    max_terms: int = 20000

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_CONTROL = SeriesControl()


@dataclass
class DensityCurve:
    lambda_grid: np.ndarray
    values: np.ndarray
    config: ChannelConfig
    q: float


def crossover_tau(q: float) -> float:
    """tau from the Hoyt parameter: exp(-tau) = (1 - q^2)/(1 + q^2)."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    if q == 1.0:
        return math.inf
    return 0.0 - math.log((1.0 - q * q) / (1.0 + q * q)) + 0.0


class _Accumulator:
    """Kahan sum with the 3-consecutive-small-terms stopping rule."""

    def __init__(self, ctrl: SeriesControl, what: str, tau: float):
        self.ctrl = ctrl
        self.what = what
        self.tau = tau
        self.total = 0.0
        self._comp = 0.0
        self._small = 0
        self._terms = 0

    def add(self, term: float, count: int = 1) -> bool:
        self._terms += count
        if self._terms > self.ctrl.max_terms:
            raise SeriesTruncationError(self.what, self.tau, self.ctrl.max_terms)
        y = term - self._comp
        t = self.total + y
        self._comp = (t - self.total) - y
        self.total = t
        if abs(term) <= self.ctrl.rel_tol * abs(self.total):
            self._small += 1
        else:
            self._small = 0
        return self._small >= 3


# ---------------------------------------------------------------------------
# cached tables
#
# All series are built from the exponentially weighted polynomials
# wt_k(x) = e^{-x} L_k^{(2a+1)}(2x), which are polynomially bounded in k
# (so plain floats are safe); pure powers of x are reattached analytically.

_TABLE_BUCKET = 64


@lru_cache(maxsize=100000)
def _wt_cached(two_a_plus_1: float, x: float, size: int) -> np.ndarray:
    signs, logs = weighted_laguerre_table(size - 1, two_a_plus_1, 0.0, x)
    vals = signs.astype(np.float64) * np.exp(logs)
    vals.flags.writeable = False
    return vals


def _wt(a: float, x: float, nmax: int) -> np.ndarray:
    size = _TABLE_BUCKET
    while size < nmax + 1:
        size *= 2
    return _wt_cached(2.0 * a + 1.0, x, size)


@lru_cache(maxsize=4096)
def _coef_half(a: float, size: int) -> np.ndarray:
    # Gamma(j + 1/2) / Gamma(j + a + 3/2) for j = 0..size-1
    j = np.arange(size)
    out = np.exp([log_gamma(v + 0.5) - log_gamma(v + a + 1.5) for v in j])
    out.flags.writeable = False
    return out


@lru_cache(maxsize=4096)
def _coef_int(a: float, size: int) -> np.ndarray:
    # Gamma(j + 1) / Gamma(j + a + 2) for j = 0..size-1
    j = np.arange(size)
    out = np.exp([log_gamma(v + 1.0) - log_gamma(v + a + 2.0) for v in j])
    out.flags.writeable = False
    return out


def _coef(kind: str, a: float, nmax: int) -> np.ndarray:
    size = _TABLE_BUCKET
    while size < nmax + 1:
        size *= 2
    return (_coef_half if kind == "half" else _coef_int)(a, size)


def _inv_alpha_sq(a: float, nmax: int) -> np.ndarray:
    # 1/alpha_mu^2 = Gamma(mu+1)/Gamma(mu+2a+2)
    size = _TABLE_BUCKET
    while size < nmax + 1:
        size *= 2
    return _inv_alpha_sq_cached(a, size)


@lru_cache(maxsize=4096)
def _inv_alpha_sq_cached(a: float, size: int) -> np.ndarray:
    j = np.arange(size)
    out = np.exp([log_gamma(v + 1.0) - log_gamma(v + 2.0 * a + 2.0) for v in j])
    out.flags.writeable = False
    return out


def _log_alpha(a: float, j: int) -> float:
    return 0.5 * (log_gamma(j + 2.0 * a + 2.0) - log_gamma(j + 1.0))


# ---------------------------------------------------------------------------
# the antisymmetric two-point function and its one-point companion


def g_zero(x: float, y: float) -> float:
    """The tau = 0 limit: sgn(x - y)/2."""
    if x > y:
        return 0.5
    if x < y:
        return -0.5
    return 0.0


def _g_core(
    x: float,
    y: float,
    a: float,
    tau: float,
    ctrl: SeriesControl,
    representation: int = 2,
) -> float:
    """Weight-stripped series for the antisymmetric kernel.

    Returns the double sum over even/odd polynomial pairs built from the
    e^{-x}-weighted tables; the caller reattaches (x y)^{a+1}.  With
    representation=2 the outer loop runs over the odd index and each row is
    a finite sum; representation=1 enumerates the transposed (infinite-row)
    ordering.  The two differ only in truncation shape.
    """
    if x == y:
        return 0.0
    acc = _Accumulator(ctrl, "crossover kernel series", tau)
    decay = math.exp(-2.0 * tau)

    if representation == 2:
        mu = 0
        ux = 0.0
        uy = 0.0
        ehalf = 1.0  # e^{-2 nu tau} at nu = mu
        eodd = math.exp(-tau)  # e^{-(2 mu + 1) tau}
        while True:
            need = 2 * mu + 1
            wx = _wt(a, x, need)
            wy = _wt(a, y, need)
            ch = _coef("half", a, mu)
            ci = _coef("int", a, mu)
            # running inner sums U(x) = sum_{nu<=mu} e^{-2 nu tau} c_nu wt_{2nu}(x)
            ux += ehalf * ch[mu] * wx[2 * mu]
            uy += ehalf * ch[mu] * wy[2 * mu]
            row = 2.0 * eodd * ci[mu] * (ux * wy[2 * mu + 1] - wx[2 * mu + 1] * uy)
            if acc.add(row, count=mu + 1):
                return acc.total
            mu += 1
            ehalf *= decay
            eodd *= decay
    elif representation == 1:
        mu = 0
        ehalf = 1.0
        while True:
            need_mu = 2 * mu
            row_acc = 0.0
            nu = mu
            eodd = math.exp(-(2.0 * nu + 1.0) * tau)
            small = 0
            while True:
                need = max(need_mu, 2 * nu + 1)
                wx = _wt(a, x, need)
                wy = _wt(a, y, need)
                ch = _coef("half", a, mu)
                ci = _coef("int", a, nu)
                term = (
                    2.0
                    * ehalf
                    * eodd
                    * ch[mu]
                    * ci[nu]
                    * (wx[2 * mu] * wy[2 * nu + 1] - wx[2 * nu + 1] * wy[2 * mu])
                )
                acc._terms += 1
                if acc._terms > ctrl.max_terms:
                    raise SeriesTruncationError(
                        "crossover kernel series", tau, ctrl.max_terms
                    )
                row_acc += term
                ref = abs(acc.total + row_acc)
                if abs(term) <= ctrl.rel_tol * ref and ref > 0.0:
                    small += 1
                    if small >= 3:
                        break
                else:
                    small = 0
                nu += 1
                eodd *= decay
            if acc.add(row_acc, count=0):
                return acc.total
            mu += 1
            ehalf *= decay
    else:
        raise ValueError("representation must be 1 or 2")


def g_tau(
    x: float,
    y: float,
    a: float,
    tau: float,
    ctrl: SeriesControl = DEFAULT_CONTROL,
    representation: int = 2,
) -> float:
    """Antisymmetric two-point function of the crossover at tau > 0."""
    if x < 0.0 or y < 0.0:
        raise ValueError("arguments must be >= 0")
    if not tau > 0.0 or math.isinf(tau):
        raise ValueError("g_tau needs finite tau > 0 (tau = 0 has g_zero)")
    if x == 0.0 or y == 0.0:
        return 0.0  # carries w_{a+1} in each argument, a + 1 > 0
    core = _g_core(x, y, a, tau, ctrl, representation)
    if core == 0.0:
        return 0.0
    return math.exp((a + 1.0) * math.log(x * y)) * core


def _omega_core(x: float, a: float, tau: float, ctrl: SeriesControl) -> float:
    """Weight-stripped one-point companion series (tau > 0)."""
    acc = _Accumulator(ctrl, "one-point companion series", tau)
    decay = math.exp(-2.0 * tau)
    e = 1.0
    mu = 0
    while True:
        wx = _wt(a, x, 2 * mu)
        ch = _coef("half", a, mu)
        term = e * ch[mu] * wx[2 * mu]
        if acc.add(term):
            return acc.total
        mu += 1
        e *= decay


def omega_tau(
    x: float, a: float, tau: float, ctrl: SeriesControl = DEFAULT_CONTROL
) -> float:
    """One-point companion function; exactly 1/2 at tau = 0."""
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    if tau == 0.0:
        return 0.5
    if x < 0.0:
        raise ValueError("x must be >= 0")
    if x == 0.0:
        return 0.0  # carries the w_{a+1} weight, a + 1 > 0
    if math.isinf(tau):
        # only the mu = 0 term survives
        return math.exp((a + 1.0) * math.log(x)) * _coef("half", a, 0)[0] * _wt(a, x, 0)[0]
    return math.exp((a + 1.0) * math.log(x)) * _omega_core(x, a, tau, ctrl)


# ---------------------------------------------------------------------------
# joint eigenvalue density


def _log_c0(cfg: ChannelConfig) -> float:
    n, a = cfg.n, cfg.a
    out = 0.5 * n * math.log(math.pi) - n * math.log(2.0)
    for k in range(1, n + 1):
        out -= log_gamma(0.5 * k + 1.0) + log_gamma(0.5 * k + a + 0.5)
    return out


def _log_cinf(cfg: ChannelConfig) -> float:
    n, a = cfg.n, cfg.a
    out = 0.0
    for k in range(1, n + 1):
        out -= log_gamma(k + 1.0) + log_gamma(k + 2.0 * a + 1.0)
    return out


def _log_vandermonde(lams: np.ndarray) -> tuple[int, float]:
    sign = 1
    logabs = 0.0
    n = len(lams)
    for j in range(n):
        for k in range(j + 1, n):
            d = lams[j] - lams[k]
            if d == 0.0:
                return 0, -math.inf
            if d < 0.0:
                sign = -sign
            logabs += math.log(abs(d))
    return sign, logabs


def jpd(
    lams,
    cfg: ChannelConfig,
    q: float,
    ctrl: SeriesControl = DEFAULT_CONTROL,
) -> float:
    """Joint probability density of all N eigenvalues at Hoyt parameter q.

    Dispatches to the closed endpoint forms at q = 0 and q = 1; otherwise
    assembles the Pfaffian representation.  For square arrays the q = 0
    form diverges as any eigenvalue reaches 0 (returns +inf there).
    """
    lams = np.asarray(lams, dtype=float)
    n = cfg.n
    if lams.shape != (n,):
        raise ValueError(f"need exactly {n} eigenvalues, got shape {lams.shape}")
    if np.any(lams < 0.0):
        raise ValueError("eigenvalues must be >= 0")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    a = cfg.a
    omega = cfg.omega

    if q == 0.0:
        x = lams / (2.0 * omega)
        _, logdelta = _log_vandermonde(lams)
        if logdelta == -math.inf:
            return 0.0
        logp = _log_c0(cfg) - 0.5 * n * (n + 1) * math.log(2.0 * omega) + logdelta
        for xi in x:
            if xi == 0.0:
                if a < 0.0:
                    return math.inf
                if a > 0.0:
                    return 0.0
            else:
                logp += a * math.log(xi) - xi
        return math.exp(logp)

    if q == 1.0:
        y = lams / omega
        _, logdelta = _log_vandermonde(lams)
        if logdelta == -math.inf:
            return 0.0
        logp = _log_cinf(cfg) - n * n * math.log(omega) + 2.0 * logdelta
        for yi in y:
            if yi == 0.0:
                if 2.0 * a + 1.0 > 0.0:
                    return 0.0
            else:
                logp += (2.0 * a + 1.0) * math.log(yi) - yi
        return math.exp(logp)

    tau = crossover_tau(q)
    x = lams / (2.0 * omega)
    m = (n + 1) // 2
    dim = 2 * m
    f = np.zeros((dim, dim))
    for j in range(n):
        for k in range(j + 1, n):
            v = _g_core(x[j], x[k], a, tau, ctrl)
            f[j, k] = v
            f[k, j] = -v
    if dim == n + 1:
        for j in range(n):
            v = _omega_core(x[j], a, tau, ctrl)
            f[j, n] = v
            f[n, j] = -v
    pf_sign, pf_log = linalg.pfaffian_signed_log(f)
    if pf_sign == 0:
        return 0.0
    dl_sign, logdelta = _log_vandermonde(lams)
    if logdelta == -math.inf:
        return 0.0
    logp = (
        m * math.log(2.0)
        + 0.5 * n * (n - 1) * tau
        - 0.5 * n * (n + 1) * math.log(2.0 * omega)
        + _log_c0(cfg)
        + logdelta
        + pf_log
    )
    for xi in x:
        if xi == 0.0:
            # the weight and Pfaffian factors combine to x^{2a+1}
            if 2.0 * a + 1.0 > 0.0:
                return 0.0
        else:
            logp += (2.0 * a + 1.0) * math.log(xi) - xi
    val = pf_sign * dl_sign * math.exp(logp)
    return val


# ---------------------------------------------------------------------------
# skew-orthogonal polynomials (phi) and dual functions (psi)
#
# Internal, weight-stripped evaluators return the series multiplied by
# x^{-a} (phi family) or x^{-(a+1)} (psi/omega family); the public
# functions reattach the powers.  All formulas live on x = lambda/(2 omega).


def _phi_core(j: int, x: float, cfg: ChannelConfig, tau: float) -> float:
    """phi_j / x^a, built from e^{-x}-weighted tables."""
    n, a = cfg.n, cfg.a
    pref = math.exp((a + 0.5) * math.log(2.0))
    if n % 2 == 0:
        mu, r = divmod(j, 2)
        la = _log_alpha(a, 2 * mu)
        w = _wt(a, x, 2 * mu + 2)
        if r == 0:
            return pref * math.exp(2.0 * mu * tau - la) * w[2 * mu]
        t1 = (2 * mu + 1) * math.exp((2.0 * mu + 1.0) * tau - la) * w[2 * mu + 1]
        t2 = 0.0
        if mu > 0:
            t2 = (2 * mu + 2 * a + 1) * math.exp((2.0 * mu - 1.0) * tau - la) * w[2 * mu - 1]
        return pref * (t1 - t2)
    # odd N
    if j == n - 1:
        rn = math.exp(log_gamma(0.5 * (n + 1)) - log_gamma(0.5 * (n + 2 * a + 1)))
        w = _wt(a, x, n - 1)
        return 2.0 * math.exp((n - 1.0) * tau) * rn * w[n - 1]
    mu, r = divmod(j, 2)
    la = _log_alpha(a, 2 * mu + 1)
    w = _wt(a, x, 2 * mu + 2)
    if r == 0:
        return pref * math.exp((2.0 * mu + 1.0) * tau - la) * w[2 * mu + 1]
    t1 = (2 * mu + 2) * math.exp((2.0 * mu + 2.0) * tau - la) * w[2 * mu + 2]
    t2 = (2 * mu + 2 * a + 2) * math.exp(2.0 * mu * tau - la) * w[2 * mu]
    return pref * (t1 - t2)


def _psi_series(
    x: float,
    a: float,
    tau: float,
    ctrl: SeriesControl,
    start: int,
    coef_kind: str,
    parity_odd: bool,
) -> float:
    """sum_{nu >= start} e^{-(2 nu + p) tau} c_nu wt_{2 nu + p}(x) with p in {0,1}."""
    acc = _Accumulator(ctrl, "dual-function series", tau)
    decay = math.exp(-2.0 * tau)
    p = 1 if parity_odd else 0
    nu = start
    e = math.exp(-(2.0 * nu + p) * tau)
    while True:
        w = _wt(a, x, 2 * nu + p)
        cc = _coef(coef_kind, a, nu)
        if acc.add(e * cc[nu] * w[2 * nu + p]):
            return acc.total
        nu += 1
        e *= decay


def _psi_core_paired(
    j: int, x: float, cfg: ChannelConfig, tau: float, ctrl: SeriesControl
) -> float:
    """Paired-form psi_j / x^{a+1}, valid for every j >= 0.

    For odd N the paired pattern continues past the unpaired slot at
    j = N - 1 (the kernel tails need those indices); the unpaired dual
    itself lives in :func:`_psi_core`.
    """
    n, a = cfg.n, cfg.a
    pref = math.exp((a + 1.5) * math.log(2.0))
    if n % 2 == 0:
        mu, r = divmod(j, 2)
        la = _log_alpha(a, 2 * mu)
        if r == 1:
            w = _wt(a, x, 2 * mu)
            return pref * math.exp(-2.0 * mu * tau - la) * w[2 * mu]
        s = _psi_series(x, a, tau, ctrl, mu, "int", parity_odd=True)
        fac = 0.5 * math.exp(log_gamma(mu + a + 1.0) - log_gamma(mu + 1.0) - la)
        return -pref * fac * s
    mu, r = divmod(j, 2)
    la = _log_alpha(a, 2 * mu + 1)
    if r == 1:
        w = _wt(a, x, 2 * mu + 1)
        return pref * math.exp(-(2.0 * mu + 1.0) * tau - la) * w[2 * mu + 1]
    # finite sum over nu = 0..mu of even-order polynomials
    w = _wt(a, x, 2 * mu)
    ch = _coef("half", a, mu)
    nus = np.arange(mu + 1)
    es = np.exp(-2.0 * tau * nus)
    fac = 0.5 * math.exp(log_gamma(mu + a + 1.5) - log_gamma(mu + 1.5) - la)
    return pref * fac * float(np.dot(es * ch[: mu + 1], w[0 : 2 * mu + 1 : 2]))


def _psi_core(
    j: int, x: float, cfg: ChannelConfig, tau: float, ctrl: SeriesControl
) -> float:
    """psi_j / x^{a+1} for tau > 0, built from e^{-x}-weighted tables."""
    if cfg.n % 2 == 1 and j == cfg.n - 1:
        s = _psi_series(x, cfg.a, tau, ctrl, (cfg.n - 1) // 2, "int", parity_odd=True)
        return -2.0 * s
    return _psi_core_paired(j, x, cfg, tau, ctrl)


def _b_tail_core(
    x: float, y: float, cfg: ChannelConfig, tau: float, ctrl: SeriesControl
) -> float:
    """Weight-stripped B kernel for tau > 0, summed from its defining tail.

    Direct summation keeps B accurate at large tau, where the algebraic
    identity B = -G + (finite pair sum) would cancel e^{2N tau}-fold.
    Tail terms decay like e^{-4 mu tau}, and within each term the leading
    psi factors decay too, so three consecutive small terms end the sum.
    """
    acc = _Accumulator(ctrl, "B kernel tail", tau)
    mu = (cfg.n - cfg.c) // 2
    while True:
        term = _psi_core_paired(2 * mu + 1, x, cfg, tau, ctrl) * _psi_core_paired(
            2 * mu, y, cfg, tau, ctrl
        ) - _psi_core_paired(2 * mu, x, cfg, tau, ctrl) * _psi_core_paired(
            2 * mu + 1, y, cfg, tau, ctrl
        )
        if acc.add(term):
            break
        mu += 1
    total = acc.total
    if cfg.c:
        total += _psi_core(cfg.n - 1, x, cfg, tau, ctrl) * _omega_core(y, cfg.a, tau, ctrl)
        total -= _psi_core(cfg.n - 1, y, cfg, tau, ctrl) * _omega_core(x, cfg.a, tau, ctrl)
    return total


def _script_i(nn: int, x: float, a: float) -> float:
    """Half-range signed integral of the weighted polynomial of order nn.

    I(x) = (1/2) int_0^inf sgn(x - y) w_a(y) L_nn^{(2a+1)}(2y) dy, reduced
    to the finite incomplete-gamma sum.
    """
    even = nn % 2 == 0
    out = 0.0
    if even:
        out = 0.5 * math.exp(log_gamma(0.5 * nn + a + 1.0) - log_gamma(0.5 * nn + 1.0))
    lg_top = log_gamma(nn + 2.0 * a + 2.0)
    for mu in range(nn + 1):
        lg = (
            mu * math.log(2.0)
            + lg_top
            - log_gamma(mu + 2.0 * a + 2.0)
            - log_gamma(nn - mu + 1.0)
            - log_gamma(mu + 1.0)
            + log_upper_incomplete_gamma(mu + a + 1.0, x)
        )
        out -= (-1.0) ** mu * math.exp(lg)
    return out


def _psi_zero(j: int, x: float, cfg: ChannelConfig) -> float:
    """psi_j at tau = 0 via the incomplete-gamma closed forms (full weights)."""
    n, a = cfg.n, cfg.a
    pref_lo = math.exp((a + 0.5) * math.log(2.0))
    pref_hi = math.exp((a + 1.5) * math.log(2.0))
    wfac = 0.0 if x == 0.0 else math.exp((a + 1.0) * math.log(x))
    if n % 2 == 0:
        mu, r = divmod(j, 2)
        la = _log_alpha(a, 2 * mu)
        if r == 0:
            return pref_lo * math.exp(-la) * _script_i(2 * mu, x, a)
        w = _wt(a, x, 2 * mu)
        return pref_hi * math.exp(-la) * w[2 * mu] * wfac
    if j == n - 1:
        rn = math.exp(log_gamma(0.5 * (n + 1)) - log_gamma(0.5 * (n + 2 * a + 1)))
        return 2.0 * rn * _script_i(n - 1, x, a)
    mu, r = divmod(j, 2)
    la = _log_alpha(a, 2 * mu + 1)
    if r == 0:
        return pref_lo * math.exp(-la) * _script_i(2 * mu + 1, x, a)
    w = _wt(a, x, 2 * mu + 1)
    return pref_hi * math.exp(-la) * w[2 * mu + 1] * wfac


def _check_index(j: int, cfg: ChannelConfig) -> None:
    if j < 0:
        raise ValueError("index must be >= 0")
    if cfg.n % 2 == 1 and j > cfg.n - 1:
        raise ValueError(
            f"odd N = {cfg.n} defines indices 0..{cfg.n - 1} only (got {j})"
        )


def skew_phi(
    j: int, x: float, cfg: ChannelConfig, tau: float
) -> float:
    """Weighted skew-orthogonal polynomial phi_j at x = lambda/(2 omega)."""
    _check_index(j, cfg)
    if math.isinf(tau):
        raise ValueError("phi diverges at tau = inf; use the q = 1 closed forms")
    if x < 0.0:
        raise ValueError("x must be >= 0")
    if x == 0.0:
        if cfg.a < 0.0:
            return math.inf
        if cfg.a > 0.0:
            return 0.0
        return _phi_core(j, x, cfg, tau)
    return math.exp(cfg.a * math.log(x)) * _phi_core(j, x, cfg, tau)


def skew_psi(
    j: int,
    x: float,
    cfg: ChannelConfig,
    tau: float,
    ctrl: SeriesControl = DEFAULT_CONTROL,
) -> float:
    """Dual function psi_j at x = lambda/(2 omega); series truncated by ctrl."""
    _check_index(j, cfg)
    if math.isinf(tau):
        raise ValueError("psi vanishes at tau = inf; use the q = 1 closed forms")
    if x < 0.0:
        raise ValueError("x must be >= 0")
    if tau == 0.0:
        return _psi_zero(j, x, cfg)
    if x == 0.0:
        return 0.0  # psi carries the w_{a+1} weight
    return math.exp((cfg.a + 1.0) * math.log(x)) * _psi_core(j, x, cfg, tau, ctrl)


# ---------------------------------------------------------------------------
# two-point kernels


def _s_lue_core(x: float, y: float, cfg: ChannelConfig) -> float:
    """Finite Christoffel-Darboux-type sum, stripped of x^a y^{a+1}."""
    n, a = cfg.n, cfg.a
    wx = _wt(a, x, n - 1)
    wy = _wt(a, y, n - 1)
    inv = _inv_alpha_sq(a, n - 1)
    pref = math.exp((2.0 * a + 2.0) * math.log(2.0))
    return pref * float(np.dot(inv[:n], wx[:n] * wy[:n]))


def _s_corr_core(
    x: float, y: float, cfg: ChannelConfig, tau: float, ctrl: SeriesControl
) -> float:
    """Crossover correction to the S kernel, stripped of x^a y^{a+1}."""
    n, a, c = cfg.n, cfg.a, cfg.c
    wx = _wt(a, x, n - 1)
    if wx[n - 1] == 0.0:
        return 0.0
    rn = math.exp(log_gamma(0.5 * (n + 1)) - log_gamma(0.5 * (n + 2 * a + 1)))
    acc = _Accumulator(ctrl, "density correction series", tau)
    decay = math.exp(-2.0 * tau)
    nu = (n + c) // 2
    e = math.exp(-(2.0 * nu + 2.0 - n - c) * tau)
    half_c = 0.5 * c
    while True:
        k = 2 * nu + 1 - c
        wy = _wt(a, y, k)
        coef = math.exp(log_gamma(nu + 1.0 - half_c) - log_gamma(nu + a + 2.0 - half_c))
        if acc.add(e * coef * wy[k]):
            break
        nu += 1
        e *= decay
    return 2.0 * rn * wx[n - 1] * acc.total


def _d_zero(t: float, cfg: ChannelConfig) -> float:
    """Finite incomplete-gamma sum entering the q = 0 closed forms."""
    n, a, c = cfg.n, cfg.a, cfg.c
    lg_n1 = log_gamma(n + 1.0)
    total = 0.0
    for mu in range(n + 1):
        lg = (
            (mu + 2.0 * a + 1.0) * math.log(2.0)
            + math.log(n + 2.0 * a + 1.0)
            + lg_n1
            - log_gamma(mu + 1.0)
            - log_gamma(mu + 2.0 * a + 2.0)
            - log_gamma(n - mu + 1.0)
            + log_upper_incomplete_gamma(mu + a + 1.0, t)
        )
        total += (-1.0) ** mu * math.exp(lg)
    xi = math.exp(log_gamma(0.5 * (n + 1)) - log_gamma(0.5 * (n + 2 * a + 1)))
    eta = math.exp(
        2.0 * a * math.log(2.0)
        + lg_n1
        + log_gamma(0.5 * (n + 2 * a + 2))
        - log_gamma(n + 2.0 * a + 1.0)
        - log_gamma(0.5 * (n + 2))
    )
    return total + c * xi - (1 - c) * eta


def kernel_s(
    x: float,
    y: float,
    cfg: ChannelConfig,
    tau: float,
    ctrl: SeriesControl = DEFAULT_CONTROL,
) -> float:
    """Two-point kernel S_N(x, y) on the x = lambda/(2 omega) scale."""
    if x < 0.0 or y < 0.0:
        raise ValueError("arguments must be >= 0")
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    a = cfg.a

    def lo_pow(v: float) -> float:  # x^a with the genuine edge divergence
        if v == 0.0:
            if a < 0.0:
                return math.inf
            return 1.0 if a == 0.0 else 0.0
        return math.exp(a * math.log(v))

    def hi_pow(v: float) -> float:  # y^{a+1}, a + 1 > 0
        if v == 0.0:
            return 0.0
        return math.exp((a + 1.0) * math.log(v))

    if tau == 0.0:
        # S = x^a [y^{a+1} S_lue-core + wt_{N-1}(x) D(y)]: the whole bracket
        # shares the bare x^a edge factor
        wx = _wt(a, x, cfg.n - 1)
        bracket = hi_pow(y) * _s_lue_core(x, y, cfg) + wx[cfg.n - 1] * _d_zero(y, cfg)
        if x == 0.0 and y == 0.0:
            # diagonal origin: the LUE piece recombines to x^{2a+1}
            lue = _s_lue_core(x, y, cfg) if 2.0 * a + 1.0 == 0.0 else 0.0
            return lue + lo_pow(0.0) * wx[cfg.n - 1] * _d_zero(0.0, cfg)
        return lo_pow(x) * bracket
    core = _s_lue_core(x, y, cfg)
    if not math.isinf(tau):
        core += _s_corr_core(x, y, cfg, tau, ctrl)
    if x == y:
        if x == 0.0:
            # weights combine to x^{2a+1}: finite exactly for square arrays
            return core if 2.0 * a + 1.0 == 0.0 else 0.0
        return math.exp((2.0 * a + 1.0) * math.log(x)) * core
    return lo_pow(x) * hi_pow(y) * core


def kernel_a(
    x: float,
    y: float,
    cfg: ChannelConfig,
    tau: float,
    ctrl: SeriesControl = DEFAULT_CONTROL,
) -> float:
    """Antisymmetric kernel A_N(x, y): finite sum over phi pairs."""
    if math.isinf(tau):
        raise ValueError("A_N diverges as tau -> inf (q = 1 is determinantal)")
    n = cfg.n
    total = 0.0
    for mu in range((n - cfg.c) // 2):
        total += skew_phi(2 * mu + 1, x, cfg, tau) * skew_phi(2 * mu, y, cfg, tau)
        total -= skew_phi(2 * mu, x, cfg, tau) * skew_phi(2 * mu + 1, y, cfg, tau)
    return total


def kernel_b(
    x: float,
    y: float,
    cfg: ChannelConfig,
    tau: float,
    ctrl: SeriesControl = DEFAULT_CONTROL,
) -> float:
    """Kernel B_N(x, y): the infinite psi-pair tail plus parity term.

    For tau > 0 the defining tail is summed directly (stable at any tau).
    At tau = 0 it is assembled from the identity
    B = -G + (finite psi-pair sum) + parity term with the closed-form
    duals, where every piece is exact.
    """
    if math.isinf(tau):
        raise ValueError("B_N vanishes as tau -> inf (q = 1 is determinantal)")
    if x < 0.0 or y < 0.0:
        raise ValueError("arguments must be >= 0")
    n, a, c = cfg.n, cfg.a, cfg.c
    if tau > 0.0:
        if x == 0.0 or y == 0.0:
            return 0.0  # carries w_{a+1} in each argument
        pw = math.exp((a + 1.0) * (math.log(x) + math.log(y)))
        return pw * _b_tail_core(x, y, cfg, tau, ctrl)
    total = -g_zero(x, y)
    for mu in range((n - c) // 2):
        total += _psi_zero(2 * mu, x, cfg) * _psi_zero(2 * mu + 1, y, cfg)
        total -= _psi_zero(2 * mu + 1, x, cfg) * _psi_zero(2 * mu, y, cfg)
    if c:
        total += 0.5 * (_psi_zero(n - 1, x, cfg) - _psi_zero(n - 1, y, cfg))
    return total


# ---------------------------------------------------------------------------
# level density


def level_density_lue(lam: float, cfg: ChannelConfig) -> float:
    """Exact level density at q = 1 (complex-gaussian endpoint)."""
    if lam < 0.0:
        raise ValueError("lambda must be >= 0")
    x = lam / (2.0 * cfg.omega)
    a = cfg.a
    core = _s_lue_core(x, x, cfg)
    if x == 0.0:
        val = core if 2.0 * a + 1.0 == 0.0 else 0.0
    else:
        val = math.exp((2.0 * a + 1.0) * math.log(x)) * core
    return val / (2.0 * cfg.omega)


def level_density_loe(lam: float, cfg: ChannelConfig) -> float:
    """Exact level density at q = 0 (one-sided gaussian endpoint).

    Diverges like lambda^{-1/2} at the origin for square arrays.
    """
    if lam < 0.0:
        raise ValueError("lambda must be >= 0")
    return kernel_s(lam / (2.0 * cfg.omega), lam / (2.0 * cfg.omega), cfg, 0.0) / (
        2.0 * cfg.omega
    )


def level_density(
    lam: float,
    cfg: ChannelConfig,
    q: float,
    ctrl: SeriesControl = DEFAULT_CONTROL,
) -> float:
    """Exact level density R_1(lambda) at Hoyt parameter q in [0, 1]."""
    if lam < 0.0:
        raise ValueError("lambda must be >= 0")
    if q == 1.0:
        return level_density_lue(lam, cfg)
    if q == 0.0:
        return level_density_loe(lam, cfg)
    tau = crossover_tau(q)
    x = lam / (2.0 * cfg.omega)
    core = _s_lue_core(x, x, cfg) + _s_corr_core(x, x, cfg, tau, ctrl)
    if x == 0.0:
        val = core if 2.0 * cfg.a + 1.0 == 0.0 else 0.0
    else:
        val = math.exp((2.0 * cfg.a + 1.0) * math.log(x)) * core
    return val / (2.0 * cfg.omega)


def mp_support(cfg: ChannelConfig) -> tuple[float, float]:
    """Support edges of the large-N asymptotic density."""
    ratio = math.sqrt(cfg.n / cfg.m_dim)
    lo = cfg.m_dim * cfg.omega * (1.0 - ratio) ** 2
    hi = cfg.m_dim * cfg.omega * (1.0 + ratio) ** 2
    return lo, hi


def density_mp(lam: float, cfg: ChannelConfig) -> float:
    """Marchenko-Pastur-type asymptotic level density (large N)."""
    lo, hi = mp_support(cfg)
    if lam <= lo or lam >= hi:
        return 0.0
    return math.sqrt((hi - lam) * (lam - lo)) / (2.0 * math.pi * cfg.omega * lam)


def density_curve(
    cfg: ChannelConfig,
    q: float,
    grid,
    ctrl: SeriesControl = DEFAULT_CONTROL,
    marginal: bool = False,
) -> DensityCurve:
    """Evaluate the level density on a grid (marginal=True divides by N)."""
    grid = np.asarray(grid, dtype=float)
    vals = np.array([level_density(v, cfg, q, ctrl) for v in grid])
    if marginal:
        vals = vals / cfg.n
    return DensityCurve(lambda_grid=grid, values=vals, config=cfg, q=q)


# ---------------------------------------------------------------------------
# n-level correlation functions


def _correlation_stripped(points_x, cfg, tau, ctrl):
    """log-scale determinant data for 0 < tau < inf."""
    n_pts = len(points_x)
    n = cfg.n
    k_pairs = (n - cfg.c) // 2
    # balance the growing phi-block against the decaying psi-block
    bal = math.exp(-(n - 1.0) * tau)

    def s_tilde(u, v):
        return _s_lue_core(u, v, cfg) + _s_corr_core(u, v, cfg, tau, ctrl)

    def a_tilde(u, v):
        tot = 0.0
        for mu in range(k_pairs):
            tot += _phi_core(2 * mu + 1, u, cfg, tau) * _phi_core(2 * mu, v, cfg, tau)
            tot -= _phi_core(2 * mu, u, cfg, tau) * _phi_core(2 * mu + 1, v, cfg, tau)
        return tot

    def b_tilde(u, v):
        return _b_tail_core(u, v, cfg, tau, ctrl)

    mat = np.zeros((2 * n_pts, 2 * n_pts))
    for j in range(n_pts):
        for k in range(n_pts):
            xj, xk = points_x[j], points_x[k]
            mat[2 * j, 2 * k] = s_tilde(xj, xk)
            mat[2 * j + 1, 2 * k + 1] = s_tilde(xk, xj)
            if k >= j:
                av = a_tilde(xj, xk) * bal
                bv = b_tilde(xj, xk) / bal
                mat[2 * j, 2 * k + 1] = av
                mat[2 * j + 1, 2 * k] = bv
                if k > j:
                    mat[2 * k, 2 * j + 1] = -av
                    mat[2 * k + 1, 2 * j] = -bv
    return mat


def correlation_fn(
    points,
    cfg: ChannelConfig,
    q: float,
    ctrl: SeriesControl = DEFAULT_CONTROL,
) -> float:
    """n-level correlation function R_n(lambda_1..lambda_n) at parameter q.

    Computed as the nonnegative square root of the ordinary determinant of
    the doubled kernel matrix; a determinant negative beyond tolerance
    raises NumericalConsistencyError rather than being clamped.
    """
    pts = np.asarray(points, dtype=float)
    n_pts = len(pts)
    if not 1 <= n_pts <= cfg.n:
        raise ValueError(f"number of points must lie in 1..{cfg.n}")
    if np.any(pts < 0.0):
        raise ValueError("points must be >= 0")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    omega, a = cfg.omega, cfg.a
    x = pts / (2.0 * omega)

    if q == 1.0:
        mat = np.empty((n_pts, n_pts))
        for j in range(n_pts):
            for k in range(n_pts):
                mat[j, k] = _s_lue_core(x[j], x[k], cfg)
        phase, logdet = linalg.determinant_signed_log(mat)
        sign = 0 if phase == 0.0 else int(round(phase.real))
        log_scale = 0.0
        for xi in x:
            if xi == 0.0:
                if 2.0 * a + 1.0 > 0.0:
                    return 0.0
            else:
                log_scale += (2.0 * a + 1.0) * math.log(xi)
        return _signed_sqrt_det(sign, logdet, mat, log_scale - n_pts * math.log(2.0 * omega), square=False)

    if q == 0.0:
        mat = np.zeros((2 * n_pts, 2 * n_pts))
        for j in range(n_pts):
            for k in range(n_pts):
                mat[2 * j, 2 * k] = kernel_s(x[j], x[k], cfg, 0.0)
                mat[2 * j + 1, 2 * k + 1] = kernel_s(x[k], x[j], cfg, 0.0)
                if k >= j:
                    av = kernel_a(x[j], x[k], cfg, 0.0)
                    bv = kernel_b(x[j], x[k], cfg, 0.0)
                    mat[2 * j, 2 * k + 1] = av
                    mat[2 * j + 1, 2 * k] = bv
                    if k > j:
                        mat[2 * k, 2 * j + 1] = -av
                        mat[2 * k + 1, 2 * j] = -bv
        phase, logdet = linalg.determinant_signed_log(mat)
        sign = 0 if phase == 0.0 else int(round(phase.real))
        return _signed_sqrt_det(sign, logdet, mat, -n_pts * math.log(2.0 * omega), square=True)

    tau = crossover_tau(q)
    mat = _correlation_stripped(x, cfg, tau, ctrl)
    phase, logdet = linalg.determinant_signed_log(mat)
    sign = 0 if phase == 0.0 else int(round(phase.real))
    log_scale = -n_pts * math.log(2.0 * omega)
    for xi in x:
        if xi == 0.0:
            if 2.0 * a + 1.0 > 0.0:
                return 0.0
        else:
            log_scale += (2.0 * a + 1.0) * math.log(xi)
    return _signed_sqrt_det(sign, logdet, mat, log_scale, square=True)


def _signed_sqrt_det(
    sign: int, logdet: float, mat: np.ndarray, log_scale: float, square: bool
) -> float:
    """Finish a correlation evaluation from (sign, log|det|) data."""
    if sign == 0:
        return 0.0
    if square:
        if sign < 0:
            # negative determinant: tolerate only round-off magnitudes,
            # judged against the Hadamard bound of the matrix
            norms = np.sqrt(np.sum(mat * mat, axis=1))
            log_had = float(np.sum(np.log(np.maximum(norms, 1e-300))))
            if logdet > log_had + math.log(1e-9):
                raise NumericalConsistencyError(
                    "correlation determinant is negative beyond tolerance"
                )
            return 0.0
        return math.exp(0.5 * logdet + log_scale)
    if sign < 0:
        raise NumericalConsistencyError("correlation determinant is negative")
    return math.exp(logdet + log_scale)
