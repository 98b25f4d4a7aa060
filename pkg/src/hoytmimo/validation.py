"""Cross-module consistency checks bundled for the `validate` command.

Each check pits two independent computational routes against each other
(series vs closed form, Pfaffian vs determinant, kernel vs quadrature),
so a pass means the analytic machinery is self-consistent end to end.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import ensemble, linalg
from .ensemble import ChannelConfig, SeriesControl, correlation_fn, jpd, kernel_s
from .quadrature import adaptive_gauss_kronrod

__all__ = ["run_checks", "jpd_normalization_n2", "jpd_normalization_n3"]


def jpd_normalization_n2(
    cfg: ChannelConfig, q: float, ctrl: SeriesControl, points: int = 48, lam_hi: float = 28.0
) -> float:
    """2-D normalization integral over the ordered region, times 2!.

    Both variables run on u = sqrt(lambda) grids so the square-array edge
    and the |lambda_1 - lambda_2| crease stay away from the quadrature.
    """
    nodes, wts = leggauss(points)
    half = 0.5 * (nodes + 1.0)
    v = math.sqrt(lam_hi) * half
    wv = math.sqrt(lam_hi) * 0.5 * wts
    total = 0.0
    for i2 in range(points):
        u = v[i2] * half
        wu = v[i2] * 0.5 * wts
        row = sum(
            wu[i1] * 2.0 * u[i1] * jpd([u[i1] ** 2, v[i2] ** 2], cfg, q, ctrl)
            for i1 in range(points)
        )
        total += wv[i2] * 2.0 * v[i2] * row
    return 2.0 * total


def jpd_normalization_n3(
    cfg: ChannelConfig, q: float, ctrl: SeriesControl, points: int = 40, lam_hi: float = 30.0
) -> float:
    """3-D normalization integral over the ordered region, times 3!."""
    nodes, wts = leggauss(points)
    half = 0.5 * (nodes + 1.0)
    total = 0.0
    x3 = lam_hi * half
    w3 = lam_hi * 0.5 * wts
    for i3 in range(points):
        x2 = x3[i3] * half
        w2 = x3[i3] * 0.5 * wts
        for i2 in range(points):
            x1 = x2[i2] * half
            w1 = x2[i2] * 0.5 * wts
            row = sum(
                w1[i1] * jpd([x1[i1], x2[i2], x3[i3]], cfg, q, ctrl)
                for i1 in range(points)
            )
            total += w3[i3] * w2[i2] * row
    return 6.0 * total


def _check(name, value, tolerance, target=0.0, detail=""):
    err = abs(value - target)
    return {
        "name": name,
        "passed": bool(err <= tolerance),
        "value": value,
        "target": target,
        "tolerance": tolerance,
        "detail": detail,
    }


def run_checks(ctrl: SeriesControl, quick: bool) -> list[dict]:
    checks = []
    rng = np.random.default_rng(2024)

    # Pfaffian^2 = det on random antisymmetric matrices
    worst = 0.0
    dims = (2, 4, 6, 8) if quick else (2, 4, 6, 8, 10, 12)
    for dim in dims:
        b = rng.normal(size=(dim, dim))
        b = b - b.T
        pf = linalg.pfaffian(b)
        det = linalg.determinant(b).real
        worst = max(worst, abs(pf * pf - det) / abs(det))
    checks.append(_check("pfaffian_squared_equals_det", worst, 1e-10))

    # dual-representation equality of the antisymmetric kernel series
    worst = 0.0
    combos = [(0.5, 0.0), (1.0, 0.5)] if quick else [
        (0.2, -0.5), (0.2, 0.0), (0.5, 0.5), (1.0, 1.5), (3.0, 0.0),
    ]
    for tau, a in combos:
        v1 = ensemble.g_tau(0.7, 1.9, a, tau, ctrl, representation=1)
        v2 = ensemble.g_tau(0.7, 1.9, a, tau, ctrl, representation=2)
        worst = max(worst, abs(v1 - v2) / abs(v2))
    checks.append(_check("g_dual_representation_equality", worst, 1e-8))

    # JPD normalization, N = 2
    cfg2 = ChannelConfig(2, 2)
    qs = (0.5,) if quick else (0.0, 0.5, 1.0)
    for q in qs:
        total = jpd_normalization_n2(cfg2, q, ctrl)
        checks.append(_check(f"jpd_normalization_n2_q{q:g}", total, 1e-4, target=1.0))

    # JPD normalization, N = 3
    if not quick:
        cfg3 = ChannelConfig(3, 4)
        for q in (0.0, 0.5, 1.0):
            total = jpd_normalization_n3(cfg3, q, ctrl)
            checks.append(_check(f"jpd_normalization_n3_q{q:g}", total, 1e-3, target=1.0))

    # R2 vs 2 * JPD at N = 2
    worst = 0.0
    for _ in range(5):
        pts = rng.uniform(0.05, 8.0, size=2)
        r2 = correlation_fn(pts, cfg2, 0.5, ctrl)
        p2 = 2.0 * jpd(pts, cfg2, 0.5, ctrl)
        worst = max(worst, abs(r2 - p2) / abs(p2))
    checks.append(_check("r2_vs_jpd_n2", worst, 1e-4))

    # kernel integral = N
    taus = (0.7,) if quick else (0.0, 0.7, math.inf)
    sizes = ((2, 2), (3, 4)) if quick else ((2, 2), (3, 4), (4, 5), (5, 6))
    for nt, nr in sizes:
        cfg = ChannelConfig(nt, nr)
        for tau in taus:
            val, _ = adaptive_gauss_kronrod(
                lambda u: 2.0 * u * kernel_s(u * u, u * u, cfg, tau, ctrl),
                0.0,
                math.sqrt(45.0),
                rel_tol=1e-9,
            )
            checks.append(
                _check(f"kernel_s_integral_n{cfg.n}_tau{tau:g}", val, 1e-6, target=cfg.n)
            )
    return checks
