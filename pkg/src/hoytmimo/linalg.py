"""Minimal dense linear algebra on numpy arrays.

Complex rectangular matrices are plain ``numpy.ndarray`` (complex128);
antisymmetric matrices are real square ndarrays with B^T = -B.  The
eigensolver is a cyclic Jacobi on the 2Nx2N real embedding of a Hermitian
matrix: for the small N used here (<= 64) simplicity and reproducibility
matter more than speed.  The Monte Carlo hot path uses the batched
``numpy.linalg.eigvalsh`` wrapper below; a test pins both to each other.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "gram",
    "hermitian_eigenvalues",
    "hermitian_eigenvalues_batch",
    "pfaffian",
    "determinant",
]


def gram(h: np.ndarray, nr: int, nt: int) -> np.ndarray:
    """H^dag H if nr >= nt else H H^dag; N x N Hermitian PSD, N = min."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (nr, nt):
        raise ValueError(f"channel matrix shape {h.shape} != ({nr}, {nt})")
    if nr >= nt:
        w = h.conj().T @ h
    else:
        w = h @ h.conj().T
    # symmetrize exactly so gram output is Hermitian to the last bit
    return 0.5 * (w + w.conj().T)


def hermitian_eigenvalues(w: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix via real-embedded Jacobi.

    The N x N Hermitian W maps to the 2N x 2N real symmetric
    [[Re W, -Im W], [Im W, Re W]] whose spectrum is that of W doubled;
    cyclic Jacobi sweeps run until the off-diagonal norm is <= tol * ||W||.
    """
    w = np.asarray(w, dtype=complex)
    n = w.shape[0]
    if w.shape != (n, n):
        raise ValueError("matrix must be square")
    scale = float(np.max(np.abs(w))) if n else 0.0
    if np.max(np.abs(w - w.conj().T)) > 1e-12 * max(1.0, scale):
        raise ValueError("matrix is not Hermitian within 1e-12")
    w = 0.5 * (w + w.conj().T)
    if scale == 0.0:
        return np.zeros(n)

    s = np.block([[w.real, -w.imag], [w.imag, w.real]])
    m = 2 * n
    fro = math.sqrt(float(np.sum(s * s)))
    thresh = tol * max(fro, 1e-300)
    for _ in range(60):
        od = s.copy()
        np.fill_diagonal(od, 0.0)
        off = math.sqrt(float(np.sum(od * od)))
        if off <= thresh:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                spq = s[p, q]
                if abs(spq) <= 1e-300:
                    continue
                theta = (s[q, q] - s[p, p]) / (2.0 * spq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                rp = s[p, :].copy()
                rq = s[q, :].copy()
                s[p, :] = c * rp - sn * rq
                s[q, :] = sn * rp + c * rq
                cp = s[:, p].copy()
                cq = s[:, q].copy()
                s[:, p] = c * cp - sn * cq
                s[:, q] = sn * cp + c * cq
    else:
        raise RuntimeError("Jacobi eigensolver failed to converge")
    vals = np.sort(np.diag(s))
    return vals[0::2]  # doubled spectrum: keep one of each adjacent pair


def hermitian_eigenvalues_batch(ws: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues for a stack of Hermitian matrices (LAPACK)."""
    return np.linalg.eigvalsh(ws)


def _validate_antisymmetric(b: np.ndarray) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if b.shape != (n, n):
        raise ValueError("matrix must be square")
    if n % 2 != 0:
        raise ValueError("pfaffian needs even dimension")
    scale = float(np.max(np.abs(b))) if n else 0.0
    if n and np.max(np.abs(b + b.T)) > 1e-12 * max(1.0, scale):
        raise ValueError("matrix is not antisymmetric within 1e-12")
    return 0.5 * (b - b.T)


def pfaffian_signed_log(b: np.ndarray) -> tuple[int, float]:
    """(sign, log|Pf|) by Parlett-Reid elimination with pivoting.

    Returning logs keeps the value usable when the Pfaffian itself would
    under- or overflow (large matrices, strongly decaying entries).
    """
    a = _validate_antisymmetric(b).copy()
    n = a.shape[0]
    if n == 0:
        return 1, 0.0
    sign = 1
    logabs = 0.0
    for k in range(0, n - 1, 2):
        col = np.abs(a[k + 1 :, k])
        kp = k + 1 + int(np.argmax(col))
        piv = a[kp, k]
        if piv == 0.0:
            return 0, -math.inf
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            sign = -sign
        piv = a[k, k + 1]
        sign *= 1 if piv > 0 else -1
        logabs += math.log(abs(piv))
        if k + 2 < n:
            t = a[k, k + 2 :] / piv
            u = a[k + 2 :, k + 1]
            a[k + 2 :, k + 2 :] += np.outer(t, u) - np.outer(u, t)
    return sign, logabs


def pfaffian(b: np.ndarray) -> float:
    """Pfaffian of a real antisymmetric even-dimensional matrix."""
    a = _validate_antisymmetric(b)
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n == 2:
        return float(a[0, 1])
    if n == 4:
        return float(
            a[0, 1] * a[2, 3] - a[0, 2] * a[1, 3] + a[0, 3] * a[1, 2]
        )
    sign, logabs = pfaffian_signed_log(a)
    if sign == 0:
        return 0.0
    return sign * math.exp(logabs)


def determinant_signed_log(m: np.ndarray) -> tuple[complex, float]:
    """(phase, log|det|) via LU with partial pivoting; phase is 0 if singular."""
    a = np.asarray(m, dtype=complex).copy()
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    phase = 1.0 + 0.0j
    logabs = 0.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0.0:
            return 0.0j, -math.inf
        if p != k:
            a[[k, p], :] = a[[p, k], :]
            phase = -phase
        piv = a[k, k]
        phase *= piv / abs(piv)
        logabs += math.log(abs(piv))
        if k + 1 < n:
            f = a[k + 1 :, k] / piv
            a[k + 1 :, k + 1 :] -= np.outer(f, a[k, k + 1 :])
    return phase, logabs


def determinant(m: np.ndarray) -> complex:
    """Determinant of a square complex matrix (LU, partial pivoting)."""
    phase, logabs = determinant_signed_log(m)
    if phase == 0.0:
        return 0.0j
    return phase * math.exp(logabs)
