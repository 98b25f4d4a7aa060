"""Monte Carlo channel simulator: the stochastic cross-check for every
analytic result.

Reproducibility contract: the sample index space is split into fixed
chunks of ``CHUNK_SAMPLES``; chunk k draws from an independent SplitMix64
substream seeded by ``derive_stream_seed(seed, k)``.  Within a chunk the
gaussian stream is consumed sample by sample: first nr*nt values fill the
real part row-major, the next nr*nt the imaginary part.  Results are
therefore bit-identical for a given seed regardless of how chunks are
scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import ChannelConfig, mp_support
from .fading import params_from_q
from .linalg import gram, hermitian_eigenvalues_batch
from .rng import GaussianStream, SplitMix64, derive_stream_seed, gaussian_block

__all__ = [
    "CHUNK_SAMPLES",
    "Histogram",
    "SpectralSample",
    "sample_channel",
    "sample_spectrum",
    "empirical_density",
    "mc_capacity",
]

CHUNK_SAMPLES = 8192

_CLAMP_FACTOR = 1e-10


@dataclass
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    total_samples: int
    normalized_values: np.ndarray  # marginal-density estimate per bin
    normalized_stderr: np.ndarray  # binomial standard error of the estimate
    eigenvalue_sum: float  # over all draws, range-independent


@dataclass
class SpectralSample:
    eigenvalues: np.ndarray  # ascending, length N, clamped at 0


def sample_channel(cfg: ChannelConfig, q: float, rng: GaussianStream) -> np.ndarray:
    """One nr x nt channel draw H = H_X + j H_Y from the given stream."""
    p = params_from_q(q, cfg.omega)
    k = cfg.nr * cfg.nt
    g = rng.next_gaussians(2 * k)
    hx = g[:k].reshape(cfg.nr, cfg.nt)
    hy = g[k:].reshape(cfg.nr, cfg.nt)
    return math.sqrt(p.sigma_x2) * hx + 1j * math.sqrt(p.sigma_y2) * hy


def _clamp_spectrum(vals: np.ndarray, scale: float) -> np.ndarray:
    floor = -_CLAMP_FACTOR * max(scale, 1e-300)
    if np.any(vals < floor):
        raise RuntimeError(
            f"eigenvalue below the PSD round-off floor ({vals.min()} < {floor}); "
            "this indicates a solver fault"
        )
    return np.maximum(vals, 0.0)


def sample_spectrum(cfg: ChannelConfig, q: float, rng: GaussianStream) -> SpectralSample:
    """Eigenvalues of the gram matrix of one channel draw."""
    h = sample_channel(cfg, q, rng)
    w = gram(h, cfg.nr, cfg.nt)
    vals = np.sort(np.linalg.eigvalsh(w))
    return SpectralSample(eigenvalues=_clamp_spectrum(vals, float(np.trace(w).real)))


def _spectra_chunks(cfg: ChannelConfig, q: float, samples: int, seed: int):
    """Yield (chunk_eigenvalues,) arrays of shape (m, N), deterministically."""
    p = params_from_q(q, cfg.omega)
    sx = math.sqrt(p.sigma_x2)
    sy = math.sqrt(p.sigma_y2)
    nr, nt = cfg.nr, cfg.nt
    k = nr * nt
    done = 0
    chunk_index = 0
    while done < samples:
        m = min(CHUNK_SAMPLES, samples - done)
        stream = SplitMix64(derive_stream_seed(seed, chunk_index))
        g = gaussian_block(stream, m * 2 * k).reshape(m, 2 * k)
        h = sx * g[:, :k].reshape(m, nr, nt) + 1j * sy * g[:, k:].reshape(m, nr, nt)
        if nr >= nt:
            w = np.einsum("sij,sik->sjk", h.conj(), h)
        else:
            w = np.einsum("sij,skj->sik", h, h.conj())
        vals = hermitian_eigenvalues_batch(w)
        scale = float(np.max(np.abs(vals))) if vals.size else 1.0
        yield _clamp_spectrum(vals, scale)
        done += m
        chunk_index += 1


def empirical_density(
    cfg: ChannelConfig,
    q: float,
    samples: int,
    bins: int,
    value_range: tuple[float, float] | None = None,
    seed: int = 0,
) -> Histogram:
    """Histogram of all N*samples eigenvalues as a marginal-density estimate.

    Default range is [0, 1.2 * upper MP edge].  Deterministic given seed.
    """
    if samples < 1 or bins < 1:
        raise ValueError("samples and bins must be >= 1")
    if value_range is None:
        value_range = (0.0, 1.2 * mp_support(cfg)[1])
    edges = np.linspace(value_range[0], value_range[1], bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    eigen_sum = 0.0
    for vals in _spectra_chunks(cfg, q, samples, seed):
        c, _ = np.histogram(vals.ravel(), bins=edges)
        counts += c
        eigen_sum += float(np.sum(vals))
    n_eigs = samples * cfg.n
    width = np.diff(edges)
    frac = counts / n_eigs
    density = frac / width
    stderr = np.sqrt(frac * (1.0 - frac) / n_eigs) / width
    return Histogram(
        bin_edges=edges,
        counts=counts,
        total_samples=samples,
        normalized_values=density,
        normalized_stderr=stderr,
        eigenvalue_sum=eigen_sum,
    )


def mc_capacity(
    cfg: ChannelConfig,
    q: float,
    power: float,
    samples: int,
    seed: int = 0,
) -> tuple[float, float]:
    """Monte Carlo ergodic capacity (mean, standard error), power linear."""
    if not power > 0.0:
        raise ValueError("power must be positive (linear units)")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    snr = power / cfg.nt
    total = 0.0
    total_sq = 0.0
    for vals in _spectra_chunks(cfg, q, samples, seed):
        cap = np.sum(np.log2(1.0 + snr * vals), axis=1)
        total += float(np.sum(cap))
        total_sq += float(np.sum(cap * cap))
    mean = total / samples
    var = max(0.0, total_sq / samples - mean * mean)
    stderr = math.sqrt(var / samples)
    return mean, stderr
