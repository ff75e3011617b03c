"""Monte Carlo estimates of average BER, outage and ergodic capacity.

SNRs are drawn in fixed-size batches.  Batch ``k`` uses its own Philox
stream seeded with ``SeedSequence(seed, spawn_key=(k,))``, so any batch can be
regenerated independently and batches can run on worker threads.  Per-batch
(count, mean, M2) moments are combined by pairwise merging over the batch
index, which makes the result independent of completion order and of the
number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .channels import ChannelModel
from .exceptions import DomainError
from .modulation import BinaryModulation, instantaneous_ber

__all__ = [
    "GENERATOR_NAME",
    "McConfig",
    "McEstimate",
    "sample_snr",
    "estimate_avg_ber",
    "estimate_capacity",
    "estimate_comp_outage",
]

GENERATOR_NAME = "numpy Philox4x64-10; SeedSequence spawn_key per batch; Marsaglia-Tsang gamma"
DEFAULT_BATCH = 1 << 16
LN2 = math.log(2.0)


@dataclass(frozen=True)
class McConfig:
    sample_count: int
    seed: int
    channel: ChannelModel
    mod: BinaryModulation | None = None
    batch_size: int = DEFAULT_BATCH
    workers: int = 1

    def __post_init__(self):
        if int(self.sample_count) != self.sample_count or self.sample_count < 1:
            raise DomainError(f"sample_count must be a positive integer, got {self.sample_count}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.batch_size < 1 or self.workers < 1:
            raise DomainError("batch_size and workers must be positive")

    @property
    def batch_count(self) -> int:
        return -(-int(self.sample_count) // int(self.batch_size))


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with standard error ``std / sqrt(n)`` (NaN when n = 1)."""

    mean: float
    std_error: float
    n: int
    seed: int | None = None
    generator: str = GENERATOR_NAME

    def contains(self, value: float, k: float = 3.0) -> bool:
        return abs(self.mean - value) <= k * self.std_error

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "generator": self.generator,
            "n": self.n,
            "mean": self.mean,
            "std_error": self.std_error,
        }


def _batch_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(k,))))


def _batch_sizes(cfg: McConfig):
    full, rest = divmod(int(cfg.sample_count), int(cfg.batch_size))
    return [cfg.batch_size] * full + ([rest] if rest else [])


def _draw(cfg: McConfig, k: int, size: int) -> np.ndarray:
    return cfg.channel.sample(_batch_rng(cfg.seed, k), size)


def sample_snr(cfg: McConfig) -> Iterator[np.ndarray]:
    """Instantaneous SNR draws, one array per batch, deterministic in ``cfg.seed``."""
    for k, size in enumerate(_batch_sizes(cfg)):
        yield _draw(cfg, k, size)


def _moments(x: np.ndarray):
    mean = float(np.mean(x))
    return x.size, mean, float(np.sum((x - mean) ** 2))


def _merge(left, right):
    na, ma, m2a = left
    nb, mb, m2b = right
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, m2a + m2b + delta * delta * na * nb / n


def _pairwise(parts):
    while len(parts) > 1:
        merged = [_merge(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]


def _estimate(cfg: McConfig, statistic: Callable[[np.ndarray], np.ndarray]) -> McEstimate:
    sizes = _batch_sizes(cfg)

    def run(k):
        return _moments(np.asarray(statistic(_draw(cfg, k, sizes[k])), dtype=float))

    if cfg.workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(k) for k in range(len(sizes))]
    n, mean, m2 = _pairwise(parts)
    std_error = math.sqrt(m2 / (n - 1) / n) if n > 1 else math.nan
    return McEstimate(mean, std_error, n, int(cfg.seed))


def estimate_avg_ber(cfg: McConfig) -> McEstimate:
    """Mean conditional BER over sampled SNRs."""
    if cfg.mod is None:
        raise DomainError("estimate_avg_ber needs a modulation in the config")
    mod = cfg.mod
    return _estimate(cfg, lambda g: instantaneous_ber(mod, g))


def estimate_capacity(cfg: McConfig, bandwidth: float = 1.0) -> McEstimate:
    """Mean of ``W log2(1 + snr)`` over sampled SNRs."""
    if not bandwidth > 0:
        raise DomainError("bandwidth must be positive")
    scale = bandwidth / LN2
    return _estimate(cfg, lambda g: scale * np.log1p(g))


def estimate_comp_outage(cfg: McConfig, threshold: float) -> McEstimate:
    """Fraction of sampled SNRs above ``threshold``."""
    return _estimate(cfg, lambda g: (g > threshold).astype(float))
