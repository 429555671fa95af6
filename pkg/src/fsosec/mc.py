"""Monte Carlo reference estimates for the secrecy metrics.

Sampling is counter-based: the logical sample stream is fixed by
(seed, batch index) through a Philox generator, so the decomposition
into worker threads never changes the drawn samples or the reduction
order.  Worker results are merged sorted by batch index; the estimate
for a given seed and sample count is identical for any worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .fading import sample_ht


@dataclass(frozen=True)
class McConfig:
    """Sample budget, stream seed and worker decomposition."""

    samples: int
    seed: int
    jobs: int = 1
    batch_size: int = 1 << 16

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if self.jobs < 1 or self.batch_size < 1:
            raise ValueError("jobs and batch size must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    """Sample mean, its standard error and the sample count."""

    mean: float
    std_error: float
    n: int


def _capacity_delta_batch(scenario, cfg, index, size):
    # log2 SNR-capacity difference for one batch; the sign carries the
    # outage information so every metric reads off the same stream
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence([cfg.seed, index])))
    hb = sample_ht(scenario.bob.fading, rng, size)
    he = sample_ht(scenario.eve.fading, rng, size)
    gb = 4.0 * scenario.bob.mean_snr * hb * hb
    ge = 4.0 * scenario.eve.mean_snr * he * he
    return np.log2(1.0 + gb) - np.log2(1.0 + ge)


def _batches(cfg):
    full, rem = divmod(cfg.samples, cfg.batch_size)
    sizes = [(i, cfg.batch_size) for i in range(full)]
    if rem:
        sizes.append((full, rem))
    return sizes


def _reduce(scenario, cfg, stat):
    def one(item):
        index, size = item
        x = stat(_capacity_delta_batch(scenario, cfg, index, size))
        return index, float(np.sum(x)), float(np.sum(x * x)), size

    items = _batches(cfg)
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            parts = list(pool.map(one, items))
    else:
        parts = [one(it) for it in items]
    parts.sort(key=lambda p: p[0])
    s = 0.0
    s2 = 0.0
    n = 0
    for _, bs, bs2, bn in parts:
        s += bs
        s2 += bs2
        n += bn
    mean = s / n
    if n < 2:
        return McEstimate(mean, 0.0, n)
    var = max(s2 - s * s / n, 0.0) / (n - 1)
    return McEstimate(mean, math.sqrt(var / n), n)


def mc_asc(scenario, cfg):
    """Monte Carlo average secrecy capacity (bits)."""
    return _reduce(scenario, cfg, lambda d: np.maximum(d, 0.0))


def mc_sop(scenario, cfg):
    """Monte Carlo secrecy outage probability against the target rate.

    At target rate zero the outage event is the closed complement of
    the positive-capacity event, so on a shared stream mc_sop and
    mc_spsc sum to one exactly.
    """
    ct = scenario.target_rate
    if ct == 0.0:
        return _reduce(scenario, cfg, lambda d: (d <= 0.0).astype(float))
    return _reduce(scenario, cfg, lambda d: (d < ct).astype(float))


def mc_spsc(scenario, cfg):
    """Monte Carlo probability of strictly positive secrecy capacity."""
    return _reduce(scenario, cfg, lambda d: (d > 0.0).astype(float))
