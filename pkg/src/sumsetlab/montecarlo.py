"""Seeded Monte Carlo estimates of missing-count distributions.

Reproducibility contract: the sample budget is cut into fixed blocks of
``BLOCK`` draws.  Block ``b`` is drawn from a Philox counter-based generator
keyed by ``(seed, b)``, so each draw is determined by (seed, block, position).
Block tallies are merged by addition, which makes the hit map a pure function
of (query, samples, seed) for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bitset import SubsetMask, batch_missing
from .errors import ZeroSamples
from .exact import DistQuery, Ensemble

BLOCK = 1 << 16
SEED_MASK = (1 << 64) - 1


class SampleStream:
    """Deterministic stream of random 64-bit words keyed by (seed, stream index)."""

    def __init__(self, seed: int, index: int = 0):
        self.seed = seed & SEED_MASK
        self.index = index
        self._bitgen = np.random.Philox(key=self.seed | (index << 64))

    def words(self, count: int) -> np.ndarray:
        return self._bitgen.random_raw(count)


def sample_masks(ensemble: Ensemble, n: int, stream: SampleStream, count: int) -> np.ndarray:
    """Draw ``count`` masks: one word per sample, cut to n bits, forced bits set."""
    words = stream.words(count)
    if n < 64:
        words &= np.uint64((1 << n) - 1)
    return words | np.uint64(ensemble.forced_bits(n))


def sample_subset(ensemble: Ensemble, n: int, stream: SampleStream) -> SubsetMask:
    return SubsetMask(n, int(sample_masks(ensemble, n, stream, 1)[0]))


@dataclass(frozen=True)
class EstimatedPmf:
    samples: int
    hits: dict
    seed: int
    query: DistQuery

    def prob(self, m: int) -> float:
        return self.hits.get(m, 0) / self.samples

    def stderr(self, m: int) -> float:
        p = self.prob(m)
        return math.sqrt(p * (1 - p) / self.samples)

    def dense(self, length: int | None = None) -> list[int]:
        if length is None:
            length = self.query.resolved().size + 1
        return [self.hits.get(m, 0) for m in range(length)]

    def probs(self, length: int | None = None) -> list[float]:
        return [c / self.samples for c in self.dense(length)]


def block_sizes(samples: int) -> list[int]:
    full, rest = divmod(samples, BLOCK)
    return [BLOCK] * full + ([rest] if rest else [])


def mc_tally(ensemble: Ensemble, n: int, samples: int, seed: int, tally, length: int,
             workers: int = 1) -> np.ndarray:
    """Sum ``tally(masks)`` over all sample blocks."""
    if samples < 1:
        raise ZeroSamples("samples must be >= 1")
    sizes = block_sizes(samples)

    def run(b):
        return tally(sample_masks(ensemble, n, SampleStream(seed, b), sizes[b]))

    acc = np.zeros(length, dtype=np.int64)
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(run, range(len(sizes))):
                acc += part
    else:
        for b in range(len(sizes)):
            acc += run(b)
    return acc


def mc_pmf(query: DistQuery, samples: int, seed: int, workers: int = 1) -> EstimatedPmf:
    iv = query.resolved()
    size = iv.size

    def tally(masks):
        return np.bincount(batch_missing(query.kind, masks, query.n, iv), minlength=size + 1)

    hist = mc_tally(query.ensemble, query.n, samples, seed, tally, size + 1, workers)
    hits = {int(m): int(c) for m, c in enumerate(hist) if c}
    return EstimatedPmf(samples, hits, seed & SEED_MASK, query)
