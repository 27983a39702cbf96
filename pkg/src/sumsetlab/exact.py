"""Exact missing-count distributions by exhaustive enumeration of subsets.

Masks are enumerated by the integer value of their free bits; forced bits are
OR-ed in afterwards.  The free-bit range is cut into fixed contiguous chunks,
each chunk is tallied independently and the tallies are summed in chunk order,
so the result does not depend on how many workers process the chunks.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bitset import (
    IntervalSpec,
    Kind,
    Preset,
    SubsetMask,
    batch_missing,
    batch_missing_from_pairs,
    batch_pairs,
    check_interval,
    preset_interval,
)
from .errors import BadQuery, TooLarge

GUARD_ENV = "SUMSETLAB_GUARD_LOG2"
DEFAULT_GUARD_LOG2 = 30
CHUNK_LOG2 = 18

SUM_PRESETS = frozenset({Preset.ALL, Preset.S, Preset.L, Preset.XS, Preset.MS, Preset.ML, Preset.XL, Preset.M})
DIFF_PRESETS = frozenset({Preset.DIFF_HALF, Preset.DIFF_FULL})


def guard_log2() -> int:
    """Largest allowed log2 of the number of enumerated masks."""
    raw = os.environ.get(GUARD_ENV)
    return int(raw) if raw else DEFAULT_GUARD_LOG2


class Ensemble(enum.Enum):
    FREE = "free"          # uniform subset of {0..n-1}
    ZERO = "zero"          # conditioned on 0 in R
    ZERO_END = "zero-end"  # conditioned on {0, n-1} in R

    def n_free(self, n: int) -> int:
        if self is Ensemble.FREE:
            return n
        if self is Ensemble.ZERO:
            return n - 1
        return max(n - 2, 0)

    def forced_bits(self, n: int) -> int:
        if self is Ensemble.FREE:
            return 0
        if self is Ensemble.ZERO:
            return 1
        return 1 | (1 << (n - 1))

    def free_shift(self) -> int:
        return 0 if self is Ensemble.FREE else 1

    def masks_from_free(self, free: np.ndarray, n: int) -> np.ndarray:
        """Map free-bit integers to full subset masks."""
        if self is Ensemble.FREE:
            return free
        out = free << np.uint64(1)
        out |= np.uint64(self.forced_bits(n))
        return out

    def contains(self, bits: int, n: int) -> bool:
        forced = self.forced_bits(n)
        return bits & forced == forced


@dataclass(frozen=True)
class DistQuery:
    ensemble: Ensemble
    kind: Kind
    interval: IntervalSpec | Preset
    n: int

    def resolved(self) -> IntervalSpec:
        if isinstance(self.interval, Preset):
            allowed = SUM_PRESETS if self.kind is Kind.SUM else DIFF_PRESETS
            if self.interval not in allowed:
                raise BadQuery(f"preset {self.interval.name} does not apply to {self.kind.value}")
            iv = preset_interval(self.interval, self.n)
        else:
            iv = self.interval
        check_interval(self.kind, self.n, iv)
        return iv

    def describe(self) -> dict:
        iv = self.resolved()
        label = self.interval.value if isinstance(self.interval, Preset) else f"{iv.lo}:{iv.hi}"
        return {
            "ensemble": self.ensemble.value,
            "kind": self.kind.value,
            "interval": label,
            "lo": iv.lo,
            "hi": iv.hi,
            "n": self.n,
        }


@dataclass(frozen=True)
class ExactPmf:
    """Counts of subsets per missing count, over a denominator of 2**n_free."""

    n_free: int
    counts: dict
    support_max: int | None = None

    @property
    def total(self) -> int:
        return 1 << self.n_free

    def count(self, m) -> int:
        return self.counts.get(m, 0)

    def prob(self, m) -> Fraction:
        return Fraction(self.count(m), self.total)

    def max_m(self) -> int:
        return max(k for k in self.counts if k is not None)

    def dense(self, length: int | None = None) -> list[int]:
        """Counts for m = 0..length-1 (default: through the largest key)."""
        if length is None:
            length = (self.support_max if self.support_max is not None else self.max_m()) + 1
        return [self.count(m) for m in range(length)]

    def probs(self, length: int | None = None) -> list[Fraction]:
        return [Fraction(c, self.total) for c in self.dense(length)]


@dataclass(frozen=True)
class JointCounts:
    interval_a: IntervalSpec
    interval_b: IntervalSpec
    n_free: int
    counts: dict  # (m1, m2) -> count

    @property
    def total(self) -> int:
        return 1 << self.n_free

    def marginal(self, axis: int) -> ExactPmf:
        out: dict[int, int] = {}
        for key, c in self.counts.items():
            out[key[axis]] = out.get(key[axis], 0) + c
        size = (self.interval_a if axis == 0 else self.interval_b).size
        return ExactPmf(self.n_free, dict(sorted(out.items())), size)


def _check_guard(n_free: int, guard: int | None) -> None:
    limit = guard_log2() if guard is None else guard
    if n_free > limit:
        raise TooLarge(f"enumeration of 2^{n_free} masks exceeds guard 2^{limit} (set {GUARD_ENV})")


def _chunks(n_free: int) -> list[tuple[int, int]]:
    total = 1 << n_free
    step = min(total, 1 << CHUNK_LOG2)
    return [(s, s + step) for s in range(0, total, step)]


def enumerate_tally(ensemble: Ensemble, n: int, tally, length: int,
                    workers: int = 1, guard: int | None = None) -> np.ndarray:
    """Sum ``tally(masks)`` (an int64 histogram of ``length`` bins) over every
    admissible mask of the ensemble."""
    nf = ensemble.n_free(n)
    _check_guard(nf, guard)

    def run(bounds):
        free = np.arange(bounds[0], bounds[1], dtype=np.uint64)
        return tally(ensemble.masks_from_free(free, n))

    chunks = _chunks(nf)
    acc = np.zeros(length, dtype=np.int64)
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(run, chunks):
                acc += part
    else:
        for bounds in chunks:
            acc += run(bounds)
    return acc


def _as_counts(hist: np.ndarray) -> dict[int, int]:
    return {int(m): int(c) for m, c in enumerate(hist) if c}


def exact_pmf(query: DistQuery, workers: int = 1, guard: int | None = None) -> ExactPmf:
    iv = query.resolved()
    size = iv.size

    def tally(masks):
        miss = batch_missing(query.kind, masks, query.n, iv)
        return np.bincount(miss, minlength=size + 1)

    hist = enumerate_tally(query.ensemble, query.n, tally, size + 1, workers, guard)
    return ExactPmf(query.ensemble.n_free(query.n), _as_counts(hist), size)


def _resolve(kind, interval, n) -> IntervalSpec:
    return DistQuery(Ensemble.FREE, kind, interval, n).resolved()


def exact_joint_pmf(ensemble: Ensemble, kind: Kind, interval_a, interval_b, n: int,
                    workers: int = 1, guard: int | None = None) -> JointCounts:
    ia, ib = _resolve(kind, interval_a, n), _resolve(kind, interval_b, n)
    width = ib.size + 1
    length = (ia.size + 1) * width

    def tally(masks):
        lo, hi = batch_pairs(kind, masks, n)
        a = batch_missing_from_pairs(kind, lo, hi, ia)
        b = batch_missing_from_pairs(kind, lo, hi, ib)
        return np.bincount(a * width + b, minlength=length)

    hist = enumerate_tally(ensemble, n, tally, length, workers, guard)
    counts = {(m // width, m % width): c for m, c in _as_counts(hist).items()}
    return JointCounts(ia, ib, ensemble.n_free(n), counts)


def masks_with_missing(query: DistQuery, m: int, limit: int = 1000,
                       guard: int | None = None) -> list[SubsetMask]:
    """Every admissible subset whose missing count equals ``m`` (up to ``limit``)."""
    iv = query.resolved()
    nf = query.ensemble.n_free(query.n)
    _check_guard(nf, guard)
    found: list[SubsetMask] = []
    for lo, hi in _chunks(nf):
        masks = query.ensemble.masks_from_free(np.arange(lo, hi, dtype=np.uint64), query.n)
        miss = batch_missing(query.kind, masks, query.n, iv)
        for bits in masks[miss == m]:
            found.append(SubsetMask(query.n, int(bits)))
            if len(found) >= limit:
                return found
    return found


def min_element_pmf(n: int) -> ExactPmf:
    """Distribution of min(R) for a uniform subset of {0..n-1}.

    Key ``None`` holds the empty subset.
    """
    if n < 1:
        raise BadQuery(f"n must be >= 1, got {n}")
    counts: dict = {i: 1 << (n - 1 - i) for i in range(n)}
    counts[None] = 1
    return ExactPmf(n, counts, n - 1)
