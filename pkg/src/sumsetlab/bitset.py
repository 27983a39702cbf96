"""Subsets of {0, ..., n-1} as bit vectors, their sumsets and difference sets,
and missing-value counts over integer intervals.

Scalar objects (:class:`SubsetMask`, :class:`PairSet`) use Python ints as the
bit vector.  The ``batch_*`` functions operate on numpy ``uint64`` arrays of
masks and are what the enumeration and sampling code calls in its hot loop.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BadUniverse, ElementOutOfRange, IntervalOutOfRange

MAX_N = 64
WORD = 64

_U64 = np.uint64
_ONE = np.uint64(1)
_WORD_MASK = (1 << WORD) - 1


class Kind(enum.Enum):
    SUM = "sum"
    DIFF = "diff"


class Preset(enum.Enum):
    ALL = "all"
    S = "s"
    L = "l"
    XS = "xs"
    MS = "ms"
    ML = "ml"
    XL = "xl"
    M = "m"
    DIFF_HALF = "half"
    DIFF_FULL = "full"


@dataclass(frozen=True)
class IntervalSpec:
    """Inclusive integer interval ``[lo, hi]``; ``lo > hi`` is the empty interval."""

    lo: int
    hi: int

    @property
    def size(self) -> int:
        return max(0, self.hi - self.lo + 1)

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def __contains__(self, v: int) -> bool:
        return self.lo <= v <= self.hi

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


@dataclass(frozen=True)
class SubsetMask:
    n: int
    bits: int

    def __post_init__(self):
        _check_universe(self.n)
        if self.bits < 0 or self.bits >> self.n:
            raise ElementOutOfRange(f"mask {self.bits:#x} has bits outside 0..{self.n - 1}")

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.n and bool(self.bits >> i & 1)

    def elements(self) -> list[int]:
        return [i for i in range(self.n) if self.bits >> i & 1]

    def __repr__(self) -> str:
        return f"SubsetMask(n={self.n}, {set(self.elements()) or '{}'})"


@dataclass(frozen=True)
class PairSet:
    """Sumset (values 0..2n-2) or nonnegative half of a difference set (0..n-1)."""

    kind: Kind
    n: int
    bits: int

    def values(self) -> list[int]:
        return [v for v in range(self.bits.bit_length()) if self.bits >> v & 1]

    def full_values(self) -> list[int]:
        """All values; for DIFF this includes the implied negative half."""
        vals = self.values()
        if self.kind is Kind.DIFF:
            return sorted({-v for v in vals} | set(vals))
        return vals

    def __contains__(self, v: int) -> bool:
        if self.kind is Kind.DIFF:
            v = abs(v)
        return v >= 0 and bool(self.bits >> v & 1)


def _check_universe(n: int) -> None:
    if not isinstance(n, int) or n < 1 or n > MAX_N:
        raise BadUniverse(f"universe size must be in 1..{MAX_N}, got {n!r}")


def make_subset(elements, n: int) -> SubsetMask:
    _check_universe(n)
    bits = 0
    for e in elements:
        if e < 0 or e >= n:
            raise ElementOutOfRange(f"element {e} not in 0..{n - 1}")
        bits |= 1 << e
    return SubsetMask(n, bits)


def sumset(mask: SubsetMask) -> PairSet:
    m, s, i = mask.bits, 0, 0
    rest = m
    while rest:
        if rest & 1:
            s |= m << i
        rest >>= 1
        i += 1
    return PairSet(Kind.SUM, mask.n, s)


def diffset(mask: SubsetMask) -> PairSet:
    m, d, i = mask.bits, 0, 0
    rest = m
    while rest:
        if rest & 1:
            d |= m >> i
        rest >>= 1
        i += 1
    return PairSet(Kind.DIFF, mask.n, d)


def value_range(kind: Kind, n: int) -> IntervalSpec:
    if kind is Kind.SUM:
        return IntervalSpec(0, 2 * n - 2)
    return IntervalSpec(-(n - 1), n - 1)


def check_interval(kind: Kind, n: int, interval: IntervalSpec) -> None:
    if interval.empty:
        return
    full = value_range(kind, n)
    if interval.lo < full.lo or interval.hi > full.hi:
        raise IntervalOutOfRange(
            f"{kind.value} interval {interval} outside valid range {full} for n={n}"
        )


def preset_interval(name: Preset, n: int) -> IntervalSpec:
    _check_universe(n)
    e = n // 8
    top = 2 * n - 2
    table = {
        Preset.ALL: (0, top),
        Preset.S: (0, n - 1),
        Preset.L: (n, top),
        Preset.XS: (0, e - 1),
        Preset.MS: (e, n - 1),
        Preset.ML: (n, top - e),
        Preset.XL: (top - e + 1, top),
        Preset.M: (e, top - e),
        Preset.DIFF_HALF: (0, n - 1),
        Preset.DIFF_FULL: (-(n - 1), n - 1),
    }
    return IntervalSpec(*table[name])


def _range_bits(lo: int, hi: int) -> int:
    if lo > hi:
        return 0
    return ((1 << (hi - lo + 1)) - 1) << lo


def _diff_halves(interval: IntervalSpec) -> tuple[IntervalSpec, IntervalSpec]:
    """Split a difference interval into its nonnegative part and the mirror of
    its negative part, both expressed over nonnegative values."""
    pos = IntervalSpec(max(interval.lo, 0), interval.hi)
    neg = IntervalSpec(max(1, -interval.hi), -interval.lo)
    return pos, neg


def missing_count(pairset: PairSet, interval: IntervalSpec) -> int:
    check_interval(pairset.kind, pairset.n, interval)
    if interval.empty:
        return 0
    if pairset.kind is Kind.SUM:
        parts = [interval]
    else:
        parts = list(_diff_halves(interval))
    missing = 0
    for part in parts:
        if part.empty:
            continue
        present = (pairset.bits & _range_bits(part.lo, part.hi)).bit_count()
        missing += part.size - present
    return missing


# ---------------------------------------------------------------------------
# vectorised kernels over arrays of masks


def batch_sumset(masks: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray | None]:
    """Sumsets of a uint64 mask array as (low word, high word).

    The high word holds sum values 64..127 and is ``None`` when ``n <= 32``.
    """
    lo = np.zeros_like(masks)
    hi = np.zeros_like(masks) if 2 * n - 1 > WORD else None
    for i in range(n):
        sel = (masks >> _U64(i)) & _ONE
        lo |= (masks << _U64(i)) * sel
        if hi is not None and i:
            hi |= (masks >> _U64(WORD - i)) * sel
    return lo, hi


def batch_diffset(masks: np.ndarray, n: int) -> np.ndarray:
    d = np.zeros_like(masks)
    for i in range(n):
        sel = (masks >> _U64(i)) & _ONE
        d |= (masks >> _U64(i)) * sel
    return d


def _present(lo_word, hi_word, part: IntervalSpec) -> np.ndarray:
    bits = _range_bits(part.lo, part.hi)
    out = np.bitwise_count(lo_word & _U64(bits & _WORD_MASK)).astype(np.int64)
    if bits >> WORD:
        out += np.bitwise_count(hi_word & _U64(bits >> WORD))
    return out


def batch_missing_from_pairs(kind: Kind, lo_word, hi_word, interval: IntervalSpec) -> np.ndarray:
    """Missing counts over ``interval`` given precomputed pair-set words."""
    if interval.empty:
        return np.zeros(lo_word.shape, dtype=np.int64)
    parts = [interval] if kind is Kind.SUM else [p for p in _diff_halves(interval) if not p.empty]
    out = np.zeros(lo_word.shape, dtype=np.int64)
    for part in parts:
        out += part.size - _present(lo_word, hi_word, part)
    return out


def batch_pairs(kind: Kind, masks: np.ndarray, n: int):
    if kind is Kind.SUM:
        return batch_sumset(masks, n)
    return batch_diffset(masks, n), None


def batch_missing(kind: Kind, masks: np.ndarray, n: int, interval: IntervalSpec) -> np.ndarray:
    check_interval(kind, n, interval)
    lo_word, hi_word = batch_pairs(kind, masks, n)
    return batch_missing_from_pairs(kind, lo_word, hi_word, interval)
