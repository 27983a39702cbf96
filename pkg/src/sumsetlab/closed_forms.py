"""Exact evaluation of sum-membership probabilities for the infinite random set.

Everything here returns :class:`fractions.Fraction`.  The infinite random set
includes each nonnegative integer independently with probability 1/2; whether
``k`` lies in its sumset depends only on the elements ``0..k``, which is what
makes the finite enumeration oracles below exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DegenerateDenominator, TooLarge

ORACLE_MAX_K = 30
_CHUNK_LOG2 = 20

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)
THREE_QUARTERS = Fraction(3, 4)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


@lru_cache(maxsize=None)
def _fib_pair(j: int) -> tuple[int, int]:
    # (F_j, F_{j+1}) by fast doubling
    if j == 0:
        return 0, 1
    a, b = _fib_pair(j // 2)
    c = a * (2 * b - a)
    d = a * a + b * b
    return (d, c + d) if j % 2 else (c, d)


def fibonacci(j: int) -> int:
    """F_1 = F_2 = 1, F_j = F_{j-1} + F_{j-2}.  Exact for any size."""
    if j < 1:
        raise ValueError(f"Fibonacci index must be >= 1, got {j}")
    return _fib_pair(j)[0]


def prob_sum_infinite(k: int) -> Fraction:
    """Probability that ``k`` lies in R + R for the infinite random set."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if k % 2:
        return 1 - THREE_QUARTERS ** ((k + 1) // 2)
    return 1 - HALF * THREE_QUARTERS ** (k // 2)


def prob_sum_pred_denominator(k: int) -> Fraction:
    """Prob(k-1 in R+R) written as 1 - (3 + (-1)^k)/4 * (3/4)^floor(k/2)."""
    return 1 - QUARTER * (3 + _sign(k)) * THREE_QUARTERS ** (k // 2)


@dataclass(frozen=True)
class SumRepresentationEvent:
    """Event that some pair {j, k-j} with i <= j <= k//2 lies inside R."""

    k: int
    i: int = 0

    def __post_init__(self):
        if self.k < 0 or not 0 <= self.i <= self.k // 2 + 1:
            raise ValueError(f"bad event indices k={self.k}, i={self.i}")

    def pairs(self) -> list[tuple[int, int]]:
        return [(j, self.k - j) for j in range(self.i, self.k // 2 + 1)]

    def occurs(self, bits: int) -> bool:
        return any(bits >> a & 1 and bits >> b & 1 for a, b in self.pairs())

    def occurs_batch(self, masks: np.ndarray) -> np.ndarray:
        dt = masks.dtype.type
        acc = np.zeros_like(masks)
        tmp = np.empty_like(masks)
        for a, b in self.pairs():
            # align bit b onto bit a, then keep bit a
            np.right_shift(masks, dt(b - a), out=tmp)
            tmp &= masks
            acc |= tmp >> dt(a)
        return (acc & dt(1)).astype(bool)


def event_prob_oracle(events: list[SumRepresentationEvent], n_bits: int | None = None) -> Fraction:
    """Exact probability that all ``events`` occur, by enumerating every
    membership pattern of bits ``0..n_bits-1`` (default: up to the largest k)."""
    if n_bits is None:
        n_bits = max(e.k for e in events) + 1
    if n_bits - 1 > ORACLE_MAX_K:
        raise TooLarge(f"oracle over {n_bits} bits exceeds the 2^{ORACLE_MAX_K + 1} pattern cap")
    total = 1 << n_bits
    chunk = min(total, 1 << _CHUNK_LOG2)
    hits = 0
    for start in range(0, total, chunk):
        masks = np.arange(start, start + chunk, dtype=np.uint32 if n_bits <= 32 else np.uint64)
        ok = np.ones(chunk, dtype=bool)
        for e in events:
            ok &= e.occurs_batch(masks)
        hits += int(np.count_nonzero(ok))
    return Fraction(hits, total)


def prob_sum_oracle(k: int) -> Fraction:
    """Prob(k in R+R) by brute force over the membership of 0..k."""
    return event_prob_oracle([SumRepresentationEvent(k)])


def joint_event_prob_oracle(k: int) -> Fraction:
    """Prob({k-1, k} both in R+R) by brute force over the membership of 0..k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > ORACLE_MAX_K:
        raise TooLarge(f"k={k} exceeds oracle limit {ORACLE_MAX_K}")
    return event_prob_oracle([SumRepresentationEvent(k - 1), SumRepresentationEvent(k)], k + 1)


def t_closed(k: int) -> Fraction:
    """T_k = 1 + F_{k+2}/2^{k+1} - 3^{floor(k/2)} (4 - (-1)^k) / 2^{k+1}."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    den = 2 ** (k + 1)
    return 1 + Fraction(fibonacci(k + 2), den) - Fraction(3 ** (k // 2) * (4 - _sign(k)), den)


@dataclass
class TSequence:
    k: int
    p: list[Fraction]  # p[i] = P_i(k), i = 0..k-1
    values: dict[int, Fraction] = field(init=False)  # j -> T_j = P_{k-j}(k)

    def __post_init__(self):
        self.values = {j: self.p[self.k - j] for j in range(1, self.k + 1)}

    @property
    def final(self) -> Fraction:
        return self.values[self.k]


def t_recursive(k: int) -> TSequence:
    """Build P_{k-1}(k), ..., P_0(k) from the two base cases of 1/4 and the
    three-term recursion with its geometric correction."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    p = [Fraction(0)] * k
    p[k - 1] = p[k - 2] = QUARTER
    for i in range(k - 3, -1, -1):
        d = k - i
        correction = Fraction(3 + _sign(d), 24) * THREE_QUARTERS ** (d // 2)
        p[i] = HALF * p[i + 1] + QUARTER * p[i + 2] - correction + QUARTER
    return TSequence(k, p)


def cond_prob_closed(k: int) -> Fraction:
    """Prob(k in R+R | k-1 in R+R) in closed form."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    den = 2 ** k - 3 ** (k // 2)
    if den == 0:
        raise DegenerateDenominator(f"2^{k} == 3^{k // 2}")
    return 2 + Fraction(fibonacci(k + 2) + _sign(k) * 3 ** (k // 2) - 2 ** (k + 1), 2 * den)


def cond_prob_from_t(k: int) -> Fraction:
    """The same conditional probability as T_k over Prob(k-1 in R+R)."""
    return t_closed(k) / prob_sum_pred_denominator(k)
