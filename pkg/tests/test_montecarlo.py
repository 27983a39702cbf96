import math

import numpy as np
import pytest

from sumsetlab.bitset import IntervalSpec, Kind, Preset, batch_sumset
from sumsetlab.errors import ZeroSamples
from sumsetlab.exact import DistQuery, Ensemble, exact_pmf
from sumsetlab.montecarlo import BLOCK, SampleStream, mc_pmf, mc_tally, sample_masks, sample_subset


def test_forced_bits_always_present():
    masks = sample_masks(Ensemble.ZERO_END, 10, SampleStream(7), 5000)
    assert np.all(masks & 1) and np.all(masks >> np.uint64(9) & 1)
    assert np.all(masks >> np.uint64(10) == 0)


def test_sample_subset_is_deterministic():
    a = [sample_subset(Ensemble.FREE, 20, s) for s in [SampleStream(3)] for _ in range(50)]
    s = SampleStream(3)
    b = [sample_subset(Ensemble.FREE, 20, s) for _ in range(50)]
    assert a == b
    assert len(set(a)) > 40


def test_streams_differ_by_seed_and_index():
    w = SampleStream(1).words(8)
    assert not np.array_equal(w, SampleStream(2).words(8))
    assert not np.array_equal(w, SampleStream(1, 1).words(8))


def test_mean_cardinality():
    samples = 10**6
    masks = sample_masks(Ensemble.FREE, 32, SampleStream(11), samples)
    mean = np.bitwise_count(masks).mean()
    sigma = math.sqrt(32 / 4) / math.sqrt(samples)
    assert abs(mean - 16) < 4 * sigma


def test_full_width_universe():
    masks = sample_masks(Ensemble.FREE, 64, SampleStream(5), 10000)
    assert np.bitwise_count(masks).mean() == pytest.approx(32, abs=0.2)


def test_mc_pmf_reproducible():
    q = DistQuery(Ensemble.FREE, Kind.SUM, Preset.ALL, 12)
    assert mc_pmf(q, 200_000, 42) == mc_pmf(q, 200_000, 42)


@pytest.mark.parametrize("workers", [2, 4])
def test_mc_pmf_worker_invariant(workers):
    q = DistQuery(Ensemble.ZERO, Kind.DIFF, Preset.DIFF_FULL, 15)
    assert mc_pmf(q, 3 * BLOCK + 17, 9, workers=workers).hits == mc_pmf(q, 3 * BLOCK + 17, 9).hits


def test_zero_samples():
    with pytest.raises(ZeroSamples):
        mc_pmf(DistQuery(Ensemble.FREE, Kind.SUM, Preset.ALL, 5), 0, 1)


def test_hits_sum_to_samples():
    est = mc_pmf(DistQuery(Ensemble.FREE, Kind.SUM, Preset.S, 40), 12345, 3)
    assert sum(est.hits.values()) == 12345


def test_sum_membership_event_matches_eq1():
    samples = 10**6

    def tally(masks):
        lo, _ = batch_sumset(masks, 12)
        return np.bincount((lo >> np.uint64(5) & np.uint64(1)).astype(np.int64), minlength=2)

    hist = mc_tally(Ensemble.FREE, 12, samples, 2024, tally, 2)
    p_hat = hist[1] / samples
    p = 37 / 64
    assert abs(p_hat - p) < 4 * math.sqrt(p * (1 - p) / samples)


@pytest.mark.parametrize("ensemble,kind,interval,n", [
    (Ensemble.FREE, Kind.SUM, Preset.ALL, 12),
    (Ensemble.ZERO, Kind.SUM, Preset.S, 14),
    (Ensemble.ZERO_END, Kind.DIFF, Preset.DIFF_HALF, 16),
    (Ensemble.FREE, Kind.DIFF, IntervalSpec(-5, 7), 10),
])
def test_consistency_battery(ensemble, kind, interval, n):
    q = DistQuery(ensemble, kind, interval, n)
    exact = exact_pmf(q)
    est = mc_pmf(q, 400_000, 99)
    for m in range(q.resolved().size + 1):
        p = float(exact.prob(m))
        se = math.sqrt(p * (1 - p) / est.samples)
        assert abs(est.prob(m) - p) <= 4 * se + 1e-12, m
