from fractions import Fraction

import pytest

from sumsetlab.bitset import IntervalSpec, Kind, Preset, SubsetMask
from sumsetlab.exact import DistQuery, Ensemble, ExactPmf, exact_pmf, masks_with_missing
from sumsetlab.identities import (
    HALFLINE_TOLERANCE,
    SCAN_TARGETS,
    SECTION5_SUM_QUERY,
    TV_TOLERANCE,
    ConvolutionRule,
    HalflineVariant,
    convolution_check,
    diff_tail_pmf,
    figure7_series,
    full_convolution,
    gap_report,
    half_convolution,
    halfline_check,
    independence_gap,
    middle_mass,
    scan,
    section5_diff_experiment,
    section5_sum_experiment,
    tail_closed_forms,
    tail_report,
)

# TV gaps (n = 10, 14, 20) from the exact calibration run that fixed the
# tolerance; every n=20 value sits below it.
CALIBRATION = {
    ConvolutionRule.T2A_R: (0.21774864196777344, 0.09372960776090622, 0.039011999479953374),
    ConvolutionRule.T2A_RPP: (0.1635284423828125, 0.08936125040054321, 0.04374096161700436),
    ConvolutionRule.T2B_1: (0.055877685546875, 0.021970748901367188, 0.006944626569747925),
    ConvolutionRule.T2B_2: (0.1584320068359375, 0.06257785856723785, 0.01639677544517326),
    ConvolutionRule.T2B_3: (0.1261138916015625, 0.05361416935920715, 0.012881172937341034),
    ConvolutionRule.T2B_4: (0.061492919921875, 0.024040475487709045, 0.003447281302214833),
    ConvolutionRule.T2B_5: (0.0434417724609375, 0.017540842294692993, 0.0027715008764062077),
}
HALFLINE_CALIBRATION = {6: 0.1962890625, 9: 0.06854248046875, 12: 0.04390597343444824}


def test_full_convolution_small():
    assert full_convolution([Fraction(1, 2), Fraction(1, 2)]) == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]


def test_half_convolution_first_bins():
    p = [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
    out = half_convolution(p, 3)
    assert out[0] == Fraction(1, 4)
    assert out[1] == Fraction(1, 8)
    assert out[2] == Fraction(1, 8) + Fraction(1, 4) * Fraction(1, 2)


def test_gap_report_counts_untabulated_mass():
    rep = gap_report("x", 1, "exact", [Fraction(1)], [Fraction(1, 2)])
    assert rep.tv_exact == Fraction(1, 2)


@pytest.mark.parametrize("rule", list(ConvolutionRule))
def test_convolution_calibration_frozen(rule):
    for n, expected in zip((10, 14, 20), CALIBRATION[rule]):
        rep = convolution_check(rule, n)
        assert rep.tv_gap == pytest.approx(expected, rel=1e-12)
        assert 0 <= rep.tv_gap <= 1
        assert all(g >= 0 for g in rep.gaps)
    assert CALIBRATION[rule][2] < TV_TOLERANCE


def test_t2b1_zero_bin_is_single_term():
    rep = convolution_check(ConvolutionRule.T2B_1, 12)
    p4 = exact_pmf(DistQuery(Ensemble.ZERO, Kind.SUM, Preset.S, 12))
    assert rep.rhs[0] == p4.prob(0) / 2
    assert rep.lhs[0] == exact_pmf(DistQuery(Ensemble.FREE, Kind.SUM, Preset.S, 12)).prob(0)


def test_half_reading_of_difference_rules_does_not_converge():
    # the symmetric interval is the default because [0, n-1] leaves a gap
    for rule in (ConvolutionRule.T2B_4, ConvolutionRule.T2B_5):
        rep = convolution_check(rule, 20, diff_interval=Preset.DIFF_HALF)
        assert rep.tv_gap > 0.1


def test_convolution_mc_close_to_exact():
    exact = convolution_check(ConvolutionRule.T2B_1, 14)
    mc = convolution_check(ConvolutionRule.T2B_1, 14, method="mc", samples=400_000, seed=5)
    assert mc.tv_gap == pytest.approx(exact.tv_gap, abs=0.01)


def test_middle_mass_bound_values():
    p16, bound16 = middle_mass(16)
    assert bound16 == Fraction(81, 4)  # 27 * 3/4
    assert p16 <= min(1, bound16)
    p8, bound8 = middle_mass(8)
    assert bound8 == 13


def test_middle_mass_n24_below_n8():
    assert middle_mass(24)[0] < middle_mass(8)[0]


def test_middle_mass_rejects_small_n():
    with pytest.raises(ValueError):
        middle_mass(7)


@pytest.mark.parametrize("n", [4, 8, 12, 16])
def test_independence_gap_zero(n):
    assert independence_gap(n) == 0


def test_tail_closed_forms_n5():
    vals = tail_closed_forms(5).values
    assert vals == {3: Fraction(1, 8), 2: Fraction(1, 8), 1: Fraction(1, 4), 0: Fraction(1, 2)}


def test_tail_closed_forms_match_enumeration():
    for n in range(5, 19):
        pmf = diff_tail_pmf(n)
        for m, v in tail_closed_forms(n).values.items():
            assert pmf.prob(m) == v, (n, m)


def test_top_two_tail_bins_vanish():
    for n in range(2, 19):
        pmf = diff_tail_pmf(n)
        assert pmf.count(n) == pmf.count(n - 1) == 0


def test_p4_tail_bin():
    assert diff_tail_pmf(4).prob(2) == Fraction(1, 4)


def test_tail_report_n9_and_n11():
    assert tail_report(diff_tail_pmf(9)).witnesses == []
    rep = tail_report(diff_tail_pmf(11))
    assert 7 in rep.witnesses
    p = diff_tail_pmf(11)
    assert p.prob(7) - p.prob(6) >= Fraction(1, 2 ** 10)


def test_tail_report_single_point():
    pmf = exact_pmf(DistQuery(Ensemble.ZERO_END, Kind.DIFF, Preset.DIFF_HALF, 1))
    rep = tail_report(pmf)
    assert rep.m_star == 0 and rep.witnesses == [] and rep.is_nonincreasing_after_mode


def test_tail_report_ties_take_smallest_mode():
    rep = tail_report(ExactPmf(3, {0: 1, 1: 3, 2: 3, 3: 1}, 3))
    assert rep.m_star == 1
    assert rep.plateaus == [2]
    assert rep.is_nonincreasing_after_mode and not rep.strictly_decreasing_after_mode


def test_halfline_calibration_frozen():
    for n, expected in HALFLINE_CALIBRATION.items():
        assert halfline_check(n).tv_gap == pytest.approx(expected, rel=1e-12)
    assert HALFLINE_CALIBRATION[12] < HALFLINE_TOLERANCE


def test_figure7_n1_fully_forced():
    rep = halfline_check(1, HalflineVariant.FIG7)
    assert rep.rhs[0] == 1 and sum(rep.rhs) == 1
    assert figure7_series(1)[0].counts == {0: 1}


def test_figure7_series_totals():
    for n, pmf in enumerate(figure7_series(9), start=1):
        assert sum(pmf.counts.values()) == 2 ** (2 * n - 2)


def test_section5_sum_experiment():
    pmf = section5_sum_experiment()
    assert sum(pmf.counts.values()) == 2 ** 19
    assert pmf.max_m() == 19 and pmf.count(19) == 1
    assert masks_with_missing(SECTION5_SUM_QUERY, 19) == [SubsetMask(20, 1)]
    assert section5_sum_experiment(workers=3) == pmf


def test_section5_diff_experiment_total():
    pmf = section5_diff_experiment()
    assert sum(pmf.counts.values()) == 2 ** 18
    assert pmf.support_max == IntervalSpec(0, 10).size


@pytest.mark.parametrize("target", list(SCAN_TARGETS) + ["conj10"])
def test_scans_run_and_report(target):
    # scans are exploratory: only the shape of the output is checked
    rows = scan(target, range(1, 11))
    assert [r.n for r in rows] == list(range(1, 11))
    assert all(isinstance(r.agrees, bool) for r in rows)


def test_thm7a_scan_agrees_with_exception_list():
    assert all(r.agrees for r in scan("thm7a", range(1, 19)))
