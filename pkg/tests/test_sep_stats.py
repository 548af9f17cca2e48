import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from twinsep.errors import InsufficientDataError
from twinsep.sep_stats import (
    SeparationHistogram, accumulate, merge, to_frequency_table, write_frequency_table,
)

histograms = st.dictionaries(st.integers(0, 60), st.integers(1, 500), max_size=20).map(
    SeparationHistogram)


def test_accumulate_single():
    h = accumulate(SeparationHistogram(), 0)
    assert h.counts == {0: 1} and h.total_events == 1


def test_accumulate_events_below_100():
    h = SeparationHistogram()
    for s in [0, 0, 1, 1, 2, 1]:
        h.accumulate(s)
    assert h.counts == {0: 2, 1: 3, 2: 1} and h.total_events == 6


def test_add_many_matches_accumulate():
    seps = np.array([3, 0, 7, 7, 1, 12, 0])
    one = SeparationHistogram()
    for s in seps:
        one.accumulate(int(s))
    assert SeparationHistogram().add_many(seps) == one


def test_negative_separation_rejected():
    with pytest.raises(ValueError):
        SeparationHistogram().accumulate(-1)


def test_merge_disjoint_is_keywise_sum():
    a, b = SeparationHistogram({0: 2, 3: 1}), SeparationHistogram({1: 4, 9: 2})
    assert merge([a, b]).counts == {0: 2, 1: 4, 3: 1, 9: 2}


@given(histograms, histograms, histograms)
def test_merge_associative_commutative(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert (a + b).total_events == a.total_events + b.total_events


def test_frequency_table_below_100():
    t = to_frequency_table(SeparationHistogram({0: 2, 1: 3, 2: 1}))
    assert t.separation.tolist() == [0, 1, 2]
    np.testing.assert_allclose(t.rel_freq, [1 / 3, 1 / 2, 1 / 6], rtol=0, atol=1e-15)
    # The published worked example quotes 1/2, 1/3, 1/6 for s = 0, 1, 2
    # (three zeros, two ones); counting 13->17 (0), 19->29 (1: 23),
    # 31->41 (1: 37), 43->59 (2: 47, 53), 61->71 (1: 67), 7->11 (0) gives two
    # zeros and three ones. The counts by definition are asserted here.
    assert t.total_events == 6


def test_single_event_is_insufficient():
    with pytest.raises(InsufficientDataError):
        to_frequency_table(SeparationHistogram({0: 1}))


def test_single_bin():
    t = to_frequency_table(SeparationHistogram({5: 10}))
    assert t.rel_freq.tolist() == [1.0] and t.log_rel_freq.tolist() == [0.0]


@given(histograms.filter(lambda h: h.total_events >= 2))
def test_normalization_and_logs(h):
    t = to_frequency_table(h)
    assert abs(t.rel_freq.sum() - 1.0) <= 1e-12
    assert np.all(t.count >= 1)
    assert np.all(np.diff(t.separation) > 0)
    np.testing.assert_array_equal(t.log_rel_freq, np.log(t.rel_freq))


def test_zero_bins_absent():
    t = to_frequency_table(SeparationHistogram({6: 2, 8: 3}))
    assert t.separation.tolist() == [6, 8]


def test_csv_dump():
    t = to_frequency_table(SeparationHistogram({0: 2, 1: 3, 2: 1}))
    buf = io.StringIO()
    write_frequency_table(t, buf, fitted_slope=0.5)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "separation,count,rel_freq,ln_rel_freq,fit_ln_freq"
    s, c, f, lf, fit = lines[2].split(",")
    assert (s, c) == ("1", "3") and float(f) == 0.5 and float(lf) == math.log(0.5)
    assert float(fit) == -0.5 + math.log(0.5)
