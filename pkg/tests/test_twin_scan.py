import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_twin_scan, trial_division_primes
from twinsep.errors import ScanOrderError
from twinsep.prime_sieve import PrimeStream, SieveConfig, simple_sieve
from twinsep.twin_scan import (
    CheckpointSpec, SeparationEvent, TwinPair, TwinScanner, checkpoint, scan,
)

PRIMES_100 = trial_division_primes(100)


def _split(events):
    events = list(events)
    twins = [e for e in events if isinstance(e, TwinPair)]
    seps = [e for e in events if isinstance(e, SeparationEvent)]
    return twins, seps


def test_seven_twins_below_100():
    twins, seps = _split(scan(PRIMES_100))
    assert [(t.low, t.high) for t in twins] == [
        (5, 7), (11, 13), (17, 19), (29, 31), (41, 43), (59, 61), (71, 73)]
    assert [t.index for t in twins] == list(range(1, 8))
    assert len(seps) == 6


def test_separation_between_41_and_59_is_two():
    _, seps = _split(scan(PRIMES_100))
    # singletons 47 and 53 lie between (41, 43) and (59, 61), twins 5 and 6
    assert seps[4] == SeparationEvent(after_twin_index=5, separation=2)


def test_zero_separation_137_149():
    primes = trial_division_primes(160)
    twins, seps = _split(scan(primes))
    k = next(t.index for t in twins if t.low == 137)
    assert twins[k].low == 149
    assert seps[k - 1] == SeparationEvent(k, 0)


def test_separation_event_precedes_its_twin():
    events = list(scan(PRIMES_100))
    assert isinstance(events[0], TwinPair)
    for prev, cur in zip(events, events[1:]):
        if isinstance(cur, SeparationEvent):
            assert isinstance(prev, TwinPair) and prev.index == cur.after_twin_index


def test_prime_2_and_pair_3_5_only_count_toward_pi1():
    sc = TwinScanner()
    events = list(scan([2, 3, 5, 7], sc))
    assert events == [TwinPair(5, 7, 1)]
    assert sc.state.pi1_raw == 4 and sc.state.pi2_analyzed == 1


def test_limit_100_checkpoint():
    sc = TwinScanner([CheckpointSpec.at_limit(100)])
    list(scan(PrimeStream(SieveConfig(1000, 64)), sc))
    snap = checkpoint(sc, CheckpointSpec.at_limit(100))
    assert (snap.n_effective, snap.pi1_raw, snap.pi2_analyzed) == (100, 25, 7)
    assert snap.histogram.counts == {0: 2, 1: 3, 2: 1}
    assert snap.histogram.total_events == 6
    assert snap.discarded_singletons == 4  # 79, 83, 89, 97
    assert snap.pi1_adjusted == 23 and snap.pi2_standard == 8


def test_limit_checkpoint_resolved_by_finish():
    sc = TwinScanner([CheckpointSpec.at_limit(100)])
    sc.feed(np.array(PRIMES_100))
    assert sc.snapshots == []
    assert sc.finish(100) == []
    assert sc.snapshots[0].pi2_analyzed == 7


def test_twin_checkpoint_n_effective():
    # Twin 999 counted from (5, 7) is the 1000th twin overall.
    sc = TwinScanner([CheckpointSpec.at_twin_count(999)])
    for seg in PrimeStream(SieveConfig(80_000, 4096)).segments():
        sc.feed(seg)
    snap = checkpoint(sc, CheckpointSpec.at_twin_count(999))
    assert snap.n_effective == 79561
    assert snap.pi1_raw == 7794
    assert snap.histogram.total_events == 998


def test_unreachable_checkpoint_reported():
    sc = TwinScanner([CheckpointSpec.at_twin_count(50), CheckpointSpec.at_limit(500)])
    sc.feed(np.array(PRIMES_100))
    missing = sc.finish(100)
    assert missing == [CheckpointSpec("twins", 50), CheckpointSpec("limit", 500)]
    with pytest.raises(KeyError):
        checkpoint(sc, CheckpointSpec.at_twin_count(50))


def test_out_of_order_input_is_fatal():
    with pytest.raises(ScanOrderError):
        list(scan([2, 3, 7, 5]))
    sc = TwinScanner()
    sc.feed(np.array([2, 3, 5]))
    with pytest.raises(ScanOrderError):
        sc.feed(np.array([5, 7]))


def test_oracle_equivalence_1e5(primes_1e5):
    ref_twins, ref_seps = naive_twin_scan(primes_1e5)
    twins, seps = _split(scan(PrimeStream(SieveConfig(10**5, 1024))))
    assert [(t.low, t.high) for t in twins] == ref_twins
    assert [e.separation for e in seps] == ref_seps


def _count_identity(limit, segment_size):
    sc = TwinScanner([CheckpointSpec.at_limit(limit)])
    for seg in PrimeStream(SieveConfig(limit, segment_size)).segments():
        sc.feed(seg)
    sc.finish(limit)
    snap = sc.snapshots[0]
    sep_sum = sum(s * c for s, c in snap.histogram.counts.items())
    # 2 and 3 are outside the analysis; 5 is counted once, as a twin member.
    return snap.pi1_raw, 2 * snap.pi2_analyzed + sep_sum + snap.discarded_singletons + 2


def test_count_identity_1e4():
    lhs, rhs = _count_identity(10**4, 256)
    assert lhs == rhs == 1229


@settings(max_examples=60, deadline=None)
@given(limit=st.integers(7, 20_000), half=st.integers(32, 300))
def test_count_identity_any_limit(limit, half):
    lhs, rhs = _count_identity(limit, 2 * half)
    assert lhs == rhs


@settings(max_examples=30, deadline=None)
@given(cut=st.lists(st.integers(1, 2261), min_size=0, max_size=6, unique=True))
def test_block_boundaries_do_not_matter(cut):
    primes = simple_sieve(20_000)
    whole = list(scan(primes))
    edges = [0] + sorted(cut) + [primes.size]
    sc = TwinScanner()
    pieces = []
    for a, b in zip(edges, edges[1:]):
        pieces.extend(sc.feed(primes[a:b]).events())
    assert pieces == whole


def test_deterministic_event_stream():
    a = list(scan(PrimeStream(SieveConfig(50_000, 512))))
    b = list(scan(PrimeStream(SieveConfig(50_000, 4096), workers=2)))
    assert repr(a).encode() == repr(b).encode()


def test_push_matches_block_feed():
    sc = TwinScanner()
    events = []
    for p in PRIMES_100:
        events.extend(sc.push(p))
    assert events == list(scan(PRIMES_100))
    assert sc.state.pending_singletons == 4


def test_separations_nonnegative_and_state_invariant():
    sc = TwinScanner()
    _, seps = _split(scan(PrimeStream(SieveConfig(200_000)), sc))
    assert min(e.separation for e in seps) >= 0
    assert sc.state.pi2_analyzed <= sc.state.pi1_raw / 2 + 1
