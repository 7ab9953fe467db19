import json
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings

from sharedcache.combinatorics import binomial
from sharedcache.delivery import (
    closed_form_delay,
    closed_form_delay_check,
    concat_schedule,
    deliver,
    missing_deliveries,
    round_transmission_counts,
    round_users,
)
from sharedcache.model import Association, InvalidInstance, Profile, SubfileId, SystemParams, profile_of

from conftest import EXAMPLE_ASSOC, EXAMPLE_DEMAND, EXAMPLE_PARAMS, instances


def test_worked_example_schedule():
    sched = concat_schedule(EXAMPLE_ASSOC, 2)
    assert sched[2] == [(14, 15), (14, 15)]
    assert sched[1] == [(9, 10), (11, 12), (13, 9), (10, 11), (12, 13)]
    assert round_users(sched, 1) == {1, 2, 9, 10, 14, 15}
    assert round_users(sched, 3) == {5, 6, 13, 9}
    assert round_users(sched, 8) == {7, 8}
    assert concat_schedule(EXAMPLE_ASSOC, 1)[1] == [(9,), (10,), (11,), (12,), (13,)]


def test_schedule_rejects_small_cache():
    with pytest.raises(InvalidInstance):
        concat_schedule(Association(((1, 2, 3), (4,))), 2)
    assert concat_schedule(Association(((1, 2), ())), 2) == [[(1, 2), (1, 2)], []]


def test_worked_example_delivery():
    tr = deliver(EXAMPLE_ASSOC, EXAMPLE_DEMAND, EXAMPLE_PARAMS)
    assert tr.total_delay == Fraction(21, 6)
    assert len(tr) == 21
    assert all(x.duration == Fraction(1, 6) for x in tr.transmissions)
    # a_j idle caches per round: (0,0,1,1,1,2,2,2)
    assert [tr.per_round_counts()[j] for j in range(1, 9)] == [3, 3, 3, 3, 3, 2, 2, 2]
    first = tr.transmissions[0]
    assert first.round == 1 and first.q_set == (1, 2)
    assert first.groups[0].users == (1, 2)
    assert first.groups[0].payload == (SubfileId(1, (2,), 1), SubfileId(2, (2,), 1))
    assert first.groups[1].payload == (SubfileId(9, (1,), 1), SubfileId(10, (1,), 1))
    assert missing_deliveries(tr, EXAMPLE_ASSOC, EXAMPLE_PARAMS) == []
    assert closed_form_delay_check(tr, Profile((8, 5, 2)), EXAMPLE_PARAMS)


def test_full_memory_sends_nothing():
    params = SystemParams(5, 5, 3, 1, 3)
    tr = deliver(Association(((1, 2), (3,), (4, 5))), (1, 2, 3, 4, 5), params)
    assert len(tr) == 0 and tr.total_delay == 0


def test_no_memory_sends_every_file():
    params = SystemParams(6, 6, 3, 1, 0)
    tr = deliver(Association(((1, 2, 3), (4, 5), (6,))), (1, 2, 3, 4, 5, 6), params)
    assert tr.total_delay == 6


def test_closed_form_values():
    assert closed_form_delay((8, 5, 2), 2, 1) == Fraction(21, 6)
    assert closed_form_delay((5,) * 6, 1, 1) == Fraction(25, 2)
    for lam in range(1, 7):
        for t in range(lam + 1):
            k = 3 * lam
            # K(1-γ)/(Λγ+1) for uniform, K(1-γ) for a single loaded cache
            assert closed_form_delay((3,) * lam, 1, t) == Fraction(k * (lam - t), lam * (t + 1))
            assert closed_form_delay((k,) + (0,) * (lam - 1), 1, t) == Fraction(k * (lam - t), lam)


def test_deliver_rejects_mismatch():
    with pytest.raises(InvalidInstance):
        deliver(EXAMPLE_ASSOC, EXAMPLE_DEMAND, SystemParams(15, 14, 3, 2, 1))
    with pytest.raises(InvalidInstance):
        deliver(EXAMPLE_ASSOC, EXAMPLE_DEMAND[:-1] + (16,), EXAMPLE_PARAMS)


def test_transcript_json_roundtrips():
    tr = deliver(EXAMPLE_ASSOC, EXAMPLE_DEMAND, EXAMPLE_PARAMS)
    data = json.loads(json.dumps(tr.to_json()))
    assert len(data) == 21
    assert data[0]["Q"] == [1, 2] and data[0]["duration"] == "1/6"
    assert data[0]["groups"][0]["subfiles"][0] == {"file": 1, "T": [2], "l": 1}


def _brute_round_counts(assoc, params):
    """Count transmissions directly from the active-cache sets of each round."""
    sizes = assoc.sizes()
    lam = params.num_caches
    counts = []
    for j in range(1, max(sizes) + 1):
        active = sum(1 for s in sizes if s > 0 and j <= s)
        counts.append(binomial(lam, params.t + 1) - binomial(lam - active, params.t + 1))
    return counts


@settings(max_examples=150, deadline=None)
@given(instances())
def test_delivery_invariants(inst):
    assoc, demand, params = inst
    tr = deliver(assoc, demand, params)
    profile = profile_of(assoc)
    # every required mini-file exactly once, nothing the receiver already has
    assert missing_deliveries(tr, assoc, params) == []
    # multicast structure: one group per active cache, at most N0 users each
    for x in tr.transmissions:
        assert len(x.q_set) == params.t + 1
        caches = [g.cache for g in x.groups]
        assert len(set(caches)) == len(caches) and set(caches) <= set(x.q_set)
        for g in x.groups:
            assert len(g.users) == params.antennas
            for s in g.payload:
                assert set(s.storage) == set(x.q_set) - {g.cache}
    assert closed_form_delay_check(tr, profile, params)
    per_round = tr.per_round_counts()
    # a_j-based count matches both the transcript and the profile formula
    assert [per_round[j] for j in range(1, profile[0] + 1)] == _brute_round_counts(assoc, params)
    assert _brute_round_counts(assoc, params) == round_transmission_counts(profile, params.t)


@settings(max_examples=40, deadline=None)
@given(instances())
def test_delay_depends_only_on_profile(inst):
    assoc, demand, params = inst
    canon = Association(tuple(sorted(assoc.caches, key=len, reverse=True)))
    assert deliver(assoc, demand, params).total_delay == deliver(canon, demand, params).total_delay


def test_deletion_shows_in_delivered_counter():
    tr = deliver(EXAMPLE_ASSOC, EXAMPLE_DEMAND, EXAMPLE_PARAMS)
    cut = tr.without(4)
    assert len(cut) == 20
    lost = Counter(tr.delivered) - Counter(cut.delivered)
    assert {k[0] for k in lost} == set(tr.transmissions[4].users())
