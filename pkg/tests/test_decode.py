import random

import pytest
from hypothesis import given, settings

from sharedcache.decode import decode_symbolic, decode_xor, encode_xor
from sharedcache.delivery import PrecodedGroup, Transcript, Transmission, deliver
from sharedcache.model import Association, InvalidInstance, SubfileId, SystemParams
from sharedcache.placement import materialize, place, random_library

from conftest import EXAMPLE_ASSOC, EXAMPLE_DEMAND, EXAMPLE_PARAMS, instances, make_instance


def test_worked_example_first_transmission_is_cancellable():
    tr = deliver(EXAMPLE_ASSOC, EXAMPLE_DEMAND, EXAMPLE_PARAMS)
    x = tr.transmissions[0]
    assert set(x.groups[1].payload) == {SubfileId(9, (1,), 1), SubfileId(10, (1,), 1)}
    caches = place(EXAMPLE_PARAMS)
    assert set(x.groups[1].payload) <= caches[0].stored
    one = Transcript([x], x.duration)
    report = decode_symbolic(one, caches, EXAMPLE_ASSOC, EXAMPLE_DEMAND, EXAMPLE_PARAMS)
    assert report.per_user[1].uncancellable == []
    assert SubfileId(1, (2,), 1) not in report.per_user[1].missing


def test_worked_example_all_recovered():
    tr = deliver(EXAMPLE_ASSOC, EXAMPLE_DEMAND, EXAMPLE_PARAMS)
    report = decode_symbolic(tr, place(EXAMPLE_PARAMS), EXAMPLE_ASSOC, EXAMPLE_DEMAND, EXAMPLE_PARAMS)
    assert report.all_recovered
    assert report.summary() == "15/15 users recovered"


def test_uncancellable_interference_flagged():
    params = SystemParams(3, 3, 3, 1, 1)
    assoc = Association(((1,), (2,), (3,)))
    # user 1 (cache 1) receives W^2 stored at cache 3 as interference: cannot cancel
    bogus = Transmission(1, (1, 2), (
        PrecodedGroup(1, (1,), (SubfileId(1, (2,), 1),)),
        PrecodedGroup(2, (2,), (SubfileId(2, (3,), 1),)),
    ), 1)
    report = decode_symbolic(Transcript([bogus], 1), place(params), assoc, (1, 2, 3), params)
    assert report.per_user[1].uncancellable == [SubfileId(2, (3,), 1)]
    assert 1 in report.failed_users()


def test_full_memory_nothing_sent():
    params = SystemParams(4, 3, 2, 1, 2)
    assoc = Association(((1, 2), (3,)))
    tr = deliver(assoc, (4, 1, 2), params)
    lib = random_library(params, 3)
    assert len(tr) == 0
    assert decode_xor(tr, place(params), lib, assoc, (4, 1, 2), params).all_recovered


def test_xor_rejects_multi_antenna():
    with pytest.raises(InvalidInstance):
        decode_xor(Transcript([], 0), [], random_library(EXAMPLE_PARAMS, 1, 1),
                   EXAMPLE_ASSOC, EXAMPLE_DEMAND, EXAMPLE_PARAMS)


@settings(max_examples=60, deadline=None)
@given(instances())
def test_symbolic_decode_recovers_everyone(inst):
    assoc, demand, params = inst
    tr = deliver(assoc, demand, params)
    assert decode_symbolic(tr, place(params), assoc, demand, params).all_recovered


@settings(max_examples=40, deadline=None)
@given(instances(antennas=1))
def test_xor_decode_recovers_everyone(inst):
    assoc, demand, params = inst
    tr = deliver(assoc, demand, params)
    lib = random_library(params, 7)
    assert decode_xor(tr, place(params), lib, assoc, demand, params).all_recovered


def test_corrupted_wire_reported():
    rng = random.Random(5)
    assoc, demand, params = make_instance(rng, max_caches=4, antennas=1)
    while params.t == params.num_caches:
        assoc, demand, params = make_instance(rng, max_caches=4, antennas=1)
    tr = deliver(assoc, demand, params)
    lib = random_library(params, 2)
    wire = encode_xor(tr, materialize(lib, params))
    wire[0] = bytes(b ^ 0xFF for b in wire[0])
    report = decode_xor(tr, place(params), lib, assoc, demand, params, wire=wire)
    assert report.failed_users() == set(tr.transmissions[0].users())


def test_single_deletion_breaks_exactly_its_users():
    rng = random.Random(11)
    for _ in range(10):
        assoc, demand, params = make_instance(rng, max_caches=4, antennas=1)
        tr = deliver(assoc, demand, params)
        lib = random_library(params, 1)
        caches = place(params)
        for i, x in enumerate(tr.transmissions):
            report = decode_xor(tr.without(i), caches, lib, assoc, demand, params)
            assert report.failed_users() == set(x.users())
