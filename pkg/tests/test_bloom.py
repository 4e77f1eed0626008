"""Bloom filter: sizing formulas, membership semantics, wire layout."""

import math
import random
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecpsi.bloom import BloomFilter, optimal_num_bits, optimal_num_hashes
from ecpsi.errors import InvalidParameters, MalformedMessage

from conftest import random_point_encodings

elements_lists = st.lists(st.binary(min_size=0, max_size=64), min_size=0, max_size=200)


def test_sizing_matches_closed_form():
    # recompute with independent arithmetic
    for n_ins, n_q, p in [(10_000, 1, 1e-6), (1000, 100, 1e-9), (5, 3, 0.25), (1, 1, 0.5)]:
        f = BloomFilter.create(n_ins, n_q, p)
        eps = p / n_q
        m = math.ceil(-n_ins * math.log(eps) / math.log(2) ** 2)
        assert f.num_bits == max(1, m)
        assert f.num_hashes == min(64, max(1, round(m / n_ins * math.log(2))))


def test_reference_row_sizes_exact():
    # serialized = 13-byte header + ceil(m/8); spot-check two reference rows
    f = BloomFilter.create(10_000, 1, 1e-6)
    assert len(f.serialize()) == 13 + (f.num_bits + 7) // 8
    assert abs(len(f.serialize()) - 36_000) / 36_000 < 0.02
    f = BloomFilter.create(10_000, 1, 1e-9)
    assert abs(len(f.serialize()) - 54_000) / 54_000 < 0.02


def test_create_rejects_bad_parameters():
    for args in [(0, 1, 0.5), (-3, 1, 0.5), (1, 0, 0.5), (1, 1, 0.0), (1, 1, 1.0), (1, 1, 1.5), (1, 1, -0.1)]:
        with pytest.raises(InvalidParameters):
            BloomFilter.create(*args)
    with pytest.raises(InvalidParameters):
        BloomFilter.create(2.5, 1, 0.5)


@settings(max_examples=50, deadline=None)
@given(elements_lists)
def test_no_false_negatives(elements):
    f = BloomFilter.create(max(1, len(elements)), 10, 1e-4)
    for e in elements:
        f.insert(e)
    assert all(f.contains(e) for e in elements)


def test_insert_is_idempotent():
    f = BloomFilter.create(16, 1, 1e-3)
    f.insert(b"thing")
    once = f.serialize()
    f.insert(b"thing")
    assert f.serialize() == once


def test_popcount_bounded_by_hashes_times_inserts(rng):
    f = BloomFilter.create(500, 1, 1e-6)
    for e in (rng.randbytes(33) for _ in range(500)):
        f.insert(e)
    assert f.popcount() <= f.num_hashes * 500


def test_empty_filter_contains_nothing(rng):
    f = BloomFilter.create(100, 1, 1e-9)
    assert not any(f.contains(rng.randbytes(33)) for _ in range(1000))
    assert f.popcount() == 0


def test_zero_insert_filter_round_trips():
    f = BloomFilter.create(1, 1, 0.5)
    g = BloomFilter.deserialize(f.serialize())
    assert g.serialize() == f.serialize()


def test_round_trip_answers_identically(rng):
    f = BloomFilter.create(1000, 1, 1e-4)
    corpus = [rng.randbytes(20) for _ in range(1000)]
    for e in corpus:
        f.insert(e)
    g = BloomFilter.deserialize(f.serialize())
    probes = corpus + [rng.randbytes(20) for _ in range(9000)]
    assert [f.contains(p) for p in probes] == [g.contains(p) for p in probes]


def test_determinism_same_sequence_same_bits(rng):
    seq = [rng.randbytes(10) for _ in range(200)]
    a = BloomFilter.create(200, 1, 1e-6)
    b = BloomFilter.create(200, 1, 1e-6)
    for e in seq:
        a.insert(e)
        b.insert(e)
    assert a.serialize() == b.serialize()


def test_wire_layout_byte_for_byte():
    f = BloomFilter(num_bits=13, num_hashes=2)
    raw = f.serialize()
    assert raw[:13] == struct.pack("<BIQ", 0, 2, 13)
    assert raw[13:] == bytes(2)
    # recompute the probe positions with an independent splitmix64 copy
    import hashlib
    e = b"layout-probe"
    state = int.from_bytes(hashlib.sha256(e).digest()[0:8], "little")
    positions = set()
    mask = (1 << 64) - 1
    for _ in range(2):
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        positions.add((z ^ (z >> 31)) % 13)
    f.insert(e)
    expect = bytearray(2)
    for i in positions:
        expect[i >> 3] |= 1 << (i & 7)
    assert f.serialize()[13:] == bytes(expect)


def test_deserialize_rejects_corruption():
    f = BloomFilter.create(50, 1, 1e-4)
    f.insert(b"x")
    raw = f.serialize()
    with pytest.raises(MalformedMessage):
        BloomFilter.deserialize(raw[:-1])
    with pytest.raises(MalformedMessage):
        BloomFilter.deserialize(raw + b"\x00")
    with pytest.raises(MalformedMessage):
        BloomFilter.deserialize(b"\x01" + raw[1:])  # wrong ds_type
    with pytest.raises(MalformedMessage):
        BloomFilter.deserialize(raw[:5])  # inside the header
    bad_h = bytearray(raw)
    bad_h[1:5] = struct.pack("<I", 0)
    with pytest.raises(MalformedMessage):
        BloomFilter.deserialize(bytes(bad_h))
    bad_h[1:5] = struct.pack("<I", 65)
    with pytest.raises(MalformedMessage):
        BloomFilter.deserialize(bytes(bad_h))
    bad_m = bytearray(raw)
    bad_m[5:13] = struct.pack("<Q", 0)
    with pytest.raises(MalformedMessage):
        BloomFilter.deserialize(bytes(bad_m))


def test_deserialize_rejects_nonzero_padding():
    f = BloomFilter.create(1, 1, 0.5)  # tiny m, guaranteed padding bits
    assert f.num_bits % 8 != 0
    raw = bytearray(f.serialize())
    raw[-1] |= 0x80  # highest bit of the last byte is past num_bits
    with pytest.raises(MalformedMessage):
        BloomFilter.deserialize(bytes(raw))


def test_false_positive_rate_near_design_point(rng):
    # quick version of the acceptance measurement: eps = 1e-3, 1e5 probes
    n = 10_000
    members = random_point_encodings(n, rng)
    f = BloomFilter.create(n, 1, 1e-3)
    for e in members:
        f.insert(e)
    probes = random_point_encodings(100_000, rng)
    hits = sum(f.contains(p) for p in probes)
    assert hits / len(probes) <= 2e-3
