"""Wire format: round trips, exact sizes, golden fixtures, hostile input."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecpsi.bloom import BloomFilter
from ecpsi.errors import MalformedMessage
from ecpsi.gcs import GolombCompressedSet
from ecpsi.wire import (
    MAX_ELEMENTS,
    RequestMessage,
    ResponseMessage,
    SetupMessage,
    decode_message,
    encode_message,
)

from conftest import GOLDEN_DIR, random_point_encodings

_rng = random.Random(0x111)
_POOL = random_point_encodings(64, _rng)

points = st.lists(st.sampled_from(_POOL), min_size=0, max_size=40)


@settings(max_examples=60, deadline=None)
@given(points, st.booleans())
def test_request_round_trip_and_exact_size(elements, reveal):
    msg = RequestMessage(reveal, elements)
    raw = encode_message(msg)
    assert len(raw) == 11 + 33 * len(elements)
    back = decode_message(raw)
    assert back == msg
    assert encode_message(back) == raw


@settings(max_examples=60, deadline=None)
@given(points)
def test_response_round_trip_and_exact_size(elements):
    msg = ResponseMessage(elements)
    raw = encode_message(msg)
    assert len(raw) == 10 + 33 * len(elements)
    assert decode_message(raw) == msg


def test_setup_round_trip_both_structures(rng):
    bf = BloomFilter.create(50, 5, 1e-6)
    for e in random_point_encodings(50, rng):
        bf.insert(e)
    g = GolombCompressedSet.build(random_point_encodings(50, rng), 5, 1e-6)
    for structure in (bf, g):
        raw = encode_message(SetupMessage(structure))
        back = decode_message(raw)
        assert isinstance(back, SetupMessage)
        assert encode_message(back) == raw


def test_encode_is_deterministic():
    msg = RequestMessage(True, _POOL[:7])
    assert encode_message(msg) == encode_message(msg)


def test_golden_fixtures_decode_and_reencode_byte_identical():
    manifest = json.loads((GOLDEN_DIR / "manifest.json").read_text())
    for name in manifest["files"].values():
        raw = (GOLDEN_DIR / name).read_bytes()
        msg = decode_message(raw)
        assert encode_message(msg) == raw
    req = decode_message((GOLDEN_DIR / "request_reveal.bin").read_bytes())
    assert req.reveal_intersection is True
    assert len(req.elements) == len(manifest["client_elements"])
    req = decode_message((GOLDEN_DIR / "request_psic.bin").read_bytes())
    assert req.reveal_intersection is False
    resp = decode_message((GOLDEN_DIR / "response_bloom_psic.bin").read_bytes())
    assert resp.elements == sorted(resp.elements)


def test_truncation_at_every_offset_is_malformed():
    for name in ("setup_bloom.bin", "setup_gcs.bin", "request_reveal.bin",
                 "response_bloom_reveal.bin"):
        raw = (GOLDEN_DIR / name).read_bytes()
        for cut in range(len(raw)):
            with pytest.raises(MalformedMessage):
                decode_message(raw[:cut])


def test_mutation_fuzz_small():
    # the 1e5-case run lives in the acceptance suite
    rng = random.Random(99)
    fixtures = [(GOLDEN_DIR / n).read_bytes()
                for n in ("setup_gcs.bin", "request_reveal.bin", "response_bloom_psic.bin")]
    for _ in range(3000):
        raw = bytearray(rng.choice(fixtures))
        for _ in range(rng.randint(1, 4)):
            raw[rng.randrange(len(raw))] = rng.randrange(256)
        try:
            decode_message(bytes(raw))
        except MalformedMessage:
            pass


def test_decode_error_catalogue():
    good = encode_message(RequestMessage(False, _POOL[:2]))
    with pytest.raises(MalformedMessage, match="magic"):
        decode_message(b"NOPE" + good[4:])
    with pytest.raises(MalformedMessage, match="version"):
        decode_message(good[:4] + b"\x02" + good[5:])
    with pytest.raises(MalformedMessage, match="msg_type"):
        decode_message(good[:5] + b"\x09" + good[6:])
    with pytest.raises(MalformedMessage, match="reveal"):
        decode_message(good[:6] + b"\x02" + good[7:])
    with pytest.raises(MalformedMessage):
        decode_message(good + b"\x00")  # trailing byte
    with pytest.raises(MalformedMessage):
        decode_message(b"")
    # count says 3 but only 2 points present
    bad = bytearray(good)
    bad[7] = 3
    with pytest.raises(MalformedMessage, match="11 \\+ 33"):
        decode_message(bytes(bad))
    # corrupt a point: x of all 0xff is >= the field prime
    bad = bytearray(good)
    bad[12:44] = b"\xff" * 32
    with pytest.raises(MalformedMessage, match="element 0 \\(at byte 11\\)"):
        decode_message(bytes(bad))


def test_count_cap_rejected_before_allocation():
    head = encode_message(ResponseMessage([]))[:6]
    huge = head + (MAX_ELEMENTS + 1).to_bytes(4, "little")
    with pytest.raises(MalformedMessage, match="cap"):
        decode_message(huge)


def test_setup_unknown_ds_type():
    raw = encode_message(SetupMessage(BloomFilter.create(1, 1, 0.5)))
    bad = bytearray(raw)
    bad[6] = 7
    with pytest.raises(MalformedMessage, match="ds_type"):
        decode_message(bytes(bad))
    with pytest.raises(MalformedMessage, match="payload"):
        decode_message(raw[:6])
