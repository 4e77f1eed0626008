"""Binary wire format for the three protocol messages.

Every message starts with the 6-byte frame header (little-endian where a
field is wider than one byte):

    magic "PSI1" (4 bytes) | version u8 = 1 | msg_type u8

msg_type 1 (setup):    the serialized compressed set follows (its leading
                       ds_type byte says whether it is a Bloom filter or a
                       Golomb-compressed set).
msg_type 2 (request):  u8 reveal (0/1) | u32 count | count * 33-byte points.
msg_type 3 (response): u32 count | count * 33-byte points.

So a request is exactly 11 + 33n bytes and a response 10 + 33n. Decoding is
total: every length field is validated against the actual buffer before
anything is materialized, counts are capped at 2^24 elements, every point
is checked to be a valid curve encoding, and failures raise
MalformedMessage with a byte-offset diagnostic. decode(encode(m)) == m and
encode is deterministic, byte-identical across platforms.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

from . import bloom as _bloom
from . import gcs as _gcs
from .errors import InvalidPoint, MalformedMessage
from .group import POINT_BYTES, GroupElement

MAGIC = b"PSI1"
VERSION = 1
MSG_SETUP = 1
MSG_REQUEST = 2
MSG_RESPONSE = 3
MAX_ELEMENTS = 1 << 24

_FRAME = struct.Struct("<4sBB")
_U32 = struct.Struct("<I")


@dataclass
class SetupMessage:
    """Carries the server's compressed encrypted set (and nothing else)."""

    structure: _bloom.BloomFilter | _gcs.GolombCompressedSet

    @property
    def ds_type(self) -> int:
        return _bloom.DS_TYPE if isinstance(self.structure, _bloom.BloomFilter) else _gcs.DS_TYPE

    def __eq__(self, other):
        return (isinstance(other, SetupMessage)
                and self.structure.serialize() == other.structure.serialize())


@dataclass
class RequestMessage:
    reveal_intersection: bool
    elements: list[bytes] = field(default_factory=list)


@dataclass
class ResponseMessage:
    elements: list[bytes] = field(default_factory=list)


def _check_points(buf: bytes, count: int, offset: int) -> list[bytes]:
    elements = []
    for i in range(count):
        start = offset + i * POINT_BYTES
        raw = buf[start:start + POINT_BYTES]
        try:
            GroupElement.decode(raw)
        except InvalidPoint as exc:
            raise MalformedMessage(
                "element %d (at byte %d) is not a curve point: %s" % (i, start, exc)
            ) from exc
        elements.append(raw)
    return elements


def encode_message(msg: SetupMessage | RequestMessage | ResponseMessage) -> bytes:
    if isinstance(msg, SetupMessage):
        return _FRAME.pack(MAGIC, VERSION, MSG_SETUP) + msg.structure.serialize()
    if isinstance(msg, RequestMessage):
        head = _FRAME.pack(MAGIC, VERSION, MSG_REQUEST)
        head += bytes((1 if msg.reveal_intersection else 0,))
        head += _U32.pack(len(msg.elements))
        return head + b"".join(msg.elements)
    if isinstance(msg, ResponseMessage):
        head = _FRAME.pack(MAGIC, VERSION, MSG_RESPONSE) + _U32.pack(len(msg.elements))
        return head + b"".join(msg.elements)
    raise TypeError("not a wire message: %r" % (msg,))


def decode_message(buf: bytes) -> SetupMessage | RequestMessage | ResponseMessage:
    if len(buf) < _FRAME.size:
        raise MalformedMessage("buffer of %d bytes is shorter than the 6-byte frame header"
                               % len(buf))
    magic, version, msg_type = _FRAME.unpack_from(buf)
    if magic != MAGIC:
        raise MalformedMessage("bad magic at byte 0")
    if version != VERSION:
        raise MalformedMessage("unsupported version %d at byte 4" % version)
    body = buf[_FRAME.size:]

    if msg_type == MSG_SETUP:
        if not body:
            raise MalformedMessage("setup message carries no payload (byte 6)")
        if body[0] == _bloom.DS_TYPE:
            return SetupMessage(_bloom.BloomFilter.deserialize(body))
        if body[0] == _gcs.DS_TYPE:
            return SetupMessage(_gcs.GolombCompressedSet.deserialize(body))
        raise MalformedMessage("unknown ds_type %d at byte 6" % body[0])

    if msg_type == MSG_REQUEST:
        if len(body) < 5:
            raise MalformedMessage("request truncated inside its header (byte %d)" % len(buf))
        reveal = body[0]
        if reveal not in (0, 1):
            raise MalformedMessage("reveal flag at byte 6 must be 0 or 1, got %d" % reveal)
        (count,) = _U32.unpack_from(body, 1)
        if count > MAX_ELEMENTS:
            raise MalformedMessage("request count %d exceeds the 2^24 cap" % count)
        if len(body) != 5 + count * POINT_BYTES:
            raise MalformedMessage(
                "request length %d does not match 11 + 33*%d" % (len(buf), count))
        return RequestMessage(bool(reveal), _check_points(buf, count, 11))

    if msg_type == MSG_RESPONSE:
        if len(body) < 4:
            raise MalformedMessage("response truncated inside its header (byte %d)" % len(buf))
        (count,) = _U32.unpack_from(body, 0)
        if count > MAX_ELEMENTS:
            raise MalformedMessage("response count %d exceeds the 2^24 cap" % count)
        if len(body) != 4 + count * POINT_BYTES:
            raise MalformedMessage(
                "response length %d does not match 10 + 33*%d" % (len(buf), count))
        return ResponseMessage(_check_points(buf, count, 10))

    raise MalformedMessage("unknown msg_type %d at byte 5" % msg_type)
