"""Golomb-compressed set: sorted hashed values stored as Rice-coded deltas.

Smaller than a Bloom filter at the same false-positive rate (about
log2(1/eps) + 1.6 bits per element versus 1.44*log2(1/eps)), at the price
of sequential access: membership requires decoding the stream, so bulk
queries should go through intersect_sorted, which answers every query in a
single pass.

Construction, for per-query rate eps = total_fp / max_queries:

* Rice parameter k = round(log2(1/eps)), clamped to [0, 56].
* Hash range R = N * 2^k; elements map to values in [0, R) by taking the
  first 8 bytes (little-endian) of SHA-256(element) as a u64 h and scaling:
  value = floor(h * R / 2^64). No modulo bias.
* Values are sorted; consecutive deltas (first delta is the first value)
  are Rice-coded: quotient delta >> k in unary (that many 1 bits, then a 0),
  remainder in exactly k bits, MSB-first. Hash collisions between elements
  stay in the stream as zero deltas, so num_elements always equals the
  input count.

Serialized layout (little-endian):

    u8 ds_type = 1 | u8 rice_param | u64 num_elements | u64 hash_range |
    u64 bitstream_bit_length | bitstream (MSB-first within bytes, zero-padded)

Encoding is one pass over the sorted values; decoding is a streaming cursor
owned by each call, so a built set is immutable and safe to share between
threads.
"""

from __future__ import annotations

import hashlib
import math
import struct

from .bloom import check_fp_parameters
from .errors import InvalidParameters, MalformedMessage

DS_TYPE = 1
_HEADER = struct.Struct("<BBQQQ")
MAX_RICE_PARAM = 56


def rice_parameter(max_queries: int, total_fp: float) -> int:
    eps = check_fp_parameters(max_queries, total_fp)
    k = math.floor(math.log2(1.0 / eps) + 0.5)
    return min(MAX_RICE_PARAM, max(0, k))


def _hash_to_range(element: bytes, hash_range: int) -> int:
    h = int.from_bytes(hashlib.sha256(element).digest()[0:8], "little")
    return h * hash_range >> 64


class _BitWriter:
    def __init__(self):
        self.out = bytearray()
        self.acc = 0
        self.nbits = 0

    def write(self, value: int, width: int) -> None:
        self.acc = (self.acc << width) | value
        self.nbits += width
        while self.nbits >= 8:
            self.nbits -= 8
            self.out.append((self.acc >> self.nbits) & 0xFF)
        self.acc &= (1 << self.nbits) - 1

    def write_unary(self, q: int) -> None:
        while q >= 32:
            self.write(0xFFFFFFFF, 32)
            q -= 32
        self.write((1 << (q + 1)) - 2, q + 1)  # q ones then the 0 terminator

    def finish(self) -> tuple[bytes, int]:
        total = 8 * len(self.out) + self.nbits
        if self.nbits:
            self.out.append((self.acc << (8 - self.nbits)) & 0xFF)
            self.acc = 0
            self.nbits = 0
        return bytes(self.out), total


class _BitReader:
    def __init__(self, buf: bytes, bit_length: int):
        self.buf = buf
        self.bit_length = bit_length
        self.pos = 0

    def read_bit(self) -> int | None:
        if self.pos >= self.bit_length:
            return None
        byte = self.buf[self.pos >> 3]
        bit = (byte >> (7 - (self.pos & 7))) & 1
        self.pos += 1
        return bit

    def read_bits(self, width: int) -> int | None:
        if self.pos + width > self.bit_length:
            return None
        value = 0
        pos = self.pos
        remaining = width
        while remaining:
            byte = self.buf[pos >> 3]
            offset = pos & 7
            take = min(8 - offset, remaining)
            chunk = (byte >> (8 - offset - take)) & ((1 << take) - 1)
            value = (value << take) | chunk
            pos += take
            remaining -= take
        self.pos = pos
        return value


class GolombCompressedSet:
    """Immutable compressed membership structure with no false negatives."""

    __slots__ = ("num_elements", "rice_param", "hash_range", "bitstream", "bit_length")

    def __init__(self, num_elements: int, rice_param: int, hash_range: int,
                 bitstream: bytes, bit_length: int):
        self.num_elements = num_elements
        self.rice_param = rice_param
        self.hash_range = hash_range
        self.bitstream = bitstream
        self.bit_length = bit_length

    @classmethod
    def build(cls, elements: list[bytes], max_queries: int, total_fp: float) -> "GolombCompressedSet":
        """One-pass encode of the elements' hashed values, sorted ascending."""
        k = rice_parameter(max_queries, total_fp)
        n = len(elements)
        hash_range = n << k
        values = sorted(_hash_to_range(e, hash_range) for e in elements)
        writer = _BitWriter()
        prev = 0
        for v in values:
            delta = v - prev
            writer.write_unary(delta >> k)
            if k:
                writer.write(delta & ((1 << k) - 1), k)
            prev = v
        stream, bit_length = writer.finish()
        return cls(n, k, hash_range, stream, bit_length)

    def _decode_values(self):
        """Yield the sorted hashed values; each call owns its own cursor.

        Tolerant of short streams (stops early) so that corrupt setup data
        degrades to fewer decoded values instead of an exception.
        """
        reader = _BitReader(self.bitstream, self.bit_length)
        k = self.rice_param
        value = 0
        for _ in range(self.num_elements):
            q = 0
            while True:
                bit = reader.read_bit()
                if bit is None:
                    return
                if bit == 0:
                    break
                q += 1
            remainder = reader.read_bits(k) if k else 0
            if remainder is None:
                return
            value += (q << k) | remainder
            yield value

    def contains(self, element: bytes) -> bool:
        """Single-element membership: a full stream scan, O(num_elements)."""
        if self.num_elements == 0:
            return False
        target = _hash_to_range(element, self.hash_range)
        for value in self._decode_values():
            if value == target:
                return True
            if value > target:
                return False
        return False

    def intersect_sorted(self, queries: list[bytes]) -> list[bool]:
        """Membership flag per query, in query order, in one stream pass."""
        flags = [False] * len(queries)
        if self.num_elements == 0 or not queries:
            return flags
        targets = [_hash_to_range(q, self.hash_range) for q in queries]
        order = sorted(range(len(queries)), key=targets.__getitem__)
        stream = self._decode_values()
        current = next(stream, None)
        for i in order:
            target = targets[i]
            while current is not None and current < target:
                current = next(stream, None)
            if current is None:
                break
            if current == target:
                flags[i] = True
        return flags

    def contains_many(self, elements: list[bytes]) -> list[bool]:
        return self.intersect_sorted(elements)

    def serialize(self) -> bytes:
        return _HEADER.pack(DS_TYPE, self.rice_param, self.num_elements,
                            self.hash_range, self.bit_length) + self.bitstream

    @classmethod
    def deserialize(cls, raw: bytes) -> "GolombCompressedSet":
        if len(raw) < _HEADER.size:
            raise MalformedMessage("gcs payload shorter than its 26-byte header")
        ds_type, k, n, hash_range, bit_length = _HEADER.unpack_from(raw)
        if ds_type != DS_TYPE:
            raise MalformedMessage("payload is not a gcs (ds_type=%d)" % ds_type)
        if k > MAX_RICE_PARAM:
            raise MalformedMessage("gcs rice_param %d out of [0, 56]" % k)
        if hash_range != n << k:
            raise MalformedMessage("gcs hash_range is not num_elements * 2^rice_param")
        # Structural bounds: every codeword is at least k+1 bits, and the
        # unary quotients cannot sum past hash_range >> k = num_elements.
        if bit_length < n * (k + 1) or bit_length > n * (k + 2):
            raise MalformedMessage("gcs bit length inconsistent with element count")
        body = raw[_HEADER.size:]
        expected = (bit_length + 7) // 8
        if len(body) != expected:
            raise MalformedMessage(
                "gcs bitstream is %d bytes, header implies %d" % (len(body), expected))
        pad = 8 * expected - bit_length
        if pad and body[-1] & ((1 << pad) - 1):
            raise MalformedMessage("gcs padding bits beyond bit_length are not zero")
        return cls(n, k, hash_range, bytes(body), bit_length)
