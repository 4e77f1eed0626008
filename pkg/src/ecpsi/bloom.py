"""Bloom filter sized for a total false-positive budget over many lookups.

Sizing uses the union bound: a filter provisioned for `max_queries` lookups
with total false-positive budget `total_fp` gets per-query rate
eps = total_fp / max_queries, and then the textbook optima

    num_bits   m = ceil(-N * ln(eps) / ln(2)^2)
    num_hashes h = round((m / N) * ln 2), clamped to [1, 64]

for N planned insertions. Bit positions come from one SHA-256 of the
element: its first 8 bytes (little-endian) seed a splitmix64 sequence and
probe j uses the j-th output mod m. Plain double hashing (h1 + j*h2 mod m)
was tried first and measurably breaks down at small m: any scheme that
reduces an element to two words mod m has a >= 1/m^2 full-collision floor,
orders of magnitude above per-query rates like 1e-11 when m is a few
hundred bits. The PRNG stretch keeps the one-digest cost and pushes the
floor to 2^-64.

Serialized layout (little-endian), the wire contract shared with the GCS
structure via the leading type byte:

    u8 ds_type = 0 | u32 num_hashes | u64 num_bits | bit array

The bit array is LSB-first within each byte and zero-padded to a whole
number of bytes.
"""

from __future__ import annotations

import hashlib
import math
import struct

from .errors import InvalidParameters, MalformedMessage

DS_TYPE = 0
_HEADER = struct.Struct("<BIQ")
_LN2 = math.log(2)
MAX_HASHES = 64

_M64 = (1 << 64) - 1


def probe_positions(element: bytes, num_hashes: int, num_bits: int):
    """Bit positions for an element: SHA-256 seed, splitmix64 stretch, mod m."""
    state = int.from_bytes(hashlib.sha256(element).digest()[0:8], "little")
    for _ in range(num_hashes):
        state = (state + 0x9E3779B97F4A7C15) & _M64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
        z ^= z >> 31
        yield z % num_bits


def optimal_num_bits(planned_insertions: int, per_query_fp: float) -> int:
    return max(1, math.ceil(-planned_insertions * math.log(per_query_fp) / (_LN2 * _LN2)))


def optimal_num_hashes(num_bits: int, planned_insertions: int) -> int:
    h = math.floor(num_bits / planned_insertions * _LN2 + 0.5)
    return min(MAX_HASHES, max(1, h))


def check_fp_parameters(max_queries: int, total_fp: float) -> float:
    """Validate the (n, p) pair and return the per-query rate p/n."""
    if not isinstance(max_queries, int) or max_queries < 1:
        raise InvalidParameters("max_queries must be an integer >= 1")
    if not 0.0 < total_fp < 1.0:
        raise InvalidParameters("total_fp must lie strictly between 0 and 1")
    return total_fp / max_queries


class BloomFilter:
    """Append-only bit-array membership structure with no false negatives."""

    __slots__ = ("num_bits", "num_hashes", "bits", "max_queries", "total_fp")

    def __init__(self, num_bits: int, num_hashes: int, bits: bytearray | None = None,
                 max_queries: int | None = None, total_fp: float | None = None):
        if num_bits < 1:
            raise InvalidParameters("num_bits must be >= 1")
        if not 1 <= num_hashes <= MAX_HASHES:
            raise InvalidParameters("num_hashes must be in [1, 64]")
        self.num_bits = num_bits
        self.num_hashes = num_hashes
        self.bits = bytearray((num_bits + 7) // 8) if bits is None else bits
        # Construction-time metadata; not part of the serialized form.
        self.max_queries = max_queries
        self.total_fp = total_fp

    @classmethod
    def create(cls, planned_insertions: int, max_queries: int, total_fp: float) -> "BloomFilter":
        """Size a filter so `max_queries` lookups stay within `total_fp` total."""
        if not isinstance(planned_insertions, int) or planned_insertions < 1:
            raise InvalidParameters("planned_insertions must be an integer >= 1")
        eps = check_fp_parameters(max_queries, total_fp)
        m = optimal_num_bits(planned_insertions, eps)
        h = optimal_num_hashes(m, planned_insertions)
        return cls(m, h, max_queries=max_queries, total_fp=total_fp)

    def insert(self, element: bytes) -> None:
        bits = self.bits
        for idx in probe_positions(element, self.num_hashes, self.num_bits):
            bits[idx >> 3] |= 1 << (idx & 7)

    def contains(self, element: bytes) -> bool:
        bits = self.bits
        for idx in probe_positions(element, self.num_hashes, self.num_bits):
            if not bits[idx >> 3] & (1 << (idx & 7)):
                return False
        return True

    def contains_many(self, elements: list[bytes]) -> list[bool]:
        return [self.contains(e) for e in elements]

    def popcount(self) -> int:
        return int.from_bytes(self.bits, "little").bit_count()

    def serialize(self) -> bytes:
        return _HEADER.pack(DS_TYPE, self.num_hashes, self.num_bits) + bytes(self.bits)

    @classmethod
    def deserialize(cls, raw: bytes) -> "BloomFilter":
        if len(raw) < _HEADER.size:
            raise MalformedMessage("bloom payload shorter than its 13-byte header")
        ds_type, num_hashes, num_bits = _HEADER.unpack_from(raw)
        if ds_type != DS_TYPE:
            raise MalformedMessage("payload is not a bloom filter (ds_type=%d)" % ds_type)
        if not 1 <= num_hashes <= MAX_HASHES:
            raise MalformedMessage("bloom num_hashes %d out of [1, 64]" % num_hashes)
        if num_bits < 1:
            raise MalformedMessage("bloom num_bits must be >= 1")
        body = raw[_HEADER.size:]
        expected = (num_bits + 7) // 8
        if len(body) != expected:
            raise MalformedMessage(
                "bloom bit array is %d bytes, header implies %d" % (len(body), expected))
        pad = 8 * expected - num_bits
        if pad and body[-1] >> (8 - pad):
            raise MalformedMessage("bloom padding bits beyond num_bits are not zero")
        return cls(num_bits, num_hashes, bytearray(body))
