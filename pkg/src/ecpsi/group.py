"""Prime-order group layer: scalars, curve points, and hash-to-group.

All of the protocol's algebra lives here. The group is P-256 behind a thin
backend seam (set ECPSI_EC_BACKEND=pure|openssl to force one); any
prime-order group could be substituted by swapping this module's internals
while keeping the byte contracts:

* points encode to exactly 33 bytes: one prefix byte 0x02/0x03 carrying the
  parity of y, then the x coordinate big-endian;
* scalars encode to exactly 32 bytes big-endian, values in [1, order-1].

hash_to_group is try-and-increment: for counter i = 0, 1, 2, ... take
SHA-256(be32(i) || input) as a candidate x coordinate and accept the first
one that lands on the curve; y's parity is the low bit (last byte & 1) of
SHA-256(0xFF || be32(i) || input). Deterministic, so both parties map equal
inputs to equal points. Expected two iterations per call.
"""

from __future__ import annotations

import hashlib
import os
import secrets
import struct

from . import _ec_openssl, _ec_pure, _p256
from .errors import InvalidParameters, InvalidPoint

ORDER = _p256.ORDER
SCALAR_BYTES = _p256.SCALAR_BYTES
POINT_BYTES = _p256.POINT_BYTES

_MAX_HASH_INPUT = 2**32 - 1


def _pick_backend():
    forced = os.environ.get("ECPSI_EC_BACKEND", "auto").lower()
    if forced == "pure":
        return _ec_pure, "pure"
    if forced == "openssl":
        if not _ec_openssl.available:
            raise RuntimeError("ECPSI_EC_BACKEND=openssl but libcrypto is not loadable")
        return _ec_openssl, "openssl"
    if _ec_openssl.available:
        return _ec_openssl, "openssl"
    return _ec_pure, "pure"


_BACKEND, _BACKEND_NAME = _pick_backend()


def backend_name() -> str:
    """Which scalar-multiplication backend is active ('openssl' or 'pure')."""
    return _BACKEND_NAME


class Scalar:
    """An exponent in [1, order-1]. Zero is rejected: it has no inverse."""

    __slots__ = ("value",)

    def __init__(self, value: int):
        if not 1 <= value <= ORDER - 1:
            raise InvalidParameters("scalar out of range [1, order-1]")
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def __eq__(self, other):
        return isinstance(other, Scalar) and self.value == other.value

    def __hash__(self):
        return hash(("Scalar", self.value))

    def __repr__(self):
        return "Scalar(<%d bits>)" % self.value.bit_length()

    def to_bytes(self) -> bytes:
        return self.value.to_bytes(SCALAR_BYTES, "big")

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Scalar":
        if len(raw) != SCALAR_BYTES:
            raise InvalidParameters("scalar encoding must be exactly 32 bytes")
        return cls(int.from_bytes(raw, "big"))


class GroupElement:
    """A non-identity point, held as affine x plus the parity of y.

    The full y coordinate is recovered (one field square root) only when an
    exponentiation needs it, then cached. Construction always validates that
    x names a point on the curve, so a GroupElement is valid by construction.
    Instances are immutable and hash/compare by their encoding.
    """

    __slots__ = ("x", "y_parity", "_y")

    def __init__(self, x: int, y: int | None = None, y_parity: int | None = None):
        if y is not None:
            if not _p256.is_on_curve(x, y):
                raise InvalidPoint("coordinates are not on the curve")
            y_parity = y & 1
        else:
            if y_parity not in (0, 1):
                raise InvalidPoint("y parity must be 0 or 1")
            if not 0 <= x < _p256.P:
                raise InvalidPoint("x out of field range")
            rhs = _p256.curve_rhs(x)
            if rhs == 0 or not _p256.is_residue(rhs):
                raise InvalidPoint("x is not the abscissa of a curve point")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y_parity", y_parity)
        object.__setattr__(self, "_y", y)

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    @property
    def y(self) -> int:
        if self._y is None:
            root = _p256.sqrt_mod(_p256.curve_rhs(self.x))
            if root is None:  # unreachable: checked at construction
                raise InvalidPoint("x lost curve membership")
            if root & 1 != self.y_parity:
                root = _p256.P - root
            object.__setattr__(self, "_y", root)
        return self._y

    def __eq__(self, other):
        return (
            isinstance(other, GroupElement)
            and self.x == other.x
            and self.y_parity == other.y_parity
        )

    def __hash__(self):
        return hash(("GroupElement", self.x, self.y_parity))

    def __repr__(self):
        return "GroupElement(%s)" % self.encode().hex()

    def encode(self) -> bytes:
        """33-byte compressed encoding: 0x02|parity prefix + big-endian x."""
        return bytes((2 | self.y_parity,)) + self.x.to_bytes(32, "big")

    @classmethod
    def decode(cls, raw: bytes) -> "GroupElement":
        if len(raw) != POINT_BYTES:
            raise InvalidPoint("point encoding must be exactly 33 bytes")
        if raw[0] not in (2, 3):
            raise InvalidPoint("bad point prefix 0x%02x" % raw[0])
        return cls(int.from_bytes(raw[1:], "big"), y_parity=raw[0] & 1)


def random_scalar() -> Scalar:
    """Uniform scalar in [1, order-1] by rejection sampling (no mod bias)."""
    while True:
        value = int.from_bytes(secrets.token_bytes(SCALAR_BYTES), "big")
        if 1 <= value <= ORDER - 1:
            return Scalar(value)


def invert_scalar(s: Scalar) -> Scalar:
    """Multiplicative inverse modulo the group order."""
    return Scalar(pow(s.value, -1, ORDER))


def exp(e: GroupElement, s: Scalar) -> GroupElement:
    """e raised to the scalar s (scalar multiplication of the point)."""
    x, y = _BACKEND.mult(e.x, e.y, s.value)
    return GroupElement(x, y)


def hash_to_group(data: bytes) -> GroupElement:
    """Deterministically map arbitrary bytes to a non-identity group element."""
    if len(data) > _MAX_HASH_INPUT:
        raise InvalidParameters("hash_to_group input longer than 2^32 - 1 bytes")
    for counter in range(1 << 32):
        ctr = struct.pack(">I", counter)
        x = int.from_bytes(hashlib.sha256(ctr + data).digest(), "big")
        if x >= _p256.P:
            continue
        rhs = _p256.curve_rhs(x)
        if rhs == 0 or not _p256.is_residue(rhs):
            continue
        parity = hashlib.sha256(b"\xff" + ctr + data).digest()[-1] & 1
        return GroupElement(x, y_parity=parity)
    raise RuntimeError("hash_to_group exhausted its counter space")  # pragma: no cover


def encode_element(e: GroupElement) -> bytes:
    return e.encode()


def decode_element(raw: bytes) -> GroupElement:
    return GroupElement.decode(raw)
