"""Shared test helpers: an independent EC reference and fast data makers."""

import pathlib
import random

import pytest

GOLDEN_DIR = pathlib.Path(__file__).parent / "golden"

# --- Independent affine-coordinates P-256 reference -------------------------
# Deliberately naive (per-step modular inverses, textbook formulas) and kept
# free of any package imports so it can serve as an oracle for both backends.

_P = 0xFFFFFFFF00000001000000000000000000000000FFFFFFFFFFFFFFFFFFFFFFFF
_B = 0x5AC635D8AA3A93E7B3EBBD55769886BC651D06B0CC53B0F63BCE3C3E27D2604B


def ref_add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2 and (y1 + y2) % _P == 0:
        return None
    if p1 == p2:
        lam = (3 * x1 * x1 - 3) * pow(2 * y1, -1, _P) % _P
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, _P) % _P
    x3 = (lam * lam - x1 - x2) % _P
    return x3, (lam * (x1 - x3) - y1) % _P


def ref_mult(point, k):
    acc = None
    addend = point
    while k:
        if k & 1:
            acc = ref_add(acc, addend)
        addend = ref_add(addend, addend)
        k >>= 1
    return acc


def ref_on_curve(x, y):
    return y * y % _P == (x * x * x - 3 * x + _B) % _P


# --- Fast generators ---------------------------------------------------------

try:
    from gmpy2 import legendre as _legendre

    def _is_residue(a):
        return _legendre(a, _P) == 1
except ImportError:
    def _is_residue(a):
        return pow(a, (_P - 1) // 2, _P) == 1


def random_point_encodings(count: int, rng: random.Random) -> list[bytes]:
    """Valid, uniformly distributed 33-byte point encodings, ~3 us each.

    Only the encoding is produced (no y computation), which is all the
    compressed-set structures ever see.
    """
    out = []
    while len(out) < count:
        x = rng.getrandbits(256)
        if x >= _P:
            continue
        rhs = (x * x * x - 3 * x + _B) % _P
        if rhs == 0 or not _is_residue(rhs):
            continue
        out.append(bytes((2 | rng.getrandbits(1),)) + x.to_bytes(32, "big"))
    return out


def plaintext_intersection_indices(server_elements, client_elements):
    members = set(server_elements)
    return [i for i, y in enumerate(client_elements) if y in members]


@pytest.fixture
def rng():
    return random.Random(0xEC951)
