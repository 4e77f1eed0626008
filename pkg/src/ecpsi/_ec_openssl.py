"""Scalar multiplication on P-256 through the system libcrypto (OpenSSL).

A ctypes binding, so no compiled extension is needed. Only generic EC_*/BN_*
entry points that have been stable since OpenSSL 1.1 are used. Every call
allocates its own EC_POINT/BIGNUM temporaries, so concurrent use from
multiple threads is safe; the shared EC_GROUP is never written after load.

Not constant time (neither is the pure backend); see the package README.
"""

import ctypes
import ctypes.util

_NID_X9_62_PRIME256V1 = 415

_REQUIRED = (
    "EC_GROUP_new_by_curve_name",
    "EC_POINT_new",
    "EC_POINT_free",
    "EC_POINT_mul",
    "EC_POINT_set_affine_coordinates",
    "EC_POINT_get_affine_coordinates",
    "EC_POINT_is_at_infinity",
    "BN_new",
    "BN_free",
    "BN_bin2bn",
    "BN_bn2binpad",
)


def _load():
    name = ctypes.util.find_library("crypto")
    if name is None:
        return None
    try:
        lib = ctypes.CDLL(name)
    except OSError:
        return None
    if not all(hasattr(lib, sym) for sym in _REQUIRED):
        return None

    vp, ci, cs = ctypes.c_void_p, ctypes.c_int, ctypes.c_char_p
    lib.EC_GROUP_new_by_curve_name.restype = vp
    lib.EC_GROUP_new_by_curve_name.argtypes = [ci]
    lib.EC_POINT_new.restype = vp
    lib.EC_POINT_new.argtypes = [vp]
    lib.EC_POINT_free.restype = None
    lib.EC_POINT_free.argtypes = [vp]
    lib.EC_POINT_mul.restype = ci
    lib.EC_POINT_mul.argtypes = [vp, vp, vp, vp, vp, vp]
    lib.EC_POINT_set_affine_coordinates.restype = ci
    lib.EC_POINT_set_affine_coordinates.argtypes = [vp, vp, vp, vp, vp]
    lib.EC_POINT_get_affine_coordinates.restype = ci
    lib.EC_POINT_get_affine_coordinates.argtypes = [vp, vp, vp, vp, vp]
    lib.EC_POINT_is_at_infinity.restype = ci
    lib.EC_POINT_is_at_infinity.argtypes = [vp, vp]
    lib.BN_new.restype = vp
    lib.BN_new.argtypes = []
    lib.BN_free.restype = None
    lib.BN_free.argtypes = [vp]
    lib.BN_bin2bn.restype = vp
    lib.BN_bin2bn.argtypes = [cs, ci, vp]
    lib.BN_bn2binpad.restype = ci
    lib.BN_bn2binpad.argtypes = [vp, cs, ci]
    return lib


_LIB = _load()
_GROUP = None
if _LIB is not None:
    _GROUP = _LIB.EC_GROUP_new_by_curve_name(_NID_X9_62_PRIME256V1)
    if not _GROUP:
        _LIB = None

available = _LIB is not None


def mult(x: int, y: int, k: int) -> tuple[int, int]:
    """Return the affine coordinates of k * (x, y).

    The caller guarantees (x, y) is on the curve and 1 <= k < order, so the
    result is never the identity. Raises RuntimeError if libcrypto rejects
    the inputs anyway.
    """
    lib = _LIB
    pt = res = bx = by = bk = rx = ry = None
    try:
        bx = lib.BN_bin2bn(x.to_bytes(32, "big"), 32, None)
        by = lib.BN_bin2bn(y.to_bytes(32, "big"), 32, None)
        bk = lib.BN_bin2bn(k.to_bytes(32, "big"), 32, None)
        pt = lib.EC_POINT_new(_GROUP)
        res = lib.EC_POINT_new(_GROUP)
        if not (bx and by and bk and pt and res):
            raise RuntimeError("libcrypto allocation failed")
        if lib.EC_POINT_set_affine_coordinates(_GROUP, pt, bx, by, None) != 1:
            raise RuntimeError("libcrypto rejected point coordinates")
        if lib.EC_POINT_mul(_GROUP, res, None, pt, bk, None) != 1:
            raise RuntimeError("EC_POINT_mul failed")
        if lib.EC_POINT_is_at_infinity(_GROUP, res):
            raise RuntimeError("scalar multiplication hit the identity")
        rx = lib.BN_new()
        ry = lib.BN_new()
        if lib.EC_POINT_get_affine_coordinates(_GROUP, res, rx, ry, None) != 1:
            raise RuntimeError("EC_POINT_get_affine_coordinates failed")
        xb = ctypes.create_string_buffer(32)
        yb = ctypes.create_string_buffer(32)
        if lib.BN_bn2binpad(rx, xb, 32) < 0 or lib.BN_bn2binpad(ry, yb, 32) < 0:
            raise RuntimeError("BN_bn2binpad failed")
        return int.from_bytes(xb.raw, "big"), int.from_bytes(yb.raw, "big")
    finally:
        for h in (bx, by, bk, rx, ry):
            if h:
                lib.BN_free(h)
        for h in (pt, res):
            if h:
                lib.EC_POINT_free(h)
