"""Pure-Python P-256 scalar multiplication (Jacobian coordinates).

Fallback for hosts without a loadable libcrypto, and the slower half of the
cross-backend consistency tests. Roughly 20x slower than the OpenSSL path.
"""

from . import _p256

_P = _p256.P


def _jac_double(X1, Y1, Z1):
    # a = -3 doubling formulas
    ZZ = Z1 * Z1 % _P
    YY = Y1 * Y1 % _P
    M = 3 * (X1 - ZZ) * (X1 + ZZ) % _P
    S = 4 * X1 * YY % _P
    X3 = (M * M - 2 * S) % _P
    Y3 = (M * (S - X3) - 8 * YY * YY) % _P
    Z3 = 2 * Y1 * Z1 % _P
    return X3, Y3, Z3


def _jac_add_affine(X1, Y1, Z1, x2, y2):
    # mixed addition with an affine second operand (Z2 = 1)
    if Z1 == 0:
        return x2, y2, 1
    Z1Z1 = Z1 * Z1 % _P
    U2 = x2 * Z1Z1 % _P
    S2 = y2 * Z1 * Z1Z1 % _P
    H = (U2 - X1) % _P
    if H == 0:
        if (S2 - Y1) % _P == 0:
            return _jac_double(X1, Y1, Z1)
        return 0, 1, 0
    HH = H * H % _P
    I = 4 * HH % _P
    J = H * I % _P
    r = 2 * (S2 - Y1) % _P
    V = X1 * I % _P
    X3 = (r * r - J - 2 * V) % _P
    Y3 = (r * (V - X3) - 2 * Y1 * J) % _P
    Z3 = ((Z1 + H) * (Z1 + H) - Z1Z1 - HH) % _P
    return X3, Y3, Z3


def mult(x: int, y: int, k: int) -> tuple[int, int]:
    """Affine coordinates of k * (x, y); caller guarantees 1 <= k < order."""
    X, Y, Z = 0, 1, 0
    for bit in bin(k)[2:]:
        X, Y, Z = _jac_double(X, Y, Z)
        if bit == "1":
            X, Y, Z = _jac_add_affine(X, Y, Z, x, y)
    if Z == 0:
        raise RuntimeError("scalar multiplication hit the identity")
    zinv = pow(Z, -1, _P)
    zinv2 = zinv * zinv % _P
    return X * zinv2 % _P, Y * zinv2 * zinv % _P


available = True
