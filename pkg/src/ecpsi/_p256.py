"""P-256 (secp256r1) domain parameters and prime-field helpers.

The curve is y^2 = x^3 - 3x + B over GF(P). The group of points is cyclic
of prime order (cofactor 1), so every non-identity point is a generator and
no cofactor clearing is ever needed.

Field arithmetic uses gmpy2 when importable (Legendre symbols and square
roots are an order of magnitude faster); otherwise plain pow() is used.
"""

P = 0xFFFFFFFF00000001000000000000000000000000FFFFFFFFFFFFFFFFFFFFFFFF
A = P - 3
B = 0x5AC635D8AA3A93E7B3EBBD55769886BC651D06B0CC53B0F63BCE3C3E27D2604B
GX = 0x6B17D1F2E12C4247F8BCE6E563A440F277037D812DEB33A0F4A13945D898C296
GY = 0x4FE342E2FE1A7F9B8EE7EB4A7C0F9E162BCE33576B315ECECBB6406837BF51F5
ORDER = 0xFFFFFFFF00000000FFFFFFFFFFFFFFFFBCE6FAADA7179E84F3B9CAC2FC632551

SCALAR_BYTES = 32
POINT_BYTES = 33

# P % 4 == 3, so sqrt(a) = a^((P+1)/4) whenever a is a quadratic residue.
_SQRT_EXP = (P + 1) // 4

try:
    import gmpy2 as _gmpy2

    def is_residue(a: int) -> bool:
        return _gmpy2.legendre(a % P, P) == 1

    def sqrt_mod(a: int) -> int | None:
        a = a % P
        r = int(_gmpy2.powmod(a, _SQRT_EXP, P))
        return r if r * r % P == a else None

except ImportError:  # pragma: no cover - exercised only without gmpy2

    def is_residue(a: int) -> bool:
        return pow(a % P, (P - 1) // 2, P) == 1

    def sqrt_mod(a: int) -> int | None:
        a = a % P
        r = pow(a, _SQRT_EXP, P)
        return r if r * r % P == a else None


def curve_rhs(x: int) -> int:
    """Right-hand side x^3 - 3x + B of the curve equation."""
    return (x * x % P * x - 3 * x + B) % P


def is_on_curve(x: int, y: int) -> bool:
    if not (0 <= x < P and 0 <= y < P):
        return False
    return y * y % P == curve_rhs(x)
