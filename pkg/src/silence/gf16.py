"""GF(2^4) arithmetic under the primitive polynomial x^4 + x + 1.

Multiplication and division go through log/antilog tables indexed by the
powers of the generator alpha = x (binary 2).  Addition is XOR.  The
tables are built once at import; all functions are pure.
"""

from __future__ import annotations

import numpy as np

FIELD_SIZE = 16
ORDER = FIELD_SIZE - 1          # multiplicative group order
PRIM_POLY = 0b10011             # x^4 + x + 1
ALPHA = 2


def _build_tables():
    exp = [0] * (2 * ORDER)
    log = [0] * FIELD_SIZE
    x = 1
    for i in range(ORDER):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & FIELD_SIZE:
            x ^= PRIM_POLY
    for i in range(ORDER, 2 * ORDER):
        exp[i] = exp[i - ORDER]
    return exp, log


GF_EXP, GF_LOG = _build_tables()

# numpy copies for vectorised codeword math; LOG[0] is a sentinel that the
# callers must mask out before use.
GF_EXP_NP = np.array(GF_EXP, dtype=np.uint8)
GF_LOG_NP = np.array(GF_LOG, dtype=np.int64)


def gf16_add(a: int, b: int) -> int:
    return a ^ b


def gf16_mul(a: int, b: int) -> int:
    """Polynomial product mod x^4 + x + 1."""
    if a == 0 or b == 0:
        return 0
    return GF_EXP[GF_LOG[a] + GF_LOG[b]]


def gf16_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by the field zero")
    if a == 0:
        return 0
    return GF_EXP[GF_LOG[a] + ORDER - GF_LOG[b]]


def gf16_pow(a: int, n: int) -> int:
    if a == 0:
        return 0 if n else 1
    return GF_EXP[(GF_LOG[a] * n) % ORDER]


def gf16_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("the field zero has no inverse")
    return GF_EXP[ORDER - GF_LOG[a]]


# -- polynomials, lowest index = highest degree coefficient -----------------

def poly_mul(p, q):
    r = [0] * (len(p) + len(q) - 1)
    for j, qj in enumerate(q):
        if qj:
            for i, pi in enumerate(p):
                r[i + j] ^= gf16_mul(pi, qj)
    return r


def poly_eval(p, x: int) -> int:
    """Horner evaluation of p at x."""
    y = p[0]
    for c in p[1:]:
        y = gf16_mul(y, x) ^ c
    return y


def poly_scale(p, s: int):
    return [gf16_mul(c, s) for c in p]


def poly_add(p, q):
    r = [0] * max(len(p), len(q))
    r[len(r) - len(p):] = p
    for i, c in enumerate(q):
        r[i + len(r) - len(q)] ^= c
    return r
