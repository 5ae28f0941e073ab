"""Run-length-limited line codes: Manchester (OOK) and 4B6B (VPPM).

Both codes emit DC-balanced chip blocks so the LED's mean light output is
independent of the data (flicker-free illumination).  Decoding is strict:
a chip pattern outside the code raises instead of guessing, since error
correction belongs to the FEC layer.

Chips are 0 = light low, 1 = light high.  Bit order is MSB first
everywhere in this package.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidCodewordError, InvalidPairError, SizeError

# Manchester mapping, bit -> chip pair.  The inverted convention can be
# selected where a deployment requires the opposite polarity.
_MAN_ENC = np.array([[0, 1], [1, 0]], dtype=np.uint8)
_MAN_ENC_INV = np.array([[1, 0], [0, 1]], dtype=np.uint8)
# pair value 2*c0+c1 -> bit, -1 marks the invalid pairs (0,0) and (1,1)
_MAN_DEC = np.array([-1, 0, 1, -1], dtype=np.int8)
_MAN_DEC_INV = np.array([-1, 1, 0, -1], dtype=np.int8)

# 4B6B mapping transcribed from IEEE 802.15.7 (Table 88): each nibble maps
# to a distinct 6-chip codeword of Hamming weight exactly 3.
FOURB6B_TABLE = (
    0b001110,  # 0x0
    0b001101,  # 0x1
    0b010011,  # 0x2
    0b010110,  # 0x3
    0b010101,  # 0x4
    0b100011,  # 0x5
    0b100110,  # 0x6
    0b100101,  # 0x7
    0b011001,  # 0x8
    0b011010,  # 0x9
    0b011100,  # 0xA
    0b110001,  # 0xB
    0b110010,  # 0xC
    0b101001,  # 0xD
    0b101010,  # 0xE
    0b101100,  # 0xF
)

_SEXTET_BITS = np.array([[(w >> s) & 1 for s in range(5, -1, -1)]
                         for w in FOURB6B_TABLE], dtype=np.uint8)
_SEXTET_DEC = np.full(64, -1, dtype=np.int8)
for _nibble, _word in enumerate(FOURB6B_TABLE):
    _SEXTET_DEC[_word] = _nibble

_POW2_6 = np.array([32, 16, 8, 4, 2, 1], dtype=np.int64)


def _as_u8(seq) -> np.ndarray:
    a = np.asarray(seq, dtype=np.uint8)
    if a.ndim != 1:
        raise SizeError("expected a flat bit/chip sequence")
    return a


def manchester_encode(bits, inverted: bool = False) -> np.ndarray:
    """Encode bits to chips, 0 -> (0,1), 1 -> (1,0); output is 2x input."""
    bits = _as_u8(bits)
    table = _MAN_ENC_INV if inverted else _MAN_ENC
    return table[bits].reshape(-1)


def manchester_decode(bits_or_chips, inverted: bool = False) -> np.ndarray:
    """Invert manchester_encode; raises InvalidPairError on (0,0)/(1,1)."""
    chips = _as_u8(bits_or_chips)
    if chips.size % 2:
        raise SizeError(f"odd chip count {chips.size}")
    pairs = chips.reshape(-1, 2)
    vals = (pairs[:, 0] << 1) | pairs[:, 1]
    table = _MAN_DEC_INV if inverted else _MAN_DEC
    bits = table[vals]
    bad = np.nonzero(bits < 0)[0]
    if bad.size:
        raise InvalidPairError(int(bad[0]))
    return bits.astype(np.uint8)


def fourb6b_encode(bits) -> np.ndarray:
    """Encode bits (length divisible by 4) to weight-3 sextets; 1.5x length."""
    bits = _as_u8(bits)
    if bits.size % 4:
        raise SizeError(f"bit count {bits.size} not divisible by 4")
    nibbles = bits.reshape(-1, 4)
    vals = (nibbles[:, 0] << 3) | (nibbles[:, 1] << 2) | (nibbles[:, 2] << 1) | nibbles[:, 3]
    return _SEXTET_BITS[vals].reshape(-1)


def fourb6b_decode(chips) -> np.ndarray:
    """Invert fourb6b_encode; raises InvalidCodewordError on unknown sextets."""
    chips = _as_u8(chips)
    if chips.size % 6:
        raise SizeError(f"chip count {chips.size} not divisible by 6")
    words = chips.reshape(-1, 6).astype(np.int64) @ _POW2_6
    nibbles = _SEXTET_DEC[words]
    bad = np.nonzero(nibbles < 0)[0]
    if bad.size:
        raise InvalidCodewordError(int(bad[0]))
    out = np.empty((nibbles.size, 4), dtype=np.uint8)
    out[:, 0] = (nibbles >> 3) & 1
    out[:, 1] = (nibbles >> 2) & 1
    out[:, 2] = (nibbles >> 1) & 1
    out[:, 3] = nibbles & 1
    return out.reshape(-1)
