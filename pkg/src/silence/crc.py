"""Checksums used by the frame formats.

The PHY header check sequence is CRC-16/CCITT-FALSE: polynomial 0x1021,
initial register 0xFFFF, no bit reflection, no final xor.  MAC frame
integrity is standard CRC-32 (0x04C11DB7 reflected, init/final
0xFFFFFFFF), which is exactly zlib.crc32.
"""

from __future__ import annotations

import zlib


def _crc16_table() -> tuple[int, ...]:
    table = []
    for byte in range(256):
        reg = byte << 8
        for _ in range(8):
            reg = ((reg << 1) ^ 0x1021 if reg & 0x8000 else reg << 1) & 0xFFFF
        table.append(reg)
    return tuple(table)


_CRC16_TABLE = _crc16_table()


def hcs_crc16(data: bytes) -> int:
    """CRC-16/CCITT-FALSE over data; empty input leaves the 0xFFFF init."""
    reg = 0xFFFF
    for byte in data:
        reg = ((reg << 8) ^ _CRC16_TABLE[((reg >> 8) ^ byte) & 0xFF]) & 0xFFFF
    return reg


def frame_crc32(data: bytes) -> int:
    return zlib.crc32(data) & 0xFFFFFFFF
