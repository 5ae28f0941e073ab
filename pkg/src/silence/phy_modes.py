"""PHY-I operating mode table.

The nine PHY-I modes pair a modulation (OOK at a 200 kHz optical clock,
VPPM at 400 kHz) with a run-length-limited line code and an optional
Reed-Solomon / convolutional FEC stage.  Every data rate in the table is
the exact product

    rate = optical_clock * rll_rate * rs_rate * cc_rate

with missing codes counting as rate 1.  Rates are kept as reals; rounded
figures are for display only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError

OOK_CLOCK_HZ = 200_000
VPPM_CLOCK_HZ = 400_000

MANCHESTER_RATE = Fraction(1, 2)
FOURB6B_RATE = Fraction(2, 3)


@dataclass(frozen=True)
class PhyMode:
    """One PHY-I operating point."""

    id: int
    modulation: str          # "OOK" | "VPPM"
    optical_clock_hz: int
    rll: str                 # "Manchester" | "4B6B"
    rs: tuple[int, int] | None     # (n, k) with n = 15
    cc_rate: Fraction | None       # 1/4, 1/3 or 2/3
    nominal_rate_bps: float

    @property
    def family(self) -> str:
        return self.modulation

    @property
    def rll_rate(self) -> Fraction:
        return MANCHESTER_RATE if self.rll == "Manchester" else FOURB6B_RATE

    @property
    def rs_rate(self) -> Fraction:
        return Fraction(self.rs[1], self.rs[0]) if self.rs else Fraction(1)


def _mode(mid, modulation, rll, rs, cc) -> PhyMode:
    clock = OOK_CLOCK_HZ if modulation == "OOK" else VPPM_CLOCK_HZ
    rll_rate = MANCHESTER_RATE if rll == "Manchester" else FOURB6B_RATE
    rs_rate = Fraction(rs[1], rs[0]) if rs else Fraction(1)
    cc_rate = cc if cc else Fraction(1)
    rate = float(clock * rll_rate * rs_rate * cc_rate)
    return PhyMode(mid, modulation, clock, rll, rs, cc, rate)


# IEEE 802.15.7 PHY I: modes 0-4 are OOK/Manchester at 200 kHz, modes 5-8
# VPPM/4B6B at 400 kHz.  RS is always over GF(16) with n = 15.
_MODE_TABLE: tuple[PhyMode, ...] = (
    _mode(0, "OOK", "Manchester", (15, 7), Fraction(1, 4)),
    _mode(1, "OOK", "Manchester", (15, 11), Fraction(1, 3)),
    _mode(2, "OOK", "Manchester", (15, 11), Fraction(2, 3)),
    _mode(3, "OOK", "Manchester", (15, 11), None),
    _mode(4, "OOK", "Manchester", None, None),
    _mode(5, "VPPM", "4B6B", (15, 2), None),
    _mode(6, "VPPM", "4B6B", (15, 4), None),
    _mode(7, "VPPM", "4B6B", (15, 7), None),
    _mode(8, "VPPM", "4B6B", None, None),
)

# PHY headers always ride the most robust mode of the active clock family.
BASE_MODE_ID = {"OOK": 0, "VPPM": 5}


def mode_table() -> list[PhyMode]:
    """Return the nine PHY-I modes ordered by id."""
    return list(_MODE_TABLE)


def mode_by_id(mode_id: int) -> PhyMode:
    """Look up a mode; raises ConfigError for ids outside 0..8."""
    if not isinstance(mode_id, int) or not 0 <= mode_id <= 8:
        raise ConfigError(f"unknown PHY mode id {mode_id!r}")
    return _MODE_TABLE[mode_id]


def data_rate(mode: PhyMode) -> float:
    """Net data rate in bit/s: clock * rll_rate * rs_rate * cc_rate."""
    cc = mode.cc_rate if mode.cc_rate else Fraction(1)
    return float(mode.optical_clock_hz * mode.rll_rate * mode.rs_rate * cc)


def base_mode(family: str) -> PhyMode:
    """Lowest-rate (most robust) mode of a clock family."""
    if family not in BASE_MODE_ID:
        raise ConfigError(f"unknown modulation family {family!r}")
    return _MODE_TABLE[BASE_MODE_ID[family]]
