"""Frame-level TX and RX pipelines over sample streams.

TX: MAC bytes -> PPDU chips -> intensity samples (plus a short lo-level
guard so consecutive frames never touch).  RX: a streaming decoder that
synchronizes on the preamble, decodes the PHY header at the family base
mode, then the PSDU at whatever mode the header names.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.signal import find_peaks

from .crc import hcs_crc16
from .errors import (ConfigError, HeaderError, IntegrityError,
                     SilenceError, TruncationError)
from .framing import (MacFrame, PHR_BYTES, PREAMBLE_CHIPS, build_ppdu,
                      fec_rll_decode, frame_chip_count, parse_mac_frame,
                      phr_chip_count, psdu_chip_count)
from .phy_modes import PhyMode, base_mode, mode_by_id
from .waveform import (DEFAULT_SYNC_THRESHOLD, IntensitySamples, demodulate,
                       estimate_levels, marker_confirmed, modulate_chips,
                       pearson_track, preamble_template)

GUARD_CHIPS = 32          # lo-level chips appended after every frame
CLIP_LEVEL = 0.999        # samples at or above this count as clipped


def modulate_ppdu(frame_bytes: bytes, mode: PhyMode, sps: int,
                  lo: float = 0.0, hi: float = 1.0,
                  guard_chips: int = GUARD_CHIPS) -> IntensitySamples:
    """Full TX pipeline for one frame: bytes -> chips -> samples + guard."""
    chips = build_ppdu(frame_bytes, mode)
    if guard_chips:
        chips = np.concatenate([chips, np.zeros(guard_chips, dtype=np.uint8)])
    return modulate_chips(chips, mode.family, sps, lo, hi)


def frame_airtime_s(mode: PhyMode, psdu_len: int,
                    guard_chips: int = GUARD_CHIPS) -> float:
    chips = frame_chip_count(mode, psdu_len) + guard_chips
    return chips / mode.optical_clock_hz


@dataclass
class RxEvent:
    """One classified reception: kind is 'ok', 'hdr_fail' or 'crc_fail'."""

    kind: str
    frame: MacFrame | None = None
    mcs_id: int | None = None
    end: int = 0              # sample index just past the decoded region


def decode_header_chips(phr_chips: np.ndarray, family: str) -> tuple[int, int]:
    """Decode and verify the PHY header; returns (mcs_id, psdu_len)."""
    try:
        phr = fec_rll_decode(phr_chips, base_mode(family), PHR_BYTES)
    except SilenceError as exc:
        raise HeaderError(str(exc)) from exc
    mcs_id, psdu_len = struct.unpack(">BH", phr[:3])
    if hcs_crc16(phr[:3]) != struct.unpack(">H", phr[3:])[0]:
        raise HeaderError("header check sequence mismatch")
    try:
        mode = mode_by_id(mcs_id)
    except ConfigError:
        raise HeaderError(f"unknown mode {mcs_id}") from None
    if mode.family != family:
        raise HeaderError(f"mode {mcs_id} is not a {family} mode")
    return mcs_id, psdu_len


def decode_frame_at(x, offset: int, family: str, sps: int) -> RxEvent:
    """Decode one frame whose post-preamble boundary sits at `offset`.

    Raises TruncationError if the stream ends inside the frame, so a
    streaming caller can wait for more samples.
    """
    n_phr = phr_chip_count(family)
    fam_mode = base_mode(family)
    levels = estimate_levels(x, offset, family, sps)
    phr_chips = demodulate(x, offset, fam_mode, sps, n_phr, levels)
    phr_end = offset + n_phr * sps
    try:
        mcs_id, psdu_len = decode_header_chips(phr_chips, family)
    except HeaderError:
        return RxEvent("hdr_fail", end=phr_end)
    mode = mode_by_id(mcs_id)
    n_psdu = psdu_chip_count(mode, psdu_len)
    end = phr_end + n_psdu * sps
    psdu_chips = demodulate(x, phr_end, mode, sps, n_psdu, levels)
    try:
        frame_bytes = fec_rll_decode(psdu_chips, mode, psdu_len)
        frame = parse_mac_frame(frame_bytes)
    except (SilenceError, IntegrityError):
        return RxEvent("crc_fail", mcs_id=mcs_id, end=end)
    return RxEvent("ok", frame=frame, mcs_id=mcs_id, end=end)


class StreamReceiver:
    """Incremental decoder over an unbounded sample stream.

    Feed blocks with process(); classified frames come back as RxEvent
    lists (on_event fires too, if given).  end_of_stream() flushes
    frames that were detected but still incomplete.
    """

    def __init__(self, family: str, sps: int,
                 threshold: float = DEFAULT_SYNC_THRESHOLD,
                 on_event: Callable[[RxEvent], None] | None = None):
        self.family = family
        self.sps = sps
        self.threshold = threshold
        self.on_event = on_event
        self._buf = np.zeros(0, dtype=np.float64)
        self._template = preamble_template(family, sps)
        self._scan_from = 0          # first correlation window not finalized
        self._last_peak = -10 ** 12  # offset of the last accepted peak
        self._done_until = 0         # sample index below which frames are decoded
        self._pending: list[int] = []
        self._clipped = 0
        self._seen = 0

    @property
    def clip_fraction(self) -> float:
        return self._clipped / self._seen if self._seen else 0.0

    def reset_clip_counter(self):
        self._clipped = 0
        self._seen = 0

    def process(self, block: IntensitySamples) -> list[RxEvent]:
        x = np.asarray(block.samples, dtype=np.float64)
        self._seen += x.size
        self._clipped += int(np.count_nonzero(x >= CLIP_LEVEL))
        if x.size:
            self._buf = np.concatenate([self._buf, x])
        return self._drain(final=False)

    def end_of_stream(self) -> list[RxEvent]:
        return self._drain(final=True)

    def _scan(self, final: bool):
        n = self._template.size
        last_window = self._buf.size - n
        if last_window < self._scan_from:
            return
        rho = pearson_track(self._buf[self._scan_from:], self._template)
        padded = np.concatenate([[-2.0], rho, [-2.0]])
        peaks, _ = find_peaks(padded, height=self.threshold, distance=n)
        for p in peaks:
            local = int(p) - 1
            if not final and local == rho.size - 1:
                continue          # needs its right neighbour; rescan later
            window = self._scan_from + local
            if not marker_confirmed(self._buf, window, self.family, self.sps,
                                    self.threshold):
                continue
            offset = window + n
            if offset >= self._last_peak + n:
                self._pending.append(offset)
                self._last_peak = offset
        # the very last window is re-examined once its neighbour exists
        self._scan_from = last_window if not final else last_window + 1

    def _drain(self, final: bool) -> list[RxEvent]:
        self._scan(final)
        events: list[RxEvent] = []
        while self._pending:
            offset = self._pending[0]
            if offset < self._done_until:   # peak inside a decoded frame
                self._pending.pop(0)
                continue
            try:
                ev = decode_frame_at(self._buf, offset, self.family, self.sps)
            except TruncationError:
                if not final:
                    break
                ev = RxEvent("crc_fail", end=self._buf.size)
            self._pending.pop(0)
            self._done_until = max(self._done_until, ev.end)
            events.append(ev)
            if self.on_event:
                self.on_event(ev)
        self._trim()
        return events

    def _trim(self):
        n = self._template.size
        pre = (PREAMBLE_CHIPS + 1) * self.sps
        if self._pending:
            keep_from = self._pending[0] - pre
        else:
            keep_from = min(self._scan_from, self._buf.size)
        keep_from = max(keep_from, 0)
        if keep_from > 0:
            self._buf = self._buf[keep_from:]
            self._scan_from = max(self._scan_from - keep_from, 0)
            self._pending = [p - keep_from for p in self._pending]
            self._last_peak -= keep_from
            self._done_until = max(self._done_until - keep_from, 0)
