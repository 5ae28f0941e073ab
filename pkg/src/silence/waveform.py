"""Chip-to-sample modulation, preamble synchronization, demodulation.

Everything is baseband intensity: rectangular pulses, no carrier, no
pulse shaping.  The simulated channel, not the DSP, is the bandwidth
bottleneck, mirroring the LED-limited link this models.

Conventions (see FRAME_FORMAT.md):
  OOK   chip 0 -> sps samples at `lo`, chip 1 -> sps samples at `hi`
  VPPM  chip 0 -> hi then lo half-periods, chip 1 -> lo then hi
        (50 % duty whatever the data, so mean light output is constant)

Synchronization is normalized (Pearson) cross-correlation against the
family preamble; mean removal makes it invariant to DC ambient offsets,
and the norm division to any positive gain.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve, find_peaks

from .errors import ConfigError, TruncationError
from .framing import PREAMBLE_CHIPS, PREAMBLE_FAST_CHIPS, preamble_chips
from .phy_modes import OOK_CLOCK_HZ, VPPM_CLOCK_HZ, PhyMode

DEFAULT_SYNC_THRESHOLD = 0.75


@dataclass(frozen=True)
class IntensitySamples:
    """A block of normalized optical intensity at a declared sample rate."""

    sample_rate_hz: int
    samples: np.ndarray

    def __len__(self):
        return len(self.samples)


def _check_levels(lo: float, hi: float):
    if not 0.0 <= lo < hi <= 1.0:
        raise ConfigError(f"levels must satisfy 0 <= lo < hi <= 1, got {lo}, {hi}")


def modulate_ook(chips, sps: int, lo: float = 0.0, hi: float = 1.0,
                 clock_hz: int = OOK_CLOCK_HZ) -> IntensitySamples:
    """Rectangular OOK: each chip becomes sps samples at lo or hi."""
    if sps < 2:
        raise ConfigError(f"sps must be >= 2, got {sps}")
    _check_levels(lo, hi)
    chips = np.asarray(chips, dtype=np.uint8)
    levels = np.where(chips > 0, hi, lo)
    return IntensitySamples(clock_hz * sps, np.repeat(levels, sps))


def modulate_vppm(bits, sps: int, lo: float = 0.0, hi: float = 1.0,
                  clock_hz: int = VPPM_CLOCK_HZ) -> IntensitySamples:
    """50 % duty pulse position: bit 0 -> hi,lo halves; bit 1 -> lo,hi."""
    if sps < 2 or sps % 2:
        raise ConfigError(f"VPPM needs an even sps >= 2, got {sps}")
    _check_levels(lo, hi)
    bits = np.asarray(bits, dtype=np.uint8)
    half = np.empty(2 * bits.size, dtype=np.uint8)
    half[0::2] = 1 - bits
    half[1::2] = bits
    levels = np.where(half > 0, hi, lo)
    return IntensitySamples(clock_hz * sps, np.repeat(levels, sps // 2))


def modulate_chips(chips, family: str, sps: int, lo: float = 0.0,
                   hi: float = 1.0) -> IntensitySamples:
    if family == "OOK":
        return modulate_ook(chips, sps, lo, hi)
    return modulate_vppm(chips, sps, lo, hi)


def modulate_frame(chips, mode: PhyMode, sps: int, lo: float = 0.0,
                   hi: float = 1.0) -> IntensitySamples:
    return modulate_chips(chips, mode.family, sps, lo, hi)


@lru_cache(maxsize=None)
def preamble_template(family: str, sps: int) -> np.ndarray:
    """Unit-level preamble waveform used as the correlation template."""
    t = modulate_chips(preamble_chips(family), family, sps, lo=0.0, hi=1.0)
    arr = t.samples.astype(np.float64)
    arr.setflags(write=False)
    return arr


def _as_array(samples) -> np.ndarray:
    if isinstance(samples, IntensitySamples):
        return np.asarray(samples.samples, dtype=np.float64)
    return np.asarray(samples, dtype=np.float64)


def pearson_track(x: np.ndarray, template: np.ndarray) -> np.ndarray:
    """Normalized correlation of every window of len(template) against it.

    NaN samples (transport erasures) are treated as dead windows with
    correlation -1 so they can never trigger a detection.
    """
    p = template - template.mean()
    p_norm = float(np.sqrt(np.sum(p * p)))
    n = template.size
    bad = np.isnan(x)
    xf = np.where(bad, 0.0, x)

    num = fftconvolve(xf, p[::-1], mode="valid")
    csum = np.concatenate([[0.0], np.cumsum(xf)])
    csq = np.concatenate([[0.0], np.cumsum(xf * xf)])
    wsum = csum[n:] - csum[:-n]
    wsq = csq[n:] - csq[:-n]
    var = np.maximum(wsq - wsum * wsum / n, 0.0)
    denom = np.sqrt(var) * p_norm
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(denom > 1e-30, num / np.maximum(denom, 1e-300), 0.0)
    if bad.any():
        nbad = np.concatenate([[0.0], np.cumsum(bad)])
        touched = (nbad[n:] - nbad[:-n]) > 0
        rho[touched] = -1.0
    return rho


def marker_confirmed(x: np.ndarray, window_start: int, family: str, sps: int,
                     threshold: float) -> bool:
    """Second-stage check of a sync candidate against the marker word only.

    The 64 fast-lock chips are an alternating pattern that line-coded
    data can imitate (any constant-bit run does); the 32-chip marker is
    what actually identifies a preamble, so a candidate peak must also
    match it on its own.
    """
    template = preamble_template(family, sps)
    m0 = PREAMBLE_FAST_CHIPS * sps
    marker = template[m0:]
    region = x[window_start + m0: window_start + m0 + marker.size]
    if region.size < marker.size or np.isnan(region).any():
        return False
    mt = marker - marker.mean()
    rt = region - region.mean()
    denom = float(np.sqrt(np.sum(mt * mt) * np.sum(rt * rt)))
    if denom <= 1e-30:
        return False
    return float(np.dot(mt, rt)) / denom >= threshold


def synchronize(samples, family: str, sps: int,
                threshold: float = DEFAULT_SYNC_THRESHOLD) -> list[int]:
    """Find frames; returns offsets of the first post-preamble sample."""
    x = _as_array(samples)
    template = preamble_template(family, sps)
    n = template.size
    if x.size < n:
        return []
    rho = pearson_track(x, template)
    padded = np.concatenate([[-2.0], rho, [-2.0]])
    peaks, _ = find_peaks(padded, height=threshold, distance=n)
    return [int(p - 1 + n) for p in peaks
            if marker_confirmed(x, int(p - 1), family, sps, threshold)]


def estimate_levels(samples, offset: int, family: str, sps: int) -> tuple[float, float]:
    """Per-frame lo/hi estimate from the known preamble chips as pilots."""
    x = _as_array(samples)
    n_pre = PREAMBLE_CHIPS * sps
    if offset < n_pre or offset > x.size:
        raise TruncationError("offset leaves no room for the preamble")
    region = x[offset - n_pre: offset]
    template = preamble_template(family, sps)
    hi = float(region[template > 0.5].mean())
    lo = float(region[template <= 0.5].mean())
    return lo, hi


def demodulate(samples, offset: int, mode: PhyMode, sps: int,
               n_chips: int, levels: tuple[float, float] | None = None) -> np.ndarray:
    """Recover n_chips hard chip decisions starting at a sample offset.

    OOK integrates each chip and slices at the midpoint of the estimated
    lo/hi levels (self-calibrating against gain and DC offset); VPPM
    compares the energy of the two half-periods of each chip.
    """
    x = _as_array(samples)
    need = offset + n_chips * sps
    if need > x.size:
        raise TruncationError(f"need {need} samples, have {x.size}")
    region = x[offset:need].reshape(n_chips, sps)
    if mode.family == "VPPM":
        half = sps // 2
        first = region[:, :half].sum(axis=1)
        second = region[:, half:].sum(axis=1)
        return (second > first).astype(np.uint8)
    if levels is None:
        levels = estimate_levels(samples, offset, mode.family, sps)
    thr = 0.5 * (levels[0] + levels[1])
    return (region.mean(axis=1) > thr).astype(np.uint8)
