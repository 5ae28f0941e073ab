"""Simulated optical medium: Lambertian LOS link, photodiode, noise, clipping.

The line-of-sight channel gain for a generalized Lambertian emitter of
order m (from the half-power semi-angle) and a photodiode of area A at
distance d, emission angle phi and incidence angle psi is

    H = (m + 1) * A / (2 pi d^2) * cos_m(phi) * cos(psi)      psi <= FOV
    H = 0                                                     otherwise
    m = -ln 2 / ln(cos half_power_angle)

Received photocurrent per transmitted drive sample x in [0, 1]:

    y = clip(R * Pt * H * x + I_ambient + n, 0, I_sat) / I_sat

with n Gaussian of the configured std, from a seeded generator.  The
division by the saturation current makes the output the receiver's
full-scale normalized sample stream (the virtual ADC boundary).  Noise
is one lumped Gaussian current: thermal and shot folded into a single
calibration knob.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError
from .waveform import IntensitySamples


def lambert_order(half_power_angle_deg: float) -> float:
    """Lambertian order m = -ln 2 / ln(cos half-power semi-angle)."""
    if not 0.0 < half_power_angle_deg < 90.0:
        raise ConfigError(
            f"half-power angle must lie in (0, 90) deg, got {half_power_angle_deg}")
    return -math.log(2.0) / math.log(math.cos(math.radians(half_power_angle_deg)))


@dataclass(frozen=True)
class ChannelParams:
    """Geometry, device physics and impairments of one simulated link."""

    distance_m: float = 2.0
    half_power_angle_deg: float = 30.0
    tx_angle_deg: float = 0.0
    rx_angle_deg: float = 0.0
    fov_deg: float = 60.0
    pd_area_m2: float = 1.0e-4
    responsivity_a_per_w: float = 0.5
    tx_power_w: float = 3.0
    ambient_current_a: float = 1.0e-4
    noise_std_a: float = 0.0
    saturation_current_a: float = 1.0e-2
    seed: int = 0

    def __post_init__(self):
        if self.distance_m <= 0:
            raise ConfigError("distance must be positive")
        lambert_order(self.half_power_angle_deg)  # validates the range
        if self.tx_angle_deg < 0 or self.rx_angle_deg < 0:
            raise ConfigError("angles must be >= 0")
        if not 0.0 < self.fov_deg <= 90.0:
            raise ConfigError("field of view must lie in (0, 90] deg")
        for name in ("pd_area_m2", "responsivity_a_per_w", "tx_power_w",
                     "saturation_current_a"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.ambient_current_a < 0 or self.noise_std_a < 0:
            raise ConfigError("ambient and noise currents must be >= 0")

    @property
    def lambertian_order(self) -> float:
        return lambert_order(self.half_power_angle_deg)

    def with_(self, **patch) -> "ChannelParams":
        return replace(self, **patch)


def los_gain(params: ChannelParams) -> float:
    """Line-of-sight channel gain H; zero outside the field of view."""
    if params.rx_angle_deg > params.fov_deg:
        return 0.0
    m = params.lambertian_order
    geo = (m + 1) * params.pd_area_m2 / (2.0 * math.pi * params.distance_m ** 2)
    return (geo * math.cos(math.radians(params.tx_angle_deg)) ** m
            * math.cos(math.radians(params.rx_angle_deg)))


def signal_current(params: ChannelParams, swing: float = 1.0) -> float:
    """Photocurrent produced by a drive swing of `swing` (hi - lo)."""
    return params.responsivity_a_per_w * params.tx_power_w * los_gain(params) * swing


def propagate(tx: IntensitySamples, params: ChannelParams,
              rng: np.random.Generator | None = None) -> IntensitySamples:
    """Drive samples -> normalized received samples, deterministic per seed."""
    if rng is None:
        rng = np.random.default_rng(params.seed)
    x = np.asarray(tx.samples, dtype=np.float64)
    scale = params.responsivity_a_per_w * params.tx_power_w * los_gain(params)
    y = scale * x + params.ambient_current_a
    if params.noise_std_a > 0:
        noise = rng.standard_normal(size=x.shape, dtype=np.float32)
        y = y + params.noise_std_a * noise
    np.clip(y, 0.0, params.saturation_current_a, out=y)
    return IntensitySamples(tx.sample_rate_hz, y / params.saturation_current_a)


def electrical_snr(params: ChannelParams, lo: float = 0.0, hi: float = 1.0) -> float:
    """Diagnostic SNR in dB: 20 log10(signal swing / (2 * noise std)).

    Returns math.inf when the channel is configured noiseless.
    """
    if params.noise_std_a == 0:
        return math.inf
    swing = signal_current(params, hi - lo)
    if swing <= 0:
        return -math.inf
    return 20.0 * math.log10(swing / (2.0 * params.noise_std_a))


@dataclass(frozen=True)
class LinkStats:
    """Counters and derived figures for one measurement window."""

    frames_tx: int = 0
    frames_ok: int = 0
    frames_hdr_fail: int = 0
    frames_crc_fail: int = 0
    frames_lost: int = 0
    per: float | None = None          # None until anything was sent
    goodput_bps: float = 0.0
    window_s: float = 5.0
    clipping: bool = False

    def as_dict(self) -> dict:
        return {
            "frames_tx": self.frames_tx,
            "frames_ok": self.frames_ok,
            "frames_hdr_fail": self.frames_hdr_fail,
            "frames_crc_fail": self.frames_crc_fail,
            "frames_lost": self.frames_lost,
            "per": self.per,
            "goodput_bps": self.goodput_bps,
            "window_s": self.window_s,
            "clipping": self.clipping,
        }
