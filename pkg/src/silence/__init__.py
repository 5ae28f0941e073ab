"""Software-defined IEEE 802.15.7 PHY-I visible light link.

A complete transmit/receive stack (line coding, Reed-Solomon and
convolutional FEC, framing, modulation, synchronization) over a simulated
Lambertian LED/photodiode channel, with a live link engine, measurement
tooling and an HTTP/WebSocket control service.
"""

__version__ = "0.1.0"

from .channel import ChannelParams, LinkStats, electrical_snr, lambert_order, los_gain, propagate
from .framing import FrameKind, MacFrame, build_mac_frame, build_ppdu, parse_mac_frame, recover_ppdu
from .link_engine import LinkConfig, LinkEngine, run_per_scan
from .phy_modes import PhyMode, data_rate, mode_by_id, mode_table
from .waveform import IntensitySamples, demodulate, modulate_ook, modulate_vppm, synchronize

__all__ = [
    "ChannelParams", "FrameKind", "IntensitySamples", "LinkConfig",
    "LinkEngine", "LinkStats", "MacFrame", "PhyMode", "build_mac_frame",
    "build_ppdu", "data_rate", "demodulate", "electrical_snr",
    "lambert_order", "los_gain", "mode_by_id", "mode_table", "modulate_ook",
    "modulate_vppm", "parse_mac_frame", "propagate", "recover_ppdu",
    "run_per_scan", "synchronize", "__version__",
]
