"""Scenario files: plain UTF-8 `key = value` text, one parameter per line.

A scenario pins the channel physics plus the link defaults (mode, sps)
so a measurement is reproducible from one file.  Lines starting with #
are comments.  Keys and types:

  mode_id                 int     0..8
  sps                     int     samples per chip, power of two in [2, 16]
  distance_m              float
  half_power_angle_deg    float
  tx_angle_deg            float
  rx_angle_deg            float
  fov_deg                 float
  pd_area_m2              float
  responsivity_a_per_w    float
  tx_power_w              float
  ambient_current_a       float
  noise_std_a             float
  saturation_current_a    float
  seed                    int

Lookup order for a bare name: explicit path, $SILENCE_SCENARIO_DIR,
./scenarios/, then the scenarios/ directory next to this checkout.
"""

from __future__ import annotations

import os
from pathlib import Path

from .channel import ChannelParams
from .errors import ConfigError

ENV_DIR = "SILENCE_SCENARIO_DIR"

_INT_KEYS = {"mode_id", "sps", "seed"}
_FLOAT_KEYS = {
    "distance_m", "half_power_angle_deg", "tx_angle_deg", "rx_angle_deg",
    "fov_deg", "pd_area_m2", "responsivity_a_per_w", "tx_power_w",
    "ambient_current_a", "noise_std_a", "saturation_current_a",
}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS


def find_scenario(name: str) -> Path:
    candidates = [Path(name)]
    env_dir = os.environ.get(ENV_DIR)
    if env_dir:
        candidates.append(Path(env_dir) / name)
    candidates.append(Path.cwd() / "scenarios" / name)
    candidates.append(Path(__file__).resolve().parents[2] / "scenarios" / name)
    for cand in candidates:
        if cand.is_file():
            return cand
    raise ConfigError(f"scenario {name!r} not found "
                      f"(searched {', '.join(str(c) for c in candidates)})")


def parse_scenario(text: str) -> dict:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown scenario key {key!r}")
        try:
            values[key] = int(val) if key in _INT_KEYS else float(val)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value {val!r} for {key}") from None
    return values


def load_scenario(name: str) -> dict:
    path = find_scenario(name)
    return parse_scenario(path.read_text(encoding="utf-8"))


def scenario_channel(values: dict) -> ChannelParams:
    kwargs = {k: v for k, v in values.items() if k not in ("mode_id", "sps")}
    return ChannelParams(**kwargs)
