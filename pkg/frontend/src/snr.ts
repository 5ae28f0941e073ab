// Client-side mirror of the link-budget arithmetic, for the SNR tile.
// Display only: the measured figures (PER, goodput) always come from the
// service; this derives a nominal SNR from the configured channel.

import { ChannelConfig } from "./types";

export function lambertOrder(halfPowerAngleDeg: number): number {
  return -Math.log(2) / Math.log(Math.cos((halfPowerAngleDeg * Math.PI) / 180));
}

export function losGain(ch: ChannelConfig): number {
  if (ch.rx_angle_deg > ch.fov_deg) return 0;
  const m = lambertOrder(ch.half_power_angle_deg);
  const geo = ((m + 1) * ch.pd_area_m2) / (2 * Math.PI * ch.distance_m ** 2);
  return (
    geo *
    Math.cos((ch.tx_angle_deg * Math.PI) / 180) ** m *
    Math.cos((ch.rx_angle_deg * Math.PI) / 180)
  );
}

/** Electrical SNR in dB for a full drive swing; Infinity when noiseless. */
export function electricalSnrDb(ch: ChannelConfig, lo = 0, hi = 1): number {
  if (ch.noise_std_a === 0) return Infinity;
  const swing =
    ch.responsivity_a_per_w * ch.tx_power_w * losGain(ch) * (hi - lo);
  if (swing <= 0) return -Infinity;
  return 20 * Math.log10(swing / (2 * ch.noise_std_a));
}

export function snrDisplay(ch: ChannelConfig | undefined, lo = 0, hi = 1): string {
  if (!ch) return "—";
  const db = electricalSnrDb(ch, lo, hi);
  if (db === Infinity) return "∞ dB";
  return `${db.toFixed(1)} dB`;
}
