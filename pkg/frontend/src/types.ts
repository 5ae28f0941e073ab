// Wire types of the control service (see ../API.md).

export interface ChannelConfig {
  distance_m: number;
  half_power_angle_deg: number;
  tx_angle_deg: number;
  rx_angle_deg: number;
  fov_deg: number;
  pd_area_m2: number;
  responsivity_a_per_w: number;
  tx_power_w: number;
  ambient_current_a: number;
  noise_std_a: number;
  saturation_current_a: number;
  seed: number;
}

export interface LinkConfig {
  mode_id: number;
  sps: number;
  medium: string;
  role: string;
  lo: number;
  hi: number;
  sync_threshold: number;
  probe_interval_s: number;
  stats_window_s: number;
  tx_queue_limit: number;
  pacing: boolean;
  guard_chips: number;
  loss_timeout_s: number;
  channel: ChannelConfig;
}

export interface StatsMsg {
  type?: string;
  frames_tx: number;
  frames_ok: number;
  frames_hdr_fail: number;
  frames_crc_fail: number;
  frames_lost: number;
  per: number | null;
  goodput_bps: number;
  window_s: number;
  clipping: boolean;
  time: number;
}

export interface ChatMsg {
  type: "chat";
  direction: "tx" | "rx";
  seq: number;
  text: string;
  time: number;
}

export interface ErrorMsg {
  type: "error";
  error: string;
}

export interface ModeRow {
  id: number;
  modulation: string;
  clock_hz: number;
  rll: string;
  rs: [number, number] | null;
  cc: string | null;
  rate_bps: number;
}

export type ServerMsg = (StatsMsg & { type: "stats" }) | ChatMsg | ErrorMsg;

export interface TranscriptRow {
  kind: "chat" | "lost";
  direction?: "tx" | "rx";
  seq?: number;
  text: string;
  time: number;
}
