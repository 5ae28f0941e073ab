// Console state: a mirror of the node's config, the rolling stats series
// and the chat transcript.  Every PER/goodput number in here arrived in a
// service push; the store never fabricates one.

import { ChatMsg, LinkConfig, StatsMsg, TranscriptRow } from "./types";

export const HISTORY_LEN = 240; // two minutes of 500 ms pushes

export class ConsoleStore {
  config: LinkConfig | null = null;
  lastStats: StatsMsg | null = null;
  history: { time: number; per: number | null; goodput: number }[] = [];
  transcript: TranscriptRow[] = [];
  stale = false;
  connected = false;

  private lastRxSeq: number | null = null;
  private lostAtLastChat = 0;

  applyConfig(cfg: LinkConfig) {
    this.config = cfg;
  }

  applyStats(msg: StatsMsg) {
    this.lastStats = msg;
    this.history.push({ time: msg.time, per: msg.per, goodput: msg.goodput_bps });
    if (this.history.length > HISTORY_LEN) {
      this.history.splice(0, this.history.length - HISTORY_LEN);
    }
  }

  /**
   * Append a chat line.  A jump in received sequence numbers alone is not
   * loss (probe and stream frames share the counter); a marker row appears
   * only when the link actually reported lost frames since the last chat.
   */
  applyChat(msg: ChatMsg) {
    if (msg.direction === "rx") {
      const lostNow = this.lastStats?.frames_lost ?? 0;
      const gap = this.lastRxSeq !== null && msg.seq > this.lastRxSeq + 1;
      if (gap && lostNow > this.lostAtLastChat) {
        this.transcript.push({
          kind: "lost",
          text: `⟂ ${lostNow - this.lostAtLastChat} lost`,
          time: msg.time,
        });
      }
      this.lastRxSeq = msg.seq;
      this.lostAtLastChat = lostNow;
    }
    this.transcript.push({
      kind: "chat",
      direction: msg.direction,
      seq: msg.seq,
      text: msg.text,
      time: msg.time,
    });
  }

  perDisplay(): string {
    const per = this.lastStats?.per;
    if (per === null || per === undefined) return "—";
    return per === 0 ? "0 %" : `${(100 * per).toPrecision(3)} %`;
  }

  goodputDisplay(): string {
    const g = this.lastStats?.goodput_bps;
    if (g === undefined) return "—";
    if (g >= 1000) return `${(g / 1000).toFixed(1)} kb/s`;
    return `${g.toFixed(0)} b/s`;
  }
}
