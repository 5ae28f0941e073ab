// REST + WebSocket client for one control service.
//
// The WebSocket constructor is injectable so the same client runs in the
// browser (native WebSocket) and under Node tests (the `ws` package).

import { LinkConfig, ModeRow, ServerMsg, StatsMsg } from "./types";

export interface WsLike {
  send(data: string): void;
  close(): void;
  addEventListener(ev: string, fn: (event: any) => void): void;
}

export type WsFactory = (url: string) => WsLike;

export interface ClientEvents {
  onStats?: (msg: StatsMsg) => void;
  onChat?: (msg: ServerMsg) => void;
  onError?: (text: string) => void;
  onConnected?: () => void;
  onStale?: (stale: boolean) => void;
}

export const STALE_AFTER_MS = 3000;

export class ServiceClient {
  private base: string;
  private wsUrl: string;
  private makeWs: WsFactory;
  private sock: WsLike | null = null;
  private events: ClientEvents;
  private closed = false;
  private backoffMs = 500;
  private lastStatsAt = 0;
  private staleTimer: ReturnType<typeof setInterval> | null = null;
  private stale = false;

  constructor(baseUrl: string, events: ClientEvents, makeWs?: WsFactory) {
    this.base = baseUrl.replace(/\/$/, "");
    this.wsUrl = this.base.replace(/^http/, "ws") + "/ws";
    this.events = events;
    this.makeWs = makeWs ?? ((url) => new WebSocket(url) as unknown as WsLike);
  }

  async getConfig(): Promise<LinkConfig> {
    const resp = await fetch(`${this.base}/config`);
    return resp.json();
  }

  async getModes(): Promise<ModeRow[]> {
    const resp = await fetch(`${this.base}/modes`);
    return resp.json();
  }

  async getStats(): Promise<StatsMsg> {
    const resp = await fetch(`${this.base}/stats`);
    return resp.json();
  }

  /** PATCH /config; resolves to the applied config or throws the reason. */
  async patchConfig(patch: object): Promise<LinkConfig> {
    const resp = await fetch(`${this.base}/config`, {
      method: "PATCH",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(patch),
    });
    const body = await resp.json();
    if (!resp.ok) {
      throw new Error(body.error ?? `patch rejected (${resp.status})`);
    }
    return body;
  }

  connect() {
    if (this.closed) return;
    const sock = this.makeWs(this.wsUrl);
    this.sock = sock;
    sock.addEventListener("open", () => {
      this.backoffMs = 500;
      this.events.onConnected?.();
    });
    sock.addEventListener("message", (event: any) => {
      let msg: ServerMsg;
      try {
        msg = JSON.parse(String(event.data));
      } catch {
        return;
      }
      if (msg.type === "stats") {
        this.lastStatsAt = Date.now();
        this.setStale(false);
        this.events.onStats?.(msg);
      } else if (msg.type === "chat") {
        this.events.onChat?.(msg);
      } else if (msg.type === "error") {
        this.events.onError?.(msg.error);
      }
    });
    const reconnect = () => {
      if (this.closed) return;
      this.setStale(true);
      setTimeout(() => this.connect(), this.backoffMs);
      this.backoffMs = Math.min(this.backoffMs * 2, 5000);
    };
    sock.addEventListener("close", reconnect);
    sock.addEventListener("error", () => {
      /* close fires right after */
    });
    if (this.staleTimer === null) {
      this.staleTimer = setInterval(() => {
        if (this.lastStatsAt && Date.now() - this.lastStatsAt > STALE_AFTER_MS) {
          this.setStale(true);
        }
      }, 500);
    }
  }

  private setStale(value: boolean) {
    if (value !== this.stale) {
      this.stale = value;
      this.events.onStale?.(value);
    }
  }

  sendChat(text: string) {
    this.sock?.send(JSON.stringify({ type: "chat", text }));
  }

  close() {
    this.closed = true;
    if (this.staleTimer !== null) clearInterval(this.staleTimer);
    this.sock?.close();
  }
}
