// End-to-end console test against a real node: spawns `silence serve`
// (single process, both roles, loopback medium) and attaches two console
// sessions, a transmit-side one and a receive-side one.  Steering the
// distance knob must move the displayed PER, and a chat typed on one
// console must render on the other after crossing the simulated link.

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { ServiceClient } from "../src/client";
import { ConsoleStore } from "../src/store";

const PORT = 8470 + Math.floor(Math.random() * 400);
const BASE = `http://127.0.0.1:${PORT}`;

let node: ChildProcess;

function session() {
  const store = new ConsoleStore();
  const client = new ServiceClient(
    BASE,
    {
      onStats: (m) => store.applyStats(m),
      onChat: (m) => m.type === "chat" && store.applyChat(m),
      onStale: (s) => (store.stale = s),
    },
    (url) => new WebSocket(url) as any,
  );
  client.connect();
  return { store, client };
}

async function until(cond: () => boolean, ms: number, what: string) {
  const t0 = Date.now();
  while (Date.now() - t0 < ms) {
    if (cond()) return;
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error(`timed out waiting for ${what}`);
}

beforeAll(async () => {
  node = spawn(
    "python3",
    ["-m", "silence.cli", "serve", "--bind", `127.0.0.1:${PORT}`,
     "--scenario", "video-1.5m"],
    { cwd: "..", stdio: ["ignore", "pipe", "pipe"] },
  );
  node.stderr?.on("data", (d) => console.log("[node]", String(d).trim()));
  await until(() => node.exitCode === null, 100, "node spawn");
  const t0 = Date.now();
  for (;;) {
    try {
      const resp = await fetch(`${BASE}/config`);
      if (resp.ok) break;
    } catch {
      /* not up yet */
    }
    if (Date.now() - t0 > 60_000) throw new Error("node never came up");
    await new Promise((r) => setTimeout(r, 250));
  }
}, 70_000);

afterAll(() => {
  node?.kill("SIGTERM");
});

describe("console against a live node", () => {
  it("steers the channel and relays chat across the link", async () => {
    const tx = session();
    const rx = session();
    try {
      // make the measurement loop snappy for the test
      await tx.client.patchConfig({
        probe_interval_s: 0.2, stats_window_s: 3.0, loss_timeout_s: 0.3,
      });
      const cfg = await tx.client.getConfig();
      tx.store.applyConfig(cfg);
      rx.store.applyConfig(cfg);
      expect(cfg.channel.distance_m).toBeCloseTo(1.5);

      // chat typed on the TX console renders on the RX console after
      // really traversing modulation, channel, sync and decoding
      tx.client.sendChat("hola des del transmissor");
      await until(
        () => rx.store.transcript.some(
          (r) => r.kind === "chat" && r.direction === "rx" &&
                 r.text === "hola des del transmissor"),
        15_000, "chat across the link");

      // healthy link at 1.5 m: displayed PER at or below 0.1 %
      await until(
        () => rx.store.lastStats !== null && rx.store.lastStats.per !== null,
        10_000, "first stats push");
      expect(rx.store.lastStats!.per!).toBeLessThanOrEqual(0.001);

      // drag the distance slider to 12 m: the next pushes must show the
      // link collapsing (>= 10 %)
      const applied = await rx.client.patchConfig({
        channel: { distance_m: 12.0 },
      });
      rx.store.applyConfig(applied);
      expect(applied.channel.distance_m).toBeCloseTo(12.0);
      await until(
        () => (rx.store.lastStats?.per ?? 0) >= 0.10,
        6_000, "PER >= 10 % after the drag");

      // config round-trip: what the service reports equals what the
      // console rendered after the acknowledgement
      const fresh = await rx.client.getConfig();
      expect(fresh.channel.distance_m).toBeCloseTo(
        rx.store.config!.channel.distance_m);

      // an illegal edit is rejected and changes nothing
      await expect(tx.client.patchConfig({ mode_id: 12 })).rejects.toThrow();
      const after = await tx.client.getConfig();
      expect(after.channel.distance_m).toBeCloseTo(12.0);
    } finally {
      tx.client.close();
      rx.client.close();
    }
  }, 60_000);

  it("flags staleness when the service dies", async () => {
    const watch = session();
    try {
      await until(() => watch.store.lastStats !== null, 10_000, "stats");
      node.kill("SIGKILL");
      await until(() => watch.store.stale, 4_000, "stale banner within 3 s");
    } finally {
      watch.client.close();
    }
  }, 30_000);
});
