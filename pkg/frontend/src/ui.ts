// DOM layer: stats strip on top, chat pane left, channel knobs right.
// Control edits PATCH the service and only render as applied once the
// service acknowledges; a rejected edit snaps the control back.

import { Sparkline } from "./charts";
import { ServiceClient } from "./client";
import { snrDisplay } from "./snr";
import { ConsoleStore } from "./store";
import { LinkConfig, ModeRow } from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ConsoleUi {
  private store: ConsoleStore;
  private client: ServiceClient;

  private banner = el("div", "banner hidden");
  private staleBadge = el("span", "badge stale hidden", "stale");
  private tilePer = el("span", "tile-value", "—");
  private tileGoodput = el("span", "tile-value", "—");
  private tileSnr = el("span", "tile-value", "—");
  private clipLamp = el("span", "lamp", "●");
  private perChart: Sparkline;
  private goodputChart: Sparkline;
  private transcriptBox = el("div", "transcript");
  private chatInput = el("input") as HTMLInputElement;
  private chatSend = el("button", "", "send") as HTMLButtonElement;
  private distance = el("input") as HTMLInputElement;
  private distanceRead = el("span", "knob-value");
  private ambient = el("input") as HTMLInputElement;
  private ambientRead = el("span", "knob-value");
  private modeSelect = el("select") as HTMLSelectElement;
  private spsSelect = el("select") as HTMLSelectElement;
  private toasts = el("div", "toasts");
  private patching = false;

  constructor(root: HTMLElement, store: ConsoleStore, client: ServiceClient) {
    this.store = store;
    this.client = client;

    const header = el("header");
    header.append(el("h1", "", "silence console"), this.staleBadge);
    const strip = el("section", "strip");
    strip.append(
      this.tile("PER", this.tilePer),
      this.tile("goodput", this.tileGoodput),
      this.tile("SNR", this.tileSnr),
      this.tile("saturation", this.clipLamp),
    );
    const perCanvas = el("canvas", "spark") as HTMLCanvasElement;
    const goodCanvas = el("canvas", "spark") as HTMLCanvasElement;
    perCanvas.width = goodCanvas.width = 360;
    perCanvas.height = goodCanvas.height = 48;
    this.perChart = new Sparkline(perCanvas, "#d0544f");
    this.goodputChart = new Sparkline(goodCanvas, "#4f8ed0");
    const charts = el("section", "charts");
    charts.append(this.chartBox("PER history", perCanvas),
                  this.chartBox("goodput history", goodCanvas));

    const main = el("main");
    main.append(this.buildChatPane(), this.buildKnobPane());
    root.append(this.banner, header, strip, charts, main, this.toasts);
  }

  private tile(label: string, value: HTMLElement): HTMLElement {
    const box = el("div", "tile");
    box.append(el("span", "tile-label", label), value);
    return box;
  }

  private chartBox(label: string, canvas: HTMLCanvasElement): HTMLElement {
    const box = el("div", "chart-box");
    box.append(el("span", "tile-label", label), canvas);
    return box;
  }

  private buildChatPane(): HTMLElement {
    const pane = el("section", "chat-pane");
    pane.append(el("h2", "", "chat"));
    pane.append(this.transcriptBox);
    const row = el("div", "chat-row");
    this.chatInput.placeholder = "type a message";
    this.chatSend.disabled = true;
    this.chatInput.addEventListener("input", () => {
      this.chatSend.disabled = this.chatInput.value.trim() === "";
    });
    const send = () => {
      const text = this.chatInput.value.trim();
      if (!text) return;
      this.client.sendChat(text);
      this.chatInput.value = "";
      this.chatSend.disabled = true;
    };
    this.chatSend.addEventListener("click", send);
    this.chatInput.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") send();
    });
    row.append(this.chatInput, this.chatSend);
    pane.append(row);
    return pane;
  }

  private buildKnobPane(): HTMLElement {
    const pane = el("section", "knob-pane");
    pane.append(el("h2", "", "channel"));

    this.distance.type = "range";
    this.distance.min = "0.5";
    this.distance.max = "15";
    this.distance.step = "0.1";
    this.distance.addEventListener("change", () => {
      this.patch({ channel: { distance_m: Number(this.distance.value) } });
    });
    this.distance.addEventListener("input", () => {
      this.distanceRead.textContent = `${Number(this.distance.value).toFixed(1)} m`;
    });
    pane.append(this.knob("distance", this.distance, this.distanceRead));

    // ambient slider works in decades: 10^(value) amperes
    this.ambient.type = "range";
    this.ambient.min = "-6";
    this.ambient.max = "-1";
    this.ambient.step = "0.1";
    this.ambient.addEventListener("change", () => {
      this.patch({
        channel: { ambient_current_a: 10 ** Number(this.ambient.value) },
      });
    });
    this.ambient.addEventListener("input", () => {
      this.ambientRead.textContent =
        `${(10 ** Number(this.ambient.value)).toExponential(1)} A`;
    });
    pane.append(this.knob("ambient light", this.ambient, this.ambientRead));

    this.modeSelect.addEventListener("change", () => {
      this.patch({ mode_id: Number(this.modeSelect.value) });
    });
    pane.append(this.knob("PHY mode", this.modeSelect, el("span")));

    for (const sps of [2, 4, 8, 16]) {
      const opt = el("option", "", String(sps)) as HTMLOptionElement;
      opt.value = String(sps);
      this.spsSelect.append(opt);
    }
    this.spsSelect.addEventListener("change", () => {
      this.patch({ sps: Number(this.spsSelect.value) });
    });
    pane.append(this.knob("samples/chip", this.spsSelect, el("span")));
    return pane;
  }

  private knob(label: string, control: HTMLElement, read: HTMLElement): HTMLElement {
    const box = el("div", "knob");
    box.append(el("label", "", label), control, read);
    return box;
  }

  setModes(rows: ModeRow[]) {
    this.modeSelect.replaceChildren();
    for (const m of rows) {
      const opt = el("option") as HTMLOptionElement;
      opt.value = String(m.id);
      const fec = [m.rs ? `RS(${m.rs[0]},${m.rs[1]})` : null,
                   m.cc ? `CC ${m.cc}` : null].filter(Boolean).join(" ");
      opt.textContent =
        `${m.id}: ${m.modulation} ${(m.rate_bps / 1000).toFixed(1)} kb/s` +
        (fec ? ` (${fec})` : "");
      this.modeSelect.append(opt);
    }
    this.renderConfig();
  }

  private async patch(patch: object) {
    if (this.patching) return;
    this.patching = true;
    try {
      const applied = await this.client.patchConfig(patch);
      this.store.applyConfig(applied);
    } catch (err) {
      this.toast(String(err instanceof Error ? err.message : err));
    } finally {
      this.patching = false;
      this.renderConfig(); // acknowledged values or snap-back
    }
  }

  toast(text: string) {
    const node = el("div", "toast", text);
    this.toasts.append(node);
    setTimeout(() => node.remove(), 4000);
  }

  setBanner(text: string | null) {
    if (text === null) {
      this.banner.classList.add("hidden");
    } else {
      this.banner.textContent = text;
      this.banner.classList.remove("hidden");
    }
  }

  setStale(stale: boolean) {
    this.staleBadge.classList.toggle("hidden", !stale);
  }

  renderConfig() {
    const cfg: LinkConfig | null = this.store.config;
    if (!cfg) return;
    this.distance.value = String(cfg.channel.distance_m);
    this.distanceRead.textContent = `${cfg.channel.distance_m.toFixed(1)} m`;
    this.ambient.value = String(Math.log10(Math.max(cfg.channel.ambient_current_a, 1e-6)));
    this.ambientRead.textContent = `${cfg.channel.ambient_current_a.toExponential(1)} A`;
    this.modeSelect.value = String(cfg.mode_id);
    this.spsSelect.value = String(cfg.sps);
    this.tileSnr.textContent = snrDisplay(cfg.channel, cfg.lo, cfg.hi);
  }

  renderStats() {
    this.tilePer.textContent = this.store.perDisplay();
    this.tileGoodput.textContent = this.store.goodputDisplay();
    const clipping = this.store.lastStats?.clipping ?? false;
    this.clipLamp.classList.toggle("lit", clipping);
    this.perChart.render(this.store.history.map((h) => h.per), 1.0);
    this.goodputChart.render(this.store.history.map((h) => h.goodput));
  }

  renderTranscript() {
    this.transcriptBox.replaceChildren();
    for (const row of this.store.transcript) {
      if (row.kind === "lost") {
        this.transcriptBox.append(el("div", "line lost", row.text));
      } else {
        const arrow = row.direction === "rx" ? "←" : "→";
        this.transcriptBox.append(
          el("div", `line ${row.direction}`,
             `${arrow} [${row.seq}] ${row.text}`));
      }
    }
    this.transcriptBox.scrollTop = this.transcriptBox.scrollHeight;
  }
}
