import { ServiceClient } from "./client";
import { ConsoleStore } from "./store";
import { ConsoleUi } from "./ui";

function serviceBase(): string {
  const override = new URLSearchParams(location.search).get("service");
  if (override) return override;
  return `${location.protocol}//${location.host}`;
}

async function main() {
  const store = new ConsoleStore();
  const root = document.getElementById("app")!;
  let ui: ConsoleUi;

  const client = new ServiceClient(serviceBase(), {
    onConnected: () => {
      console.log("control service connected");
      ui.setBanner(null);
      client.getConfig().then((cfg) => {
        store.applyConfig(cfg);
        ui.renderConfig();
      });
    },
    onStats: (msg) => {
      store.applyStats(msg);
      ui.renderStats();
    },
    onChat: (msg) => {
      if (msg.type !== "chat") return;
      store.applyChat(msg);
      ui.renderTranscript();
    },
    onError: (text) => ui.toast(text),
    onStale: (stale) => {
      store.stale = stale;
      ui.setStale(stale);
      if (stale) ui.setBanner("service unreachable, retrying…");
    },
  });

  ui = new ConsoleUi(root, store, client);
  try {
    const [cfg, modes] = await Promise.all([client.getConfig(), client.getModes()]);
    store.applyConfig(cfg);
    ui.setModes(modes);
    ui.renderConfig();
  } catch (err) {
    ui.setBanner("service unreachable, retrying…");
    console.log("initial fetch failed", err);
  }
  client.connect();
}

window.addEventListener("load", main);
