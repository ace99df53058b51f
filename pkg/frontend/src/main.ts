/** DOM wiring for the pilot console. Connects to ws://host:port/ws. */

import { drawDutyBar, drawStripChart } from "./charts.js";
import { DashboardSession, SocketLike } from "./session.js";
import { RAD_TO_DEG, TelemetryDoc } from "./types.js";

const params = new URLSearchParams(window.location.search);
const host = params.get("host") ?? window.location.hostname ?? "127.0.0.1";
const port = params.get("port") ?? "7780";
const url = `ws://${host}:${port}/ws`;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const session = new DashboardSession({
  url,
  socketFactory: (u) => new WebSocket(u) as unknown as SocketLike,
  onTelemetry: (doc) => updateReadouts(doc),
  onStateChange: () => updateChrome(),
});

// reference lines entered by the pilot are displayed only once echoed
const refs = { yaw: new Array<{ t: number; value: number }>(), depth: new Array<{ t: number; value: number }>() };

function updateReadouts(doc: TelemetryDoc): void {
  el("yaw-readout").textContent = `${(doc.yaw_est * RAD_TO_DEG).toFixed(1)} deg`;
  el("depth-readout").textContent = `${doc.depth_est.toFixed(2)} m`;
  el("turbidity-readout").textContent = `${doc.turbidity.toFixed(1)} NTU`;
  el("mode-readout").textContent = doc.mode;
  el("seq-readout").textContent = String(doc.seq);
  const gains = session.displayedGains;
  if (gains) {
    (el("yaw-kp") as HTMLInputElement).placeholder = gains.yaw.kp.toFixed(3);
    (el("yaw-ki") as HTMLInputElement).placeholder = gains.yaw.ki.toFixed(3);
    (el("depth-kp") as HTMLInputElement).placeholder = gains.depth.kp.toFixed(3);
    (el("depth-ki") as HTMLInputElement).placeholder = gains.depth.ki.toFixed(3);
    el("gains-readout").textContent =
      `yaw kp=${gains.yaw.kp} ki=${gains.yaw.ki} | depth kp=${gains.depth.kp} ki=${gains.depth.ki}`;
  }
  const sp = session.echoedSetpoints;
  if (sp.yaw_ref !== undefined) {
    refs.yaw.push({ t: doc.t, value: sp.yaw_ref });
    refs.depth.push({ t: doc.t, value: sp.depth_ref ?? 0 });
    if (refs.yaw.length > 6100) refs.yaw.splice(0, refs.yaw.length - 6100);
    if (refs.depth.length > 6100) refs.depth.splice(0, refs.depth.length - 6100);
  }
  el("flags-readout").textContent =
    (doc.flags.sensor_fault ? "SENSOR-FAULT " : "") + (doc.flags.saturated ? "SATURATED" : "");
}

function updateChrome(): void {
  const badge = el("connection");
  badge.textContent = session.connection + (session.wantsReconnect ? " (reconnect?)" : "");
  badge.className = `badge ${session.connection}`;
  const controls = document.querySelectorAll<HTMLButtonElement | HTMLInputElement>("button, input");
  for (const node of controls) {
    if (node.id === "reconnect") continue;
    node.disabled = session.connection !== "connected";
  }
  (el("reconnect") as HTMLButtonElement).disabled = session.connection === "connected";
  const items = session.pending.slice(-6).reverse().map(
    (c) => `<li class="${c.status}">#${c.seq} ${c.kind}: ${c.status}</li>`,
  );
  el("pending-list").innerHTML = items.join("");
}

function paint(): void {
  const window_ = 120;
  drawStripChart(el("chart-yaw"), [
    { samples: session.history.yaw.view(), color: "#52a7e0" },
    { samples: refs.yaw, color: "#e0c352", dashed: true },
  ], { title: "yaw estimate vs setpoint", unit: "rad", windowSeconds: window_ });
  drawStripChart(el("chart-depth"), [
    { samples: session.history.depth.view(), color: "#52e0b4" },
    { samples: refs.depth, color: "#e0c352", dashed: true },
  ], { title: "depth estimate vs setpoint", unit: "m", windowSeconds: window_, invertY: true });
  drawStripChart(el("chart-turbidity"), [
    { samples: session.history.turbidity.view(), color: "#b18ce8" },
  ], { title: "turbidity", unit: "NTU", windowSeconds: window_ });
  const latest = session.latest;
  drawDutyBar(el("bar-left"), "L", latest?.duties.left ?? 0);
  drawDutyBar(el("bar-right"), "R", latest?.duties.right ?? 0);
  drawDutyBar(el("bar-vertical"), "V", latest?.duties.vertical ?? 0);
  requestAnimationFrame(paint);
}

function numberFrom(id: string, fallback: number): number {
  const raw = (el<HTMLInputElement>(id)).value.trim();
  const value = raw === "" ? fallback : Number(raw);
  return Number.isFinite(value) ? value : fallback;
}

function wireControls(): void {
  el("apply-setpoints").onclick = () => {
    session.setSetpoints(
      numberFrom("yaw-setpoint", 0),
      numberFrom("depth-setpoint", 0),
      numberFrom("surge-duty", 0),
    );
  };
  el("mode-manual").onclick = () => session.setMode("manual");
  el("mode-closed").onclick = () => session.setMode("closed_loop");
  el("apply-yaw-gains").onclick = () => {
    const g = session.displayedGains;
    session.setGains("yaw", numberFrom("yaw-kp", g?.yaw.kp ?? 0), numberFrom("yaw-ki", g?.yaw.ki ?? 0));
  };
  el("apply-depth-gains").onclick = () => {
    const g = session.displayedGains;
    session.setGains("depth", numberFrom("depth-kp", g?.depth.kp ?? 0), numberFrom("depth-ki", g?.depth.ki ?? 0));
  };
  el("apply-alpha").onclick = () => {
    session.setGains("alpha", numberFrom("filter-alpha", 0.98), 0);
  };
  const sliders = ["slider-left", "slider-right", "slider-vertical"].map((id) => el<HTMLInputElement>(id));
  const sendSliders = () =>
    session.manualDuties({
      left: Number(sliders[0].value),
      right: Number(sliders[1].value),
      vertical: Number(sliders[2].value),
    });
  for (const slider of sliders) slider.oninput = sendSliders;
  el("all-stop").onclick = () => {
    for (const slider of sliders) slider.value = "0";
    session.allStop();
  };
  el("reconnect").onclick = () => session.connect();
}

wireControls();
session.connect();
setInterval(() => session.pump(), 25); // flush throttled slider commands
requestAnimationFrame(paint);
el("target").textContent = url;
