/** Browser entry: wires the connection, canvas sketching, and controls. */

import { Connection } from "./connection.js";
import type { UiCommand } from "./gating.js";
import { applyEnvelope, initialViewModel, type ConsoleViewModel } from "./model.js";
import { commands } from "./protocol.js";
import { renderPlan, type RenderPlan } from "./render.js";
import { ScrubDriver } from "./scrub.js";
import { defaultSketchConfig, SketchSampler } from "./sketch.js";

let vm: ConsoleViewModel = initialViewModel;
const sketchCfg = { ...defaultSketchConfig };
const sampler = new SketchSampler(sketchCfg);

const $ = (id: string) => document.getElementById(id) as HTMLElement;
const canvas = $("sketch-canvas") as unknown as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
const connection = new Connection(wsUrl, {
  onEvent: (envelope) => {
    vm = applyEnvelope(vm, envelope);
    update();
  },
  onStatus: (status) => {
    vm = { ...vm, connection: status };
    update();
  },
});

const scrub = new ScrubDriver((payload) => void connection.send(payload), 1);

function sendCommand(payload: Record<string, unknown>): void {
  void connection.send(payload).then((reply) => {
    if (!reply.ok) {
      $("error-line").textContent = `${reply.command}: ${reply.message ?? reply.error}`;
    } else {
      $("error-line").textContent = "";
    }
  });
}

const buttonActions: Record<Exclude<UiCommand, "sketch" | "advance">, () => void> = {
  activate: () => sendCommand(commands.activate()),
  accept: () => sendCommand(commands.respond("accept")),
  reject: () => sendCommand(commands.respond("reject")),
  abort: () => sendCommand(commands.abort()),
};

for (const [name, action] of Object.entries(buttonActions)) {
  $(`btn-${name}`).addEventListener("click", action);
}

const advanceButton = $("btn-advance");
advanceButton.addEventListener("pointerdown", () => {
  scrub.setDuration(vm.preview?.durationSeconds ?? 1);
  scrub.press();
});
for (const eventName of ["pointerup", "pointerleave"]) {
  advanceButton.addEventListener(eventName, () => {
    if (scrub.held) scrub.release();
  });
}

let sketching = false;
canvas.addEventListener("pointerdown", (ev) => {
  sketching = true;
  sampler.reset();
  forwardPointer(ev);
});
canvas.addEventListener("pointermove", (ev) => {
  if (sketching) forwardPointer(ev);
});
for (const eventName of ["pointerup", "pointerleave"]) {
  canvas.addEventListener(eventName, () => {
    sketching = false;
  });
}

function forwardPointer(ev: PointerEvent): void {
  if (vm.sessionState !== "Generation") return;
  const rect = canvas.getBoundingClientRect();
  const sample = sampler.sample(
    performance.now() / 1000,
    ev.clientX - rect.left,
    ev.clientY - rect.top,
  );
  if (sample) sendCommand(commands.feedObservation(performance.now() / 1000, sample));
}

function drawCanvas(plan: RenderPlan): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  for (const glyph of plan.objectGlyphs) {
    ctx.fillStyle = glyph.hasAffordance ? "#3b82f6" : "#64748b";
    ctx.beginPath();
    ctx.arc(glyph.x, glyph.y, 9, 0, Math.PI * 2);
    ctx.fill();
    ctx.fillStyle = "#cbd5e1";
    ctx.fillText(glyph.label, glyph.x + 12, glyph.y + 4);
  }
  if (plan.previewPointsPx && plan.bandWidthsPx) {
    // variance band, then the ghost polyline over it
    ctx.strokeStyle = "rgba(148, 163, 184, 0.25)";
    for (let i = 1; i < plan.previewPointsPx.length; i += 1) {
      ctx.lineWidth = Math.max(1, plan.bandWidthsPx[i]);
      ctx.beginPath();
      ctx.moveTo(...plan.previewPointsPx[i - 1]);
      ctx.lineTo(...plan.previewPointsPx[i]);
      ctx.stroke();
    }
    ctx.lineWidth = 2;
    const cut = plan.blendMarker ? plan.previewPointsPx.findIndex(
      (p) => p === plan.blendMarker,
    ) : -1;
    ctx.strokeStyle = "#94a3b8";
    strokePath(plan.previewPointsPx.slice(0, cut === -1 ? undefined : cut + 1));
    if (cut !== -1) {
      ctx.strokeStyle = "#f59e0b";
      strokePath(plan.previewPointsPx.slice(cut));
      ctx.fillStyle = "#f59e0b";
      ctx.beginPath();
      ctx.arc(plan.blendMarker![0], plan.blendMarker![1], 5, 0, Math.PI * 2);
      ctx.fill();
    }
  }
}

function strokePath(points: [number, number][]): void {
  if (points.length < 2) return;
  ctx.beginPath();
  ctx.moveTo(...points[0]);
  for (const point of points.slice(1)) ctx.lineTo(...point);
  ctx.stroke();
}

function update(): void {
  const plan = renderPlan(vm, sketchCfg);
  $("status").textContent = plan.statusText;
  $("state").textContent = plan.stateLabel;
  $("hint").textContent = plan.hintText;
  const icon = $("assist-icon");
  icon.classList.toggle("engaged", plan.iconColor === "green");
  $("progress-fill").style.width = `${plan.progressPercent}%`;
  $("progress-label").textContent = `${plan.progressPercent}%`;
  for (const [command, state] of Object.entries(plan.buttons)) {
    if (command === "sketch") continue;
    const el = $(`btn-${command}`) as HTMLButtonElement;
    el.disabled = !state.enabled;
    el.classList.toggle("highlighted", state.highlighted);
  }
  canvas.classList.toggle("sketchable", plan.sketchEnabled);
  const tbody = $("scores");
  tbody.innerHTML = "";
  for (const row of plan.scoreRows) {
    const tr = document.createElement("tr");
    if (row.best) tr.classList.add("best");
    tr.innerHTML = `<td>${row.label}</td><td>${row.score}</td>`;
    tbody.appendChild(tr);
  }
  $("deviation").textContent = plan.deviationText ?? "";
  $("dropped").textContent =
    plan.droppedSamples > 0 ? `dropped samples: ${plan.droppedSamples}` : "";
  drawCanvas(plan);
}

update();
void connection.ready();
