/**
 * Pure render planning: view model -> what the DOM should show.
 *
 * Keeping this as data makes the gating and preview behavior testable
 * without a browser; main.ts applies the plan to actual elements.
 */

import { enabledCommands, highlightedCommand, type UiCommand } from "./gating.js";
import { assistEngaged, type ConsoleViewModel } from "./model.js";
import { objectToPointer, type SketchConfig } from "./sketch.js";

export interface ButtonPlan {
  enabled: boolean;
  highlighted: boolean;
}

export interface RenderPlan {
  statusText: string;
  stateLabel: string;
  iconColor: "green" | "white";
  progressPercent: number;
  buttons: Record<UiCommand, ButtonPlan>;
  sketchEnabled: boolean;
  scoreRows: { label: string; score: string; best: boolean }[];
  previewPolyline: string | null;
  blendPolyline: string | null;
  blendMarker: [number, number] | null;
  bandWidthsPx: number[] | null;
  previewPointsPx: [number, number][] | null;
  objectGlyphs: { id: string; label: string; x: number; y: number; hasAffordance: boolean }[];
  deviationText: string | null;
  hintText: string;
  droppedSamples: number;
}

const ALL_COMMANDS: UiCommand[] = [
  "activate",
  "sketch",
  "accept",
  "reject",
  "advance",
  "abort",
];

const HINTS: Record<string, string> = {
  Idle: "waiting for an object with assistance",
  PreActivation: "assistance available: press Activate",
  Generation: "waiting for motion: sketch the start of the task",
  Validation: "preview the proposal, then Accept or Reject",
  Executing: "hold Advance to scrub the motion forward",
  Paused: "motion paused: hold Advance to continue",
  Completed: "task complete",
  Aborted: "assistance exited",
};

export function renderPlan(vm: ConsoleViewModel, sketchCfg: SketchConfig): RenderPlan {
  const enabled = enabledCommands(vm.sessionState);
  const highlighted = highlightedCommand(vm.sessionState);
  const buttons = {} as Record<UiCommand, ButtonPlan>;
  for (const command of ALL_COMMANDS) {
    buttons[command] = {
      enabled: enabled.has(command),
      highlighted: command === highlighted,
    };
  }

  let previewPolyline: string | null = null;
  let blendPolyline: string | null = null;
  let blendMarker: [number, number] | null = null;
  let bandWidthsPx: number[] | null = null;
  let previewPointsPx: [number, number][] | null = null;
  if (vm.preview) {
    const pts = vm.preview.points.map(([y, z]) => objectToPointer(sketchCfg, y, z));
    previewPointsPx = pts;
    const cut = vm.preview.blendStartIndex ?? pts.length;
    previewPolyline = pts.slice(0, Math.max(cut, 1)).map(([x, y]) => `${x},${y}`).join(" ");
    if (vm.preview.blendStartIndex !== null && cut < pts.length) {
      blendPolyline = pts.slice(cut).map(([x, y]) => `${x},${y}`).join(" ");
      blendMarker = pts[cut];
    }
    bandWidthsPx = vm.preview.band.map((b) => b * sketchCfg.scale);
  }

  return {
    statusText: vm.connection === "open" ? "connected" : vm.connection,
    stateLabel: vm.sessionState,
    iconColor: assistEngaged(vm.sessionState) ? "green" : "white",
    progressPercent: Math.round(vm.progress * 100),
    buttons,
    sketchEnabled: vm.connection === "open" && buttons.sketch.enabled,
    scoreRows: vm.scores.map((row) => ({
      label: row.label,
      score: row.score.toFixed(3),
      best: row.best,
    })),
    previewPolyline,
    blendPolyline,
    blendMarker,
    bandWidthsPx,
    previewPointsPx,
    objectGlyphs: vm.objects.map((obj) => {
      const [x, y] = objectToPointer(sketchCfg, obj.pose.position[1], obj.pose.position[2]);
      return {
        id: obj.id,
        label: obj.object_class,
        x,
        y,
        hasAffordance: obj.has_affordance,
      };
    }),
    deviationText: vm.deviation
      ? `${vm.deviation.group}: ${(vm.deviation.positionError * 100).toFixed(1)} cm / ` +
        `${vm.deviation.orientationError.toFixed(2)} rad off the reference`
      : null,
    hintText: HINTS[vm.sessionState] ?? "",
    droppedSamples: vm.droppedSamples,
  };
}
