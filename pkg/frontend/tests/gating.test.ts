import { describe, expect, it } from "vitest";

import {
  COMMAND_LEGALITY,
  enabledCommands,
  highlightedCommand,
  isLegal,
  type UiCommand,
} from "../src/gating.js";
import { applyEvent, initialViewModel } from "../src/model.js";
import type { SessionState } from "../src/protocol.js";
import { renderPlan } from "../src/render.js";
import { defaultSketchConfig } from "../src/sketch.js";

const STATES: SessionState[] = [
  "Idle",
  "PreActivation",
  "Generation",
  "Validation",
  "Executing",
  "Paused",
  "Completed",
  "Aborted",
];

// small deterministic PRNG so failures reproduce
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

describe("command legality table", () => {
  it("accept/reject only in Validation", () => {
    for (const state of STATES) {
      expect(isLegal("accept", state)).toBe(state === "Validation");
      expect(isLegal("reject", state)).toBe(state === "Validation");
    }
  });

  it("abort is legal everywhere except Completed", () => {
    for (const state of STATES) {
      expect(isLegal("abort", state)).toBe(state !== "Completed");
    }
  });

  it("scrubbing only while executing or paused", () => {
    expect(COMMAND_LEGALITY.advance).toEqual(["Executing", "Paused"]);
  });
});

describe("button gating over random state sequences", () => {
  it("never enables an illegal command across 100 random sequences", () => {
    const rand = mulberry32(20240815);
    for (let sequence = 0; sequence < 100; sequence += 1) {
      let vm = initialViewModel;
      let seq = 1;
      for (let step = 0; step < 40; step += 1) {
        const next = STATES[Math.floor(rand() * STATES.length)];
        if (rand() < 0.2) seq += 1; // occasionally a fresh session
        vm = applyEvent(vm, {
          type: "state_changed",
          session: seq,
          previous: vm.sessionState,
          current: next,
        });
        const enabled = enabledCommands(vm.sessionState);
        for (const command of enabled) {
          expect(isLegal(command, vm.sessionState)).toBe(true);
        }
        const plan = renderPlan(vm, defaultSketchConfig);
        for (const [command, button] of Object.entries(plan.buttons)) {
          if (button.enabled) {
            expect(isLegal(command as UiCommand, vm.sessionState)).toBe(true);
          }
        }
        // the rendered gating mirrors the displayed state exactly
        expect(plan.stateLabel).toBe(vm.sessionState);
      }
    }
  });

  it("highlighted action is always enabled or absent", () => {
    for (const state of STATES) {
      const highlighted = highlightedCommand(state);
      if (highlighted !== null) {
        expect(enabledCommands(state).has(highlighted)).toBe(true);
      }
    }
  });
});
