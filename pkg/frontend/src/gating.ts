/**
 * Button gating: which operator commands are legal in each session state.
 *
 * This table mirrors the server's state machine. The console only ever
 * enables a control when the command is legal in the currently displayed
 * state, and highlights the expected next action so the operator recognizes
 * rather than recalls the flow.
 */

import type { SessionState } from "./protocol.js";

export type UiCommand =
  | "activate"
  | "sketch"
  | "accept"
  | "reject"
  | "advance"
  | "abort";

const EVERY_STATE: SessionState[] = [
  "Idle",
  "PreActivation",
  "Generation",
  "Validation",
  "Executing",
  "Paused",
  "Completed",
  "Aborted",
];

/** States in which the server accepts each command. */
export const COMMAND_LEGALITY: Record<UiCommand, readonly SessionState[]> = {
  activate: ["PreActivation"],
  sketch: ["Generation"],
  accept: ["Validation"],
  reject: ["Validation"],
  advance: ["Executing", "Paused"],
  abort: EVERY_STATE.filter((s) => s !== "Completed"),
};

export function isLegal(command: UiCommand, state: SessionState): boolean {
  return COMMAND_LEGALITY[command].includes(state);
}

/** Controls the console enables; always a subset of what is legal. */
export function enabledCommands(state: SessionState): Set<UiCommand> {
  const enabled = new Set<UiCommand>();
  for (const command of Object.keys(COMMAND_LEGALITY) as UiCommand[]) {
    if (!isLegal(command, state)) continue;
    // an abort button with no session to abort is noise, not safety
    if (command === "abort" && (state === "Idle" || state === "Aborted")) continue;
    enabled.add(command);
  }
  return enabled;
}

/** The one action to highlight in green for the current state. */
export function highlightedCommand(state: SessionState): UiCommand | null {
  switch (state) {
    case "PreActivation":
      return "activate";
    case "Generation":
      return "sketch";
    case "Validation":
      return "accept";
    case "Executing":
    case "Paused":
      return "advance";
    default:
      return null;
  }
}
