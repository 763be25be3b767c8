/**
 * Wire schema of the assistance service.
 *
 * One WebSocket; every message is an envelope
 * `{seq, kind: "command" | "reply" | "event", payload}`. Every command gets
 * exactly one reply carrying its seq. Events fan out to all clients in
 * mutation order; the first message after connecting is a snapshot event.
 */

export type SessionState =
  | "Idle"
  | "PreActivation"
  | "Generation"
  | "Validation"
  | "Executing"
  | "Paused"
  | "Completed"
  | "Aborted";

export interface PoseDoc {
  position: number[];
  orientation_xyzw: number[];
}

export interface ChannelDoc {
  name: string;
  kind: string; // "position-m" | "orientation-axisangle-rad"
}

export interface TrajectoryDoc {
  frame: string;
  timestamps: number[];
  values: number[][];
  channels: ChannelDoc[];
}

export interface SceneObjectDoc {
  id: string;
  object_class: string;
  pose: PoseDoc;
  pose_source: string;
  associated_tasks: string[];
  has_affordance: boolean;
}

export interface RecognitionDoc {
  task_index: number;
  task_label: string;
  scores: [string, number][];
  window_fraction: number;
}

export interface ProposalDoc {
  recognized: RecognitionDoc;
  duration: number;
  blend_start_index: number | null;
  preview: TrajectoryDoc;
  envelope: number[][];
}

export interface SnapshotDoc {
  session: {
    session: number;
    state: SessionState;
    target_object: string | null;
    cursor: number;
    dropped_samples: number;
    proposal: ProposalDoc | null;
  };
  scene: SceneObjectDoc[];
  registry: Record<string, { tasks: string[]; has_affordance: boolean }>;
  follower: unknown;
  config: Record<string, unknown>;
}

export type EventPayload =
  | ({ type: "snapshot" } & SnapshotDoc)
  | { type: "object_added"; object: SceneObjectDoc }
  | { type: "pose_overridden"; object: SceneObjectDoc }
  | { type: "availability"; object_id: string; object_class: string; tasks: string[] }
  | { type: "state_changed"; session: number; previous: SessionState; current: SessionState }
  | ({ type: "proposal"; session: number; target_object: string } & ProposalDoc)
  | { type: "progress"; session: number; fraction: number }
  | {
      type: "deviation_warning";
      session: number;
      group: string;
      position_error: number;
      orientation_error: number;
      position_bound: number;
      orientation_bound: number;
    }
  | { type: "gripper"; session: number; command: string };

export interface ReplyPayload {
  ok: boolean;
  command: string | null;
  error?: string;
  message?: string;
  state?: SessionState;
  [extra: string]: unknown;
}

export interface Envelope {
  seq: number | null;
  kind: "command" | "reply" | "event";
  payload: Record<string, unknown>;
}

export const identityPose: PoseDoc = {
  position: [0, 0, 0],
  orientation_xyzw: [0, 0, 0, 1],
};

export const commands = {
  injectObject: (objectClass: string, pose: PoseDoc = identityPose) => ({
    type: "inject_object",
    object_class: objectClass,
    pose,
  }),
  activate: (objectId?: string) => ({ type: "activate", object_id: objectId }),
  feedObservation: (t: number, values: number[]) => ({
    type: "feed_observation",
    t,
    values,
  }),
  respond: (verdict: "accept" | "reject") => ({ type: "respond", verdict }),
  advance: (delta: number) => ({ type: "advance", delta }),
  tick: (dt: number) => ({ type: "tick", dt }),
  abort: () => ({ type: "abort" }),
  getSnapshot: () => ({ type: "get_snapshot" }),
};
