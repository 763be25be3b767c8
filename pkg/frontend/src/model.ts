/**
 * Console view model: a pure reducer over telemetry envelopes.
 *
 * The rendered state is always the latest applied server message — the
 * reducer copies values out of snapshots and events and derives nothing
 * that the server does not report.
 */

import type {
  ChannelDoc,
  Envelope,
  EventPayload,
  ProposalDoc,
  SceneObjectDoc,
  SessionState,
  SnapshotDoc,
} from "./protocol.js";

export interface ScoreRow {
  label: string;
  score: number;
  best: boolean;
}

export interface PreviewVm {
  /** Object-frame (y, z) per sample: the sketch-canvas plane. */
  points: [number, number][];
  blendStartIndex: number | null;
  /** Per-sample positional std (norm over the position dims), for the band. */
  band: number[];
  recognizedLabel: string;
  durationSeconds: number;
}

export interface DeviationVm {
  group: string;
  positionError: number;
  orientationError: number;
}

export interface ConsoleViewModel {
  connection: "connecting" | "open" | "closed";
  sessionSeq: number;
  sessionState: SessionState;
  targetObject: string | null;
  progress: number;
  droppedSamples: number;
  objects: SceneObjectDoc[];
  availableTasks: string[];
  scores: ScoreRow[];
  preview: PreviewVm | null;
  deviation: DeviationVm | null;
  gripper: string | null;
  lastEventType: string;
}

export const initialViewModel: ConsoleViewModel = {
  connection: "connecting",
  sessionSeq: 0,
  sessionState: "Idle",
  targetObject: null,
  progress: 0,
  droppedSamples: 0,
  objects: [],
  availableTasks: [],
  scores: [],
  preview: null,
  deviation: null,
  gripper: null,
  lastEventType: "",
};

function positionSlice(channels: ChannelDoc[]): [number, number] {
  let offset = 0;
  for (const channel of channels) {
    if (channel.kind === "position-m") return [offset, offset + 3];
    offset += 3;
  }
  return [0, Math.min(3, channels.length * 3)];
}

function previewFromProposal(doc: ProposalDoc): PreviewVm {
  const [lo, hi] = positionSlice(doc.preview.channels);
  const points = doc.preview.values.map(
    (row) => [row[lo + 1], row[lo + 2]] as [number, number],
  );
  const band = doc.envelope.map((row) => {
    let sum = 0;
    for (let d = lo; d < hi; d += 1) sum += row[d] * row[d];
    return Math.sqrt(sum);
  });
  return {
    points,
    blendStartIndex: doc.blend_start_index,
    band,
    recognizedLabel: doc.recognized.task_label,
    durationSeconds: doc.duration,
  };
}

function scoresFromProposal(doc: ProposalDoc): ScoreRow[] {
  return doc.recognized.scores.map(([label, score], index) => ({
    label,
    score,
    best: index === doc.recognized.task_index,
  }));
}

function upsertObject(objects: SceneObjectDoc[], obj: SceneObjectDoc): SceneObjectDoc[] {
  const next = objects.filter((o) => o.id !== obj.id);
  next.push(obj);
  return next;
}

function applySnapshot(vm: ConsoleViewModel, doc: SnapshotDoc): ConsoleViewModel {
  return {
    ...vm,
    sessionSeq: doc.session.session,
    sessionState: doc.session.state,
    targetObject: doc.session.target_object,
    progress: doc.session.cursor,
    droppedSamples: doc.session.dropped_samples,
    objects: [...doc.scene],
    scores: doc.session.proposal ? scoresFromProposal(doc.session.proposal) : [],
    preview: doc.session.proposal ? previewFromProposal(doc.session.proposal) : null,
  };
}

export function applyEvent(vm: ConsoleViewModel, event: EventPayload): ConsoleViewModel {
  const base = { ...vm, lastEventType: event.type };
  switch (event.type) {
    case "snapshot":
      return applySnapshot(base, event);
    case "object_added":
    case "pose_overridden":
      return { ...base, objects: upsertObject(vm.objects, event.object) };
    case "availability":
      return { ...base, availableTasks: event.tasks };
    case "state_changed": {
      const freshSession = event.session !== vm.sessionSeq;
      return {
        ...base,
        sessionSeq: event.session,
        sessionState: event.current,
        progress: freshSession ? 0 : vm.progress,
        preview: freshSession || event.current === "Generation" ? null : vm.preview,
        scores: freshSession || event.current === "Generation" ? [] : vm.scores,
        deviation: freshSession ? null : vm.deviation,
      };
    }
    case "proposal":
      return {
        ...base,
        targetObject: event.target_object,
        scores: scoresFromProposal(event),
        preview: previewFromProposal(event),
      };
    case "progress":
      return { ...base, progress: event.fraction };
    case "deviation_warning":
      return {
        ...base,
        deviation: {
          group: event.group,
          positionError: event.position_error,
          orientationError: event.orientation_error,
        },
      };
    case "gripper":
      return { ...base, gripper: event.command };
    default:
      return base;
  }
}

export function applyEnvelope(vm: ConsoleViewModel, envelope: Envelope): ConsoleViewModel {
  if (envelope.kind !== "event") return vm;
  return applyEvent(vm, envelope.payload as unknown as EventPayload);
}

/** Green while the assistance is actually driving the interaction. */
export function assistEngaged(state: SessionState): boolean {
  return (
    state === "Generation" ||
    state === "Validation" ||
    state === "Executing" ||
    state === "Paused"
  );
}
