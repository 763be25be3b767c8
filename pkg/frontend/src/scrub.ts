/**
 * Hold-to-advance scrubbing.
 *
 * While the control is held, each step advances the execution cursor by
 * dt / duration and steps the follower clock; releasing sends a zero delta,
 * which pauses the motion. There is no backward scrubbing.
 */

import { commands } from "./protocol.js";

type Send = (payload: Record<string, unknown>) => void;

export class ScrubDriver {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly send: Send,
    private durationSeconds: number,
    private readonly intervalMs = 50,
  ) {}

  setDuration(seconds: number): void {
    this.durationSeconds = seconds;
  }

  /** One scrub increment; exposed for tests and driven by the timer live. */
  step(dtSeconds: number): void {
    const delta = this.durationSeconds > 0 ? dtSeconds / this.durationSeconds : 0;
    this.send(commands.advance(delta));
    this.send(commands.tick(dtSeconds));
  }

  press(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => this.step(this.intervalMs / 1000), this.intervalMs);
  }

  release(): void {
    if (this.timer === null) return;
    clearInterval(this.timer);
    this.timer = null;
    this.send(commands.advance(0));
  }

  get held(): boolean {
    return this.timer !== null;
  }
}
