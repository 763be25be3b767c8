import { describe, expect, it } from "vitest";

import { commands } from "../src/protocol.js";
import { ScrubDriver } from "../src/scrub.js";
import {
  defaultSketchConfig,
  objectToPointer,
  pointerToObjectVector,
  SketchSampler,
} from "../src/sketch.js";

describe("pointer mapping", () => {
  it("maps the origin pixel to the object origin at fixed depth", () => {
    const v = pointerToObjectVector(defaultSketchConfig, 360, 240);
    expect(v).toEqual([0.45, 0, 0, 0, 0.35, 0]);
  });

  it("round-trips pixel -> object -> pixel", () => {
    for (const [px, py] of [[10, 20], [360, 240], [700, 450]] as const) {
      const v = pointerToObjectVector(defaultSketchConfig, px, py);
      const [bx, by] = objectToPointer(defaultSketchConfig, v[1], v[2]);
      expect(bx).toBeCloseTo(px, 9);
      expect(by).toBeCloseTo(py, 9);
    }
  });

  it("canvas up is object +z, canvas right is object +y", () => {
    const up = pointerToObjectVector(defaultSketchConfig, 360, 140);
    expect(up[2]).toBeGreaterThan(0);
    const right = pointerToObjectVector(defaultSketchConfig, 460, 240);
    expect(right[1]).toBeGreaterThan(0);
  });

  it("appends extra orientation channels when configured", () => {
    const cfg = {
      ...defaultSketchConfig,
      extraOrientations: [[0, 0.3, 0.1] as [number, number, number]],
    };
    const v = pointerToObjectVector(cfg, 360, 240);
    expect(v).toHaveLength(9);
    expect(v.slice(6)).toEqual([0, 0.3, 0.1]);
  });
});

describe("sample rate limiting", () => {
  it("caps at the configured rate", () => {
    const sampler = new SketchSampler({ ...defaultSketchConfig, maxRateHz: 50 });
    let emitted = 0;
    // 200 Hz pointer events for one second
    for (let i = 0; i < 200; i += 1) {
      if (sampler.sample(i / 200, 100 + i, 120) !== null) emitted += 1;
    }
    expect(emitted).toBeLessThanOrEqual(51);
    expect(emitted).toBeGreaterThanOrEqual(45);
  });

  it("reset allows an immediate sample", () => {
    const sampler = new SketchSampler(defaultSketchConfig);
    expect(sampler.sample(0, 1, 1)).not.toBeNull();
    expect(sampler.sample(0.001, 2, 2)).toBeNull();
    sampler.reset();
    expect(sampler.sample(0.002, 3, 3)).not.toBeNull();
  });
});

describe("scrub driver", () => {
  it("advances by dt/duration and ticks the follower", () => {
    const sent: Record<string, unknown>[] = [];
    const scrub = new ScrubDriver((p) => sent.push(p), 2.0);
    scrub.step(0.1);
    expect(sent[0]).toEqual(commands.advance(0.05));
    expect(sent[1]).toEqual(commands.tick(0.1));
  });

  it("release sends the pausing zero delta", () => {
    const sent: Record<string, unknown>[] = [];
    const scrub = new ScrubDriver((p) => sent.push(p), 1.0, 10);
    scrub.press();
    expect(scrub.held).toBe(true);
    scrub.release();
    expect(scrub.held).toBe(false);
    expect(sent.at(-1)).toEqual(commands.advance(0));
  });
});
