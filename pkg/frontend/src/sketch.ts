/**
 * Pointer sketching: canvas pixels -> object-frame pose samples.
 *
 * The 2D canvas spans the object frame's y/z plane at a fixed x depth
 * (desk-scale stand-in for 6-DoF hand tracking). Orientation channels get a
 * fixed configurable value; the adaptation pipeline treats them as a soft
 * preference. Samples are rate-limited before leaving the console.
 */

export interface SketchConfig {
  /** Fixed object-frame x (approach depth) for every sketched sample, meters. */
  depthX: number;
  /** Pixels per meter. */
  scale: number;
  /** Canvas pixel of the object origin (the glyph position). */
  originPx: [number, number];
  /** Fixed axis-angle orientation attached to every sample. */
  orientation: [number, number, number];
  /** trailing orientation channels beyond the first (forearm, chest, ...) */
  extraOrientations?: [number, number, number][];
  /** Client-side sample rate cap, Hz. */
  maxRateHz: number;
}

export const defaultSketchConfig: SketchConfig = {
  depthX: 0.45,
  scale: 420,
  originPx: [360, 240],
  orientation: [0, 0.35, 0],
  maxRateHz: 50,
};

/** Canvas pixel -> stacked object-frame sample [x, y, z, rx, ry, rz, ...]. */
export function pointerToObjectVector(
  cfg: SketchConfig,
  px: number,
  py: number,
): number[] {
  const y = (px - cfg.originPx[0]) / cfg.scale;
  const z = (cfg.originPx[1] - py) / cfg.scale;
  const sample = [cfg.depthX, y, z, ...cfg.orientation];
  for (const extra of cfg.extraOrientations ?? []) sample.push(...extra);
  return sample;
}

/** Object-frame position -> canvas pixel (for previews and object glyphs). */
export function objectToPointer(
  cfg: SketchConfig,
  y: number,
  z: number,
): [number, number] {
  return [cfg.originPx[0] + y * cfg.scale, cfg.originPx[1] - z * cfg.scale];
}

export class SketchSampler {
  private lastEmit = -Infinity;

  constructor(private readonly cfg: SketchConfig) {}

  /** Returns the object-frame sample, or null when rate-limited. */
  sample(tSeconds: number, px: number, py: number): number[] | null {
    if (tSeconds - this.lastEmit < 1 / this.cfg.maxRateHz) return null;
    this.lastEmit = tSeconds;
    return pointerToObjectVector(this.cfg, px, py);
  }

  reset(): void {
    this.lastEmit = -Infinity;
  }
}
