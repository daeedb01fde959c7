import type { SubtitleCue } from "./types.js";

/** Timestamp of frame `index` sampled at `fps` frames per second. */
export function frameTimestamp(index: number, fps: number): number {
  return index / fps;
}

/**
 * Half-open containment: the cue covers the frame iff
 * start <= timestamp < end. A cue ending exactly on a frame's timestamp
 * does not reach that frame.
 */
export function cueCoversFrame(
  cue: SubtitleCue,
  frameIndex: number,
  fps: number,
): boolean {
  const t = frameTimestamp(frameIndex, fps);
  return cue.start <= t && t < cue.end;
}

/** The subset of `frameIndices` whose timestamps fall inside the cue. */
export function framesForCue(
  cue: SubtitleCue,
  frameIndices: readonly number[],
  fps: number,
): number[] {
  return frameIndices.filter((i) => cueCoversFrame(cue, i, fps));
}
