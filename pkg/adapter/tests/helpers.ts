import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { PpmImage } from "../src/types.js";

export const FIXTURE_DIR = join(
  dirname(fileURLToPath(import.meta.url)),
  "..",
  "fixture",
);
export const FIXTURE_FRAMES = join(FIXTURE_DIR, "frames");
export const FIXTURE_SRT = join(FIXTURE_DIR, "captions.srt");

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}

export function makeImage(
  width: number,
  height: number,
  bg: [number, number, number] = [12, 12, 12],
): PpmImage {
  const data = new Uint8Array(width * height * 3);
  for (let i = 0; i < width * height; i++) data.set(bg, i * 3);
  return { width, height, data };
}

export function drawRect(
  img: PpmImage,
  x: number,
  y: number,
  w: number,
  h: number,
  color: [number, number, number],
): void {
  for (let dy = 0; dy < h; dy++) {
    for (let dx = 0; dx < w; dx++) {
      img.data.set(color, ((y + dy) * img.width + (x + dx)) * 3);
    }
  }
}
