import { SetupError } from "./errors.js";
import type { ExtractionConfig, FaceDetection, PpmImage } from "./types.js";

/**
 * Bundled face detector: connected bright regions over a dark background,
 * embedded by color/shape statistics. It exists so the pipeline runs end
 * to end on fixture media with zero downloads; swap in a real model via
 * registerBackend for production footage.
 */

export interface DetectorOptions {
  /** Luma cutoff separating foreground from background. */
  threshold: number;
  /** Components smaller than this many pixels are discarded as noise. */
  minArea: number;
}

export const DEFAULT_DETECTOR: DetectorOptions = { threshold: 40, minArea: 24 };

export const EMBEDDING_DIM = 8;

function luma(r: number, g: number, b: number): number {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

interface RegionStats {
  count: number;
  sumR: number;
  sumG: number;
  sumB: number;
  sumL: number;
  sumL2: number;
  minL: number;
  maxL: number;
  x1: number;
  y1: number;
  x2: number; // inclusive while accumulating
  y2: number;
}

function newStats(): RegionStats {
  return {
    count: 0, sumR: 0, sumG: 0, sumB: 0, sumL: 0, sumL2: 0,
    minL: Infinity, maxL: -Infinity,
    x1: Infinity, y1: Infinity, x2: -Infinity, y2: -Infinity,
  };
}

function addPixel(s: RegionStats, img: PpmImage, x: number, y: number): void {
  const o = (y * img.width + x) * 3;
  const r = img.data[o]!;
  const g = img.data[o + 1]!;
  const b = img.data[o + 2]!;
  const l = luma(r, g, b);
  s.count++;
  s.sumR += r; s.sumG += g; s.sumB += b;
  s.sumL += l; s.sumL2 += l * l;
  if (l < s.minL) s.minL = l;
  if (l > s.maxL) s.maxL = l;
  if (x < s.x1) s.x1 = x;
  if (y < s.y1) s.y1 = y;
  if (x > s.x2) s.x2 = x;
  if (y > s.y2) s.y2 = y;
}

/** Color/shape statistics of a region, every component in [0, 1]. */
function embed(s: RegionStats, img: PpmImage): number[] {
  const n = s.count;
  const meanL = s.sumL / n;
  const varL = Math.max(0, s.sumL2 / n - meanL * meanL);
  const w = s.x2 - s.x1 + 1;
  const h = s.y2 - s.y1 + 1;
  return [
    s.sumR / n / 255,
    s.sumG / n / 255,
    s.sumB / n / 255,
    meanL / 255,
    Math.sqrt(varL) / 255,
    (s.maxL - s.minL) / 255,
    w / (w + h),
    Math.sqrt(n / (img.width * img.height)),
  ];
}

/**
 * Detect bright 4-connected components and embed each one. The margin
 * only pads the reported box (clamped to the image); embeddings always
 * come from the tight region, so margin settings produce comparable
 * embeddings with different crops.
 */
export function detectFaces(
  img: PpmImage,
  opts: DetectorOptions = DEFAULT_DETECTOR,
  margin = 0,
): FaceDetection[] {
  const { width, height } = img;
  const visited = new Uint8Array(width * height);
  const regions: RegionStats[] = [];

  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const idx = y * width + x;
      if (visited[idx]) continue;
      const o = idx * 3;
      if (luma(img.data[o]!, img.data[o + 1]!, img.data[o + 2]!) <= opts.threshold) {
        visited[idx] = 1;
        continue;
      }
      // flood fill one component
      const stats = newStats();
      const stack = [idx];
      visited[idx] = 1;
      while (stack.length > 0) {
        const cur = stack.pop()!;
        const cx = cur % width;
        const cy = (cur - cx) / width;
        addPixel(stats, img, cx, cy);
        for (const [nx, ny] of [[cx - 1, cy], [cx + 1, cy], [cx, cy - 1], [cx, cy + 1]] as const) {
          if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
          const nidx = ny * width + nx;
          if (visited[nidx]) continue;
          const no = nidx * 3;
          if (luma(img.data[no]!, img.data[no + 1]!, img.data[no + 2]!) > opts.threshold) {
            visited[nidx] = 1;
            stack.push(nidx);
          } else {
            visited[nidx] = 1;
          }
        }
      }
      if (stats.count >= opts.minArea) regions.push(stats);
    }
  }

  regions.sort((a, b) => a.y1 - b.y1 || a.x1 - b.x1 || a.x2 - b.x2 || a.y2 - b.y2);
  return regions.map((s) => ({
    box: [
      Math.max(0, s.x1 - margin),
      Math.max(0, s.y1 - margin),
      Math.min(width, s.x2 + 1 + margin),
      Math.min(height, s.y2 + 1 + margin),
    ],
    embedding: embed(s, img),
  }));
}

/** One whole-frame region (scene-feature mode). */
export function sceneRegion(img: PpmImage): FaceDetection {
  const stats = newStats();
  for (let y = 0; y < img.height; y++) {
    for (let x = 0; x < img.width; x++) addPixel(stats, img, x, y);
  }
  return { box: [0, 0, img.width, img.height], embedding: embed(stats, img) };
}

export type FaceBackend = (img: PpmImage, config: ExtractionConfig) => FaceDetection[];

const BACKENDS = new Map<string, FaceBackend>([
  ["builtin", (img, cfg) => detectFaces(img, DEFAULT_DETECTOR, cfg.margin)],
]);

/** Extension point for real detector/embedder integrations. */
export function registerBackend(name: string, backend: FaceBackend): void {
  BACKENDS.set(name, backend);
}

export function getBackend(name: string): FaceBackend {
  const backend = BACKENDS.get(name);
  if (backend) return backend;
  if (name === "facenet") {
    throw new SetupError(
      "face backend 'facenet' is not bundled: it needs onnxruntime-node plus " +
      "pretrained weights (npm install onnxruntime-node, download the weights, " +
      "then registerBackend('facenet', ...)); the 'builtin' backend runs without downloads",
    );
  }
  throw new SetupError(
    `unknown face backend '${name}' (available: ${[...BACKENDS.keys()].sort().join(", ")})`,
  );
}
