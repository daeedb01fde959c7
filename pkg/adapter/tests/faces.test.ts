import { describe, expect, it } from "vitest";

import { SetupError } from "../src/errors.js";
import {
  DEFAULT_DETECTOR,
  EMBEDDING_DIM,
  detectFaces,
  getBackend,
  registerBackend,
  sceneRegion,
} from "../src/faces.js";
import { DEFAULT_CONFIG } from "../src/types.js";
import { drawRect, makeImage } from "./helpers.js";

describe("detectFaces", () => {
  it("finds separated bright rectangles with tight boxes", () => {
    const img = makeImage(60, 40);
    drawRect(img, 5, 3, 10, 8, [200, 80, 60]);
    drawRect(img, 30, 20, 6, 6, [60, 90, 210]);
    const faces = detectFaces(img);
    expect(faces).toHaveLength(2);
    // sorted by (y1, x1)
    expect(faces[0]!.box).toEqual([5, 3, 15, 11]);
    expect(faces[1]!.box).toEqual([30, 20, 36, 26]);
  });

  it("returns nothing on an empty frame", () => {
    expect(detectFaces(makeImage(32, 32))).toEqual([]);
  });

  it("drops components below minArea", () => {
    const img = makeImage(32, 32);
    drawRect(img, 4, 4, 2, 2, [255, 255, 255]); // 4 px speck
    drawRect(img, 12, 12, 8, 8, [255, 255, 255]);
    const faces = detectFaces(img);
    expect(faces).toHaveLength(1);
    expect(faces[0]!.box).toEqual([12, 12, 20, 20]);
  });

  it("separates touching-diagonal but not 4-connected regions", () => {
    const img = makeImage(32, 32);
    drawRect(img, 2, 2, 6, 6, [255, 255, 255]);
    drawRect(img, 8, 8, 6, 6, [255, 255, 255]); // corner contact only
    expect(detectFaces(img)).toHaveLength(2);
  });

  it("margin pads boxes but never the embedding, clamped to the image", () => {
    const img = makeImage(60, 40);
    drawRect(img, 5, 3, 10, 8, [200, 80, 60]);
    const tight = detectFaces(img, DEFAULT_DETECTOR, 0);
    const padded = detectFaces(img, DEFAULT_DETECTOR, 20);
    expect(padded).toHaveLength(tight.length);
    expect(padded[0]!.box).toEqual([0, 0, 35, 31]); // clamped at 0
    expect(padded[0]!.embedding).toEqual(tight[0]!.embedding);
  });

  it("embeddings are deterministic, finite, and identity-separating", () => {
    const img = makeImage(60, 40);
    drawRect(img, 5, 3, 10, 8, [200, 80, 60]);
    drawRect(img, 30, 20, 10, 8, [60, 90, 210]);
    const [a, b] = detectFaces(img);
    expect(a!.embedding).toHaveLength(EMBEDDING_DIM);
    for (const v of a!.embedding) {
      expect(Number.isFinite(v)).toBe(true);
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThanOrEqual(1);
    }
    const dist = Math.hypot(
      ...a!.embedding.map((v, i) => v - b!.embedding[i]!),
    );
    expect(dist).toBeGreaterThan(0.3); // different colors, far apart
    expect(detectFaces(img)).toEqual(detectFaces(img));
  });
});

describe("sceneRegion", () => {
  it("covers the whole frame with a same-width embedding", () => {
    const img = makeImage(24, 16, [100, 100, 100]);
    const region = sceneRegion(img);
    expect(region.box).toEqual([0, 0, 24, 16]);
    expect(region.embedding).toHaveLength(EMBEDDING_DIM);
    expect(region.embedding[0]).toBeCloseTo(100 / 255, 12);
  });
});

describe("backend registry", () => {
  it("serves the builtin backend", () => {
    const img = makeImage(32, 32);
    drawRect(img, 8, 8, 10, 10, [255, 255, 255]);
    const backend = getBackend("builtin");
    expect(backend(img, DEFAULT_CONFIG)).toHaveLength(1);
  });

  it("explains how to enable facenet", () => {
    expect(() => getBackend("facenet")).toThrow(SetupError);
    expect(() => getBackend("facenet")).toThrow(/onnxruntime-node/);
  });

  it("lists available backends for unknown names", () => {
    expect(() => getBackend("nope")).toThrow(/available: builtin/);
  });

  it("accepts registered extensions", () => {
    registerBackend("null-detector", () => []);
    expect(getBackend("null-detector")(makeImage(8, 8), DEFAULT_CONFIG)).toEqual([]);
  });
});
