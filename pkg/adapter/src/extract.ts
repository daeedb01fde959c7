import { mkdirSync, readFileSync, readdirSync, writeFileSync } from "node:fs";
import { basename, join } from "node:path";

import { FormatError } from "./errors.js";
import { getBackend, sceneRegion } from "./faces.js";
import { frameIndexFromName, parsePpm } from "./frames.js";
import { extractMentions } from "./ner.js";
import { parseSrt } from "./srt.js";
import { framesForCue } from "./timing.js";
import {
  DEFAULT_CONFIG,
  SCHEMA_VERSION,
  type DetectionLine,
  type ExtractionConfig,
  type MentionLine,
} from "./types.js";

export interface ExtractionResult {
  videoId: string;
  frames: number;
  detections: number;
  mentions: number;
  detectionsPath: string;
  mentionsPath: string;
  manifestPath: string;
}

interface FrameFile {
  index: number;
  path: string;
}

function listFrames(framesDir: string): FrameFile[] {
  let names: string[];
  try {
    names = readdirSync(framesDir);
  } catch {
    throw new FormatError(`frames dir not readable: ${framesDir}`);
  }
  const frames: FrameFile[] = [];
  for (const name of names) {
    if (!/\.ppm$/i.test(name)) continue;
    const index = frameIndexFromName(name);
    if (index === null) {
      throw new FormatError(`frame file has no index digits: ${name}`);
    }
    frames.push({ index, path: join(framesDir, name) });
  }
  if (frames.length === 0) {
    throw new FormatError(`no .ppm frames under ${framesDir}`);
  }
  frames.sort((a, b) => a.index - b.index);
  for (let i = 1; i < frames.length; i++) {
    if (frames[i]!.index === frames[i - 1]!.index) {
      throw new FormatError(
        `duplicate frame index ${frames[i]!.index} under ${framesDir}`,
      );
    }
  }
  return frames;
}

/**
 * Run the full extraction: detect+embed faces in every frame, pull person
 * mentions out of the subtitles, and write the vned interchange files
 * (detections.jsonl, mentions.jsonl, manifest.json) under outDir.
 */
export function runExtraction(
  framesDir: string,
  subsPath: string,
  outDir: string,
  config: ExtractionConfig = DEFAULT_CONFIG,
): ExtractionResult {
  const videoId = config.videoId ?? basename(framesDir.replace(/[\\/]+$/, ""));
  const frames = listFrames(framesDir);
  const backend = config.sceneMode ? null : getBackend(config.backend);

  const detections: DetectionLine[] = [];
  for (const frame of frames) {
    const img = parsePpm(readFileSync(frame.path), basename(frame.path));
    const regions = config.sceneMode ? [sceneRegion(img)] : backend!(img, config);
    regions.forEach((region, j) => {
      detections.push({
        id: `${videoId}_f${frame.index}_d${j}`,
        video_id: videoId,
        frame_index: frame.index,
        box: region.box,
        embedding: region.embedding,
        schema: SCHEMA_VERSION,
      });
    });
  }

  let srtText: string;
  try {
    srtText = readFileSync(subsPath, "utf8");
  } catch {
    throw new FormatError(`subtitles not readable: ${subsPath}`);
  }
  const cues = parseSrt(srtText);
  const frameIndices = frames.map((f) => f.index);

  const mentions: MentionLine[] = [];
  for (const cue of cues) {
    const surfaces = extractMentions(cue.text, config.entityFilter);
    if (surfaces.length === 0) continue;
    for (const frameIndex of framesForCue(cue, frameIndices, config.frameRate)) {
      for (const surface of surfaces) {
        mentions.push({
          video_id: videoId,
          frame_index: frameIndex,
          surface,
          schema: SCHEMA_VERSION,
        });
      }
    }
  }

  mkdirSync(outDir, { recursive: true });
  const detectionsPath = join(outDir, "detections.jsonl");
  const mentionsPath = join(outDir, "mentions.jsonl");
  const manifestPath = join(outDir, "manifest.json");
  writeFileSync(detectionsPath, toJsonl(detections));
  writeFileSync(mentionsPath, toJsonl(mentions));
  writeFileSync(
    manifestPath,
    JSON.stringify(
      {
        schema: SCHEMA_VERSION,
        video_id: videoId,
        frames: frames.length,
        detections: detections.length,
        mentions: mentions.length,
        config: {
          frame_rate: config.frameRate,
          margin: config.margin,
          entity_filter: config.entityFilter,
          scene_mode: config.sceneMode,
          backend: config.sceneMode ? "scene" : config.backend,
        },
      },
      null,
      2,
    ) + "\n",
  );

  return {
    videoId,
    frames: frames.length,
    detections: detections.length,
    mentions: mentions.length,
    detectionsPath,
    mentionsPath,
    manifestPath,
  };
}

function toJsonl(records: readonly object[]): string {
  return records.map((r) => JSON.stringify(r) + "\n").join("");
}
