#!/usr/bin/env node
import { parseArgs } from "node:util";
import { fileURLToPath } from "node:url";
import { resolve } from "node:path";

import { FormatError, SetupError, UsageError } from "./errors.js";
import { runExtraction } from "./extract.js";
import { DEFAULT_CONFIG, type ExtractionConfig } from "./types.js";

const USAGE = `usage: vned-extract --frames DIR --subs FILE --out DIR
                    [--fps N] [--margin N] [--entities person|all]
                    [--backend NAME] [--scene] [--video ID]

Turns a directory of PPM frames plus an SRT subtitle file into the vned
interchange files: detections.jsonl, mentions.jsonl, manifest.json.

exit codes: 0 ok, 1 usage, 2 bad input data, 3 internal, 4 missing backend`;

function intFlag(name: string, raw: string, min: number): number {
  const v = Number(raw);
  if (!Number.isInteger(v) || v < min) {
    throw new UsageError(`--${name} must be an integer >= ${min}, got ${raw}`);
  }
  return v;
}

export async function main(argv: string[]): Promise<number> {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        frames: { type: "string" },
        subs: { type: "string" },
        out: { type: "string" },
        fps: { type: "string" },
        margin: { type: "string" },
        entities: { type: "string" },
        backend: { type: "string" },
        scene: { type: "boolean" },
        video: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
      allowPositionals: false,
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(USAGE);
    return 1;
  }
  const flags = parsed.values;

  try {
    if (flags.help) {
      console.log(USAGE);
      return 0;
    }
    if (!flags.frames || !flags.subs || !flags.out) {
      throw new UsageError("--frames, --subs and --out are required");
    }

    const config: ExtractionConfig = { ...DEFAULT_CONFIG };
    if (flags.fps !== undefined) {
      const fps = Number(flags.fps);
      if (!Number.isFinite(fps) || fps <= 0) {
        throw new UsageError(`--fps must be a positive number, got ${flags.fps}`);
      }
      config.frameRate = fps;
    }
    if (flags.margin !== undefined) {
      config.margin = intFlag("margin", flags.margin, 0);
    }
    if (flags.entities !== undefined) {
      if (flags.entities !== "person" && flags.entities !== "all") {
        throw new UsageError(`--entities must be person or all, got ${flags.entities}`);
      }
      config.entityFilter = flags.entities;
    }
    if (flags.backend !== undefined) config.backend = flags.backend;
    if (flags.scene) config.sceneMode = true;
    if (flags.video !== undefined) config.videoId = flags.video;

    const result = runExtraction(flags.frames, flags.subs, flags.out, config);
    console.log(
      `wrote ${result.detections} detections / ${result.mentions} mentions ` +
      `from ${result.frames} frames to ${flags.out}`,
    );
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`error: ${err.message}`);
      console.error(USAGE);
      return 1;
    }
    if (err instanceof FormatError) {
      console.error(`data error: ${err.message}`);
      return 2;
    }
    if (err instanceof SetupError) {
      console.error(`setup error: ${err.message}`);
      return 4;
    }
    console.error(`internal error: ${err instanceof Error ? err.stack : err}`);
    return 3;
  }
}

const isMain =
  process.argv[1] !== undefined &&
  fileURLToPath(import.meta.url) === resolve(process.argv[1]);
if (isMain) {
  process.exitCode = await main(process.argv.slice(2));
}
