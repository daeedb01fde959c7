import { FormatError } from "./errors.js";
import type { SubtitleCue } from "./types.js";

// "00:01:02,345" or "00:01:02.345"
const TIMESTAMP = /(\d{2}):(\d{2}):(\d{2})[,.](\d{3})/;
const CUE_LINE = new RegExp(
  `^\\s*${TIMESTAMP.source}\\s*-->\\s*${TIMESTAMP.source}\\s*$`,
);

export function parseTimestamp(s: string): number {
  const m = s.match(new RegExp(`^${TIMESTAMP.source}$`));
  if (!m) throw new FormatError(`bad SRT timestamp: ${JSON.stringify(s)}`);
  return toSeconds(m, 1);
}

function toSeconds(m: RegExpMatchArray, at: number): number {
  const [h, min, sec, ms] = m.slice(at, at + 4).map((v) => parseInt(v!, 10));
  return h! * 3600 + min! * 60 + sec! + ms! / 1000;
}

/**
 * Parse SubRip content into cues.
 *
 * Index lines are optional (some tools omit them); cues with empty text
 * are dropped. Throws FormatError when no cue can be read or a cue has
 * start >= end.
 */
export function parseSrt(content: string): SubtitleCue[] {
  const normalized = content.replace(/\r\n?/g, "\n").replace(/^﻿/, "");
  const blocks = normalized.split(/\n\s*\n/).filter((b) => b.trim());

  const cues: SubtitleCue[] = [];
  for (const block of blocks) {
    const lines = block.split("\n").map((l) => l.trim()).filter(Boolean);
    if (lines.length === 0) continue;

    let at = 0;
    let index = cues.length + 1;
    if (/^\d+$/.test(lines[0]!)) {
      index = parseInt(lines[0]!, 10);
      at = 1;
    }
    const timing = lines[at];
    if (timing === undefined) {
      throw new FormatError(`SRT block ${index} has no timing line`);
    }
    const m = timing.match(CUE_LINE);
    if (!m) {
      throw new FormatError(
        `SRT block ${index}: expected "HH:MM:SS,mmm --> HH:MM:SS,mmm", got ${JSON.stringify(timing)}`,
      );
    }
    const start = toSeconds(m, 1);
    const end = toSeconds(m, 5);
    if (!(start < end)) {
      throw new FormatError(
        `SRT block ${index}: start ${start}s is not before end ${end}s`,
      );
    }
    const text = lines.slice(at + 1).join(" ").trim();
    if (!text) continue;
    cues.push({ index, start, end, text });
  }

  if (cues.length === 0) throw new FormatError("no subtitle cues found");
  return cues;
}
