/** Shared types for the extraction front end. */

/** One subtitle cue. Times are seconds; invariant start < end. */
export interface SubtitleCue {
  index: number;
  start: number;
  end: number;
  text: string;
}

/** Decoded binary PPM (P6) image, interleaved RGB rows. */
export interface PpmImage {
  width: number;
  height: number;
  /** length === width * height * 3 */
  data: Uint8Array;
}

/** One detected face region plus its embedding vector. */
export interface FaceDetection {
  /** [x1, y1, x2, y2] pixel box, x2 > x1 and y2 > y1 (x2/y2 exclusive). */
  box: [number, number, number, number];
  embedding: number[];
}

/** Wire shape of one detections.jsonl line (matches the vned schema). */
export interface DetectionLine {
  id: string;
  video_id: string;
  frame_index: number;
  box: number[];
  embedding: number[];
  schema: number;
}

/** Wire shape of one mentions.jsonl line. */
export interface MentionLine {
  video_id: string;
  frame_index: number;
  surface: string;
  schema: number;
}

export type EntityFilter = "person" | "all";

export interface ExtractionConfig {
  /** Frames per second used to place frame indices on the cue timeline. */
  frameRate: number;
  /** Pixels added around each tight face box; >= 0. Boxes only — the
   *  embedding is always computed from the tight region. */
  margin: number;
  /** "person" keeps only name-shaped mentions; "all" keeps every
   *  capitalized token run (acronyms included). */
  entityFilter: EntityFilter;
  /** Emit one whole-frame region per frame instead of running the face
   *  detector (scene-feature mode). */
  sceneMode: boolean;
  /** Face detector/embedder. "builtin" ships with the package. */
  backend: string;
  /** Overrides the video id (default: basename of the frames dir). */
  videoId?: string;
}

export const SCHEMA_VERSION = 1;

export const DEFAULT_CONFIG: ExtractionConfig = {
  frameRate: 3,
  margin: 0,
  entityFilter: "person",
  sceneMode: false,
  backend: "builtin",
};
