import { FormatError } from "./errors.js";
import type { PpmImage } from "./types.js";

/** Binary PPM (P6) codec — the fixture/frame-dump format. */

const WS = new Set([0x20, 0x09, 0x0a, 0x0d, 0x0b, 0x0c]);

export function parsePpm(buf: Uint8Array, name = "ppm"): PpmImage {
  if (buf.length < 2 || buf[0] !== 0x50 /* P */ || buf[1] !== 0x36 /* 6 */) {
    throw new FormatError(`${name}: only binary PPM (P6) is supported`);
  }
  let pos = 2;

  const nextToken = (): number => {
    // skip whitespace and # comments
    for (;;) {
      while (pos < buf.length && WS.has(buf[pos]!)) pos++;
      if (pos < buf.length && buf[pos] === 0x23 /* # */) {
        while (pos < buf.length && buf[pos] !== 0x0a) pos++;
      } else break;
    }
    const start = pos;
    while (pos < buf.length && !WS.has(buf[pos]!)) pos++;
    if (start === pos) throw new FormatError(`${name}: truncated header`);
    const token = Buffer.from(buf.subarray(start, pos)).toString("ascii");
    if (!/^\d+$/.test(token)) {
      throw new FormatError(`${name}: bad header token ${JSON.stringify(token)}`);
    }
    return parseInt(token, 10);
  };

  const width = nextToken();
  const height = nextToken();
  const maxval = nextToken();
  if (width < 1 || height < 1) {
    throw new FormatError(`${name}: bad dimensions ${width}x${height}`);
  }
  if (maxval !== 255) {
    throw new FormatError(`${name}: unsupported maxval ${maxval} (need 255)`);
  }
  pos++; // the single whitespace byte separating header and raster

  const needed = width * height * 3;
  if (buf.length - pos < needed) {
    throw new FormatError(
      `${name}: truncated raster (${buf.length - pos} of ${needed} bytes)`,
    );
  }
  return { width, height, data: buf.subarray(pos, pos + needed) };
}

export function encodePpm(img: PpmImage): Buffer {
  if (img.data.length !== img.width * img.height * 3) {
    throw new FormatError("encodePpm: data length does not match dimensions");
  }
  const header = Buffer.from(`P6\n${img.width} ${img.height}\n255\n`, "ascii");
  return Buffer.concat([header, Buffer.from(img.data)]);
}

/** Frame index from a filename: the last run of digits, or null. */
export function frameIndexFromName(name: string): number | null {
  const m = name.match(/(\d+)(?!.*\d)/);
  return m ? parseInt(m[1]!, 10) : null;
}
