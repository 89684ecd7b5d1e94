/** Reader for binary (P5) PGM rasters with maxval 255. */

import { readFileSync } from "node:fs";

export interface Pgm {
  width: number;
  height: number;
  /** Row-major gray levels, top row first. */
  pixels: Uint8Array;
  comments: string[];
}

const WHITESPACE = new Set([0x20, 0x09, 0x0a, 0x0d, 0x0b, 0x0c]);

export function parsePgm(data: Buffer): Pgm {
  const comments: string[] = [];
  const tokens: string[] = [];
  let pos = 0;
  while (tokens.length < 4) {
    if (pos >= data.length) {
      throw new Error("truncated PGM header");
    }
    const byte = data[pos];
    if (WHITESPACE.has(byte)) {
      pos++;
    } else if (byte === 0x23) {
      const end = data.indexOf(0x0a, pos);
      const stop = end < 0 ? data.length : end;
      comments.push(data.subarray(pos + 1, stop).toString("ascii").trim());
      pos = stop + 1;
    } else {
      let end = pos;
      while (end < data.length && !WHITESPACE.has(data[end])) {
        end++;
      }
      tokens.push(data.subarray(pos, end).toString("ascii"));
      pos = end;
    }
  }
  const [magic, w, h, maxval] = tokens;
  if (magic !== "P5") {
    throw new Error(`not a binary PGM (magic ${JSON.stringify(magic)})`);
  }
  if (maxval !== "255") {
    throw new Error(`unsupported maxval ${maxval}`);
  }
  const width = Number(w);
  const height = Number(h);
  if (!Number.isInteger(width) || !Number.isInteger(height) || width <= 0 || height <= 0) {
    throw new Error(`bad dimensions ${w}x${h}`);
  }
  pos++; // single whitespace byte after maxval
  const pixels = data.subarray(pos, pos + width * height);
  if (pixels.length !== width * height) {
    throw new Error("truncated PGM pixel data");
  }
  return { width, height, pixels: new Uint8Array(pixels), comments };
}

export function readPgm(path: string): Pgm {
  return parsePgm(readFileSync(path));
}
