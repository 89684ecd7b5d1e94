/** Fixed-size RGB canvas with the primitives the figures need. */

import { GLYPH_H, GLYPH_W, glyph } from "./font";
import { encodePng } from "./png";

export type Rgb = readonly [number, number, number];

export const WHITE: Rgb = [0xff, 0xff, 0xff];
export const GREY: Rgb = [0xd9, 0xd9, 0xd9];
export const RED: Rgb = [0xf4, 0xa6, 0xa6];
export const BLUE: Rgb = [0x5b, 0x8d, 0xb8];
export const BLACK: Rgb = [0x00, 0x00, 0x00];
export const DARK: Rgb = [0x40, 0x40, 0x40];

export class Canvas {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Rgb = WHITE) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 3);
    for (let i = 0; i < width * height; i++) {
      this.data[3 * i] = background[0];
      this.data[3 * i + 1] = background[1];
      this.data[3 * i + 2] = background[2];
    }
  }

  set(x: number, y: number, color: Rgb): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) {
      return;
    }
    const i = 3 * (y * this.width + x);
    this.data[i] = color[0];
    this.data[i + 1] = color[1];
    this.data[i + 2] = color[2];
  }

  get(x: number, y: number): Rgb {
    const i = 3 * (y * this.width + x);
    return [this.data[i], this.data[i + 1], this.data[i + 2]];
  }

  fillRect(x: number, y: number, w: number, h: number, color: Rgb): void {
    for (let yy = y; yy < y + h; yy++) {
      for (let xx = x; xx < x + w; xx++) {
        this.set(xx, yy, color);
      }
    }
  }

  frame(x: number, y: number, w: number, h: number, color: Rgb): void {
    for (let xx = x; xx < x + w; xx++) {
      this.set(xx, y, color);
      this.set(xx, y + h - 1, color);
    }
    for (let yy = y; yy < y + h; yy++) {
      this.set(x, yy, color);
      this.set(x + w - 1, yy, color);
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Rgb): void {
    let x = Math.round(x0);
    let y = Math.round(y0);
    const ex = Math.round(x1);
    const ey = Math.round(y1);
    const dx = Math.abs(ex - x);
    const dy = -Math.abs(ey - y);
    const sx = x < ex ? 1 : -1;
    const sy = y < ey ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(x, y, color);
      if (x === ex && y === ey) {
        break;
      }
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }

  /** 3x3 filled marker centered on the point. */
  marker(x: number, y: number, color: Rgb): void {
    this.fillRect(Math.round(x) - 1, Math.round(y) - 1, 3, 3, color);
  }

  /** Left-aligned text; (x, y) is the top-left corner of the first glyph. */
  text(x: number, y: number, s: string, color: Rgb): void {
    let cx = x;
    for (const ch of s) {
      const g = glyph(ch);
      for (let gy = 0; gy < GLYPH_H; gy++) {
        for (let gx = 0; gx < GLYPH_W; gx++) {
          if (g[gy][gx] === "X") {
            this.set(cx + gx, y + gy, color);
          }
        }
      }
      cx += GLYPH_W + 1;
    }
  }

  /** Text rotated a quarter turn, reading bottom-to-top; (x, y) is the
   * top-left corner of the rendered block. */
  textUp(x: number, y: number, s: string, color: Rgb): void {
    let cy = y + s.length * (GLYPH_W + 1) - 1;
    for (const ch of s) {
      const g = glyph(ch);
      for (let gy = 0; gy < GLYPH_H; gy++) {
        for (let gx = 0; gx < GLYPH_W; gx++) {
          if (g[gy][gx] === "X") {
            this.set(x + gy, cy - gx, color);
          }
        }
      }
      cy -= GLYPH_W + 1;
    }
  }

  static textWidth(s: string): number {
    return s.length ? s.length * (GLYPH_W + 1) - 1 : 0;
  }

  toPng(): Buffer {
    return encodePng(this.width, this.height, this.data);
  }
}
