/**
 * 5x7 bitmap glyphs for axis labels and legends.
 *
 * Each glyph is seven strings of five cells; "X" marks an inked pixel.
 * The set covers what the figure labels use: digits, lowercase, a few
 * uppercase, and light punctuation.
 */

export const GLYPH_W = 5;
export const GLYPH_H = 7;

export const GLYPHS: Record<string, string[]> = {
  " ": ["     ", "     ", "     ", "     ", "     ", "     ", "     "],
  "0": [" XXX ", "X   X", "X  XX", "X X X", "XX  X", "X   X", " XXX "],
  "1": ["  X  ", " XX  ", "  X  ", "  X  ", "  X  ", "  X  ", " XXX "],
  "2": [" XXX ", "X   X", "    X", "   X ", "  X  ", " X   ", "XXXXX"],
  "3": [" XXX ", "X   X", "    X", "  XX ", "    X", "X   X", " XXX "],
  "4": ["   X ", "  XX ", " X X ", "X  X ", "XXXXX", "   X ", "   X "],
  "5": ["XXXXX", "X    ", "XXXX ", "    X", "    X", "X   X", " XXX "],
  "6": [" XXX ", "X    ", "X    ", "XXXX ", "X   X", "X   X", " XXX "],
  "7": ["XXXXX", "    X", "   X ", "  X  ", "  X  ", "  X  ", "  X  "],
  "8": [" XXX ", "X   X", "X   X", " XXX ", "X   X", "X   X", " XXX "],
  "9": [" XXX ", "X   X", "X   X", " XXXX", "    X", "    X", " XXX "],
  a: ["     ", "     ", " XXX ", "    X", " XXXX", "X   X", " XXXX"],
  b: ["X    ", "X    ", "XXXX ", "X   X", "X   X", "X   X", "XXXX "],
  c: ["     ", "     ", " XXXX", "X    ", "X    ", "X    ", " XXXX"],
  d: ["    X", "    X", " XXXX", "X   X", "X   X", "X   X", " XXXX"],
  e: ["     ", "     ", " XXX ", "X   X", "XXXXX", "X    ", " XXX "],
  f: ["  XX ", " X   ", "XXXX ", " X   ", " X   ", " X   ", " X   "],
  g: ["     ", "     ", " XXXX", "X   X", " XXXX", "    X", " XXX "],
  h: ["X    ", "X    ", "XXXX ", "X   X", "X   X", "X   X", "X   X"],
  i: ["  X  ", "     ", " XX  ", "  X  ", "  X  ", "  X  ", " XXX "],
  j: ["   X ", "     ", "   X ", "   X ", "   X ", "X  X ", " XX  "],
  k: ["X    ", "X    ", "X  X ", "X X  ", "XX   ", "X X  ", "X  X "],
  l: [" XX  ", "  X  ", "  X  ", "  X  ", "  X  ", "  X  ", " XXX "],
  m: ["     ", "     ", "XX X ", "X X X", "X X X", "X X X", "X X X"],
  n: ["     ", "     ", "XXXX ", "X   X", "X   X", "X   X", "X   X"],
  o: ["     ", "     ", " XXX ", "X   X", "X   X", "X   X", " XXX "],
  p: ["     ", "     ", "XXXX ", "X   X", "XXXX ", "X    ", "X    "],
  q: ["     ", "     ", " XXXX", "X   X", " XXXX", "    X", "    X"],
  r: ["     ", "     ", "X XX ", "XX   ", "X    ", "X    ", "X    "],
  s: ["     ", "     ", " XXXX", "X    ", " XXX ", "    X", "XXXX "],
  t: [" X   ", " X   ", "XXXX ", " X   ", " X   ", " X   ", "  XX "],
  u: ["     ", "     ", "X   X", "X   X", "X   X", "X   X", " XXXX"],
  v: ["     ", "     ", "X   X", "X   X", "X   X", " X X ", "  X  "],
  w: ["     ", "     ", "X X X", "X X X", "X X X", "X X X", " X X "],
  x: ["     ", "     ", "X   X", " X X ", "  X  ", " X X ", "X   X"],
  y: ["     ", "     ", "X   X", "X   X", " XXXX", "    X", " XXX "],
  z: ["     ", "     ", "XXXXX", "   X ", "  X  ", " X   ", "XXXXX"],
  M: ["X   X", "XX XX", "X X X", "X X X", "X   X", "X   X", "X   X"],
  P: ["XXXX ", "X   X", "X   X", "XXXX ", "X    ", "X    ", "X    "],
  T: ["XXXXX", "  X  ", "  X  ", "  X  ", "  X  ", "  X  ", "  X  "],
  X: ["X   X", "X   X", " X X ", "  X  ", " X X ", "X   X", "X   X"],
  Y: ["X   X", "X   X", " X X ", "  X  ", "  X  ", "  X  ", "  X  "],
  ".": ["     ", "     ", "     ", "     ", "     ", " XX  ", " XX  "],
  ",": ["     ", "     ", "     ", "     ", "  XX ", "  X  ", " X   "],
  "-": ["     ", "     ", "     ", " XXX ", "     ", "     ", "     "],
  "+": ["     ", "  X  ", "  X  ", "XXXXX", "  X  ", "  X  ", "     "],
  "*": ["     ", "  X  ", "X X X", " XXX ", "X X X", "  X  ", "     "],
  "(": ["   X ", "  X  ", " X   ", " X   ", " X   ", "  X  ", "   X "],
  ")": [" X   ", "  X  ", "   X ", "   X ", "   X ", "  X  ", " X   "],
  ">": ["     ", "X    ", " X   ", "  X  ", " X   ", "X    ", "     "],
  "=": ["     ", "     ", "XXXXX", "     ", "XXXXX", "     ", "     "],
  "/": ["    X", "    X", "   X ", "  X  ", " X   ", "X    ", "X    "],
  _: ["     ", "     ", "     ", "     ", "     ", "     ", "XXXXX"],
};

/** Glyph for a character, falling back to a hollow box. */
export function glyph(ch: string): string[] {
  const hit = GLYPHS[ch];
  if (hit) {
    return hit;
  }
  return ["XXXXX", "X   X", "X   X", "X   X", "X   X", "X   X", "XXXXX"];
}
