/**
 * Figure renderers: pure functions from artifact files to PNG bytes.
 *
 * Nothing here recomputes the science; every pixel is determined by the
 * input file. Region fills use a fixed palette (grey for the previously
 * covered region, red for the newly covered one, white for open), walk
 * overlays draw X in red and Y in blue over the agreement intervals.
 */

import { writeFileSync } from "node:fs";

import {
  BLACK,
  BLUE,
  Canvas,
  DARK,
  GREY,
  RED,
  Rgb,
  WHITE,
} from "./canvas";
import { column, CsvTable, readTable } from "./csv";
import { readPgm } from "./pgm";

export type FigureKind = "region" | "raster" | "walks" | "tail" | "drift";

export const KINDS: FigureKind[] = [
  "region",
  "raster",
  "walks",
  "tail",
  "drift",
];

export interface RegionColors {
  priorCovered: Rgb;
  newlyCovered: Rgb;
  open: Rgb;
}

export const DEFAULT_COLORS: RegionColors = {
  priorCovered: GREY,
  newlyCovered: RED,
  open: WHITE,
};

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
  colors?: Partial<RegionColors>;
}

/** Parse a CSV number; the writer spells infinities "inf"/"-inf". */
function num(s: string): number {
  if (s === "inf") {
    return Infinity;
  }
  if (s === "-inf") {
    return -Infinity;
  }
  if (s === "") {
    return NaN;
  }
  return Number(s);
}

function fmt(v: number): string {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

// ---------------------------------------------------------------------------
// region map
// ---------------------------------------------------------------------------

export function regionCanvas(
  table: CsvTable,
  colors: RegionColors = DEFAULT_COLORS,
): Canvas {
  const rows = table.rows;
  let values: number[] = [];
  if (rows.length) {
    const c10 = column(table, "p10");
    const seen = new Set<string>();
    for (const r of rows) {
      seen.add(r[c10]);
    }
    values = [...seen].map(Number).sort((a, b) => a - b);
  }
  const n = values.length;
  const cell = n > 1 ? Math.max(1, Math.floor(404 / n)) : 404;
  const plot = n > 1 ? cell * n : 404;
  const left = 46;
  const top = 12;
  const bottom = 38;
  const right = 12;
  const cv = new Canvas(left + plot + right, top + plot + bottom);

  if (n > 1) {
    const c10 = column(table, "p10");
    const c01 = column(table, "p01");
    const creg = column(table, "region");
    for (const r of rows) {
      const i = Math.round(num(r[c10]) * (n - 1));
      const j = Math.round(num(r[c01]) * (n - 1));
      let color = colors.open;
      if (r[creg] === "prior_covered") {
        color = colors.priorCovered;
      } else if (r[creg] === "newly_covered") {
        color = colors.newlyCovered;
      } else if (r[creg] !== "open") {
        color = WHITE; // excluded boundary rules
      }
      cv.fillRect(left + i * cell, top + (n - 1 - j) * cell, cell, cell, color);
    }
  }

  cv.frame(left, top, plot, plot, BLACK);
  for (const v of [0, 0.5, 1]) {
    const off = n > 1 ? Math.round(v * (n - 1)) * cell + cell / 2 : v * plot;
    const px = Math.round(left + off);
    const py = Math.round(top + plot - 1 - off);
    cv.line(px, top + plot, px, top + plot + 3, BLACK);
    const label = fmt(v);
    cv.text(px - Math.floor(Canvas.textWidth(label) / 2), top + plot + 6, label, BLACK);
    cv.line(left - 4, py, left - 1, py, BLACK);
    cv.text(left - 7 - Canvas.textWidth(label), py - 3, label, BLACK);
  }
  cv.text(
    left + Math.floor(plot / 2) - Math.floor(Canvas.textWidth("p10") / 2),
    top + plot + 20,
    "p10",
    BLACK,
  );
  cv.textUp(6, top + Math.floor(plot / 2) - 9, "p01", BLACK);
  return cv;
}

export function plotRegion(
  input: string,
  output: string,
  colors?: Partial<RegionColors>,
): void {
  const table = readTable(input, "sweep");
  const cv = regionCanvas(table, { ...DEFAULT_COLORS, ...colors });
  writeFileSync(output, cv.toPng());
}

// ---------------------------------------------------------------------------
// trajectory raster
// ---------------------------------------------------------------------------

interface RasterMeta {
  left?: number;
  right?: number;
  horizon?: number;
}

function rasterMeta(comments: string[]): RasterMeta {
  const joined = comments.join(" ");
  const m = /schema=raster\/(\d+)/.exec(joined);
  if (!m) {
    throw new Error("PGM lacks a raster schema comment");
  }
  if (m[1] !== "1") {
    throw new Error(`unsupported raster version ${m[1]} (supported: 1)`);
  }
  const out: RasterMeta = {};
  for (const key of ["left", "right", "horizon"] as const) {
    const hit = new RegExp(`${key}=([-\\d.e+]+)`).exec(joined);
    if (hit) {
      out[key] = Number(hit[1]);
    }
  }
  return out;
}

export function rasterCanvas(
  pgm: { width: number; height: number; pixels: Uint8Array; comments: string[] },
): Canvas {
  const meta = rasterMeta(pgm.comments);
  const scale = Math.max(1, Math.min(4, Math.floor(460 / Math.max(pgm.width, pgm.height))));
  const w = pgm.width * scale;
  const h = pgm.height * scale;
  const left = 46;
  const top = 12;
  const bottom = 38;
  const right = 12;
  const cv = new Canvas(left + w + right, top + h + bottom);
  for (let y = 0; y < pgm.height; y++) {
    for (let x = 0; x < pgm.width; x++) {
      const g = pgm.pixels[y * pgm.width + x];
      if (g !== 255) {
        cv.fillRect(left + x * scale, top + y * scale, scale, scale, [g, g, g]);
      }
    }
  }
  cv.frame(left - 1, top - 1, w + 2, h + 2, BLACK);

  const ticksX: Array<[number, string]> = [];
  if (meta.left !== undefined && meta.right !== undefined) {
    for (const site of [meta.left, 0, meta.right]) {
      ticksX.push([(site - meta.left + 0.5) * scale, fmt(site)]);
    }
  }
  for (const [off, label] of ticksX) {
    const px = Math.round(left + off);
    cv.line(px, top + h + 1, px, top + h + 4, BLACK);
    cv.text(px - Math.floor(Canvas.textWidth(label) / 2), top + h + 7, label, BLACK);
  }
  if (meta.horizon !== undefined) {
    const ticksY: Array<[number, string]> = [
      [0.5 * scale, fmt(meta.horizon)],
      [h - 0.5 * scale, "0"],
    ];
    for (const [off, label] of ticksY) {
      const py = Math.round(top + off);
      cv.line(left - 5, py, left - 2, py, BLACK);
      cv.text(left - 8 - Canvas.textWidth(label), py - 3, label, BLACK);
    }
  }
  cv.text(
    left + Math.floor(w / 2) - Math.floor(Canvas.textWidth("site") / 2),
    top + h + 21,
    "site",
    BLACK,
  );
  cv.textUp(6, top + Math.floor(h / 2) - 3, "t", BLACK);
  return cv;
}

export function plotRaster(input: string, output: string): void {
  const cv = rasterCanvas(readPgm(input));
  writeFileSync(output, cv.toPng());
}

// ---------------------------------------------------------------------------
// walk overlay
// ---------------------------------------------------------------------------

export function walksCanvas(table: CsvTable): Canvas {
  const ckind = column(table, "kind");
  const cn = column(table, "n");
  const cx = column(table, "x");
  const cy = column(table, "y");
  const csite = column(table, "site");
  const cstart = column(table, "start");
  const cend = column(table, "end");

  const steps: Array<{ n: number; x: number; y: number }> = [];
  const bars: Array<{ site: number; start: number; end: number }> = [];
  for (const r of table.rows) {
    if (r[ckind] === "step") {
      steps.push({ n: num(r[cn]), x: num(r[cx]), y: num(r[cy]) });
    } else if (r[ckind] === "interval") {
      bars.push({ site: num(r[csite]), start: num(r[cstart]), end: num(r[cend]) });
    }
  }

  let minSite = 0;
  let tmax = 1e-9;
  for (const s of steps) {
    minSite = Math.min(minSite, -s.n);
    for (const v of [s.x, s.y]) {
      if (Number.isFinite(v)) {
        tmax = Math.max(tmax, v);
      }
    }
  }
  for (const b of bars) {
    minSite = Math.min(minSite, b.site);
    if (Number.isFinite(b.end)) {
      tmax = Math.max(tmax, b.end);
    }
  }
  tmax *= 1.05;
  const span = Math.max(1, -minSite);

  const w = 460;
  const h = 360;
  const left = 50;
  const top = 14;
  const bottom = 40;
  const right = 14;
  const cv = new Canvas(left + w + right, top + h + bottom);
  const xpos = (site: number) => left + ((site - minSite) / span) * (w - 1);
  const ypos = (t: number) => top + (h - 1) - (t / tmax) * (h - 1);

  for (const b of bars) {
    const xc = Math.round(xpos(b.site));
    const y0 = Math.round(ypos(b.end));
    const y1 = Math.round(ypos(b.start));
    cv.fillRect(xc - 1, y0, 3, y1 - y0 + 1, GREY);
  }

  const drawPath = (pick: (s: { x: number; y: number }) => number, color: Rgb) => {
    let prev: { px: number; py: number } | null = null;
    for (const s of steps) {
      const v = pick(s);
      if (!Number.isFinite(v)) {
        prev = null;
        continue;
      }
      const px = xpos(-s.n);
      const py = ypos(v);
      if (prev) {
        cv.line(prev.px, prev.py, px, py, color);
      }
      prev = { px: Math.round(px), py: Math.round(py) };
    }
    for (const s of steps) {
      const v = pick(s);
      if (Number.isFinite(v)) {
        cv.marker(xpos(-s.n), ypos(v), color);
      }
    }
  };
  drawPath((s) => s.y, BLUE);
  drawPath((s) => s.x, RED);

  const tau = num(table.meta["tau"] ?? "");
  if (Number.isFinite(tau)) {
    const hit = steps.find((s) => s.n === tau);
    if (hit && Number.isFinite(hit.x)) {
      cv.frame(
        Math.round(xpos(-tau)) - 4,
        Math.round(ypos(hit.x)) - 4,
        9,
        9,
        BLACK,
      );
    }
  }

  cv.frame(left - 1, top - 1, w + 2, h + 2, BLACK);
  for (const site of [minSite, 0]) {
    const px = Math.round(xpos(site));
    cv.line(px, top + h + 1, px, top + h + 4, BLACK);
    const label = fmt(site);
    cv.text(px - Math.floor(Canvas.textWidth(label) / 2), top + h + 7, label, BLACK);
  }
  for (const t of [0, tmax / 1.05]) {
    const py = Math.round(ypos(t));
    cv.line(left - 5, py, left - 2, py, BLACK);
    const label = fmt(t);
    cv.text(left - 8 - Canvas.textWidth(label), py - 3, label, BLACK);
  }
  cv.text(
    left + Math.floor(w / 2) - Math.floor(Canvas.textWidth("site") / 2),
    top + h + 21,
    "site",
    BLACK,
  );
  cv.textUp(6, top + Math.floor(h / 2) - 3, "t", BLACK);
  cv.text(left + w - 40, top + 6, "X", RED);
  cv.text(left + w - 20, top + 6, "Y", BLUE);
  return cv;
}

export function plotWalks(input: string, output: string): void {
  const cv = walksCanvas(readTable(input, "walks"));
  writeFileSync(output, cv.toPng());
}

// ---------------------------------------------------------------------------
// tail curve
// ---------------------------------------------------------------------------

export function tailCanvas(table: CsvTable): Canvas {
  const rows = table.rows.map((r) => ({
    t: num(r[column(table, "t")]),
    survival: num(r[column(table, "survival")]),
    lo: num(r[column(table, "lo95")]),
    hi: num(r[column(table, "hi95")]),
    scaled: num(r[column(table, "t_scaled")]),
  }));

  const w = 460;
  const h = 320;
  const left = 50;
  const top = 14;
  const bottom = 40;
  const right = 14;
  const cv = new Canvas(left + w + right, top + h + bottom);

  const xmax = rows.length ? Math.max(...rows.map((r) => r.t)) * 1.05 : 1;
  const ymax = rows.length
    ? Math.max(1e-9, Math.max(...rows.map((r) => r.hi)) * 1.15)
    : 1;
  const smax = rows.length
    ? Math.max(1e-9, Math.max(...rows.map((r) => r.scaled)))
    : 1;
  const xpos = (t: number) => left + (t / xmax) * (w - 1);
  const ypos = (v: number) => top + (h - 1) - (v / ymax) * (h - 1);

  for (let i = 0; i + 1 < rows.length; i++) {
    const a = rows[i];
    const b = rows[i + 1];
    const x0 = Math.round(xpos(a.t));
    const x1 = Math.round(xpos(b.t));
    for (let px = x0; px <= x1; px++) {
      const f = x1 === x0 ? 0 : (px - x0) / (x1 - x0);
      const lo = a.lo + f * (b.lo - a.lo);
      const hi = a.hi + f * (b.hi - a.hi);
      cv.line(px, Math.round(ypos(hi)), px, Math.round(ypos(lo)), GREY);
    }
  }
  const drawSeries = (pick: (r: { survival: number; scaled: number }) => number, scaleTo: number, color: Rgb) => {
    let prev: { px: number; py: number } | null = null;
    for (const r of rows) {
      const px = Math.round(xpos(r.t));
      const py = Math.round(ypos((pick(r) / scaleTo) * ymax));
      if (prev) {
        cv.line(prev.px, prev.py, px, py, color);
      }
      prev = { px, py };
      cv.marker(px, py, color);
    }
  };
  drawSeries((r) => r.survival, ymax, DARK);
  drawSeries((r) => r.scaled, smax / 0.9, RED);

  cv.frame(left - 1, top - 1, w + 2, h + 2, BLACK);
  for (const t of rows.length ? [0, xmax / 1.05] : [0, 1]) {
    const px = Math.round(xpos(t));
    cv.line(px, top + h + 1, px, top + h + 4, BLACK);
    const label = fmt(t);
    cv.text(px - Math.floor(Canvas.textWidth(label) / 2), top + h + 7, label, BLACK);
  }
  for (const v of [0, ymax]) {
    const py = Math.round(ypos(v));
    cv.line(left - 5, py, left - 2, py, BLACK);
    const label = fmt(v);
    cv.text(left - 8 - Canvas.textWidth(label), py - 3, label, BLACK);
  }
  cv.text(
    left + Math.floor(w / 2) - Math.floor(Canvas.textWidth("t") / 2),
    top + h + 21,
    "t",
    BLACK,
  );
  cv.text(left + w - 120, top + 6, "P(pi>t)", DARK);
  cv.text(left + w - 70, top + 6, "t*P scaled", RED);
  return cv;
}

export function plotTail(input: string, output: string): void {
  const cv = tailCanvas(readTable(input, "tail"));
  writeFileSync(output, cv.toPng());
}

// ---------------------------------------------------------------------------
// drift comparison
// ---------------------------------------------------------------------------

export function driftCanvas(table: CsvTable): Canvas {
  const cq = column(table, "quantity");
  const cref = column(table, "reference");
  const cmc = column(table, "mc");
  const cse = column(table, "se");
  const rows = table.rows.map((r) => ({
    name: r[cq],
    ref: num(r[cref]),
    mc: num(r[cmc]),
    se: num(r[cse]),
  }));

  const nameW = Math.max(0, ...rows.map((r) => Canvas.textWidth(r.name)));
  const left = nameW + 16;
  const top = 26;
  const bottom = 34;
  const right = 16;
  const w = 420;
  const rowH = 26;
  const h = Math.max(rowH, rows.length * rowH);
  const cv = new Canvas(left + w + right, top + h + bottom);

  let vmin = 0;
  let vmax = 0;
  for (const r of rows) {
    vmin = Math.min(vmin, r.ref, r.mc - 3 * r.se);
    vmax = Math.max(vmax, r.ref, r.mc + 3 * r.se);
  }
  if (vmax - vmin < 1e-9) {
    vmax = vmin + 1;
  }
  const pad = 0.05 * (vmax - vmin);
  vmin -= pad;
  vmax += pad;
  const xpos = (v: number) => left + ((v - vmin) / (vmax - vmin)) * (w - 1);
  const zero = Math.round(xpos(0));

  rows.forEach((r, i) => {
    const y0 = top + i * rowH;
    const refX = Math.round(xpos(r.ref));
    const mcX = Math.round(xpos(r.mc));
    cv.fillRect(Math.min(zero, refX), y0 + 3, Math.abs(refX - zero) + 1, 8, GREY);
    cv.fillRect(Math.min(zero, mcX), y0 + 13, Math.abs(mcX - zero) + 1, 8, RED);
    const lo = Math.round(xpos(r.mc - r.se));
    const hi = Math.round(xpos(r.mc + r.se));
    cv.line(lo, y0 + 17, hi, y0 + 17, BLACK);
    cv.line(lo, y0 + 15, lo, y0 + 19, BLACK);
    cv.line(hi, y0 + 15, hi, y0 + 19, BLACK);
    cv.text(left - 8 - Canvas.textWidth(r.name), y0 + 9, r.name, BLACK);
  });

  cv.frame(left - 1, top - 1, w + 2, h + 2, BLACK);
  cv.line(zero, top, zero, top + h - 1, DARK);
  for (const v of [vmin + pad, 0, vmax - pad]) {
    const px = Math.round(xpos(v));
    cv.line(px, top + h + 1, px, top + h + 4, BLACK);
    const label = fmt(v);
    cv.text(px - Math.floor(Canvas.textWidth(label) / 2), top + h + 7, label, BLACK);
  }
  cv.fillRect(left, 8, 8, 8, GREY);
  cv.text(left + 12, 8, "reference", BLACK);
  cv.fillRect(left + 90, 8, 8, 8, RED);
  cv.text(left + 102, 8, "mc", BLACK);
  return cv;
}

export function plotDrift(input: string, output: string): void {
  const cv = driftCanvas(readTable(input, "drift"));
  writeFileSync(output, cv.toPng());
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

export function renderFigure(spec: FigureSpec): void {
  switch (spec.kind) {
    case "region":
      plotRegion(spec.input, spec.output, spec.colors);
      break;
    case "raster":
      plotRaster(spec.input, spec.output);
      break;
    case "walks":
      plotWalks(spec.input, spec.output);
      break;
    case "tail":
      plotTail(spec.input, spec.output);
      break;
    case "drift":
      plotDrift(spec.input, spec.output);
      break;
  }
}
