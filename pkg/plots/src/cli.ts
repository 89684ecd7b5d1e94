#!/usr/bin/env node
/**
 * plot <kind> <in> <out>
 *
 * Renders one artifact file to a PNG. Kinds: region (sweep CSV), raster
 * (PGM), walks (walks CSV), tail (tail CSV), drift (drift CSV). Exit
 * codes: 0 success, 1 unreadable or mismatched input, 2 usage.
 */

import { FigureKind, KINDS, renderFigure } from "./figures";

export function main(argv: string[]): number {
  if (argv.length === 1 && (argv[0] === "-h" || argv[0] === "--help")) {
    process.stdout.write(usage());
    return 0;
  }
  if (argv.length !== 3) {
    process.stderr.write(usage());
    return 2;
  }
  const [kind, input, output] = argv;
  if (!(KINDS as string[]).includes(kind)) {
    process.stderr.write(`unknown kind ${JSON.stringify(kind)}\n${usage()}`);
    return 2;
  }
  try {
    renderFigure({ kind: kind as FigureKind, input, output });
  } catch (err) {
    process.stderr.write(`plot: ${err instanceof Error ? err.message : err}\n`);
    return 1;
  }
  return 0;
}

function usage(): string {
  return `usage: plot <kind> <in> <out>\n  kinds: ${KINDS.join(", ")}\n`;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
