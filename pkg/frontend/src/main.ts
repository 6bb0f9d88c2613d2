/** CLI: render the figure suite from a directory of simulator outputs.
 *
 *   node dist/main.js all           --input results --out figures [--png]
 *   node dist/main.js cluster_map   --input results --out figures
 */

import { existsSync, mkdirSync, writeFileSync } from 'fs';
import { join } from 'path';
import { parseArgs } from 'util';

import { DEFAULT_INPUT_FILES, FIGURE_BUILDERS, FIGURE_KINDS, FigureKind } from './figures';

function rasterize(svg: string): Buffer | null {
  try {
    // optional native dependency; SVG output never depends on it
    // eslint-disable-next-line @typescript-eslint/no-var-requires
    const { Resvg } = require('@resvg/resvg-js');
    return Buffer.from(new Resvg(svg).render().asPng());
  } catch {
    return null;
  }
}

export function renderOne(
  kind: FigureKind,
  inputDir: string,
  outDir: string,
  png: boolean,
): string[] {
  const inputPath = join(inputDir, DEFAULT_INPUT_FILES[kind]);
  if (!existsSync(inputPath)) {
    throw new Error(`${kind}: input file not found: ${inputPath}`);
  }
  const svg = FIGURE_BUILDERS[kind](inputPath);
  const written: string[] = [];
  const svgPath = join(outDir, `${kind}.svg`);
  writeFileSync(svgPath, svg);
  written.push(svgPath);
  if (png) {
    const buf = rasterize(svg);
    if (buf) {
      const pngPath = join(outDir, `${kind}.png`);
      writeFileSync(pngPath, buf);
      written.push(pngPath);
    } else {
      console.error(`${kind}: PNG rasterizer unavailable, wrote SVG only`);
    }
  }
  return written;
}

export function main(argv: string[]): number {
  const { values, positionals } = parseArgs({
    args: argv,
    allowPositionals: true,
    options: {
      input: { type: 'string', default: 'results' },
      out: { type: 'string', default: 'figures' },
      png: { type: 'boolean', default: true },
    },
  });
  const target = positionals[0] ?? 'all';
  const kinds: FigureKind[] =
    target === 'all'
      ? [...FIGURE_KINDS]
      : FIGURE_KINDS.includes(target as FigureKind)
        ? [target as FigureKind]
        : [];
  if (kinds.length === 0) {
    console.error(`unknown figure "${target}"; expected one of: all, ${FIGURE_KINDS.join(', ')}`);
    return 2;
  }
  mkdirSync(values.out!, { recursive: true });
  try {
    for (const kind of kinds) {
      const written = renderOne(kind, values.input!, values.out!, values.png!);
      console.log(`${kind}: wrote ${written.join(', ')}`);
    }
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
