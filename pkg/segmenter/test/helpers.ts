import * as fs from 'fs';
import * as path from 'path';
import { execFileSync } from 'child_process';

export const FIXTURES = path.join(__dirname, 'fixtures');

export function ihdr(file: string): { bitDepth: number; colorType: number } {
  const raw = fs.readFileSync(file);
  return { bitDepth: raw[24], colorType: raw[25] };
}

/** Every sample of an 8-bit grayscale PNG must be 0 or 255. */
export function assertBiLevel(file: string): void {
  const { PNG } = require('pngjs');
  const png = PNG.sync.read(fs.readFileSync(file));
  for (let i = 0; i < png.width * png.height; i++) {
    const v = png.data[4 * i];
    if (v !== 0 && v !== 255) {
      throw new Error(`${file}: pixel value ${v} is neither 0 nor 255`);
    }
  }
}

/**
 * The cross-component contract: outputs must load through the primary
 * pipeline's manifest loader with zero errors.  Returns the instance
 * count the primary loader saw.
 */
export function loadThroughPrimary(manifestPath: string): number {
  const script =
    'import sys\n' +
    'from rgbdlift import load_manifest\n' +
    'manifest, masks = load_manifest(sys.argv[1])\n' +
    'print(len(masks))\n';
  const out = execFileSync('python3', ['-c', script, manifestPath], { encoding: 'utf-8' });
  return parseInt(out.trim(), 10);
}
