/**
 * PNG I/O for the interchange contract: 8-bit RGB(A) in, strictly
 * bi-level 8-bit grayscale masks out.  Input validation reads the IHDR
 * chunk directly so bit depth is checked against the wire format.
 */

import * as fs from 'fs';
import { PNG } from 'pngjs';

import { ImageError } from './errors';

const PNG_SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

export interface RgbImage {
  width: number;
  height: number;
  /** Row-major RGB triples, 3 bytes per pixel. */
  pixels: Uint8Array;
}

export function readRgbPng(path: string): RgbImage {
  let raw: Buffer;
  try {
    raw = fs.readFileSync(path);
  } catch (err) {
    throw new ImageError(`${path}: ${(err as Error).message}`);
  }
  if (raw.length < 33 || !raw.subarray(0, 8).equals(PNG_SIGNATURE)) {
    throw new ImageError(`${path}: not a PNG file`);
  }
  const bitDepth = raw[24];
  const colorType = raw[25];
  if (bitDepth !== 8 || (colorType !== 2 && colorType !== 6)) {
    throw new ImageError(
      `${path}: expected an 8-bit RGB or RGBA PNG, got ${bitDepth}-bit color type ${colorType}`,
    );
  }
  let png: PNG;
  try {
    png = PNG.sync.read(raw);
  } catch (err) {
    throw new ImageError(`${path}: ${(err as Error).message}`);
  }
  const pixels = new Uint8Array(png.width * png.height * 3);
  for (let i = 0; i < png.width * png.height; i++) {
    pixels[3 * i] = png.data[4 * i];
    pixels[3 * i + 1] = png.data[4 * i + 1];
    pixels[3 * i + 2] = png.data[4 * i + 2];
  }
  return { width: png.width, height: png.height, pixels };
}

/** Write a boolean mask as an 8-bit grayscale PNG holding only 0 and 255. */
export function writeMaskPng(path: string, width: number, height: number, mask: Uint8Array): void {
  const png = new PNG({ width, height, colorType: 0, inputColorType: 0, inputHasAlpha: false });
  const data = Buffer.alloc(width * height);
  for (let i = 0; i < width * height; i++) {
    data[i] = mask[i] ? 255 : 0;
  }
  png.data = data as unknown as Buffer;
  const out = PNG.sync.write(png, { colorType: 0, inputColorType: 0, inputHasAlpha: false });
  fs.writeFileSync(path, out);
}
