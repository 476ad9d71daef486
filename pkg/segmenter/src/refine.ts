/**
 * Per-region mask refinement: detection box -> pixel mask.
 *
 * Inside each (slightly expanded) detection box, a two-cluster color
 * model separates object from background: the cluster means are seeded
 * from the box's central core (object) and its outer ring (background),
 * refined by a few k-means iterations, and the winning foreground
 * pixels are reduced to their largest 8-connected component.  When the
 * colors cannot be separated the detection box itself becomes the mask,
 * which keeps the output usable (the downstream depth band rejects
 * background bleed anyway).
 */

import { Box } from './detect';
import { RgbImage } from './png';

const EXPAND = 0.08;
const CORE = 0.4;
const MAX_ITERATIONS = 12;

interface Rect {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

function clampRect(box: Box, width: number, height: number, expand: number): Rect {
  const w = box.x2 - box.x1;
  const h = box.y2 - box.y1;
  return {
    x1: Math.max(0, Math.floor(box.x1 - expand * w)),
    y1: Math.max(0, Math.floor(box.y1 - expand * h)),
    x2: Math.min(width - 1, Math.ceil(box.x2 + expand * w)),
    y2: Math.min(height - 1, Math.ceil(box.y2 + expand * h)),
  };
}

function meanColor(image: RgbImage, pixels: number[]): [number, number, number] {
  let r = 0;
  let g = 0;
  let b = 0;
  for (const idx of pixels) {
    r += image.pixels[3 * idx];
    g += image.pixels[3 * idx + 1];
    b += image.pixels[3 * idx + 2];
  }
  const n = pixels.length || 1;
  return [r / n, g / n, b / n];
}

function distSq(image: RgbImage, idx: number, mean: [number, number, number]): number {
  const dr = image.pixels[3 * idx] - mean[0];
  const dg = image.pixels[3 * idx + 1] - mean[1];
  const db = image.pixels[3 * idx + 2] - mean[2];
  return dr * dr + dg * dg + db * db;
}

function boxFill(mask: Uint8Array, rect: Rect, width: number): void {
  for (let y = rect.y1; y <= rect.y2; y++) {
    for (let x = rect.x1; x <= rect.x2; x++) {
      mask[y * width + x] = 1;
    }
  }
}

function largestComponent(mask: Uint8Array, rect: Rect, width: number): void {
  const visited = new Uint8Array(mask.length);
  let bestPixels: number[] = [];
  const queue = new Int32Array((rect.x2 - rect.x1 + 2) * (rect.y2 - rect.y1 + 2));
  for (let y = rect.y1; y <= rect.y2; y++) {
    for (let x = rect.x1; x <= rect.x2; x++) {
      const start = y * width + x;
      if (!mask[start] || visited[start]) continue;
      let head = 0;
      let tail = 0;
      queue[tail++] = start;
      visited[start] = 1;
      const pixels: number[] = [];
      while (head < tail) {
        const idx = queue[head++];
        pixels.push(idx);
        const cy = Math.floor(idx / width);
        const cx = idx - cy * width;
        for (let dy = -1; dy <= 1; dy++) {
          for (let dx = -1; dx <= 1; dx++) {
            const nx = cx + dx;
            const ny = cy + dy;
            if (nx < rect.x1 || nx > rect.x2 || ny < rect.y1 || ny > rect.y2) continue;
            const nidx = ny * width + nx;
            if (mask[nidx] && !visited[nidx]) {
              visited[nidx] = 1;
              queue[tail++] = nidx;
            }
          }
        }
      }
      if (pixels.length > bestPixels.length) {
        bestPixels = pixels;
      }
    }
  }
  mask.fill(0);
  for (const idx of bestPixels) {
    mask[idx] = 1;
  }
}

/** Full-frame 0/1 mask (row-major, width*height) for one detection. */
export function refineMask(image: RgbImage, box: Box): Uint8Array {
  const { width, height } = image;
  const mask = new Uint8Array(width * height);
  const outer = clampRect(box, width, height, EXPAND);
  const inner = clampRect(box, width, height, 0);

  // Seed pixels: outer ring = background, central core = object.
  const ring: number[] = [];
  for (let y = outer.y1; y <= outer.y2; y++) {
    for (let x = outer.x1; x <= outer.x2; x++) {
      const onRing =
        y <= outer.y1 + 1 || y >= outer.y2 - 1 || x <= outer.x1 + 1 || x >= outer.x2 - 1;
      if (onRing) ring.push(y * width + x);
    }
  }
  const w = inner.x2 - inner.x1;
  const h = inner.y2 - inner.y1;
  const core: Rect = {
    x1: Math.round(inner.x1 + ((1 - CORE) / 2) * w),
    y1: Math.round(inner.y1 + ((1 - CORE) / 2) * h),
    x2: Math.round(inner.x2 - ((1 - CORE) / 2) * w),
    y2: Math.round(inner.y2 - ((1 - CORE) / 2) * h),
  };
  const corePixels: number[] = [];
  for (let y = core.y1; y <= core.y2; y++) {
    for (let x = core.x1; x <= core.x2; x++) {
      corePixels.push(y * width + x);
    }
  }
  if (corePixels.length === 0 || ring.length === 0) {
    boxFill(mask, inner, width);
    return mask;
  }

  let fg = meanColor(image, corePixels);
  let bg = meanColor(image, ring);
  const separation = () =>
    (fg[0] - bg[0]) ** 2 + (fg[1] - bg[1]) ** 2 + (fg[2] - bg[2]) ** 2;
  if (separation() < 25) {
    // Colors indistinguishable: the proposal box is the best mask we have.
    boxFill(mask, inner, width);
    return mask;
  }

  const region: number[] = [];
  for (let y = outer.y1; y <= outer.y2; y++) {
    for (let x = outer.x1; x <= outer.x2; x++) {
      region.push(y * width + x);
    }
  }
  const assignment = new Uint8Array(region.length);
  for (let iter = 0; iter < MAX_ITERATIONS; iter++) {
    let changed = 0;
    for (let i = 0; i < region.length; i++) {
      const toFg = distSq(image, region[i], fg) < distSq(image, region[i], bg) ? 1 : 0;
      if (toFg !== assignment[i]) {
        assignment[i] = toFg;
        changed++;
      }
    }
    if (changed === 0 && iter > 0) break;
    const fgPixels: number[] = [];
    const bgPixels: number[] = [];
    for (let i = 0; i < region.length; i++) {
      (assignment[i] ? fgPixels : bgPixels).push(region[i]);
    }
    if (fgPixels.length === 0 || bgPixels.length === 0) break;
    fg = meanColor(image, fgPixels);
    bg = meanColor(image, bgPixels);
  }

  for (let i = 0; i < region.length; i++) {
    if (assignment[i]) mask[region[i]] = 1;
  }
  largestComponent(mask, outer, width);
  if (mask.every((v) => v === 0)) {
    boxFill(mask, inner, width);
  }
  return mask;
}
