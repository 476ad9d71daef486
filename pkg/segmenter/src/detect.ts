/**
 * Run the detector on an RGB image and decode its candidate list.
 *
 * The graph takes a raw-valued (0..255) float tensor resized to
 * 512x512 and emits [1, 100, 6] rows of
 * [x1, y1, x2, y2, score, class_id] in input pixels.  Decoding scales
 * boxes back to source resolution, drops degenerate candidates, and
 * applies greedy IoU suppression *before* any score thresholding so
 * that lowering the threshold can only ever add detections.
 */

import * as tf from '@tensorflow/tfjs';

import { COCO_LABELS } from './labels';
import { Detector, DETECTIONS_TENSOR } from './model';
import { RgbImage } from './png';

export interface Box {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface Detection {
  className: string;
  score: number;
  /** Pixel box in source-image coordinates, clamped to the frame. */
  box: Box;
}

const NMS_IOU = 0.55;

function iou(a: Box, b: Box): number {
  const ix = Math.max(0, Math.min(a.x2, b.x2) - Math.max(a.x1, b.x1));
  const iy = Math.max(0, Math.min(a.y2, b.y2) - Math.max(a.y1, b.y1));
  const inter = ix * iy;
  const areaA = (a.x2 - a.x1) * (a.y2 - a.y1);
  const areaB = (b.x2 - b.x1) * (b.y2 - b.y1);
  return inter / (areaA + areaB - inter || 1);
}

function suppress(detections: Detection[]): Detection[] {
  const sorted = [...detections].sort((a, b) => b.score - a.score);
  const kept: Detection[] = [];
  for (const det of sorted) {
    if (kept.every((k) => iou(k.box, det.box) < NMS_IOU)) {
      kept.push(det);
    }
  }
  return kept;
}

/**
 * All surviving candidates sorted by descending score, *not* yet
 * thresholded or class-filtered.
 */
export async function detectObjects(image: RgbImage, detector: Detector): Promise<Detection[]> {
  const { model, inputSize } = detector;
  const resized = tf.tidy(() => {
    const source = tf.tensor4d(image.pixels, [1, image.height, image.width, 3], 'float32');
    return tf.image.resizeBilinear(source, [inputSize, inputSize]);
  });
  // executeAsync yields between ops, keeping the event loop responsive
  // during the multi-second CPU inference.
  const output = (await model.executeAsync(resized, [DETECTIONS_TENSOR])) as tf.Tensor3D;
  resized.dispose();
  const rows = (await output.array())[0];
  output.dispose();

  const sx = image.width / inputSize;
  const sy = image.height / inputSize;
  const decoded: Detection[] = [];
  for (const [x1, y1, x2, y2, score, classId] of rows) {
    const idx = Math.round(classId);
    if (!(score > 0) || idx < 0 || idx >= COCO_LABELS.length) {
      continue;
    }
    const box = {
      x1: Math.max(0, Math.min(image.width - 1, x1 * sx)),
      y1: Math.max(0, Math.min(image.height - 1, y1 * sy)),
      x2: Math.max(0, Math.min(image.width - 1, x2 * sx)),
      y2: Math.max(0, Math.min(image.height - 1, y2 * sy)),
    };
    if (box.x2 - box.x1 < 2 || box.y2 - box.y1 < 2) {
      continue;
    }
    decoded.push({
      className: COCO_LABELS[idx],
      score: Math.min(1, Math.max(0, score)),
      box,
    });
  }
  return suppress(decoded);
}
