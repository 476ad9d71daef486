/**
 * End-to-end inference: color PNG in, mask interchange files out.
 *
 * Output layout in `outDir`:
 *   manifest.json             {"color_image", "instances": [{id, class_name, score, mask_file}]}
 *   mask_<id>.png             8-bit grayscale, strictly 0/255
 *
 * Instance ids are assigned in descending score order starting at 1.
 * Zero surviving detections is a success: the manifest just carries an
 * empty instance list.
 */

import * as fs from 'fs';
import * as path from 'path';

import { detectObjects, Detection } from './detect';
import { ConfigError } from './errors';
import { COCO_LABELS } from './labels';
import { applyDeviceHint, loadDetector } from './model';
import { readRgbPng, writeMaskPng } from './png';
import { refineMask } from './refine';

export interface InferenceConfig {
  /** Minimum detection score to emit; in [0, 1]. */
  scoreThreshold?: number;
  /** Only emit these class names (each must be a model label). */
  classAllowlist?: string[];
  /** tf.js backend hint, e.g. 'cpu'. */
  deviceHint?: string;
  /** Override the pinned model (path to a graph-model JSON). */
  modelJsonPath?: string;
}

export const DEFAULT_SCORE_THRESHOLD = 0.5;

export interface EmittedInstance {
  id: number;
  class_name: string;
  score: number;
  mask_file: string;
}

export interface InferenceResult {
  manifestPath: string;
  instances: EmittedInstance[];
}

function checkConfig(cfg: InferenceConfig): { threshold: number; allow: Set<string> | null } {
  const threshold = cfg.scoreThreshold ?? DEFAULT_SCORE_THRESHOLD;
  if (!(threshold >= 0 && threshold <= 1)) {
    throw new ConfigError(`score threshold must be in [0, 1], got ${threshold}`);
  }
  let allow: Set<string> | null = null;
  if (cfg.classAllowlist !== undefined) {
    const known = new Set(COCO_LABELS);
    for (const name of cfg.classAllowlist) {
      if (!known.has(name)) {
        throw new ConfigError(`'${name}' is not one of the model's class names`);
      }
    }
    allow = new Set(cfg.classAllowlist);
  }
  return { threshold, allow };
}

export async function inferMasks(
  imagePath: string,
  outDir: string,
  cfg: InferenceConfig = {},
): Promise<InferenceResult> {
  const { threshold, allow } = checkConfig(cfg);
  await applyDeviceHint(cfg.deviceHint);
  const detector = await loadDetector(cfg.modelJsonPath);
  const image = readRgbPng(imagePath);

  const candidates = await detectObjects(image, detector);
  const selected = candidates.filter(
    (d: Detection) => d.score >= threshold && (allow === null || allow.has(d.className)),
  );

  fs.mkdirSync(outDir, { recursive: true });
  const instances: EmittedInstance[] = [];
  for (const [index, det] of selected.entries()) {
    const id = index + 1;
    const maskFile = `mask_${id}.png`;
    const mask = refineMask(image, det.box);
    writeMaskPng(path.join(outDir, maskFile), image.width, image.height, mask);
    instances.push({
      id,
      class_name: det.className,
      score: det.score,
      mask_file: maskFile,
    });
  }

  const manifest = {
    color_image: path.basename(imagePath),
    instances,
  };
  const manifestPath = path.join(outDir, 'manifest.json');
  fs.writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + '\n');
  return { manifestPath, instances };
}
