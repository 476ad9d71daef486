/**
 * Loading the pinned detector.
 *
 * The model ships inside the @vladmandic/human-models npm package, so
 * package-lock.json (plus model.lock.json's digests) pins the exact
 * weights; nothing is fetched at runtime.  tf.js in plain Node has no
 * file:// IO handler, so the graph JSON and weight blob are read from
 * disk and handed to the in-memory loader.
 */

import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';

import { ModelLoadError } from './errors';

export const INPUT_SIZE = 512;
export const DETECTIONS_TENSOR = 'tower_0/detections';

export interface Detector {
  model: tf.GraphModel;
  inputSize: number;
}

function defaultModelJson(): string {
  try {
    return require.resolve('@vladmandic/human-models/models/centernet.json');
  } catch {
    throw new ModelLoadError(
      'pinned model package @vladmandic/human-models is not installed (run npm install)',
    );
  }
}

let cached: Detector | null = null;

/**
 * Load the detection graph, from `modelJsonPath` if given, else from
 * the pinned package.  The default instance is cached per process.
 */
export async function loadDetector(modelJsonPath?: string): Promise<Detector> {
  if (!modelJsonPath && cached) {
    return cached;
  }
  const jsonPath = modelJsonPath ?? defaultModelJson();
  let spec: {
    modelTopology: unknown;
    weightsManifest: { paths: string[]; weights: unknown[] }[];
    signature?: unknown;
  };
  try {
    spec = JSON.parse(fs.readFileSync(jsonPath, 'utf-8'));
  } catch (err) {
    throw new ModelLoadError(`${jsonPath}: ${(err as Error).message}`);
  }
  if (!spec.modelTopology || !Array.isArray(spec.weightsManifest)) {
    throw new ModelLoadError(`${jsonPath}: not a tf.js graph-model file`);
  }
  const dir = path.dirname(jsonPath);
  let weightData: Buffer;
  try {
    weightData = Buffer.concat(
      spec.weightsManifest.flatMap((group) =>
        group.paths.map((p) => fs.readFileSync(path.join(dir, p))),
      ),
    );
  } catch (err) {
    throw new ModelLoadError(`weights for ${jsonPath}: ${(err as Error).message}`);
  }
  const handler = tf.io.fromMemory({
    modelTopology: spec.modelTopology,
    weightSpecs: spec.weightsManifest.flatMap((group) => group.weights) as tf.io.WeightsManifestEntry[],
    weightData: weightData.buffer.slice(
      weightData.byteOffset,
      weightData.byteOffset + weightData.byteLength,
    ),
    signature: spec.signature,
  } as tf.io.ModelArtifacts);
  let model: tf.GraphModel;
  try {
    model = await tf.loadGraphModel(handler);
  } catch (err) {
    throw new ModelLoadError(`${jsonPath}: ${(err as Error).message}`);
  }
  const detector = { model, inputSize: INPUT_SIZE };
  if (!modelJsonPath) {
    cached = detector;
  }
  return detector;
}

/** Apply a backend hint ('cpu', 'wasm', ...); unknown hints are ignored
 * with a note on stderr rather than failing the run. */
export async function applyDeviceHint(hint?: string): Promise<void> {
  if (!hint) return;
  const ok = await tf.setBackend(hint).catch(() => false);
  if (!ok) {
    process.stderr.write(`device hint '${hint}' unavailable; staying on '${tf.getBackend()}'\n`);
  }
}
