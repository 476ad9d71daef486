export { ConfigError, ImageError, ModelLoadError } from './errors';
export { COCO_LABELS, listClasses } from './labels';
export { loadDetector, INPUT_SIZE } from './model';
export { detectObjects } from './detect';
export type { Box, Detection } from './detect';
export { refineMask } from './refine';
export { readRgbPng, writeMaskPng } from './png';
export type { RgbImage } from './png';
export { inferMasks, DEFAULT_SCORE_THRESHOLD } from './infer';
export type { EmittedInstance, InferenceConfig, InferenceResult } from './infer';
