/** Shared detections schema plus bridge-side configuration types. */

export interface BridgeBox {
  j1: number;
  k1: number;
  j2: number;
  k2: number;
  class: string;
  score: number;
}

export interface DetectionRecord {
  image_id: string;
  boxes: BridgeBox[];
}

export const MODEL_VARIANTS = ['n', 's', 'm', 'b', 'l', 'x'] as const;
export type ModelVariant = (typeof MODEL_VARIANTS)[number];

export type BackendName = 'synthetic' | 'onnx';

export interface BridgeConfig {
  variant: ModelVariant;
  imageDir: string;
  outputJson: string;
  confidenceMin: number;
  /** detector label -> KITTI class; unmapped labels are dropped */
  classMap: Record<string, string>;
  backend: BackendName;
  modelPath?: string;
}

export class BridgeError extends Error {}

/** Decoded RGBA image, 8 bits per sample. */
export interface DecodedImage {
  width: number;
  height: number;
  data: Uint8Array;
}

/** Detector output before class mapping, in source-image pixel coords. */
export interface RawBox {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  label: string;
  score: number;
}

export interface Detector {
  readonly name: string;
  detect(image: DecodedImage): Promise<RawBox[]>;
}

export interface LatencyStats {
  variant: ModelVariant;
  backend: string;
  meanMs: number;
  stdMs: number;
  samples: number;
  repeats: number;
}
