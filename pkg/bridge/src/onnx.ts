import fs from 'node:fs';

import { BridgeError, DecodedImage, Detector, RawBox } from './types.js';

/** COCO detection vocabulary, index = class id emitted by the model. */
export const COCO_LABELS = [
  'person', 'bicycle', 'car', 'motorcycle', 'airplane', 'bus', 'train',
  'truck', 'boat', 'traffic light', 'fire hydrant', 'stop sign',
  'parking meter', 'bench', 'bird', 'cat', 'dog', 'horse', 'sheep', 'cow',
  'elephant', 'bear', 'zebra', 'giraffe', 'backpack', 'umbrella', 'handbag',
  'tie', 'suitcase', 'frisbee', 'skis', 'snowboard', 'sports ball', 'kite',
  'baseball bat', 'baseball glove', 'skateboard', 'surfboard',
  'tennis racket', 'bottle', 'wine glass', 'cup', 'fork', 'knife', 'spoon',
  'bowl', 'banana', 'apple', 'sandwich', 'orange', 'broccoli', 'carrot',
  'hot dog', 'pizza', 'donut', 'cake', 'chair', 'couch', 'potted plant',
  'bed', 'dining table', 'toilet', 'tv', 'laptop', 'mouse', 'remote',
  'keyboard', 'cell phone', 'microwave', 'oven', 'toaster', 'sink',
  'refrigerator', 'book', 'clock', 'vase', 'scissors', 'teddy bear',
  'hair drier', 'toothbrush',
];

export interface Letterbox {
  scale: number;
  padX: number;
  padY: number;
  size: number;
}

/**
 * Scale the image into a gray-padded square of `size` pixels (aspect ratio
 * preserved) and lay it out as a normalized CHW float tensor.
 */
export function letterbox(
  image: DecodedImage,
  size = 640,
): { tensor: Float32Array; box: Letterbox } {
  const scale = Math.min(size / image.width, size / image.height);
  const newW = Math.round(image.width * scale);
  const newH = Math.round(image.height * scale);
  const padX = Math.floor((size - newW) / 2);
  const padY = Math.floor((size - newH) / 2);

  const tensor = new Float32Array(3 * size * size).fill(114 / 255);
  for (let y = 0; y < newH; y += 1) {
    const srcY = Math.min(image.height - 1, Math.floor(y / scale));
    for (let x = 0; x < newW; x += 1) {
      const srcX = Math.min(image.width - 1, Math.floor(x / scale));
      const src = (srcY * image.width + srcX) * 4;
      const dst = (y + padY) * size + (x + padX);
      tensor[dst] = image.data[src] / 255;
      tensor[size * size + dst] = image.data[src + 1] / 255;
      tensor[2 * size * size + dst] = image.data[src + 2] / 255;
    }
  }
  return { tensor, box: { scale, padX, padY, size } };
}

/**
 * Decode NMS-free detector output rows (x1, y1, x2, y2, score, class id) from
 * letterboxed coordinates back to source-image pixels. Rows with zero score
 * are padding and are skipped.
 */
export function decodeDetections(
  output: Float32Array | number[],
  rows: number,
  box: Letterbox,
  image: DecodedImage,
  labels: string[] = COCO_LABELS,
): RawBox[] {
  const out: RawBox[] = [];
  const clampX = (v: number) => Math.min(Math.max(v, 0), image.width);
  const clampY = (v: number) => Math.min(Math.max(v, 0), image.height);
  for (let r = 0; r < rows; r += 1) {
    const o = r * 6;
    const score = Number(output[o + 4]);
    if (score <= 0) continue;
    const classId = Math.round(Number(output[o + 5]));
    const label = labels[classId];
    if (label === undefined) continue;
    out.push({
      x1: clampX((Number(output[o]) - box.padX) / box.scale),
      y1: clampY((Number(output[o + 1]) - box.padY) / box.scale),
      x2: clampX((Number(output[o + 2]) - box.padX) / box.scale),
      y2: clampY((Number(output[o + 3]) - box.padY) / box.scale),
      label,
      score,
    });
  }
  return out;
}

interface OrtSessionLike {
  inputNames: string[];
  outputNames: string[];
  run(feeds: Record<string, unknown>): Promise<Record<string, { data: Float32Array; dims: number[] }>>;
}

/**
 * Runs a pretrained NMS-free detector exported to ONNX. The runtime is an
 * optional install: creation fails with a BridgeError when either the
 * runtime or the weights file is missing, and nothing else in the bridge
 * depends on it.
 */
export class OnnxDetector implements Detector {
  readonly name: string;

  private constructor(
    private readonly session: OrtSessionLike,
    private readonly makeTensor: (data: Float32Array, dims: number[]) => unknown,
    private readonly inputSize: number,
    name: string,
  ) {
    this.name = name;
  }

  static async create(modelPath: string, inputSize = 640): Promise<OnnxDetector> {
    if (!fs.existsSync(modelPath)) {
      throw new BridgeError(`model weights not found: ${modelPath}`);
    }
    let ort;
    try {
      ort = await import('onnxruntime-node');
    } catch {
      throw new BridgeError(
        'onnxruntime-node is not installed; install it (plus model weights) to use the onnx backend',
      );
    }
    const session = (await ort.InferenceSession.create(modelPath)) as unknown as OrtSessionLike;
    const makeTensor = (data: Float32Array, dims: number[]) =>
      new ort.Tensor('float32', data, dims);
    return new OnnxDetector(session, makeTensor, inputSize, `onnx:${modelPath}`);
  }

  async detect(image: DecodedImage): Promise<RawBox[]> {
    const { tensor, box } = letterbox(image, this.inputSize);
    const feeds: Record<string, unknown> = {
      [this.session.inputNames[0]]: this.makeTensor(tensor, [1, 3, this.inputSize, this.inputSize]),
    };
    const results = await this.session.run(feeds);
    const output = results[this.session.outputNames[0]];
    const rows = output.dims.length >= 2 ? output.dims[output.dims.length - 2] : 0;
    return decodeDetections(output.data, rows, box, image);
  }
}
