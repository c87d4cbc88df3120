import { DecodedImage, Detector, RawBox } from './types.js';

/**
 * Deterministic stand-in detector: boxes around bright connected regions.
 *
 * Exists so the bridge contract (schema, class mapping, confidence filter,
 * latency harness, determinism) can be exercised without model weights.
 * Blobs are found by thresholding luminance and flood-filling 4-connected
 * components; large blobs are labelled "car", small ones "person", and the
 * score is the blob's mean luminance. Box edges are exclusive on the
 * bottom-right, so a blob spanning pixel columns 3..7 yields x1=3, x2=8.
 */
export class SyntheticDetector implements Detector {
  readonly name = 'synthetic';

  constructor(
    private readonly lumaMin = 200,
    private readonly minArea = 4,
    private readonly carAreaMin = 40,
  ) {}

  async detect(image: DecodedImage): Promise<RawBox[]> {
    const { width, height, data } = image;
    const bright = new Uint8Array(width * height);
    for (let i = 0; i < width * height; i += 1) {
      const o = i * 4;
      const luma = 0.299 * data[o] + 0.587 * data[o + 1] + 0.114 * data[o + 2];
      bright[i] = luma >= this.lumaMin ? 1 : 0;
    }

    const seen = new Uint8Array(width * height);
    const boxes: RawBox[] = [];
    const stack: number[] = [];
    for (let start = 0; start < width * height; start += 1) {
      if (!bright[start] || seen[start]) continue;
      let minX = width;
      let minY = height;
      let maxX = 0;
      let maxY = 0;
      let area = 0;
      let lumaSum = 0;
      stack.push(start);
      seen[start] = 1;
      while (stack.length > 0) {
        const idx = stack.pop() as number;
        const x = idx % width;
        const y = (idx - x) / width;
        area += 1;
        const o = idx * 4;
        lumaSum += 0.299 * data[o] + 0.587 * data[o + 1] + 0.114 * data[o + 2];
        if (x < minX) minX = x;
        if (y < minY) minY = y;
        if (x > maxX) maxX = x;
        if (y > maxY) maxY = y;
        const neighbors = [
          x > 0 ? idx - 1 : -1,
          x < width - 1 ? idx + 1 : -1,
          y > 0 ? idx - width : -1,
          y < height - 1 ? idx + width : -1,
        ];
        for (const n of neighbors) {
          if (n >= 0 && bright[n] && !seen[n]) {
            seen[n] = 1;
            stack.push(n);
          }
        }
      }
      if (area < this.minArea) continue;
      boxes.push({
        x1: minX,
        y1: minY,
        x2: maxX + 1,
        y2: maxY + 1,
        label: area >= this.carAreaMin ? 'car' : 'person',
        score: Math.round((lumaSum / area / 255) * 1e4) / 1e4,
      });
    }
    boxes.sort((a, b) => a.y1 - b.y1 || a.x1 - b.x1 || a.x2 - b.x2 || a.y2 - b.y2);
    return boxes;
  }
}
