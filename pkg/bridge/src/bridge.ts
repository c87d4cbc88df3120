import fs from 'node:fs';
import path from 'node:path';
import { performance } from 'node:perf_hooks';

import { readPng } from './png.js';
import {
  BridgeBox,
  BridgeConfig,
  BridgeError,
  DetectionRecord,
  Detector,
  LatencyStats,
  RawBox,
} from './types.js';

export function listImages(dir: string): string[] {
  if (!fs.existsSync(dir) || !fs.statSync(dir).isDirectory()) {
    throw new BridgeError(`image directory not found: ${dir}`);
  }
  return fs
    .readdirSync(dir)
    .filter((f) => f.toLowerCase().endsWith('.png'))
    .sort()
    .map((f) => path.join(dir, f));
}

/** Map detector labels through the class map and apply the confidence gate. */
export function toBridgeBoxes(
  raw: RawBox[],
  classMap: Record<string, string>,
  confidenceMin: number,
): BridgeBox[] {
  const boxes: BridgeBox[] = [];
  for (const r of raw) {
    const mapped = classMap[r.label];
    if (mapped === undefined) continue;
    if (r.score < confidenceMin) continue;
    boxes.push({ j1: r.x1, k1: r.y1, j2: r.x2, k2: r.y2, class: mapped, score: r.score });
  }
  return boxes;
}

export function validateRecords(records: DetectionRecord[]): void {
  for (const rec of records) {
    if (!rec.image_id) {
      throw new BridgeError('record with empty image_id');
    }
    for (const b of rec.boxes) {
      if (!(b.j1 <= b.j2 && b.k1 <= b.k2)) {
        throw new BridgeError(`inverted box corners in ${rec.image_id}`);
      }
      if (b.j1 < 0 || b.k1 < 0) {
        throw new BridgeError(`negative box coordinates in ${rec.image_id}`);
      }
      if (!(b.score >= 0 && b.score <= 1)) {
        throw new BridgeError(`score outside [0, 1] in ${rec.image_id}`);
      }
      if (typeof b.class !== 'string' || b.class.length === 0) {
        throw new BridgeError(`empty class label in ${rec.image_id}`);
      }
    }
  }
}

/** Serialize and atomically replace the output file (write + rename). */
export function writeDetectionsFile(outputJson: string, records: DetectionRecord[]): void {
  validateRecords(records);
  fs.mkdirSync(path.dirname(path.resolve(outputJson)), { recursive: true });
  const tmp = `${outputJson}.tmp`;
  fs.writeFileSync(tmp, `${JSON.stringify(records, null, 2)}\n`, 'utf-8');
  fs.renameSync(tmp, outputJson);
}

/**
 * Run the detector over every PNG in the configured directory and write one
 * record per image to the shared detections JSON. Unreadable images yield a
 * record with no boxes plus a warning instead of aborting the batch.
 */
export async function detectDirectory(
  cfg: BridgeConfig,
  detector: Detector,
): Promise<DetectionRecord[]> {
  const records: DetectionRecord[] = [];
  for (const imagePath of listImages(cfg.imageDir)) {
    const imageId = path.basename(imagePath, '.png');
    try {
      const image = readPng(imagePath);
      const raw = await detector.detect(image);
      records.push({
        image_id: imageId,
        boxes: toBridgeBoxes(raw, cfg.classMap, cfg.confidenceMin),
      });
    } catch (err) {
      console.warn(`warning: unreadable image ${imagePath}: ${String(err)}`);
      records.push({ image_id: imageId, boxes: [] });
    }
  }
  writeDetectionsFile(cfg.outputJson, records);
  return records;
}

/**
 * Per-image inference wall time, pooled over `repeats` passes after one
 * untimed warm-up pass over the whole directory.
 */
export async function measureDetectLatency(
  cfg: BridgeConfig,
  detector: Detector,
  repeats: number,
): Promise<LatencyStats> {
  if (repeats < 10) {
    throw new BridgeError(`need at least 10 repeats after warm-up, got ${repeats}`);
  }
  const paths = listImages(cfg.imageDir);
  if (paths.length === 0) {
    throw new BridgeError(`no PNG images in ${cfg.imageDir}`);
  }
  const images = paths.map(readPng);
  for (const image of images) {
    await detector.detect(image); // warm-up
  }
  const samples: number[] = [];
  for (let r = 0; r < repeats; r += 1) {
    for (const image of images) {
      const t0 = performance.now();
      await detector.detect(image);
      samples.push(performance.now() - t0);
    }
  }
  const mean = samples.reduce((a, b) => a + b, 0) / samples.length;
  const variance =
    samples.reduce((a, b) => a + (b - mean) * (b - mean), 0) / (samples.length - 1);
  return {
    variant: cfg.variant,
    backend: detector.name,
    meanMs: mean,
    stdMs: Math.sqrt(variance),
    samples: samples.length,
    repeats,
  };
}

/** Append-or-create a latency CSV shared with the evaluation side. */
export function writeLatencyCsv(csvPath: string, stats: LatencyStats[]): void {
  const header = 'variant,backend,mean_ms,std_ms,samples,repeats\n';
  const lines = stats
    .map(
      (s) =>
        `${s.variant},${s.backend},${s.meanMs.toFixed(4)},${s.stdMs.toFixed(4)},` +
        `${s.samples},${s.repeats}`,
    )
    .join('\n');
  fs.mkdirSync(path.dirname(path.resolve(csvPath)), { recursive: true });
  fs.writeFileSync(csvPath, header + lines + '\n', 'utf-8');
}
