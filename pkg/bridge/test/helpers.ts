import fs from 'node:fs';
import path from 'node:path';

import { encodePng } from '../src/png.js';
import { DecodedImage } from '../src/types.js';

/** Solid-black RGBA canvas. */
export function blackImage(width: number, height: number): DecodedImage {
  const data = new Uint8Array(width * height * 4);
  for (let i = 0; i < width * height; i += 1) {
    data[i * 4 + 3] = 255;
  }
  return { width, height, data };
}

/** Paint an axis-aligned rectangle, inclusive pixel ranges. */
export function paintRect(
  image: DecodedImage,
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  value = 255,
): void {
  for (let y = y1; y <= y2; y += 1) {
    for (let x = x1; x <= x2; x += 1) {
      const o = (y * image.width + x) * 4;
      image.data[o] = value;
      image.data[o + 1] = value;
      image.data[o + 2] = value;
      image.data[o + 3] = 255;
    }
  }
}

export function writePng(dir: string, name: string, image: DecodedImage): string {
  fs.mkdirSync(dir, { recursive: true });
  const file = path.join(dir, name);
  fs.writeFileSync(file, encodePng(image));
  return file;
}
