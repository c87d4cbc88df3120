import fs from 'node:fs';

import { PNG } from 'pngjs';

import { DecodedImage } from './types.js';

/** Decode an 8-bit PNG to RGBA samples; throws on unreadable files. */
export function readPng(path: string): DecodedImage {
  const png = PNG.sync.read(fs.readFileSync(path));
  return {
    width: png.width,
    height: png.height,
    data: new Uint8Array(png.data.buffer, png.data.byteOffset, png.data.length),
  };
}

/** Encode RGBA samples back to PNG bytes (used by tests and fixtures). */
export function encodePng(image: DecodedImage): Buffer {
  const png = new PNG({ width: image.width, height: image.height });
  Buffer.from(image.data).copy(png.data);
  return PNG.sync.write(png);
}
