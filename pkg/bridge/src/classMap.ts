import fs from 'node:fs';

import { BridgeError } from './types.js';

/**
 * Default mapping from COCO-vocabulary detector labels to KITTI classes.
 *
 * Only confident correspondences are included; KITTI classes without a COCO
 * counterpart (Van, Tram, Person_sitting, Misc) stay unmapped by default and
 * can be supplied through a custom map file. Unmapped detector labels are
 * dropped from the output.
 */
export const DEFAULT_CLASS_MAP: Record<string, string> = {
  person: 'Pedestrian',
  bicycle: 'Cyclist',
  car: 'Car',
  truck: 'Truck',
};

export function loadClassMap(path?: string): Record<string, string> {
  if (!path) {
    return { ...DEFAULT_CLASS_MAP };
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(fs.readFileSync(path, 'utf-8'));
  } catch (err) {
    throw new BridgeError(`cannot read class map ${path}: ${String(err)}`);
  }
  if (typeof parsed !== 'object' || parsed === null || Array.isArray(parsed)) {
    throw new BridgeError(`class map ${path} must be a JSON object`);
  }
  const map: Record<string, string> = {};
  for (const [key, value] of Object.entries(parsed)) {
    if (typeof value !== 'string') {
      throw new BridgeError(`class map entry ${key} must map to a string`);
    }
    map[key] = value;
  }
  return map;
}
