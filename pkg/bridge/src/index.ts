export { DEFAULT_CLASS_MAP, loadClassMap } from './classMap.js';
export {
  detectDirectory,
  listImages,
  measureDetectLatency,
  toBridgeBoxes,
  validateRecords,
  writeDetectionsFile,
  writeLatencyCsv,
} from './bridge.js';
export { COCO_LABELS, OnnxDetector, decodeDetections, letterbox } from './onnx.js';
export { encodePng, readPng } from './png.js';
export { SyntheticDetector } from './synthetic.js';
export * from './types.js';
