#!/usr/bin/env node
/**
 * Detector bridge CLI.
 *
 *   modcam-bridge --images out/modulo/alpha_4 --out det/modulo/alpha_4.json \
 *       --variant x --conf 0.25 [--class-map map.json] \
 *       [--backend synthetic|onnx --model weights.onnx] \
 *       [--latency --repeats 20 --latency-out latency.csv]
 */

import { loadClassMap } from './classMap.js';
import {
  detectDirectory,
  measureDetectLatency,
  writeLatencyCsv,
} from './bridge.js';
import { OnnxDetector } from './onnx.js';
import { SyntheticDetector } from './synthetic.js';
import {
  BackendName,
  BridgeConfig,
  BridgeError,
  Detector,
  MODEL_VARIANTS,
  ModelVariant,
} from './types.js';

interface CliArgs {
  variant: ModelVariant;
  images: string;
  out: string;
  conf: number;
  classMapPath?: string;
  backend: BackendName;
  model?: string;
  latency: boolean;
  repeats: number;
  latencyOut?: string;
}

export function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = {
    variant: 'n',
    images: '',
    out: 'detections.json',
    conf: 0.25,
    backend: 'synthetic',
    latency: false,
    repeats: 10,
  };
  for (let i = 0; i < argv.length; i += 1) {
    const flag = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new BridgeError(`missing value for ${flag}`);
      return argv[i];
    };
    switch (flag) {
      case '--variant': {
        const v = next();
        if (!(MODEL_VARIANTS as readonly string[]).includes(v)) {
          throw new BridgeError(`unknown variant ${v}; expected one of ${MODEL_VARIANTS.join(', ')}`);
        }
        args.variant = v as ModelVariant;
        break;
      }
      case '--images':
        args.images = next();
        break;
      case '--out':
        args.out = next();
        break;
      case '--conf': {
        args.conf = Number(next());
        if (!(args.conf >= 0 && args.conf <= 1)) {
          throw new BridgeError('confidence threshold must be in [0, 1]');
        }
        break;
      }
      case '--class-map':
        args.classMapPath = next();
        break;
      case '--backend': {
        const b = next();
        if (b !== 'synthetic' && b !== 'onnx') {
          throw new BridgeError(`unknown backend ${b}`);
        }
        args.backend = b;
        break;
      }
      case '--model':
        args.model = next();
        break;
      case '--latency':
        args.latency = true;
        break;
      case '--repeats':
        args.repeats = Number(next());
        break;
      case '--latency-out':
        args.latencyOut = next();
        break;
      default:
        throw new BridgeError(`unknown flag ${flag}`);
    }
  }
  if (!args.images) {
    throw new BridgeError('--images is required');
  }
  return args;
}

async function buildDetector(args: CliArgs): Promise<Detector> {
  if (args.backend === 'onnx') {
    if (!args.model) {
      throw new BridgeError('--backend onnx requires --model weights.onnx');
    }
    return OnnxDetector.create(args.model);
  }
  return new SyntheticDetector();
}

export async function main(argv: string[]): Promise<number> {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  try {
    const cfg: BridgeConfig = {
      variant: args.variant,
      imageDir: args.images,
      outputJson: args.out,
      confidenceMin: args.conf,
      classMap: loadClassMap(args.classMapPath),
      backend: args.backend,
      modelPath: args.model,
    };
    const detector = await buildDetector(args);
    if (args.latency) {
      const stats = await measureDetectLatency(cfg, detector, args.repeats);
      console.log(
        `variant ${stats.variant} (${stats.backend}): ` +
          `${stats.meanMs.toFixed(2)} ms ± ${stats.stdMs.toFixed(2)} ` +
          `over ${stats.samples} inferences`,
      );
      if (args.latencyOut) {
        writeLatencyCsv(args.latencyOut, [stats]);
      }
      return 0;
    }
    const records = await detectDirectory(cfg, detector);
    const total = records.reduce((a, r) => a + r.boxes.length, 0);
    console.log(`wrote ${args.out}: ${records.length} images, ${total} boxes`);
    return 0;
  } catch (err) {
    console.error(String(err));
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
