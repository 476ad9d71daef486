#!/usr/bin/env node
/**
 * rgbdseg infer --image <png> --out <dir> [--score 0.5] [--classes a,b,c]
 *               [--model <model.json>] [--device <backend>]
 * rgbdseg classes
 *
 * Exit codes: 0 success (including zero detections), 2 on any error.
 */

import { ConfigError, ImageError, ModelLoadError } from './errors';
import { inferMasks } from './infer';
import { listClasses } from './labels';

const USAGE =
  'usage: rgbdseg infer --image <png> --out <dir> [--score 0.5] ' +
  '[--classes a,b,c] [--model <model.json>] [--device <backend>]\n' +
  '       rgbdseg classes\n';

function parseInferArgs(argv: string[]) {
  const opts: {
    image?: string;
    out?: string;
    score?: number;
    classes?: string[];
    model?: string;
    device?: string;
  } = {};
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case '--image':
      case '--out':
      case '--model':
      case '--device': {
        if (value === undefined) throw new ConfigError(`${flag} needs a value`);
        opts[flag.slice(2) as 'image' | 'out' | 'model' | 'device'] = value;
        i++;
        break;
      }
      case '--score': {
        if (value === undefined) throw new ConfigError('--score needs a value');
        opts.score = Number(value);
        if (Number.isNaN(opts.score)) throw new ConfigError(`--score: '${value}' is not a number`);
        i++;
        break;
      }
      case '--classes': {
        if (value === undefined) throw new ConfigError('--classes needs a value');
        opts.classes = value.split(',').map((s) => s.trim()).filter((s) => s.length > 0);
        i++;
        break;
      }
      default:
        throw new ConfigError(`unknown flag '${flag}'`);
    }
  }
  if (!opts.image || !opts.out) {
    throw new ConfigError('--image and --out are required');
  }
  return opts;
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  try {
    if (command === 'classes') {
      if (rest.length > 0) throw new ConfigError('classes takes no flags');
      for (const name of listClasses()) {
        process.stdout.write(name + '\n');
      }
      return 0;
    }
    if (command === 'infer') {
      const opts = parseInferArgs(rest);
      const result = await inferMasks(opts.image!, opts.out!, {
        scoreThreshold: opts.score,
        classAllowlist: opts.classes,
        deviceHint: opts.device,
        modelJsonPath: opts.model,
      });
      process.stderr.write(
        `${result.instances.length} instance(s) -> ${result.manifestPath}\n`,
      );
      return 0;
    }
    throw new ConfigError(`unknown command '${command ?? ''}'`);
  } catch (err) {
    if (err instanceof ConfigError) {
      process.stderr.write(`error: ${err.message}\n${USAGE}`);
      return 2;
    }
    if (err instanceof ImageError || err instanceof ModelLoadError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      process.stderr.write(`unexpected failure: ${err?.stack ?? err}\n`);
      process.exit(2);
    },
  );
}
