#!/usr/bin/env node
/**
 * embed-bridge: encode corpus sentences into embedding JSONL.
 *
 * Usage:
 *   embed-bridge --in sentences.jsonl --out embeddings.jsonl \
 *     [--model dbmdz/bert-base-german-uncased] [--batch-size 32]
 *
 * Input rows:  {"doc_id": ..., "sentence_index": ..., "text": ...}
 * Output rows: {"doc_id": ..., "sentence_index": ..., "vector": [...]}
 *
 * A model id of the form `hash:<dim>` selects a deterministic offline
 * encoder (for tests and plumbing checks).
 *
 * Exit codes: 0 success, 1 some rows were skipped, 2 usage/config error,
 * 3 model or backend load failure.
 */

import { existsSync } from "node:fs";

import { runBridge } from "./bridge.js";
import { ModelLoadError, resolveEncoder } from "./encoders.js";

const DEFAULT_MODEL = "dbmdz/bert-base-german-uncased";

interface CliOptions {
  input: string;
  output: string;
  model: string;
  batchSize: number;
}

export function parseArgs(argv: string[]): CliOptions {
  const options: Partial<CliOptions> = { model: DEFAULT_MODEL, batchSize: 32 };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "--in":
        options.input = value;
        i += 1;
        break;
      case "--out":
        options.output = value;
        i += 1;
        break;
      case "--model":
        options.model = value;
        i += 1;
        break;
      case "--batch-size":
        options.batchSize = Number(value);
        i += 1;
        break;
      case "--help":
      case "-h":
        throw new UsageError(USAGE, 0);
      default:
        throw new UsageError(`unknown argument: ${flag}\n${USAGE}`);
    }
  }
  if (!options.input || !options.output) {
    throw new UsageError(`--in and --out are required\n${USAGE}`);
  }
  if (!Number.isInteger(options.batchSize) || options.batchSize! < 1) {
    throw new UsageError("--batch-size must be a positive integer");
  }
  return options as CliOptions;
}

const USAGE =
  "usage: embed-bridge --in <jsonl> --out <jsonl> [--model <id>] [--batch-size <n>]";

class UsageError extends Error {
  constructor(message: string, public code: number = 2) {
    super(message);
  }
}

export async function main(argv: string[]): Promise<number> {
  let options: CliOptions;
  try {
    options = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      (err.code === 0 ? process.stdout : process.stderr).write(err.message + "\n");
      return err.code;
    }
    throw err;
  }
  if (!existsSync(options.input)) {
    process.stderr.write(`input file not found: ${options.input}\n`);
    return 2;
  }
  try {
    const encoder = await resolveEncoder(options.model);
    const result = await runBridge({
      input: options.input,
      output: options.output,
      encoder,
      batchSize: options.batchSize,
    });
    process.stderr.write(
      `wrote ${result.written} row(s), dimension ${result.dimension}, ` +
      `skipped ${result.skipped}\n`);
    return result.skipped > 0 ? 1 : 0;
  } catch (err) {
    if (err instanceof ModelLoadError) {
      process.stderr.write(err.message + "\n");
      return 3;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;

if (invokedDirectly) {
  main(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      process.stderr.write(String(err?.stack ?? err) + "\n");
      process.exit(1);
    },
  );
}
