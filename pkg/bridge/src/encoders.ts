import { createHash } from "node:crypto";

/** Maps a batch of sentence texts to fixed-dimension vectors. */
export interface Encoder {
  dimension: number | null;
  encode(texts: string[]): Promise<number[][]>;
}

/**
 * Deterministic offline encoder for tests and dry runs, selected with a
 * model id of the form `hash:<dim>`. Vectors are derived from the SHA-256
 * of the text, so identical sentences always map to identical vectors.
 */
export function hashEncoder(dimension: number): Encoder {
  if (!Number.isInteger(dimension) || dimension < 1) {
    throw new Error(`hash encoder needs a positive integer dimension, got ${dimension}`);
  }
  const encodeOne = (text: string): number[] => {
    const values: number[] = [];
    let counter = 0;
    while (values.length < dimension) {
      const digest = createHash("sha256").update(`${counter}|${text}`).digest();
      for (let off = 0; off + 4 <= digest.length && values.length < dimension; off += 4) {
        const raw = digest.readUInt32BE(off);
        values.push((raw / 0xffffffff) * 2 - 1);
      }
      counter += 1;
    }
    let norm = Math.sqrt(values.reduce((acc, v) => acc + v * v, 0));
    if (norm === 0) norm = 1;
    return values.map((v) => v / norm);
  };
  return {
    dimension,
    async encode(texts: string[]): Promise<number[][]> {
      return texts.map(encodeOne);
    },
  };
}

/**
 * Transformer feature-extraction pipeline with mean pooling over token
 * states. The library is imported lazily so environments without it can
 * still run the hash encoder; any load failure surfaces as a resource
 * error (exit code 3 in the CLI).
 */
export async function transformersEncoder(modelId: string): Promise<Encoder> {
  let pipeline: any;
  try {
    // Computed specifier: the backend is an optional dependency and may
    // be absent; absence must surface as a load error, not a build error.
    const backend = "@huggingface/transformers";
    ({ pipeline } = await import(backend));
  } catch (err) {
    throw new ModelLoadError(
      `transformers backend unavailable: ${(err as Error).message}`);
  }
  let extractor: any;
  try {
    extractor = await pipeline("feature-extraction", modelId);
  } catch (err) {
    throw new ModelLoadError(
      `could not load model ${modelId}: ${(err as Error).message}`);
  }
  return {
    dimension: null, // known after the first batch
    async encode(texts: string[]): Promise<number[][]> {
      const output = await extractor(texts, { pooling: "mean", normalize: false });
      const [rows, dim] = output.dims.length === 2 ? output.dims : [1, output.dims[0]];
      const data: number[] = Array.from(output.data as Float32Array);
      const vectors: number[][] = [];
      for (let i = 0; i < rows; i++) {
        vectors.push(data.slice(i * dim, (i + 1) * dim));
      }
      return vectors;
    },
  };
}

export class ModelLoadError extends Error {}

const HASH_MODEL = /^hash:(\d+)$/;

export async function resolveEncoder(modelId: string): Promise<Encoder> {
  const match = HASH_MODEL.exec(modelId);
  if (match) {
    return hashEncoder(Number(match[1]));
  }
  return transformersEncoder(modelId);
}
