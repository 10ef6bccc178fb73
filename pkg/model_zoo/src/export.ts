/**
 * Bundle writing: the model JSON plus a golden-vector sidecar of probe
 * inputs and the exact logits this implementation assigns them. Consumers
 * must reproduce the logits within 1e-6.
 */
import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { Rng } from "./rng.js";
import { forward, type GoldenDoc, type ModelDoc } from "./network.js";

export const GOLDEN_COUNT = 10;

export function goldenVectors(model: ModelDoc, seed: number,
                              count = GOLDEN_COUNT): GoldenDoc {
  const rng = new Rng(seed ^ 0x5eed);
  const size = model.input_shape.reduce((a, b) => a * b, 1);
  const [lo, hi] = model.input_range ?? [-1, 1];
  const inputs: number[][] = [];
  const logits: number[][] = [];
  for (let i = 0; i < count; i++) {
    const x = new Array<number>(size);
    for (let j = 0; j < size; j++) x[j] = rng.uniform(lo, hi);
    inputs.push(x);
    logits.push(Array.from(forward(model, x)));
  }
  return { inputs, logits };
}

export interface BundlePaths {
  modelPath: string;
  goldenPath: string;
}

export function writeBundle(model: ModelDoc, outDir: string, name: string,
                            seed: number,
                            metadata: Record<string, unknown> = {}): BundlePaths {
  mkdirSync(outDir, { recursive: true });
  const doc: ModelDoc = {
    ...model,
    metadata: { seed, architecture: name, ...metadata },
  };
  const modelPath = join(outDir, `${name}.json`);
  const goldenPath = join(outDir, `${name}.golden.json`);
  writeFileSync(modelPath, JSON.stringify(doc));
  writeFileSync(goldenPath, JSON.stringify(goldenVectors(model, seed)));
  return { modelPath, goldenPath };
}
