import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, describe, expect, it } from "vitest";
import { forward, type GoldenDoc, type ModelDoc } from "../src/network.js";
import { goldenVectors, writeBundle } from "../src/export.js";
import { synthesize } from "../src/synth.js";

const scratch = mkdtempSync(join(tmpdir(), "zoo-"));
afterAll(() => rmSync(scratch, { recursive: true, force: true }));

describe("golden vectors", () => {
  it("reproduce exactly under the exporter's own forward pass", () => {
    const model = synthesize("FNN_2x5", 3, "arctan", { inputShape: [4], nClasses: 3 });
    const golden = goldenVectors(model, 3);
    expect(golden.inputs).toHaveLength(10);
    golden.inputs.forEach((x, i) => {
      expect(Array.from(forward(model, x))).toEqual(golden.logits[i]);
    });
  });

  it("respects a declared input range", () => {
    const model = synthesize("FNN_1x3", 5, "sigmoid",
                             { inputShape: [6], nClasses: 2, inputRange: [0, 1] });
    const golden = goldenVectors(model, 5);
    for (const x of golden.inputs) {
      for (const v of x) {
        expect(v).toBeGreaterThanOrEqual(0);
        expect(v).toBeLessThanOrEqual(1);
      }
    }
  });
});

describe("bundle writing", () => {
  it("is byte-identical across repeated runs", () => {
    const model = synthesize("FNN_1x3", 5, "sigmoid", { inputShape: [2], nClasses: 2 });
    const a = writeBundle(model, join(scratch, "a"), "FNN_1x3", 5);
    const b = writeBundle(model, join(scratch, "b"), "FNN_1x3", 5);
    expect(readFileSync(a.modelPath)).toEqual(readFileSync(b.modelPath));
    expect(readFileSync(a.goldenPath)).toEqual(readFileSync(b.goldenPath));
  });

  it("round-trips through JSON with metadata and exact logits", () => {
    const model = synthesize("CNN_2-3", 7, "sigmoid", { inputShape: [8, 8, 1], nClasses: 4 });
    const paths = writeBundle(model, scratch, "CNN_2-3", 7, { activation: "sigmoid" });
    const doc = JSON.parse(readFileSync(paths.modelPath, "utf-8")) as ModelDoc;
    const golden = JSON.parse(readFileSync(paths.goldenPath, "utf-8")) as GoldenDoc;
    expect(doc.metadata).toMatchObject({ seed: 7, architecture: "CNN_2-3" });
    golden.inputs.forEach((x, i) => {
      const logits = Array.from(forward(doc, x));
      logits.forEach((v, k) => expect(Math.abs(v - golden.logits[i][k])).toBeLessThan(1e-12));
    });
  });
});
