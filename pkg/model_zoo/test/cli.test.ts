import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import type { GoldenDoc, ModelDoc } from "../src/network.js";

const ROOT = join(__dirname, "..");
const CLI = join(ROOT, "dist", "cli.js");
const scratch = mkdtempSync(join(tmpdir(), "zoo-cli-"));

beforeAll(() => {
  if (!existsSync(CLI)) {
    execFileSync("npx", ["tsc", "-p", join(ROOT, "tsconfig.json")], { stdio: "pipe" });
  }
});
afterAll(() => rmSync(scratch, { recursive: true, force: true }));

function run(args: string[]): string {
  return execFileSync("node", [CLI, ...args], { encoding: "utf-8" });
}

describe("export command", () => {
  it("writes a bundle that parses and carries metadata", () => {
    run(["export", "--arch", "FNN_1x4", "--act", "sigmoid", "--seed", "42",
         "--out", scratch, "--input-shape", "3", "--classes", "2"]);
    const doc = JSON.parse(readFileSync(join(scratch, "FNN_1x4.json"), "utf-8")) as ModelDoc;
    const golden = JSON.parse(
      readFileSync(join(scratch, "FNN_1x4.golden.json"), "utf-8")) as GoldenDoc;
    expect(doc.input_shape).toEqual([3]);
    expect(doc.metadata).toMatchObject({ seed: 42, architecture: "FNN_1x4" });
    expect(golden.inputs).toHaveLength(10);
  });

  it("same invocation twice produces byte-identical files", () => {
    const a = join(scratch, "runA");
    const b = join(scratch, "runB");
    const args = ["export", "--arch", "FNN_2x3", "--act", "tanh", "--seed", "7",
                  "--input-shape", "4"];
    run([...args, "--out", a]);
    run([...args, "--out", b]);
    expect(readFileSync(join(a, "FNN_2x3.json")))
      .toEqual(readFileSync(join(b, "FNN_2x3.json")));
    expect(readFileSync(join(a, "FNN_2x3.golden.json")))
      .toEqual(readFileSync(join(b, "FNN_2x3.golden.json")));
  });

  it("rejects bad grammar with a nonzero exit", () => {
    expect(() => run(["export", "--arch", "FNN_3-2", "--act", "sigmoid",
                      "--seed", "1", "--out", scratch])).toThrow();
  });

  it("rejects unknown activations", () => {
    expect(() => run(["export", "--arch", "FNN_1x2", "--act", "relu",
                      "--seed", "1", "--out", scratch])).toThrow();
  });
});
