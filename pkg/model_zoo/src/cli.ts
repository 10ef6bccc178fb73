/**
 * Exporter CLI.
 *
 *   node dist/cli.js export --arch FNN_3x50 --act sigmoid --seed 42 --out dir/
 *   node dist/cli.js train  --data dir/train-images-idx3-ubyte --arch FNN_1x50 \
 *                           --act sigmoid --epochs 6 --seed 0 --out dir/
 *
 * export also accepts --input-shape h,w,c (or a single integer) and
 * --classes N. train derives the test set from the matching t10k files and
 * exports regardless of the accuracy bar, flagging the bundle when unmet.
 */
import { pathToFileURL } from "node:url";
import { loadIdxPair } from "./idx.js";
import { type ActivationName } from "./network.js";
import { synthesize, parseArch, ArchitectureError } from "./synth.js";
import { ACCURACY_BAR, trainDense } from "./train.js";
import { writeBundle } from "./export.js";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`expected --flag value pairs, got ${key}`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  return flags;
}

function need(flags: Map<string, string>, key: string): string {
  const v = flags.get(key);
  if (v === undefined) throw new Error(`missing required --${key}`);
  return v;
}

const ACTIVATIONS: ActivationName[] = ["sigmoid", "tanh", "arctan"];

function parseActivation(v: string): ActivationName {
  if (!ACTIVATIONS.includes(v as ActivationName)) {
    throw new Error(`unknown activation ${v}, expected one of ${ACTIVATIONS.join(", ")}`);
  }
  return v as ActivationName;
}

function cmdExport(flags: Map<string, string>): void {
  const arch = need(flags, "arch");
  const act = parseActivation(need(flags, "act"));
  const seed = Number(need(flags, "seed"));
  const out = need(flags, "out");
  const opts: Parameters<typeof synthesize>[3] = {};
  const shape = flags.get("input-shape");
  if (shape) opts.inputShape = shape.split(",").map(Number);
  const classes = flags.get("classes");
  if (classes) opts.nClasses = Number(classes);
  const range = flags.get("input-range");
  if (range) {
    const [lo, hi] = range.split(",").map(Number);
    opts.inputRange = [lo, hi];
  }
  const model = synthesize(arch, seed, act, opts);
  const paths = writeBundle(model, out, arch, seed, { activation: act });
  console.log(`wrote ${paths.modelPath} and ${paths.goldenPath}`);
}

function cmdTrain(flags: Map<string, string>): void {
  const arch = need(flags, "arch");
  const parsed = parseArch(arch);
  if (parsed.kind !== "fnn") throw new Error("train supports FNN architectures only");
  const act = parseActivation(need(flags, "act"));
  const seed = Number(flags.get("seed") ?? "0");
  const epochs = Number(flags.get("epochs") ?? "6");
  const out = need(flags, "out");
  const trainImages = need(flags, "data");
  const testImages = trainImages.replace("train", "t10k");
  const train = loadIdxPair(trainImages);
  const test = loadIdxPair(testImages);
  const limit = Number(flags.get("test-limit") ?? "1000");
  const result = trainDense(
    Array(parsed.depth).fill(parsed.width), act, 10,
    train.images, train.labels,
    test.images.slice(0, limit), test.labels.subarray(0, limit),
    { epochs, seed, learningRate: Number(flags.get("lr") ?? "0.5") },
  );
  if (result.belowBar) {
    console.warn(`warning: accuracy ${(result.accuracy * 100).toFixed(1)}% below the `
      + `${ACCURACY_BAR * 100}% bar; exporting anyway with below_bar flag`);
  }
  const paths = writeBundle(result.model, out, arch, seed, {
    activation: act,
    trained: true,
    epochs,
    accuracy: result.accuracy,
    below_bar: result.belowBar,
  });
  console.log(`accuracy ${(result.accuracy * 100).toFixed(2)}% on ${Math.min(limit, test.images.length)} test images`);
  console.log(`wrote ${paths.modelPath} and ${paths.goldenPath}`);
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    const flags = parseFlags(rest);
    if (command === "export") cmdExport(flags);
    else if (command === "train") cmdTrain(flags);
    else throw new Error(`unknown command ${command ?? "(none)"}, expected export or train`);
    return 0;
  } catch (err) {
    if (err instanceof ArchitectureError || err instanceof Error) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
