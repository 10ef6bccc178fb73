/**
 * Seeded random reference networks.
 *
 * FNN_{l}x{k}: l hidden dense layers of k neurons. CNN_{l}-{k}: l conv
 * layers of k 3x3 filters (stride 1, valid) before the dense logits layer.
 * Weights draw from a seeded normal scaled by 1/sqrt(fan_in).
 */
import { Rng } from "./rng.js";
import type { ActivationName, ConvLayerDoc, DenseLayerDoc, ModelDoc } from "./network.js";

export class ArchitectureError extends Error {}

export interface ParsedArch {
  kind: "fnn" | "cnn";
  depth: number;
  width: number;
}

export function parseArch(arch: string): ParsedArch {
  let m = /^FNN_(\d+)x(\d+)$/.exec(arch);
  if (m) return { kind: "fnn", depth: Number(m[1]), width: Number(m[2]) };
  m = /^CNN_(\d+)-(\d+)$/.exec(arch);
  if (m) return { kind: "cnn", depth: Number(m[1]), width: Number(m[2]) };
  throw new ArchitectureError(
    `bad architecture string ${JSON.stringify(arch)}, expected FNN_<l>x<k> or CNN_<l>-<k>`);
}

function denseLayer(rng: Rng, nIn: number, nOut: number,
                    activation: ActivationName): DenseLayerDoc {
  const scale = 1 / Math.sqrt(nIn);
  const weights: number[][] = [];
  for (let r = 0; r < nOut; r++) {
    const row = new Array<number>(nIn);
    for (let c = 0; c < nIn; c++) row[c] = rng.normal() * scale;
    weights.push(row);
  }
  const bias = new Array<number>(nOut);
  for (let r = 0; r < nOut; r++) bias[r] = rng.normal() * scale;
  return { kind: "dense", weights, bias, activation };
}

function convLayer(rng: Rng, cin: number, cout: number,
                   activation: ActivationName): ConvLayerDoc {
  const scale = 1 / Math.sqrt(3 * 3 * cin);
  const weights: number[][][][] = [];
  for (let ky = 0; ky < 3; ky++) {
    const wy: number[][][] = [];
    for (let kx = 0; kx < 3; kx++) {
      const wx: number[][] = [];
      for (let ci = 0; ci < cin; ci++) {
        const wc = new Array<number>(cout);
        for (let co = 0; co < cout; co++) wc[co] = rng.normal() * scale;
        wx.push(wc);
      }
      wy.push(wx);
    }
    weights.push(wy);
  }
  const bias = new Array<number>(cout);
  for (let co = 0; co < cout; co++) bias[co] = rng.normal() * scale;
  return {
    kind: "conv2d", weights, bias, activation,
    stride: [1, 1], padding: "valid", kernel_shape: [3, 3, cin, cout],
  };
}

export interface SynthesizeOptions {
  inputShape?: number[];
  nClasses?: number;
  inputRange?: [number, number];
}

export function synthesize(arch: string, seed: number, activation: ActivationName,
                           opts: SynthesizeOptions = {}): ModelDoc {
  const parsed = parseArch(arch);
  if (parsed.depth < 1 || parsed.width < 1) {
    throw new ArchitectureError(`architecture ${arch} must have positive sizes`);
  }
  const nClasses = opts.nClasses ?? 10;
  const rng = new Rng(seed);
  const layers: ModelDoc["layers"] = [];
  let inputShape: number[];
  if (parsed.kind === "fnn") {
    inputShape = opts.inputShape ?? [784];
    let size = inputShape.reduce((a, b) => a * b, 1);
    for (let i = 0; i < parsed.depth; i++) {
      layers.push(denseLayer(rng, size, parsed.width, activation));
      size = parsed.width;
    }
    layers.push(denseLayer(rng, size, nClasses, "identity"));
  } else {
    inputShape = opts.inputShape ?? [14, 14, 1];
    if (inputShape.length !== 3) {
      throw new ArchitectureError("CNN architectures need an (h, w, c) input shape");
    }
    let [h, w, c] = inputShape;
    for (let i = 0; i < parsed.depth; i++) {
      layers.push(convLayer(rng, c, parsed.width, activation));
      h -= 2;
      w -= 2;
      c = parsed.width;
      if (h < 1 || w < 1) {
        throw new ArchitectureError(`input ${inputShape} too small for ${arch}`);
      }
    }
    layers.push(denseLayer(rng, h * w * c, nClasses, "identity"));
  }
  const doc: ModelDoc = { input_shape: inputShape, layers };
  if (opts.inputRange) doc.input_range = opts.inputRange;
  return doc;
}
