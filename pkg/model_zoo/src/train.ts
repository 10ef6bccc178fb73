/**
 * Minibatch SGD for small dense classifiers.
 *
 * Hidden layers use the S-curve activation under test; the output layer is
 * identity logits trained with softmax cross-entropy. Deterministic given
 * the seed (init, shuffling and batching all come from one stream).
 */
import { Rng } from "./rng.js";
import type { ActivationName, DenseLayerDoc, ModelDoc } from "./network.js";

export interface TrainOptions {
  epochs: number;
  seed: number;
  learningRate?: number;
  batchSize?: number;
}

export interface TrainResult {
  model: ModelDoc;
  accuracy: number;
  belowBar: boolean;
}

export const ACCURACY_BAR = 0.85;

interface Dense {
  W: Float64Array; // row-major (out, in)
  b: Float64Array;
  nIn: number;
  nOut: number;
}

function initDense(rng: Rng, nIn: number, nOut: number): Dense {
  const W = new Float64Array(nIn * nOut);
  const scale = 1 / Math.sqrt(nIn);
  for (let i = 0; i < W.length; i++) W[i] = rng.normal() * scale;
  return { W, b: new Float64Array(nOut), nIn, nOut };
}

function act(name: ActivationName, v: number): number {
  switch (name) {
    case "sigmoid": return v >= 0 ? 1 / (1 + Math.exp(-v)) : Math.exp(v) / (1 + Math.exp(v));
    case "tanh": return Math.tanh(v);
    case "arctan": return Math.atan(v);
    default: return v;
  }
}

function actDeriv(name: ActivationName, v: number, y: number): number {
  switch (name) {
    case "sigmoid": return y * (1 - y);
    case "tanh": return 1 - y * y;
    case "arctan": return 1 / (1 + v * v);
    default: return 1;
  }
}

function forwardLayers(layers: Dense[], activation: ActivationName, x: Float64Array) {
  const pre: Float64Array[] = [];
  const post: Float64Array[] = [x];
  let cur = x;
  layers.forEach((layer, li) => {
    const z = new Float64Array(layer.nOut);
    for (let r = 0; r < layer.nOut; r++) {
      let acc = layer.b[r];
      const off = r * layer.nIn;
      for (let c = 0; c < layer.nIn; c++) acc += layer.W[off + c] * cur[c];
      z[r] = acc;
    }
    pre.push(z);
    const name = li === layers.length - 1 ? "identity" : activation;
    const y = new Float64Array(layer.nOut);
    for (let r = 0; r < layer.nOut; r++) y[r] = act(name, z[r]);
    post.push(y);
    cur = y;
  });
  return { pre, post };
}

function softmaxGrad(logits: Float64Array, label: number): Float64Array {
  let mx = -Infinity;
  for (const v of logits) mx = Math.max(mx, v);
  let sum = 0;
  const p = new Float64Array(logits.length);
  for (let i = 0; i < logits.length; i++) {
    p[i] = Math.exp(logits[i] - mx);
    sum += p[i];
  }
  for (let i = 0; i < p.length; i++) p[i] /= sum;
  p[label] -= 1;
  return p;
}

export function trainDense(
  hiddenWidths: number[], activation: ActivationName, nClasses: number,
  trainX: Float64Array[], trainY: Uint8Array,
  testX: Float64Array[], testY: Uint8Array,
  opts: TrainOptions,
): TrainResult {
  const rng = new Rng(opts.seed);
  const lr = opts.learningRate ?? 0.5;
  const batch = opts.batchSize ?? 32;
  const dims = [trainX[0].length, ...hiddenWidths, nClasses];
  const layers: Dense[] = [];
  for (let i = 0; i + 1 < dims.length; i++) layers.push(initDense(rng, dims[i], dims[i + 1]));

  for (let epoch = 0; epoch < opts.epochs; epoch++) {
    const order = rng.shuffle(trainX.length);
    for (let start = 0; start < order.length; start += batch) {
      const idx = order.slice(start, start + batch);
      const gradsW = layers.map((l) => new Float64Array(l.W.length));
      const gradsB = layers.map((l) => new Float64Array(l.b.length));
      for (const s of idx) {
        const { pre, post } = forwardLayers(layers, activation, trainX[s]);
        let delta = softmaxGrad(pre[pre.length - 1], trainY[s]);
        for (let li = layers.length - 1; li >= 0; li--) {
          const layer = layers[li];
          const input = post[li];
          const gW = gradsW[li];
          const gB = gradsB[li];
          for (let r = 0; r < layer.nOut; r++) {
            const d = delta[r];
            gB[r] += d;
            const off = r * layer.nIn;
            for (let c = 0; c < layer.nIn; c++) gW[off + c] += d * input[c];
          }
          if (li > 0) {
            const prevPre = pre[li - 1];
            const prevPost = post[li];
            const next = new Float64Array(layer.nIn);
            for (let c = 0; c < layer.nIn; c++) {
              let acc = 0;
              for (let r = 0; r < layer.nOut; r++) acc += layer.W[r * layer.nIn + c] * delta[r];
              next[c] = acc * actDeriv(activation, prevPre[c], prevPost[c]);
            }
            delta = next;
          }
        }
      }
      const step = lr / idx.length;
      layers.forEach((layer, li) => {
        for (let i = 0; i < layer.W.length; i++) layer.W[i] -= step * gradsW[li][i];
        for (let i = 0; i < layer.b.length; i++) layer.b[i] -= step * gradsB[li][i];
      });
    }
  }

  let correct = 0;
  for (let i = 0; i < testX.length; i++) {
    const { pre } = forwardLayers(layers, activation, testX[i]);
    const logits = pre[pre.length - 1];
    let best = 0;
    for (let k = 1; k < logits.length; k++) if (logits[k] > logits[best]) best = k;
    if (best === testY[i]) correct++;
  }
  const accuracy = testX.length ? correct / testX.length : 0;

  const layerDocs: DenseLayerDoc[] = layers.map((layer, li) => ({
    kind: "dense",
    weights: Array.from({ length: layer.nOut }, (_, r) =>
      Array.from(layer.W.subarray(r * layer.nIn, (r + 1) * layer.nIn))),
    bias: Array.from(layer.b),
    activation: li === layers.length - 1 ? "identity" : activation,
  }));
  const model: ModelDoc = {
    input_shape: [trainX[0].length],
    layers: layerDocs,
    input_range: [0, 1],
  };
  return { model, accuracy, belowBar: accuracy < ACCURACY_BAR };
}
