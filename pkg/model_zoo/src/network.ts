/**
 * Model-format types and a reference forward pass.
 *
 * Mirrors the verifier's JSON schema: dense weights are row-major
 * (out, in), conv kernels are [ky][kx][cin][cout] with TF-style padding,
 * feature maps flatten row-major as (h, w, c), the final layer is identity.
 */

export type ActivationName = "sigmoid" | "tanh" | "arctan" | "identity";

export interface DenseLayerDoc {
  kind: "dense";
  weights: number[][];
  bias: number[];
  activation: ActivationName;
}

export interface ConvLayerDoc {
  kind: "conv2d";
  weights: number[][][][];
  bias: number[];
  activation: ActivationName;
  stride: [number, number];
  padding: "valid" | "same";
  kernel_shape: [number, number, number, number];
}

export type LayerDoc = DenseLayerDoc | ConvLayerDoc;

export interface ModelDoc {
  input_shape: number[];
  layers: LayerDoc[];
  input_range?: [number, number];
  metadata?: Record<string, unknown>;
}

export interface GoldenDoc {
  inputs: number[][];
  logits: number[][];
}

export function applyActivation(name: ActivationName, z: Float64Array): Float64Array {
  const out = new Float64Array(z.length);
  for (let i = 0; i < z.length; i++) {
    const v = z[i];
    switch (name) {
      case "sigmoid":
        out[i] = v >= 0 ? 1 / (1 + Math.exp(-v)) : Math.exp(v) / (1 + Math.exp(v));
        break;
      case "tanh":
        out[i] = Math.tanh(v);
        break;
      case "arctan":
        out[i] = Math.atan(v);
        break;
      default:
        out[i] = v;
    }
  }
  return out;
}

function denseForward(layer: DenseLayerDoc, x: Float64Array): Float64Array {
  const rows = layer.weights.length;
  const z = new Float64Array(rows);
  for (let r = 0; r < rows; r++) {
    const w = layer.weights[r];
    let acc = layer.bias[r];
    for (let c = 0; c < w.length; c++) acc += w[c] * x[c];
    z[r] = acc;
  }
  return z;
}

export function convOutputShape(
  layer: ConvLayerDoc, inShape: [number, number, number],
): { oh: number; ow: number; padTop: number; padLeft: number } {
  const [h, w] = inShape;
  const [kh, kw] = layer.kernel_shape;
  const [sh, sw] = layer.stride;
  if (layer.padding === "valid") {
    return { oh: Math.floor((h - kh) / sh) + 1, ow: Math.floor((w - kw) / sw) + 1, padTop: 0, padLeft: 0 };
  }
  const oh = Math.ceil(h / sh);
  const ow = Math.ceil(w / sw);
  const padH = Math.max((oh - 1) * sh + kh - h, 0);
  const padW = Math.max((ow - 1) * sw + kw - w, 0);
  return { oh, ow, padTop: Math.floor(padH / 2), padLeft: Math.floor(padW / 2) };
}

function convForward(
  layer: ConvLayerDoc, x: Float64Array, inShape: [number, number, number],
): { z: Float64Array; outShape: [number, number, number] } {
  const [h, w, cin] = inShape;
  const [kh, kw, , cout] = layer.kernel_shape;
  const [sh, sw] = layer.stride;
  const { oh, ow, padTop, padLeft } = convOutputShape(layer, inShape);
  const z = new Float64Array(oh * ow * cout);
  for (let oy = 0; oy < oh; oy++) {
    for (let ox = 0; ox < ow; ox++) {
      for (let co = 0; co < cout; co++) {
        let acc = layer.bias[co];
        for (let ky = 0; ky < kh; ky++) {
          const iy = oy * sh + ky - padTop;
          if (iy < 0 || iy >= h) continue;
          for (let kx = 0; kx < kw; kx++) {
            const ix = ox * sw + kx - padLeft;
            if (ix < 0 || ix >= w) continue;
            const base = (iy * w + ix) * cin;
            for (let ci = 0; ci < cin; ci++) {
              acc += layer.weights[ky][kx][ci][co] * x[base + ci];
            }
          }
        }
        z[(oy * ow + ox) * cout + co] = acc;
      }
    }
  }
  return { z, outShape: [oh, ow, cout] };
}

/** Logits of the model for one flat input vector. */
export function forward(model: ModelDoc, input: ArrayLike<number>): Float64Array {
  let x: Float64Array = Float64Array.from(input as number[]);
  let shape = model.input_shape.slice();
  for (const layer of model.layers) {
    let z: Float64Array;
    if (layer.kind === "dense") {
      z = denseForward(layer, x);
      shape = [layer.weights.length];
    } else {
      const res = convForward(layer, x, shape as [number, number, number]);
      z = res.z;
      shape = res.outShape;
    }
    x = applyActivation(layer.activation, z);
  }
  return x;
}

export function argmax(v: Float64Array): number {
  let best = 0;
  for (let i = 1; i < v.length; i++) if (v[i] > v[best]) best = i;
  return best;
}
