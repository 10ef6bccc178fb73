"""Network representation, JSON loading, and concrete evaluation.

Layers are affine maps (dense or 2-D convolution) followed by an elementwise
activation; the final layer must be identity (logits). Convolutions keep
their structured kernel form and are lowered lazily to an equivalent dense
matrix, which forward evaluation, gradients and bound propagation all share
so the three paths agree exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .activations import ACTIVATION_NAMES, apply_activation, apply_activation_deriv


class ModelFormatError(ValueError):
    """The model file does not conform to the JSON model schema."""


class ShapeMismatchError(ModelFormatError):
    """Consecutive layer dimensions are inconsistent."""


class UnknownActivationError(ModelFormatError):
    """Activation name outside sigmoid/tanh/arctan/identity."""


def _conv_output_hw(h: int, w: int, kh: int, kw: int, stride, padding: str):
    sh, sw = stride
    if padding == "valid":
        oh = (h - kh) // sh + 1
        ow = (w - kw) // sw + 1
        if oh <= 0 or ow <= 0:
            raise ShapeMismatchError(f"kernel {kh}x{kw} larger than input {h}x{w}")
        return oh, ow, 0, 0
    # TF-style 'same': output ceil(in/stride), padding split low/high
    oh = math.ceil(h / sh)
    ow = math.ceil(w / sw)
    pad_h = max((oh - 1) * sh + kh - h, 0)
    pad_w = max((ow - 1) * sw + kw - w, 0)
    return oh, ow, pad_h // 2, pad_w // 2


@dataclass(frozen=True)
class DenseLayer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str
    kind: str = field(default="dense", init=False)

    @property
    def out_size(self) -> int:
        return self.weights.shape[0]

    def in_size_for(self, prev_size: int) -> int:
        return self.weights.shape[1]

    def affine(self, in_shape) -> tuple[np.ndarray, np.ndarray]:
        return self.weights, self.bias

    def out_shape(self, in_shape) -> tuple[int, ...]:
        return (self.out_size,)


@dataclass(frozen=True)
class ConvLayer:
    kernel: np.ndarray  # (kh, kw, cin, cout)
    bias: np.ndarray  # (cout,)
    activation: str
    stride: tuple[int, int]
    padding: str  # 'valid' | 'same'
    kind: str = field(default="conv2d", init=False)

    def out_shape(self, in_shape) -> tuple[int, ...]:
        h, w, c = in_shape
        kh, kw, cin, cout = self.kernel.shape
        oh, ow, _, _ = _conv_output_hw(h, w, kh, kw, self.stride, self.padding)
        return (oh, ow, cout)

    def affine(self, in_shape) -> tuple[np.ndarray, np.ndarray]:
        """Lower the convolution to a dense (out, in) matrix and bias vector.

        Feature maps are flattened row-major as (h, w, c).
        """
        h, w, c = in_shape
        kh, kw, cin, cout = self.kernel.shape
        sh, sw = self.stride
        oh, ow, pt, pl = _conv_output_hw(h, w, kh, kw, self.stride, self.padding)
        W = np.zeros((oh * ow * cout, h * w * c), dtype=np.float64)
        b = np.zeros(oh * ow * cout, dtype=np.float64)
        for oy in range(oh):
            for ox in range(ow):
                base = (oy * ow + ox) * cout
                b[base:base + cout] = self.bias
                for ky in range(kh):
                    iy = oy * sh + ky - pt
                    if iy < 0 or iy >= h:
                        continue
                    for kx in range(kw):
                        ix = ox * sw + kx - pl
                        if ix < 0 or ix >= w:
                            continue
                        col = (iy * w + ix) * c
                        # kernel[ky, kx]: (cin, cout)
                        W[base:base + cout, col:col + c] = self.kernel[ky, kx].T
        return W, b


Layer = DenseLayer | ConvLayer


@dataclass(frozen=True)
class LayerValues:
    """Pre- and post-activation vectors for one layer of a forward pass."""

    pre_activation: np.ndarray
    post_activation: np.ndarray


class Network:
    """An immutable feed-forward network over flat float64 vectors.

    ``input_range`` optionally declares the valid box of each input
    coordinate (used when drawing perturbation samples).
    """

    def __init__(self, input_shape: Sequence[int], layers: Sequence[Layer],
                 input_range: tuple[float, float] | None = None):
        self.input_shape = tuple(int(d) for d in input_shape)
        self.layers = list(layers)
        self.input_range = input_range
        if not self.layers:
            raise ModelFormatError("network has no layers")
        if self.layers[-1].activation != "identity":
            raise ModelFormatError("final layer activation must be identity")
        self.input_size = int(np.prod(self.input_shape))

        # resolve the shape chain and cache lowered affine forms
        self._affines: list[tuple[np.ndarray, np.ndarray]] = []
        self._shapes = [self.input_shape]
        shape = self.input_shape
        for idx, layer in enumerate(self.layers):
            if isinstance(layer, ConvLayer):
                if len(shape) != 3:
                    raise ShapeMismatchError(
                        f"layer {idx}: conv2d needs an (h, w, c) input, got {shape}")
                if layer.kernel.shape[2] != shape[2]:
                    raise ShapeMismatchError(
                        f"layer {idx}: kernel channels {layer.kernel.shape[2]} "
                        f"!= input channels {shape[2]}")
            else:
                if layer.weights.shape[1] != int(np.prod(shape)):
                    raise ShapeMismatchError(
                        f"layer {idx}: weight cols {layer.weights.shape[1]} "
                        f"!= previous width {int(np.prod(shape))}")
            W, b = layer.affine(shape)
            if not (np.isfinite(W).all() and np.isfinite(b).all()):
                raise ModelFormatError(f"layer {idx}: non-finite weights or bias")
            self._affines.append((W, b))
            shape = layer.out_shape(shape)
            self._shapes.append(tuple(shape))
        self.n_layers = len(self.layers)
        self.output_size = int(np.prod(shape))

    def width(self, i: int) -> int:
        return self._affines[i][0].shape[0]

    @property
    def hidden_indices(self) -> range:
        return range(self.n_layers - 1)

    def affine(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """The lowered (W, b) of layer i, mapping flat post-activations."""
        return self._affines[i]

    def activation_of(self, i: int) -> str:
        return self.layers[i].activation

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.shape[0] != self.input_size:
            raise ShapeMismatchError(
                f"input has {x.shape[0]} values, expected {self.input_size}")
        return x

    def forward(self, x) -> tuple[np.ndarray, list[LayerValues]]:
        """Evaluate the network, returning logits and the full layer trace."""
        v = self._check_input(x)
        trace = []
        for i in range(self.n_layers):
            W, b = self._affines[i]
            z = W @ v + b
            v = apply_activation(self.layers[i].activation, z)
            trace.append(LayerValues(z, v))
        return trace[-1].pre_activation, trace

    def forward_batch(self, xs: np.ndarray) -> list[np.ndarray]:
        """Pre-activations per layer for a batch of inputs, shape (n, k_i)."""
        v = np.asarray(xs, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != self.input_size:
            raise ShapeMismatchError(f"batch shape {v.shape} does not match input "
                                     f"size {self.input_size}")
        pres = []
        for i in range(self.n_layers):
            W, b = self._affines[i]
            z = v @ W.T + b
            pres.append(z)
            v = apply_activation(self.layers[i].activation, z)
        return pres

    def predicted_label(self, x) -> int:
        """Argmax of the logits; ties break to the lowest index."""
        logits, _ = self.forward(x)
        return int(np.argmax(logits))

    def _check_neuron(self, layer: int, neuron: int) -> None:
        if not (0 <= layer < self.n_layers):
            raise IndexError(f"layer index {layer} out of range")
        if not (0 <= neuron < self.width(layer)):
            raise IndexError(f"neuron index {neuron} out of range for layer {layer}")

    def neuron_fn(self, layer: int, neuron: int) -> Callable[[np.ndarray], float]:
        """Callable mapping an input vector to pre-activation (layer, neuron)."""
        self._check_neuron(layer, neuron)

        def fn(x) -> float:
            v = self._check_input(x)
            for i in range(layer):
                W, b = self._affines[i]
                v = apply_activation(self.layers[i].activation, W @ v + b)
            W, b = self._affines[layer]
            # full matvec, then index: bit-identical to the forward trace
            return float((W @ v + b)[neuron])

        return fn

    def neuron_gradient(self, layer: int, neuron: int, x) -> np.ndarray:
        """Exact reverse-mode input gradient of pre-activation (layer, neuron)."""
        self._check_neuron(layer, neuron)
        v = self._check_input(x)
        pres = []
        for i in range(layer):
            W, b = self._affines[i]
            z = W @ v + b
            pres.append(z)
            v = apply_activation(self.layers[i].activation, z)
        g = self._affines[layer][0][neuron].copy()
        for i in range(layer - 1, -1, -1):
            g = (g * apply_activation_deriv(self.layers[i].activation, pres[i])) \
                @ self._affines[i][0]
        return g

    def layer_jacobians(self, x) -> list[np.ndarray]:
        """d pre_activation / d input for every layer, forward-accumulated."""
        v = self._check_input(x)
        jacs = []
        J = None
        for i in range(self.n_layers):
            W, b = self._affines[i]
            z = W @ v + b
            J = W.copy() if J is None else W @ J
            jacs.append(J)
            v = apply_activation(self.layers[i].activation, z)
            d = apply_activation_deriv(self.layers[i].activation, z)
            J = d[:, None] * J
        return jacs


def _as_matrix(raw, where: str) -> np.ndarray:
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 2:
        raise ModelFormatError(f"{where}: expected a 2-D weight array, got ndim={arr.ndim}")
    return arr


def network_from_dict(doc: dict) -> Network:
    """Build a Network from the documented JSON model schema."""
    if not isinstance(doc, dict) or "input_shape" not in doc or "layers" not in doc:
        raise ModelFormatError("model must be an object with input_shape and layers")
    input_shape = doc["input_shape"]
    layers: list[Layer] = []
    for idx, spec in enumerate(doc["layers"]):
        where = f"layer {idx}"
        act = spec.get("activation")
        if act not in ACTIVATION_NAMES:
            raise UnknownActivationError(f"{where}: unknown activation {act!r}")
        bias = np.asarray(spec.get("bias"), dtype=np.float64)
        if bias.ndim != 1:
            raise ModelFormatError(f"{where}: bias must be a flat array")
        kind = spec.get("kind")
        if kind == "dense":
            layers.append(DenseLayer(_as_matrix(spec.get("weights"), where), bias, act))
        elif kind == "conv2d":
            kernel = np.asarray(spec.get("weights"), dtype=np.float64)
            kshape = tuple(spec.get("kernel_shape", ()))
            if kernel.ndim != 4 or tuple(kernel.shape) != kshape:
                raise ModelFormatError(
                    f"{where}: conv2d weights must match kernel_shape {kshape}")
            stride = spec.get("stride", [1, 1])
            padding = spec.get("padding", "valid")
            if padding not in ("valid", "same"):
                raise ModelFormatError(f"{where}: padding must be valid or same")
            layers.append(ConvLayer(kernel, bias, act,
                                    (int(stride[0]), int(stride[1])), padding))
        else:
            raise ModelFormatError(f"{where}: unknown layer kind {kind!r}")
    rng = doc.get("input_range")
    input_range = (float(rng[0]), float(rng[1])) if rng is not None else None
    return Network(input_shape, layers, input_range=input_range)


def load_network(path) -> Network:
    """Load and validate a network from a JSON model file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid JSON: {exc}") from exc
    return network_from_dict(doc)


def network_to_dict(net: Network) -> dict:
    """Serialize a Network back to the JSON model schema."""
    layers = []
    for layer in net.layers:
        if isinstance(layer, DenseLayer):
            layers.append({
                "kind": "dense",
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
                "activation": layer.activation,
            })
        else:
            layers.append({
                "kind": "conv2d",
                "weights": layer.kernel.tolist(),
                "bias": layer.bias.tolist(),
                "activation": layer.activation,
                "stride": list(layer.stride),
                "padding": layer.padding,
                "kernel_shape": list(layer.kernel.shape),
            })
    doc = {"input_shape": list(net.input_shape), "layers": layers}
    if net.input_range is not None:
        doc["input_range"] = list(net.input_range)
    return doc


def save_network(net: Network, path) -> None:
    with open(path, "w") as fh:
        json.dump(network_to_dict(net), fh)
