"""Seeded random reference networks matching the exporter's grammar.

Architecture strings follow the benchmark naming: ``FNN_3x50`` is a
fully-connected net with 3 hidden layers of 50 neurons, ``CNN_2-4`` stacks
2 convolution layers of 4 filters (3x3, stride 1, valid padding) before the
dense logits layer. Weights draw from a seeded normal scaled by the inverse
square root of the fan-in.
"""
from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .network import ConvLayer, DenseLayer, Network

_FNN = re.compile(r"^FNN_(\d+)x(\d+)$")
_CNN = re.compile(r"^CNN_(\d+)-(\d+)$")


class ArchitectureError(ValueError):
    """Architecture string outside the FNN_{l}x{k} / CNN_{l}-{k} grammar."""


def parse_arch(arch: str) -> tuple[str, int, int]:
    m = _FNN.match(arch)
    if m:
        return "fnn", int(m.group(1)), int(m.group(2))
    m = _CNN.match(arch)
    if m:
        return "cnn", int(m.group(1)), int(m.group(2))
    raise ArchitectureError(f"bad architecture string {arch!r}, "
                            "expected FNN_<l>x<k> or CNN_<l>-<k>")


def _dense(rng, n_in: int, n_out: int, activation: str,
           gain: float, weight_mean: float, bias_scale: float) -> DenseLayer:
    scale = gain / np.sqrt(n_in)
    W = rng.normal(weight_mean, 1.0, size=(n_out, n_in)) * scale
    b = rng.normal(0.0, 1.0, size=n_out) * (bias_scale * scale)
    return DenseLayer(W, b, activation)


def _conv(rng, cin: int, cout: int, activation: str,
          gain: float, weight_mean: float, bias_scale: float) -> ConvLayer:
    scale = gain / np.sqrt(3 * 3 * cin)
    K = rng.normal(weight_mean, 1.0, size=(3, 3, cin, cout)) * scale
    b = rng.normal(0.0, 1.0, size=cout) * (bias_scale * scale)
    return ConvLayer(K, b, activation, (1, 1), "valid")


def synthesize(arch: str, seed: int, activation: str,
               input_shape=None, n_classes: int = 10, gain: float = 1.0,
               weight_mean: float = 0.0, bias_scale: float = 1.0,
               input_range: tuple[float, float] | None = None) -> Network:
    """Deterministic random network for the given architecture string.

    Weights draw from a seeded normal scaled by gain / sqrt(fan_in). The
    defaults match the exporter. gain keeps deep random S-curve nets
    input-sensitive; a positive weight_mean biases nets toward monotone
    feature alignment, the structure trained classifiers exhibit and the
    regime where under-approximation guidance pays off.
    """
    kind, depth, width = parse_arch(arch)
    if depth < 1 or width < 1:
        raise ArchitectureError(f"architecture {arch!r} must have positive sizes")
    rng = np.random.default_rng(seed)
    layers = []
    if kind == "fnn":
        if input_shape is None:
            input_shape = (784,)
        size = int(np.prod(input_shape))
        for _ in range(depth):
            layers.append(_dense(rng, size, width, activation, gain, weight_mean, bias_scale))
            size = width
        layers.append(_dense(rng, size, n_classes, "identity", gain, weight_mean, bias_scale))
    else:
        if input_shape is None:
            input_shape = (14, 14, 1)
        if len(input_shape) != 3:
            raise ArchitectureError("CNN architectures need an (h, w, c) input shape")
        shape = tuple(input_shape)
        for _ in range(depth):
            layer = _conv(rng, shape[2], width, activation, gain, weight_mean, bias_scale)
            layers.append(layer)
            shape = layer.out_shape(shape)
        layers.append(_dense(rng, int(np.prod(shape)), n_classes, "identity",
                             gain, weight_mean, bias_scale))
    return Network(input_shape, layers, input_range=input_range)


def golden_vectors(net: Network, seed: int, count: int = 10) -> dict:
    """Random probe inputs and the exact logits the network assigns them."""
    rng = np.random.default_rng(seed ^ 0x5EED)
    lo, hi = net.input_range if net.input_range is not None else (-1.0, 1.0)
    inputs = lo + rng.random((count, net.input_size)) * (hi - lo)
    logits = [net.forward(x)[0].tolist() for x in inputs]
    return {"inputs": inputs.tolist(), "logits": logits}


def write_bundle(net: Network, out_dir, name: str, seed: int,
                 metadata: dict | None = None) -> tuple[Path, Path]:
    """Write the model JSON and its golden-vector sidecar."""
    from .network import network_to_dict

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model_path = out / f"{name}.json"
    golden_path = out / f"{name}.golden.json"
    doc = network_to_dict(net)
    doc["metadata"] = {"seed": seed, "architecture": name, **(metadata or {})}
    with open(model_path, "w") as fh:
        json.dump(doc, fh)
    with open(golden_path, "w") as fh:
        json.dump(golden_vectors(net, seed), fh)
    return model_path, golden_path
