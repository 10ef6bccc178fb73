"""S-curve activation functions with exact derivatives and slope inversion.

All three activations share the structure the bounding code relies on:
strictly increasing, a single inflection at 0, convex on x < 0 and concave
on x > 0, and an even first derivative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


def _sigmoid(x):
    # piecewise form avoids overflow in exp for large |x|
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _sigmoid_deriv(x):
    s = _sigmoid(x)
    return s * (1.0 - s)


def _tanh_deriv(x):
    t = np.tanh(np.asarray(x, dtype=np.float64))
    return 1.0 - t * t


def _arctan_deriv(x):
    x = np.asarray(x, dtype=np.float64)
    return 1.0 / (1.0 + x * x)


def _sigmoid_deriv_inv_pos(s: float) -> float:
    # solve p(1-p) = s for p >= 0.5, x = logit(p)
    disc = 1.0 - 4.0 * s
    if disc < 0.0:
        return 0.0
    p = 0.5 * (1.0 + np.sqrt(disc))
    if p >= 1.0:
        return np.inf
    return float(np.log(p / (1.0 - p)))


def _tanh_deriv_inv_pos(s: float) -> float:
    # solve 1 - t^2 = s for t >= 0, x = atanh(t)
    if s >= 1.0:
        return 0.0
    if s <= 0.0:
        return np.inf
    t = np.sqrt(1.0 - s)
    if t >= 1.0:  # s below double resolution, matching point out of reach
        return np.inf
    return float(np.arctanh(t))


def _arctan_deriv_inv_pos(s: float) -> float:
    if s >= 1.0:
        return 0.0
    if s <= 0.0:
        return np.inf
    return float(np.sqrt(1.0 / s - 1.0))


@dataclass(frozen=True)
class Activation:
    """An S-curve activation: value, derivative, and inverse-slope helpers.

    ``deriv_inv_pos(s)`` returns the unique x >= 0 with value(x)' == s
    (the derivative is even, so -x is the matching point on the convex side).
    """

    kind: str
    value: Callable = field(repr=False)
    deriv: Callable = field(repr=False)
    deriv_inv_pos: Callable[[float], float] = field(repr=False)

    @property
    def max_slope(self) -> float:
        return float(self.deriv(0.0))

    def tangent(self, t: float) -> tuple[float, float]:
        """Slope and intercept of the tangent line at t."""
        s = float(self.deriv(t))
        return s, float(self.value(t)) - s * t


SIGMOID = Activation("sigmoid", _sigmoid, _sigmoid_deriv, _sigmoid_deriv_inv_pos)
TANH = Activation("tanh", lambda x: np.tanh(np.asarray(x, dtype=np.float64)),
                  _tanh_deriv, _tanh_deriv_inv_pos)
ARCTAN = Activation("arctan", lambda x: np.arctan(np.asarray(x, dtype=np.float64)),
                    _arctan_deriv, _arctan_deriv_inv_pos)

S_CURVES = {"sigmoid": SIGMOID, "tanh": TANH, "arctan": ARCTAN}

# identity is a valid layer activation but is never relaxed
ACTIVATION_NAMES = ("sigmoid", "tanh", "arctan", "identity")


def get_activation(kind: str) -> Activation:
    try:
        return S_CURVES[kind]
    except KeyError:
        raise KeyError(f"not an S-curve activation: {kind!r}") from None


def apply_activation(kind: str, x: np.ndarray) -> np.ndarray:
    if kind == "identity":
        return np.asarray(x, dtype=np.float64)
    return S_CURVES[kind].value(x)


def apply_activation_deriv(kind: str, x: np.ndarray) -> np.ndarray:
    if kind == "identity":
        return np.ones_like(np.asarray(x, dtype=np.float64))
    return S_CURVES[kind].deriv(x)
