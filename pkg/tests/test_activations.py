import numpy as np
import pytest

from dualbound.activations import ARCTAN, S_CURVES, SIGMOID, TANH, get_activation

ALL = [SIGMOID, TANH, ARCTAN]


def test_known_values():
    assert SIGMOID.value(0.0) == 0.5
    assert SIGMOID.deriv(0.0) == 0.25
    assert TANH.value(0.0) == 0.0
    assert TANH.deriv(0.0) == 1.0
    assert ARCTAN.deriv(0.0) == 1.0
    assert abs(float(ARCTAN.value(1.0)) - np.pi / 4) < 1e-15


@pytest.mark.parametrize("act", ALL, ids=lambda a: a.kind)
def test_derivative_matches_finite_differences(act):
    xs = np.linspace(-6, 6, 41)
    h = 1e-6
    fd = (act.value(xs + h) - act.value(xs - h)) / (2 * h)
    assert np.abs(fd - act.deriv(xs)).max() < 1e-8


@pytest.mark.parametrize("act", ALL, ids=lambda a: a.kind)
def test_s_curve_structure(act):
    xs = np.linspace(-8, 8, 500)
    d = act.deriv(xs)
    assert (d > 0).all()
    neg = xs < 0
    assert (np.diff(d[neg]) > 0).all()  # slope increases up to the inflection
    assert (np.diff(d[xs > 0]) < 0).all()
    assert np.abs(act.deriv(xs) - act.deriv(-xs)).max() < 1e-15  # even derivative


@pytest.mark.parametrize("act", ALL, ids=lambda a: a.kind)
def test_deriv_inverse(act):
    for s in [0.9, 0.5, 0.2, 0.05, 0.01]:
        if s >= act.max_slope:
            continue
        d = act.deriv_inv_pos(s)
        assert d >= 0
        assert abs(float(act.deriv(d)) - s) < 1e-9


def test_registry():
    assert set(S_CURVES) == {"sigmoid", "tanh", "arctan"}
    with pytest.raises(KeyError):
        get_activation("relu")
