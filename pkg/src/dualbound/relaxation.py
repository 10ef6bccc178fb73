"""Linear over-approximation of S-curve activations on an interval.

The dual strategy places bound lines using the underestimated domain and
falls back to constructions on the overestimated domain whenever a candidate
line is unsound there. Four single-domain baseline strategies are provided
for comparison. Soundness of a candidate line is decided analytically: with
a single inflection at 0 and an even derivative, the difference between a
line and the curve can only attain its extrema at the interval endpoints and
at the mirrored slope-matching point, so three evaluations suffice.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass

import numpy as np

from .activations import Activation

DEGENERATE_WIDTH = 1e-12
TIE_TOL = 1e-12
# slack when accepting a candidate line; well under the 1e-9 soundness budget
ACCEPT_TOL = 1e-11
TANGENT_RESIDUAL_TOL = 1e-10
TANGENT_MAX_ITER = 200

# optional grid safety net behind every analytic soundness decision
_DEBUG_GRID = bool(os.environ.get("DUALBOUND_DEBUG_GRID"))
_DEBUG_GRID_POINTS = 1000


class TangentSearchError(RuntimeError):
    """Bisection for a tangent point failed (no sign change or no convergence)."""


class CaseInvariantError(RuntimeError):
    """Endpoint slopes both exceed the chord slope, impossible for S-curves."""


class Case(enum.Enum):
    I = "I"
    II = "II"
    III = "III"


class Strategy(enum.Enum):
    DUAL = "dual"
    ENDPOINT_TANGENT = "endpoint"
    MINIMAL_AREA = "minarea"
    PARALLEL_LINE = "parallel"
    MIDPOINT_TANGENT = "midpoint"


@dataclass(frozen=True)
class DomainPair:
    """Overestimated and underestimated input intervals of one activation.

    The under interval is clamped into the over interval on construction:
    mathematically under lies inside the actual domain which lies inside
    over, but concrete float evaluation can land a sample marginally outside.
    """

    l_over: float
    u_over: float
    l_under: float
    u_under: float

    def __post_init__(self):
        lo, uo = float(self.l_over), float(self.u_over)
        if not (np.isfinite(lo) and np.isfinite(uo)) or lo > uo:
            raise ValueError(f"bad over domain [{lo}, {uo}]")
        lu = min(max(float(self.l_under), lo), uo)
        uu = min(max(float(self.u_under), lo), uo)
        if lu > uu:
            raise ValueError(f"bad under domain [{self.l_under}, {self.u_under}]")
        object.__setattr__(self, "l_over", lo)
        object.__setattr__(self, "u_over", uo)
        object.__setattr__(self, "l_under", lu)
        object.__setattr__(self, "u_under", uu)

    @classmethod
    def collapsed(cls, l_over: float, u_over: float) -> "DomainPair":
        """Pair with the under interval collapsed onto the over interval."""
        return cls(l_over, u_over, l_over, u_over)


@dataclass(frozen=True)
class NeuronRelaxation:
    """Bound lines h_L(x) = alpha_L x + beta_L and h_U(x) = alpha_U x + beta_U."""

    alpha_L: float
    beta_L: float
    alpha_U: float
    beta_U: float
    fallback: bool = False

    def lower(self, x):
        return self.alpha_L * np.asarray(x) + self.beta_L

    def upper(self, x):
        return self.alpha_U * np.asarray(x) + self.beta_U

    def gap_area(self, l: float, u: float) -> float:
        """Integral of h_U - h_L over [l, u] in closed form."""
        da, db = self.alpha_U - self.alpha_L, self.beta_U - self.beta_L
        return 0.5 * da * (u * u - l * l) + db * (u - l)


def chord_slope(act: Activation, l: float, u: float) -> float:
    """Slope of the chord over [l, u]; the tangent slope when degenerate."""
    if not (np.isfinite(l) and np.isfinite(u)):
        raise ValueError("non-finite interval")
    if u - l < DEGENERATE_WIDTH:
        return float(act.deriv(l))
    return float((act.value(u) - act.value(l)) / (u - l))


def classify_case(act: Activation, l_over: float, u_over: float) -> Case:
    """Position of the chord slope against the endpoint slopes.

    Slope ties resolve to Case III, whose formulas stay sound at the
    boundary. The tie tolerance covers the rounding error of the chord
    quotient itself, which dominates in saturated tails where the true
    slopes are tiny. Both endpoint slopes above the chord slope by more
    than that is impossible for a single-inflection S-curve.
    """
    k = chord_slope(act, l_over, u_over)
    dl = float(act.deriv(l_over))
    du = float(act.deriv(u_over))
    # |sigma(u) - sigma(l)| carries a couple of ulps of the values themselves
    width = max(u_over - l_over, DEGENERATE_WIDTH)
    tol = max(TIE_TOL, 8.0 * np.finfo(float).eps / width)
    if abs(dl - k) <= tol or abs(du - k) <= tol:
        return Case.III
    if dl < k < du:
        return Case.I
    if dl > k > du:
        return Case.II
    if dl < k and du < k:
        return Case.III
    raise CaseInvariantError(
        f"endpoint slopes {dl}, {du} both exceed chord slope {k} on "
        f"[{l_over}, {u_over}]")


def _tangent_residual(act: Activation, d: float, anchor_x: float, anchor_y: float) -> float:
    return float(act.deriv(d)) * (anchor_x - d) + float(act.value(d)) - anchor_y


def tangent_point_through(act: Activation, anchor_x: float,
                          search_lo: float, search_hi: float) -> float:
    """Bisect for d in [search_lo, search_hi] whose tangent passes through
    (anchor_x, value(anchor_x)). Requires a sign change on the bracket."""
    ay = float(act.value(anchor_x))
    lo, hi = float(search_lo), float(search_hi)
    if lo > hi:
        lo, hi = hi, lo
    glo = _tangent_residual(act, lo, anchor_x, ay)
    ghi = _tangent_residual(act, hi, anchor_x, ay)
    if abs(glo) <= TANGENT_RESIDUAL_TOL:
        return lo
    if abs(ghi) <= TANGENT_RESIDUAL_TOL:
        return hi
    if glo * ghi > 0:
        raise TangentSearchError(
            f"no sign change on [{lo}, {hi}] for anchor {anchor_x}")
    for _ in range(TANGENT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        gm = _tangent_residual(act, mid, anchor_x, ay)
        if abs(gm) <= TANGENT_RESIDUAL_TOL:
            return mid
        if glo * gm <= 0:
            hi = mid
        else:
            lo, glo = mid, gm
    raise TangentSearchError(
        f"no convergence after {TANGENT_MAX_ITER} iterations for anchor {anchor_x}")


def _line_max_violation_lower(act: Activation, slope: float, intercept: float,
                              l: float, u: float) -> float:
    """Max of line - curve over [l, u] for a candidate lower bound.

    Candidates: the endpoints and the convex-side point where the curve
    slope matches the line slope (a local max of the difference there).
    """
    xs = [l, u]
    if slope > 0.0:
        d = act.deriv_inv_pos(slope)
        if np.isfinite(d) and l <= -d <= u:
            xs.append(-d)
    arr = np.array(xs)
    return float(np.max(slope * arr + intercept - act.value(arr)))


def _line_max_violation_upper(act: Activation, slope: float, intercept: float,
                              l: float, u: float) -> float:
    """Max of curve - line over [l, u] for a candidate upper bound."""
    xs = [l, u]
    if slope > 0.0:
        d = act.deriv_inv_pos(slope)
        if np.isfinite(d) and l <= d <= u:
            xs.append(d)
    arr = np.array(xs)
    return float(np.max(act.value(arr) - (slope * arr + intercept)))


def _grid_assert(act, slope_l, int_l, slope_u, int_u, l, u):
    xs = np.linspace(l, u, _DEBUG_GRID_POINTS)
    y = act.value(xs)
    lo = slope_l * xs + int_l
    hi = slope_u * xs + int_u
    worst = max(float(np.max(lo - y)), float(np.max(y - hi)))
    if worst > 1e-9:
        raise AssertionError(f"unsound relaxation on [{l}, {u}]: violation {worst}")


def is_sound_lower(act: Activation, slope: float, intercept: float,
                   l: float, u: float) -> bool:
    return _line_max_violation_lower(act, slope, intercept, l, u) <= ACCEPT_TOL


def is_sound_upper(act: Activation, slope: float, intercept: float,
                   l: float, u: float) -> bool:
    return _line_max_violation_upper(act, slope, intercept, l, u) <= ACCEPT_TOL


def _chord_line(act: Activation, l: float, u: float) -> tuple[float, float]:
    k = chord_slope(act, l, u)
    return k, float(act.value(u)) - k * u


def _parallel_lines(act: Activation, l: float, u: float):
    """Both bounds share the chord slope k; each is shifted just enough to be
    sound, which lands on the chord itself or on the parallel tangent."""
    k = chord_slope(act, l, u)
    xs = [l, u]
    if k > 0.0:
        d = act.deriv_inv_pos(k)
        if np.isfinite(d):
            if l <= d <= u:
                xs.append(d)
            if l <= -d <= u:
                xs.append(-d)
    arr = np.array(xs)
    offsets = act.value(arr) - k * arr
    return (k, float(np.min(offsets))), (k, float(np.max(offsets)))


def _tangent_through_lower(act: Activation, dom_l: float, anchor: float):
    """Tangent line touching the curve left of 0 and passing through
    (anchor, value(anchor)); a global lower bound on (-inf, anchor]."""
    lo = min(dom_l, -1.0, anchor - 1.0)
    ay = float(act.value(anchor))
    for _ in range(80):
        if _tangent_residual(act, lo, anchor, ay) < 0.0:
            break
        lo *= 2.0
    d = tangent_point_through(act, anchor, lo, min(0.0, anchor))
    return act.tangent(d)


def _tangent_through_upper(act: Activation, dom_u: float, anchor: float):
    """Tangent line touching the curve right of 0 and passing through
    (anchor, value(anchor)); a global upper bound on [anchor, inf)."""
    hi = max(dom_u, 1.0, anchor + 1.0)
    ay = float(act.value(anchor))
    for _ in range(80):
        if _tangent_residual(act, hi, anchor, ay) > 0.0:
            break
        hi *= 2.0
    d = tangent_point_through(act, anchor, max(0.0, anchor), hi)
    return act.tangent(d)


def _degenerate(act: Activation, x: float) -> NeuronRelaxation:
    s, b = act.tangent(x)
    return NeuronRelaxation(s, b, s, b)


def _fallback_parallel(act: Activation, l: float, u: float) -> NeuronRelaxation:
    (al, bl), (au, bu) = _parallel_lines(act, l, u)
    return NeuronRelaxation(al, bl, au, bu, fallback=True)


def _pick_lower(act, dom, candidate: float):
    """Tangent at the candidate point if sound on the over domain, else the
    tangent through the upper-right over endpoint."""
    s, b = act.tangent(candidate)
    if is_sound_lower(act, s, b, dom.l_over, dom.u_over):
        return s, b
    return _tangent_through_lower(act, dom.l_over, dom.u_over)


def _pick_upper(act, dom, candidate: float):
    s, b = act.tangent(candidate)
    if is_sound_upper(act, s, b, dom.l_over, dom.u_over):
        return s, b
    return _tangent_through_upper(act, dom.u_over, dom.l_over)


def relax_dual(act: Activation, dom: DomainPair) -> NeuronRelaxation:
    """Under-approximation guided relaxation on the over domain.

    Case I keeps the chord as the upper bound and anchors the lower tangent
    at the under minimum; Case II mirrors it; Case III anchors both tangents
    at the under endpoints. Every anchored tangent is used only if sound on
    the over domain, otherwise the tangent through the matching over endpoint
    replaces it. A tangent-solver failure degrades to the parallel-line
    relaxation with the fallback flag set, never to an unsound bound.
    """
    l, u = dom.l_over, dom.u_over
    if u - l < DEGENERATE_WIDTH:
        return _degenerate(act, l)
    case = classify_case(act, l, u)
    try:
        if case is Case.I:
            au, bu = _chord_line(act, l, u)
            al, bl = _pick_lower(act, dom, dom.l_under)
        elif case is Case.II:
            al, bl = _chord_line(act, l, u)
            au, bu = _pick_upper(act, dom, dom.u_under)
        else:
            au, bu = _pick_upper(act, dom, dom.u_under)
            al, bl = _pick_lower(act, dom, dom.l_under)
    except TangentSearchError:
        return _fallback_parallel(act, l, u)
    if _DEBUG_GRID:
        _grid_assert(act, al, bl, au, bu, l, u)
    return NeuronRelaxation(al, bl, au, bu)


def _relax_endpoint(act: Activation, l: float, u: float, case: Case) -> NeuronRelaxation:
    if case is Case.I:
        au, bu = _chord_line(act, l, u)
        al, bl = _pick_lower(act, DomainPair.collapsed(l, u), l)
    elif case is Case.II:
        al, bl = _chord_line(act, l, u)
        au, bu = _pick_upper(act, DomainPair.collapsed(l, u), u)
    else:
        au, bu = _pick_upper(act, DomainPair.collapsed(l, u), u)
        al, bl = _pick_lower(act, DomainPair.collapsed(l, u), l)
    return NeuronRelaxation(al, bl, au, bu)


def _relax_midpoint(act: Activation, l: float, u: float, case: Case) -> NeuronRelaxation:
    m = 0.5 * (l + u)
    sm, bm = act.tangent(m)
    mid_lower = is_sound_lower(act, sm, bm, l, u)
    mid_upper = is_sound_upper(act, sm, bm, l, u)
    if case is Case.I:
        au, bu = _chord_line(act, l, u)
        al, bl = (sm, bm) if mid_lower else _tangent_through_lower(act, l, u)
    elif case is Case.II:
        al, bl = _chord_line(act, l, u)
        au, bu = (sm, bm) if mid_upper else _tangent_through_upper(act, u, l)
    else:
        al, bl = (sm, bm) if mid_lower else _tangent_through_lower(act, l, u)
        au, bu = (sm, bm) if mid_upper else _tangent_through_upper(act, u, l)
    return NeuronRelaxation(al, bl, au, bu)


def _relax_minimal_area(act: Activation, l: float, u: float) -> NeuronRelaxation:
    """Best-of-family selection: endpoint tangents, parallel tangent, and
    chord, filtered for soundness, minimizing the bound gap area. The area
    is separable, so each side optimizes independently."""
    (pl_s, pl_b), (pu_s, pu_b) = _parallel_lines(act, l, u)
    chord = _chord_line(act, l, u)
    family = [chord, act.tangent(l), act.tangent(u)]

    def integral(s, b):
        return 0.5 * s * (u * u - l * l) + b * (u - l)

    lowers = [(pl_s, pl_b)] + [c for c in family if is_sound_lower(act, *c, l, u)]
    uppers = [(pu_s, pu_b)] + [c for c in family if is_sound_upper(act, *c, l, u)]
    al, bl = max(lowers, key=lambda c: integral(*c))
    au, bu = min(uppers, key=lambda c: integral(*c))
    return NeuronRelaxation(al, bl, au, bu)


def relax_baseline(strategy: Strategy, act: Activation,
                   l_over: float, u_over: float) -> NeuronRelaxation:
    """A sound single-domain relaxation on [l_over, u_over] per strategy."""
    if strategy is Strategy.DUAL:
        raise ValueError("dual strategy needs a DomainPair, use relax_dual")
    l, u = float(l_over), float(u_over)
    if u - l < DEGENERATE_WIDTH:
        return _degenerate(act, l)
    try:
        if strategy is Strategy.PARALLEL_LINE:
            (al, bl), (au, bu) = _parallel_lines(act, l, u)
            out = NeuronRelaxation(al, bl, au, bu)
        elif strategy is Strategy.MINIMAL_AREA:
            out = _relax_minimal_area(act, l, u)
        else:
            case = classify_case(act, l, u)
            if strategy is Strategy.ENDPOINT_TANGENT:
                out = _relax_endpoint(act, l, u, case)
            elif strategy is Strategy.MIDPOINT_TANGENT:
                out = _relax_midpoint(act, l, u, case)
            else:
                raise ValueError(f"unknown strategy {strategy}")
    except TangentSearchError:
        out = _fallback_parallel(act, l, u)
    if _DEBUG_GRID:
        _grid_assert(act, out.alpha_L, out.beta_L, out.alpha_U, out.beta_U, l, u)
    return out


def check_soundness_grid(relax: NeuronRelaxation, act: Activation,
                         l_over: float, u_over: float, n_points: int) -> float:
    """Worst bound violation over a dense grid; sound relaxations stay <= 1e-9."""
    if n_points < 2:
        raise ValueError("need at least 2 grid points")
    xs = np.linspace(l_over, u_over, n_points)
    y = act.value(xs)
    return float(np.max(np.maximum(y - relax.upper(xs), relax.lower(xs) - y)))
