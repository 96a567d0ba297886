"""Expected-improvement scoring of candidate runs.

Running one more test at probe point x changes the posterior means at the
target stress linearly in the (standardized) outcome, so the post-update
best mean is max_k (a_k + b_k G) with G standard normal. The expected gain
over max_k a_k has a closed form once lines that never attain the upper
envelope are removed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .model import CandidateSet, DesignPoint, PosteriorState, feature_map
from .numerics import norm_cdf, norm_pdf

# predictive variance below this is treated as a collapsed belief
DEGENERATE_VAR = 1e-12


@dataclass(frozen=True)
class KgLine:
    intercept: float
    slope: float
    material_index: int


@dataclass(frozen=True)
class EiScore:
    value: float
    z_index: int
    v_index: int


def predictive_params(state: PosteriorState, x: np.ndarray) -> tuple[float, float]:
    """Predictive mean and variance of the next log-lifetime at x."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != state.dim:
        raise DimensionError(
            f"feature vector shape {x.shape} does not match belief dimension {state.dim}"
        )
    mean = float(x @ state.theta)
    var = state.noise_var + float(x @ state.sigma_mat @ x)
    return mean, var


def kg_lines(
    state: PosteriorState, probe: DesignPoint, cands: CandidateSet
) -> list[KgLine]:
    """One line per material: intercept a_k = x(z_k, v*)'theta and slope
    b_k = x(z_k, v*)' S x(probe) / sqrt(noise_var + x(probe)' S x(probe))."""
    x_probe = feature_map(probe)
    if x_probe.size != state.dim:
        raise DimensionError(
            f"probe feature length {x_probe.size} does not match dimension {state.dim}"
        )
    _, pred_var = predictive_params(state, x_probe)
    sx = state.sigma_mat @ x_probe
    degenerate = pred_var < DEGENERATE_VAR
    root = 0.0 if degenerate else float(np.sqrt(pred_var))
    lines = []
    for k in range(cands.n_materials):
        x_target = feature_map(cands.target_design(k))
        intercept = float(x_target @ state.theta)
        slope = 0.0 if degenerate else float(x_target @ sx) / root
        lines.append(KgLine(intercept=intercept, slope=slope, material_index=k))
    return lines


def _gain_at_breakpoint(c: float) -> float:
    # g(u) = u*Phi(u) + phi(u), evaluated at u = -|c|; vanishes past ~|c|=40
    u = -abs(c)
    if u < -40.0:
        return 0.0
    return u * norm_cdf(u) + norm_pdf(u)


def expected_max_gain(lines: list[KgLine]) -> float:
    """E[max_k (a_k + b_k G)] - max_k a_k for standard normal G.

    Sorts by slope, drops duplicates and lines never attaining the upper
    envelope, then sums (b_{i+1} - b_i) * g(-|c_i|) over the surviving
    breakpoints c_i.
    """
    if not lines:
        raise ValueError("lines must be nonempty")
    ordered = sorted(lines, key=lambda l: (l.slope, l.intercept))
    # equal slopes: only the largest intercept can attain the envelope
    dedup: list[KgLine] = []
    for line in ordered:
        if dedup and line.slope == dedup[-1].slope:
            dedup[-1] = line
        else:
            dedup.append(line)
    # upper-envelope stack: pop the top while it is overtaken before it starts
    stack: list[KgLine] = []
    for line in dedup:
        while len(stack) >= 2:
            s, t = stack[-2], stack[-1]
            c_new = (s.intercept - line.intercept) / (line.slope - s.slope)
            c_old = (s.intercept - t.intercept) / (t.slope - s.slope)
            if c_new <= c_old:
                stack.pop()
            else:
                break
        stack.append(line)
    total = 0.0
    for left, right in zip(stack, stack[1:]):
        c = (left.intercept - right.intercept) / (right.slope - left.slope)
        if np.isfinite(c):
            total += (right.slope - left.slope) * _gain_at_breakpoint(c)
    return max(total, 0.0)


def ei_score(state: PosteriorState, probe: DesignPoint, cands: CandidateSet) -> float:
    """Expected improvement in the best posterior mean from one run at probe."""
    return expected_max_gain(kg_lines(state, probe, cands))


def select_next(state: PosteriorState, cands: CandidateSet) -> EiScore:
    """Maximize ei_score over the materials x stresses grid.

    Ties go to the smallest (z_index, v_index) pair; iteration order makes
    that the first strict improvement.
    """
    best: EiScore | None = None
    for j in range(cands.n_materials):
        for m in range(cands.n_stresses):
            value = ei_score(state, cands.design(j, m), cands)
            if best is None or value > best.value:
                best = EiScore(value=value, z_index=j, v_index=m)
    assert best is not None
    return best


def current_best(state: PosteriorState, cands: CandidateSet) -> int:
    """Index of the material with the highest posterior mean at the target
    stress; ties resolve to the smallest index."""
    means = [
        float(feature_map(cands.target_design(k)) @ state.theta)
        for k in range(cands.n_materials)
    ]
    return int(np.argmax(means))
