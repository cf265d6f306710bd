"""Piecewise-linear approximation of x^2 on [0, 1] for separable programming.

A convex curve is replaced by segment variables whose slopes increase left to
right. When the approximated value is minimised, an LP fills the segments in
the correct order on its own, so no integer variables are needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lp import LinearProgram


@dataclass(frozen=True)
class PwlApprox:
    """Breakpoints b_0..b_{I+1} on [0, 1] and the I+1 chord slopes between them."""

    breakpoints: np.ndarray
    slopes: np.ndarray

    @property
    def segment_count(self) -> int:
        return len(self.slopes) - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def evaluate(self, x: float) -> float:
        """Value of the approximation with segments filled left to right."""
        filled = np.clip(x - self.breakpoints[:-1], 0.0, self.widths)
        return float(self.slopes @ filled)


def build_square_pwl(segments: int) -> PwlApprox:
    """Chord approximation of f(x) = x^2 with ``segments`` interior segments.

    Breakpoints are evenly spaced at i / (segments + 1); each chord slope over
    [b_{i-1}, b_i] is b_{i-1} + b_i, strictly increasing by convexity.
    """
    if segments < 1:
        raise ValueError(f"need at least one segment, got {segments}")
    b = np.arange(segments + 2) / (segments + 1)
    slopes = b[1:] + b[:-1]
    return PwlApprox(breakpoints=b, slopes=slopes)


def add_pwl_variable(lp: LinearProgram, x_var: str, pwl: PwlApprox, prefix: str | None = None) -> str:
    """Attach y ~= x^2 to the program and return the name of y.

    Adds one variable per segment, each bounded by the segment width, ties
    their sum to ``x_var`` and defines y as the slope-weighted sum. Exact for
    convex minimisation of y; callers maximising y must verify fill order.
    """
    lo, hi = lp.bounds(x_var)
    if lo < -1e-12 or hi > 1.0 + 1e-12:
        raise ValueError(f"{x_var} bounds [{lo}, {hi}] must lie within [0, 1]")
    prefix = prefix or x_var
    widths = pwl.widths
    seg_names = []
    for i, w in enumerate(widths):
        seg_names.append(lp.add_variable(f"{prefix}.seg[{i}]", 0.0, float(w)))
    y = lp.add_variable(f"{prefix}.sq", 0.0, 1.0)
    lp.add_constraint({x_var: -1.0, **{s: 1.0 for s in seg_names}}, "=", 0.0)
    lp.add_constraint({y: -1.0, **{s: float(k) for s, k in zip(seg_names, pwl.slopes)}}, "=", 0.0)
    return y


def segment_values(solution_values: dict[str, float], prefix: str, count: int) -> np.ndarray:
    return np.array([solution_values[f"{prefix}.seg[{i}]"] for i in range(count)])


def fill_order_violation(seg: np.ndarray, widths: np.ndarray, tol: float = 1e-9) -> bool:
    """True when a later segment is used before an earlier one is full."""
    open_before = False
    for v, w in zip(seg, widths):
        if v > tol and open_before:
            return True
        if v < w - tol:
            open_before = True
    return False
