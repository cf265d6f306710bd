"""Scoring and comparison of case mixes.

Three instruments: a significance-scaled distance to the ideal (proximity),
a per-type similarity test against significance thresholds, and a gain/loss
adjudication of two mixes built from the resultant vectors of their positive
and negative normalised differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

#: |ratio - 1| below which two mixes are judged equivalent
DEFAULT_INDIFFERENCE = 0.05

VERDICT_A = "a_preferred"
VERDICT_B = "b_preferred"
VERDICT_EQUIVALENT = "equivalent"


def _as_vec(v: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return arr


def _check_eps(eps: np.ndarray) -> np.ndarray:
    if np.any(eps <= 0):
        raise ValueError("significance thresholds must be positive")
    return eps


def scaled_distance(a: Sequence[float], b: Sequence[float], eps: Sequence[float]) -> float:
    """Euclidean distance with each axis measured in significance units."""
    a, b = _as_vec(a, "a"), _as_vec(b, "b")
    if len(a) != len(b):
        raise ValueError("case mixes have different lengths")
    eps = _check_eps(_as_vec(eps, "eps"))
    if len(eps) != len(a):
        raise ValueError("eps length does not match case mixes")
    return float(np.sqrt(np.sum(((a - b) / eps) ** 2)))


@dataclass
class ProximityScore:
    proximity: float  # 0 at the ideal, 100 at the anti-ideal
    progress: float   # complement, 100 - proximity


def proximity(
    n: Sequence[float],
    ideal: Sequence[float],
    anti_ideal: Sequence[float],
    eps: Optional[Sequence[float]] = None,
) -> ProximityScore:
    """Distance to the ideal as a percentage of the ideal-to-anti-ideal span.

    ``eps`` defaults to the ideal itself, which keeps types of very different
    magnitudes comparable.
    """
    n, ideal, anti = _as_vec(n, "n"), _as_vec(ideal, "ideal"), _as_vec(anti_ideal, "anti_ideal")
    if eps is None:
        eps = ideal
    span = scaled_distance(ideal, anti, eps)
    if span == 0.0:
        raise ValueError("ideal and anti-ideal coincide; proximity undefined")
    value = 100.0 * scaled_distance(n, ideal, eps) / span
    return ProximityScore(proximity=value, progress=100.0 - value)


@dataclass
class SimilarityReport:
    per_type_significant: np.ndarray  # boolean, |difference| > eps
    los: float                        # % of types without a significant change
    lod: float
    similar_overall: bool

    def significant_ids(self, ids: Sequence[str]) -> list[str]:
        return [i for i, s in zip(ids, self.per_type_significant) if s]


def similarity(a: Sequence[float], b: Sequence[float], eps: Sequence[float]) -> SimilarityReport:
    """Per-type significance test; a difference equal to the threshold counts
    as similar."""
    a, b = _as_vec(a, "a"), _as_vec(b, "b")
    if len(a) != len(b):
        raise ValueError("case mixes have different lengths")
    eps = _check_eps(_as_vec(eps, "eps"))
    significant = np.abs(a - b) > eps
    los = 100.0 * float(np.count_nonzero(~significant)) / len(a)
    return SimilarityReport(
        per_type_significant=significant,
        los=los,
        lod=100.0 - los,
        similar_overall=not bool(significant.any()),
    )


@dataclass
class TypeInterval:
    inner: tuple[float, float]  # still-similar band
    outer: tuple[float, float]  # outer shell of the boundary region


def similarity_boundary(
    n: Sequence[float],
    eps: Sequence[float],
    lam: float,
    upper: Optional[Sequence[float]] = None,
) -> list[TypeInterval]:
    """Per-type similarity band [n - eps, n + eps] and the outer shell at
    ``lam`` times the threshold, clamped to [0, upper]."""
    n = _as_vec(n, "n")
    eps = _check_eps(_as_vec(eps, "eps"))
    if lam <= 0:
        raise ValueError("lam must be positive")
    ub = _as_vec(upper, "upper") if upper is not None else np.full(len(n), np.inf)
    out = []
    for v, e, u in zip(n, eps, ub):
        inner = (max(0.0, v - e), min(u, v + e))
        outer = (max(0.0, v - lam * e), min(u, v + lam * e))
        out.append(TypeInterval(inner=inner, outer=outer))
    return out


@dataclass
class ComparisonReport:
    deltas: np.ndarray        # per-type normalised difference (b relative to a)
    gain_vector: np.ndarray   # positive components
    loss_vector: np.ndarray   # negative components, stored as magnitudes
    gain: float               # 2-norm of the gain vector
    loss: float               # 2-norm of the loss vector
    ratio: Optional[float]    # gain / loss, None when the loss is zero
    verdict: str
    significant: bool         # True when a significance-scaled verdict was used
    subset: Optional[list[int]] = None


def compare(
    a: Sequence[float],
    b: Sequence[float],
    upper: Sequence[float],
    lower: Optional[Sequence[float]] = None,
    mode: str = "normalized",
    eps: Optional[Sequence[float]] = None,
    subset: Optional[Sequence[int]] = None,
    upper_bound_only: bool = False,
    indifference: float = DEFAULT_INDIFFERENCE,
) -> ComparisonReport:
    """Adjudicate mix ``b`` against mix ``a``.

    ``mode="normalized"`` measures differences on each type's planning range
    (with ``upper_bound_only`` reproducing the plain divide-by-upper variant);
    ``mode="eps-scaled"`` measures them in significance units and labels the
    verdict as significant. ``subset`` restricts the comparison to the given
    type indices, zeroing every other difference.
    """
    a, b = _as_vec(a, "a"), _as_vec(b, "b")
    if len(a) != len(b):
        raise ValueError("case mixes have different lengths")
    upper = _as_vec(upper, "upper")
    lower = _as_vec(lower, "lower") if lower is not None else np.zeros(len(a))
    if np.any(upper <= lower):
        raise ValueError("each upper bound must exceed its lower bound")
    if mode == "normalized":
        denom = upper if upper_bound_only else upper - lower
        deltas = (b - lower) / denom - (a - lower) / denom
        significant = False
    elif mode == "eps-scaled":
        if eps is None:
            raise ValueError("eps-scaled mode needs significance thresholds")
        deltas = (b - a) / _check_eps(_as_vec(eps, "eps"))
        significant = True
    else:
        raise ValueError(f"unknown mode {mode!r}")

    subset_list = None
    if subset is not None:
        subset_list = sorted(int(i) for i in subset)
        mask = np.zeros(len(a), dtype=bool)
        mask[subset_list] = True
        deltas = np.where(mask, deltas, 0.0)

    gain_vec = np.where(deltas > 0, deltas, 0.0)
    loss_vec = np.where(deltas < 0, -deltas, 0.0)
    gain = float(np.linalg.norm(gain_vec))
    loss = float(np.linalg.norm(loss_vec))
    ratio = gain / loss if loss > 0 else None

    if gain == 0.0 and loss == 0.0:
        verdict = VERDICT_EQUIVALENT
    elif loss == 0.0:
        verdict = VERDICT_B
    elif gain == 0.0:
        verdict = VERDICT_A
    elif max(ratio, 1.0 / ratio) - 1.0 <= indifference:
        # "roughly one" must read the same from both sides, so the band is
        # symmetric under swapping the two mixes (ratio inversion)
        verdict = VERDICT_EQUIVALENT
    elif ratio > 1.0:
        verdict = VERDICT_B
    else:
        verdict = VERDICT_A

    return ComparisonReport(
        deltas=deltas,
        gain_vector=gain_vec,
        loss_vector=loss_vec,
        gain=gain,
        loss=loss,
        ratio=ratio,
        verdict=verdict,
        significant=significant,
        subset=subset_list,
    )
