"""Regressions, deviation series, resonance/arch predictions, and the
primary-zero statistics over an assembled strip list.

Strip-bottom heights grow linearly in the strip number with slope
2 pi / ln 2 = 9.06472028...; deviations from 2 m pi / ln 2 stay inside
(-2, 2) and cluster into nested arches near strip numbers
alpha(p, q) = 2^(p/q) ln 2, the resonances between the mean strip height
and the local Gram spacing.  The density fit is taken against ln m, which
is exact for the spacing model; a fit against m is emitted alongside for
comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import DomainError
from .strips import Strip, zeros_per_width

_TWO_PI = 2.0 * math.pi
_LN2 = math.log(2.0)
SLOPE_MODEL = _TWO_PI / _LN2  # 9.06472028...


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    slope_se: float
    intercept_se: float
    n: int


@dataclass(frozen=True)
class ArchPrediction:
    """Predicted arch center: strip number 2^(p/q) ln 2, height 2^(1+p/q) pi."""

    p: int
    q: int
    m_center: float
    t_center: float

    def __post_init__(self) -> None:
        if self.p < 1 or self.q < 1 or math.gcd(self.p, self.q) != 1:
            raise DomainError(f"(p, q) = ({self.p}, {self.q}) must be coprime positives")
        if abs(self.t_center - self.m_center * SLOPE_MODEL) > 1e-9 * max(
            1.0, self.t_center
        ):
            raise DomainError(
                f"arch ({self.p}, {self.q}): t/m ratio violates 2 pi / ln 2"
            )


@dataclass(frozen=True)
class DeviationSeries:
    kind: Literal["bottom_dev", "density_dev"]
    records: tuple[tuple[int, float], ...]


def _ols(x: np.ndarray, y: np.ndarray) -> LinearFit:
    """Ordinary least squares with homoskedastic standard errors."""
    n = x.size
    if n < 3:
        raise DomainError(f"need >= 3 points for a fit, got {n}")
    x_mean = x.mean()
    y_mean = y.mean()
    sxx = float(((x - x_mean) ** 2).sum())
    sxy = float(((x - x_mean) * (y - y_mean)).sum())
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    resid = y - (intercept + slope * x)
    s2 = float((resid**2).sum()) / (n - 2)
    return LinearFit(
        slope=slope,
        intercept=intercept,
        slope_se=math.sqrt(s2 / sxx),
        intercept_se=math.sqrt(s2 * (1.0 / n + x_mean**2 / sxx)),
        n=n,
    )


def fit_bottoms(strips: Sequence[Strip]) -> LinearFit:
    """OLS of strip-bottom height against strip number."""
    x = np.array([s.m for s in strips], dtype=float)
    y = np.array([s.bottom for s in strips], dtype=float)
    return _ols(x, y)


def fit_tops(strips: Sequence[Strip]) -> LinearFit:
    """Same regression on the strip tops; slope is unchanged, the
    intercept shifts by one mean width."""
    x = np.array([s.m for s in strips], dtype=float)
    y = np.array([s.top for s in strips], dtype=float)
    return _ols(x, y)


def bottom_deviation_series(strips: Sequence[Strip]) -> DeviationSeries:
    """bottom(m) - 2 m pi / ln 2 for every strip."""
    if not strips:
        raise DomainError("no strips")
    records = tuple((s.m, s.bottom - s.m * SLOPE_MODEL) for s in strips)
    return DeviationSeries(kind="bottom_dev", records=records)


def arch_centers(
    p_max: int, q_max: int, m_limit: float | None = None
) -> list[ArchPrediction]:
    """All coprime (p, q) predictions with p <= p_max, q <= q_max and
    m_center >= 1 (and <= m_limit when given), sorted by center."""
    if p_max < 4:
        raise DomainError(f"p_max = {p_max} < 4")
    if q_max < 1:
        raise DomainError(f"q_max = {q_max} < 1")
    out = []
    for q in range(1, q_max + 1):
        for p in range(1, p_max + 1):
            if math.gcd(p, q) != 1:
                continue
            m_center = 2.0 ** (p / q) * _LN2
            if m_center < 1.0 or (m_limit is not None and m_center > m_limit):
                continue
            out.append(
                ArchPrediction(
                    p=p, q=q, m_center=m_center, t_center=2.0 ** (1.0 + p / q) * math.pi
                )
            )
    out.sort(key=lambda a: a.m_center)
    return out


def resonance_check(p: int) -> float:
    """Height where the mean strip height is p Gram gaps: solving
    (2 pi / ln 2) / gap_model(t) = p gives t = 2 pi 2^p, which must equal
    the q = 1 arch center."""
    if p < 1:
        raise DomainError(f"p = {p} < 1")
    t = _TWO_PI * 2.0**p
    predicted = ArchPrediction(
        p=p, q=1, m_center=2.0**p * _LN2, t_center=2.0 ** (1 + p) * math.pi
    )
    if abs(t - predicted.t_center) > 1e-9 * t:
        raise DomainError(f"resonance height {t} disagrees with arch center")
    return t


def fit_density(strips: Sequence[Strip]) -> tuple[LinearFit, DeviationSeries]:
    """OLS of zeros-per-width against ln m plus the residual series."""
    x = np.array([math.log(s.m) for s in strips], dtype=float)
    y = np.array([zeros_per_width(s) for s in strips], dtype=float)
    fit = _ols(x, y)
    resid = y - (fit.intercept + fit.slope * x)
    records = tuple((s.m, float(r)) for s, r in zip(strips, resid))
    return fit, DeviationSeries(kind="density_dev", records=records)


def fit_density_linear(strips: Sequence[Strip]) -> LinearFit:
    """Comparison fit of zeros-per-width against m itself."""
    x = np.array([s.m for s in strips], dtype=float)
    y = np.array([zeros_per_width(s) for s in strips], dtype=float)
    return _ols(x, y)


@dataclass(frozen=True)
class PrimaryStats:
    mean: float
    variance: float
    quartile_variances: tuple[float, float, float, float]
    n: int


def primary_stats(strips: Sequence[Strip]) -> PrimaryStats:
    """Mean and variance of the primary-zero statistic, overall and per
    index quartile (contiguous quarters of the strip list)."""
    if len(strips) < 4:
        raise DomainError(f"need >= 4 strips, got {len(strips)}")
    stats = np.array([s.primary_stat for s in strips], dtype=float)
    quarters = np.array_split(stats, 4)
    return PrimaryStats(
        mean=float(stats.mean()),
        variance=float(stats.var(ddof=1)),
        quartile_variances=tuple(float(q.var(ddof=1)) for q in quarters),
        n=stats.size,
    )


@dataclass(frozen=True)
class BranchSpacing:
    """Measured vertical structure of the nested arches near one center.

    Strips in the window are grouped by zero-count surplus relative to the
    window's modal count; ``mean_gap`` is the average vertical distance
    between adjacent branch means of the bottom-deviation series.
    """

    p: int
    q: int
    m_center: float
    window: tuple[int, int]
    branch_means: tuple[tuple[int, float], ...]
    mean_gap: float | None


def arch_branch_spacing(
    strips: Sequence[Strip], prediction: ArchPrediction
) -> BranchSpacing:
    """Branch-gap measurement near one predicted arch center; reported,
    never asserted."""
    m_c = prediction.m_center
    half = max(12.0, 0.12 * m_c)
    window = [s for s in strips if abs(s.m - m_c) <= half]
    if len(window) < 8:
        return BranchSpacing(
            p=prediction.p,
            q=prediction.q,
            m_center=m_c,
            window=(0, 0),
            branch_means=(),
            mean_gap=None,
        )
    counts = [len(s.zeros) for s in window]
    modal = max(set(counts), key=counts.count)
    branches: dict[int, list[float]] = {}
    for s in window:
        label = len(s.zeros) - modal
        branches.setdefault(label, []).append(s.bottom - s.m * SLOPE_MODEL)
    means = sorted(
        (label, float(np.mean(vals))) for label, vals in branches.items()
    )
    gaps = [
        abs(means[i + 1][1] - means[i][1])
        for i in range(len(means) - 1)
        if means[i + 1][0] - means[i][0] == 1
    ]
    return BranchSpacing(
        p=prediction.p,
        q=prediction.q,
        m_center=m_c,
        window=(window[0].m, window[-1].m),
        branch_means=tuple(means),
        mean_gap=float(np.mean(gaps)) if gaps else None,
    )


def branch_spacing_report(
    strips: Sequence[Strip], p_max: int = 10, q_max: int = 2
) -> list[BranchSpacing]:
    """Branch spacings near every in-range arch center up to (p_max, q_max);
    the q = 2 gaps are expected near half the q = 1 gaps."""
    m_hi = strips[-1].m if strips else 0
    preds = arch_centers(p_max, q_max, m_limit=float(m_hi))
    return [arch_branch_spacing(strips, pred) for pred in preds]
