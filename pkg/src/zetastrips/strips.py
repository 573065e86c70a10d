"""Strip assembly: per-strip zero enumeration and the zero/Gram identity.

A strip is the band between consecutive special Gram points, bottom
inclusive and top exclusive.  With that ownership rule the number of
critical zeros in a strip equals the number of Gram points it contains,
exactly and per strip; any violation raises CountMismatch rather than
being repaired.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .contour import (
    DEFAULT_TRACE,
    TraceParams,
    primary_zero_of_strip,
    special_gram_point,
    verify_boundary_is_gram,
)
from .errors import CountMismatch, DomainError, EscapedStrip
from .gram import gap_model, default_table
from .zeta import DEFAULT_EVAL, EvalParams, T_ABS_MAX, hardy_z, rs_theta

_BISECT_TOL = 1e-9
_MAX_REFINE = 4


@dataclass(frozen=True)
class ZeroRecord:
    j: int
    t: float
    strip_m: int


@dataclass(frozen=True)
class Strip:
    m: int
    bottom: float
    top: float
    width: float
    gram_count: int
    zeros: tuple[ZeroRecord, ...]
    primary_index: int
    primary_height: float
    primary_stat: float

    def validate(self, width_tol: float = 1e-12) -> None:
        if not self.bottom < self.top:
            raise DomainError(f"strip {self.m}: bottom >= top")
        if abs(self.width - (self.top - self.bottom)) > width_tol:
            raise DomainError(f"strip {self.m}: width inconsistent")
        if len(self.zeros) != self.gram_count:
            raise CountMismatch(
                f"strip {self.m}: {len(self.zeros)} zeros vs "
                f"{self.gram_count} Gram points"
            )
        if not 1 <= self.primary_index <= len(self.zeros):
            raise EscapedStrip(f"strip {self.m}: primary index out of range")
        expected = (self.primary_index - 0.5) / len(self.zeros)
        if not 0.0 < self.primary_stat < 1.0 or abs(self.primary_stat - expected) > 1e-12:
            raise DomainError(f"strip {self.m}: primary_stat inconsistent")


def _bisect_zero(f: Callable[[float], float], lo: float, hi: float) -> float:
    f_lo = f(lo)
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_lo * f_mid <= 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def gram_count_identity(t_lo: float, t_hi: float) -> int:
    """Number of Gram points in [t_lo, t_hi) from the theta identity;
    exact integers as long as the endpoints are not within rounding
    distance of a Gram point boundary themselves."""
    lo_idx = math.ceil(round(rs_theta(t_lo) / math.pi, 9))
    hi_idx = math.ceil(round(rs_theta(t_hi) / math.pi, 9))
    return hi_idx - lo_idx


def find_zeros(
    t_lo: float,
    t_hi: float,
    expected_count: int | None = None,
    eval_params: EvalParams = DEFAULT_EVAL,
    *,
    j_offset: int = 0,
    strip_m: int = 0,
) -> list[ZeroRecord]:
    """Critical zeros in (t_lo, t_hi) by sign-change scan of Z plus
    bisection to 1e-9.

    The scan grid has spacing gap_model(t_hi)/8.  When ``expected_count``
    is given (strip builds pass the Gram count) and the scan disagrees, the
    grid is halved up to four times before CountMismatch is raised; a
    missed zero is never interpolated.
    """
    if not 7.0 <= t_lo < t_hi <= T_ABS_MAX:
        raise DomainError(f"find_zeros range [{t_lo}, {t_hi}] invalid")

    def z(t: float) -> float:
        return hardy_z(t, eval_params)

    spacing = gap_model(t_hi) / 8.0
    for _ in range(_MAX_REFINE + 1):
        count = max(2, math.ceil((t_hi - t_lo) / spacing) + 1)
        zeros: list[float] = []
        prev_t = t_lo
        prev_z = z(prev_t)
        for i in range(1, count + 1):
            t = min(t_lo + i * (t_hi - t_lo) / count, t_hi)
            cur_z = z(t)
            if prev_z == 0.0:
                zeros.append(prev_t)
            elif prev_z * cur_z < 0.0:
                zeros.append(_bisect_zero(z, prev_t, t))
            prev_t, prev_z = t, cur_z
        if expected_count is None or len(zeros) == expected_count:
            return [
                ZeroRecord(j=j_offset + i + 1, t=height, strip_m=strip_m)
                for i, height in enumerate(zeros)
            ]
        spacing *= 0.5
    raise CountMismatch(
        f"({t_lo}, {t_hi}): found {len(zeros)} zeros, expected {expected_count} "
        f"after {_MAX_REFINE} grid refinements"
    )


def assemble_strip(
    m: int,
    bottom: float,
    top: float,
    zero_heights: Sequence[float],
    gram_count: int,
    primary_height: float,
    j_offset: int,
) -> Strip:
    """Build and validate one Strip from precomputed pieces."""
    zeros = tuple(
        ZeroRecord(j=j_offset + i + 1, t=t, strip_m=m)
        for i, t in enumerate(zero_heights)
    )
    if len(zeros) != gram_count:
        raise CountMismatch(
            f"strip {m}: {len(zeros)} zeros vs {gram_count} Gram points"
        )
    if not zeros:
        raise CountMismatch(f"strip {m} is empty; no such strip is expected")
    diffs = [abs(z.t - primary_height) for z in zeros]
    primary_index = diffs.index(min(diffs)) + 1
    if min(diffs) > 1e-5:
        raise EscapedStrip(
            f"strip {m}: primary zero at {primary_height} matches no "
            f"enumerated zero (nearest {min(diffs):.2e} away)"
        )
    if not bottom < primary_height < top:
        raise EscapedStrip(f"strip {m}: primary zero {primary_height} outside strip")
    strip = Strip(
        m=m,
        bottom=bottom,
        top=top,
        width=top - bottom,
        gram_count=gram_count,
        zeros=zeros,
        primary_index=primary_index,
        primary_height=primary_height,
        primary_stat=(primary_index - 0.5) / len(zeros),
    )
    strip.validate()
    return strip


def build_strips(
    m_max: int,
    trace_params: TraceParams = DEFAULT_TRACE,
    eval_params: EvalParams = DEFAULT_EVAL,
    *,
    boundaries: Sequence[float] | None = None,
    primaries: Sequence[float] | None = None,
    zero_lists: Sequence[Sequence[float]] | None = None,
) -> list[Strip]:
    """Strips 1..m_max with zeros, Gram counts, and primary indices.

    The three optional sequences let the parallel pipeline inject
    precomputed traces and scans; assembly and validation stay on this
    single code path.  ``boundaries`` must hold m_max + 1 crossing heights.
    """
    if m_max < 1:
        raise DomainError(f"m_max = {m_max} < 1")
    if boundaries is None:
        boundaries = [
            special_gram_point(m, trace_params, eval_params)
            for m in range(1, m_max + 2)
        ]
    if len(boundaries) != m_max + 1:
        raise DomainError(f"need {m_max + 1} boundaries, got {len(boundaries)}")
    if primaries is None:
        primaries = [
            primary_zero_of_strip(
                m, trace_params, eval_params, check_containment=False
            ).t
            for m in range(1, m_max + 1)
        ]

    table = default_table()
    table.extend_to_height(boundaries[-1] + 1.0)
    for crossing in boundaries:
        verify_boundary_is_gram(crossing)

    strips: list[Strip] = []
    j_offset = 0
    for m in range(1, m_max + 1):
        bottom, top = boundaries[m - 1], boundaries[m]
        if bottom >= top:
            raise EscapedStrip(
                f"boundary crossings out of order at strip {m}: "
                f"{bottom} >= {top}; contours may have intersected"
            )
        gram_count = table.count_in(bottom, top)
        if zero_lists is not None:
            heights = list(zero_lists[m - 1])
            if len(heights) != gram_count:
                raise CountMismatch(
                    f"strip {m}: precomputed scan found {len(heights)} zeros "
                    f"vs {gram_count} Gram points"
                )
        else:
            records = find_zeros(
                bottom, top, gram_count, eval_params, j_offset=j_offset, strip_m=m
            )
            heights = [r.t for r in records]
        strips.append(
            assemble_strip(
                m, bottom, top, heights, gram_count, primaries[m - 1], j_offset
            )
        )
        j_offset += gram_count
    return strips


def zeros_per_width(strip: Strip) -> float:
    """Zero count divided by strip width, the density statistic."""
    if strip.width <= 0.0:
        raise DomainError(f"strip {strip.m} has non-positive width")
    return len(strip.zeros) / strip.width
