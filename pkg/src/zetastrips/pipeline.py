"""Compute/analyze orchestration over a worker pool, cache persistence,
and artifact emission.

The heavy work is three batches of independent jobs keyed by strip index:
boundary traces, primary traces, and per-strip zero scans.  Results are
assembled strictly in index order, so the emitted artifacts are
byte-identical for any worker count.
"""

from __future__ import annotations

import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import analysis
from .cache import Cache, fingerprint, fmt, write_atomic, write_json_atomic
from .contour import (
    DEFAULT_TRACE,
    TraceParams,
    _cached_boundary,
    _cached_primary,
)
from .errors import CacheInvalid, DomainError, NotSpecial
from .gram import default_table, gap_ratio_series
from .strips import Strip, ZeroRecord, build_strips, find_zeros
from .zeta import DEFAULT_EVAL, EvalParams

SLOPE = analysis.SLOPE_MODEL

GRAM_HEADER = "n,g,gap,gap_ratio,gap_ratio_geo"
BOUNDARY_HEADER = "m,k,crossing_t,gram_index,min_abs_zeta"
ZEROS_HEADER = "j,t,strip_m"
STRIPS_HEADER = (
    "m,bottom,top,width,gram_count,n_zeros,primary_index,primary_height,primary_stat"
)

FIGURE_RANGES = {3: (1, 70), 4: (70, 140), 5: (140, 280), 6: (280, 560), 7: (560, 1102)}
DENSITY_RANGES = {11: (1, 70), 12: (70, 140), 13: (140, 280), 14: (280, 560), 15: (560, 1102)}


@dataclass(frozen=True)
class RunConfig:
    t_max: float = 1e4
    m_max: int | None = None
    threads: int = 1
    out_dir: Path = Path("out")
    cache_dir: Path | None = None
    eval_params: EvalParams = DEFAULT_EVAL
    trace_params: TraceParams = DEFAULT_TRACE
    progress: bool = False

    def __post_init__(self) -> None:
        if not 20.0 <= self.t_max <= 1.1e4:
            raise DomainError(f"t_max {self.t_max} outside [20, 1.1e4]")
        if self.m_max is not None and self.m_max < 1:
            raise DomainError(f"m_max {self.m_max} < 1")
        if self.threads < 1:
            raise DomainError(f"threads {self.threads} < 1")

    @property
    def cache_path(self) -> Path:
        return Path(self.cache_dir) if self.cache_dir is not None else self.out_dir / "cache"

    def numeric_dict(self) -> dict:
        e, t = self.eval_params, self.trace_params
        return {
            "t_max": self.t_max,
            "m_max": self.m_max,
            "eval": {
                "em_terms_factor": e.em_terms_factor,
                "bernoulli_order": e.bernoulli_order,
                "target_abs_error": e.target_abs_error,
            },
            "trace": {
                "sigma_start": t.sigma_start,
                "sigma_min": t.sigma_min,
                "step": t.step,
                "newton_tol": t.newton_tol,
                "zero_radius": t.zero_radius,
                "max_steps": t.max_steps,
            },
        }

    def cache(self) -> Cache:
        return Cache(self.cache_path, fingerprint(self.numeric_dict()))


@dataclass
class ComputeResult:
    strips: list[Strip]
    boundaries: list[float]
    from_cache: bool = False
    gram_rows: list = field(default_factory=list)


def _boundary_job(args: tuple[int, TraceParams, EvalParams]) -> tuple[int, float, float]:
    m, tp, ep = args
    crossing, min_abs = _cached_boundary(m, tp, ep)
    return m, crossing, min_abs


def _primary_job(args: tuple[int, TraceParams, EvalParams]) -> tuple[int, float, float]:
    m, tp, ep = args
    sigma, t = _cached_primary(m, tp, ep)
    return m, sigma, t


def _zeros_job(
    args: tuple[int, float, float, int, EvalParams]
) -> tuple[int, list[float]]:
    m, lo, hi, expected, ep = args
    records = find_zeros(lo, hi, expected, ep, strip_m=m)
    return m, [r.t for r in records]


def _run_jobs(jobs, worker, threads: int, label: str, progress: bool):
    results = {}
    if threads == 1:
        for i, job in enumerate(jobs):
            out = worker(job)
            results[out[0]] = out[1:]
            if progress and (i + 1) % 50 == 0:
                print(f"  {label}: {i + 1}/{len(jobs)}", file=sys.stderr)
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for i, out in enumerate(pool.map(worker, jobs, chunksize=4)):
                results[out[0]] = out[1:]
                if progress and (i + 1) % 50 == 0:
                    print(f"  {label}: {i + 1}/{len(jobs)}", file=sys.stderr)
    return results


def _boundary_batch(config: RunConfig) -> tuple[list[float], dict[int, float]]:
    """Crossing heights for boundaries m = 1..m_count+1 plus min-|zeta|
    diagnostics, where m_count strips fit under t_max (or m_max if set)."""
    tp, ep = config.trace_params, config.eval_params
    if config.m_max is not None:
        hi = config.m_max + 1
    else:
        hi = math.ceil((config.t_max + 2.5) / SLOPE)
    crossings: dict[int, float] = {}
    min_abs: dict[int, float] = {}
    lo = 1
    while True:
        jobs = [(m, tp, ep) for m in range(lo, hi + 1)]
        if jobs:
            for m, (crossing, mabs) in _run_jobs(
                jobs, _boundary_job, config.threads, "boundaries", config.progress
            ).items():
                crossings[m], min_abs[m] = crossing, mabs
        if config.m_max is not None:
            break
        if crossings[hi] > config.t_max:
            break
        lo, hi = hi + 1, hi + 2  # estimate fell short; extend the batch

    if config.m_max is not None:
        count = config.m_max
    else:
        count = sum(1 for c in crossings.values() if c <= config.t_max) - 1
        if count < 1:
            raise DomainError(f"t_max {config.t_max} leaves no complete strip")
    ordered = [crossings[m] for m in range(1, count + 2)]
    if any(later <= earlier for earlier, later in zip(ordered, ordered[1:])):
        raise NotSpecial("boundary crossings are not strictly increasing")
    return ordered, min_abs


def _gram_csv(t_max: float) -> tuple[str, list]:
    table = default_table()
    n_last = table.extend_to_height(t_max)
    series = gap_ratio_series(n_last, table)
    lines = [GRAM_HEADER]
    g_first = table.point(-1).height
    lines.append(f"-1,{fmt(g_first)},,,")
    for rec in series:
        lines.append(
            f"{rec.n},{fmt(rec.height)},{fmt(rec.gap)},"
            f"{fmt(rec.ratio_plain)},{fmt(rec.ratio_geometric)}"
        )
    return "\n".join(lines) + "\n", series


def _strips_csv(strips: Sequence[Strip]) -> str:
    lines = [STRIPS_HEADER]
    for s in strips:
        lines.append(
            f"{s.m},{fmt(s.bottom)},{fmt(s.top)},{fmt(s.width)},{s.gram_count},"
            f"{len(s.zeros)},{s.primary_index},{fmt(s.primary_height)},"
            f"{fmt(s.primary_stat)}"
        )
    return "\n".join(lines) + "\n"


def _zeros_csv(strips: Sequence[Strip]) -> str:
    lines = [ZEROS_HEADER]
    for s in strips:
        for z in s.zeros:
            lines.append(f"{z.j},{fmt(z.t)},{z.strip_m}")
    return "\n".join(lines) + "\n"


def _boundaries_csv(boundaries: Sequence[float], min_abs: dict[int, float]) -> str:
    table = default_table()
    lines = [BOUNDARY_HEADER]
    for i, crossing in enumerate(boundaries, start=1):
        idx = table.index_near(crossing, 1e-6)
        if idx is None:
            raise NotSpecial(f"boundary {i} at {crossing} matches no Gram point")
        lines.append(
            f"{i},{2 * i},{fmt(crossing)},{idx},{fmt(min_abs.get(i, float('nan')))}"
        )
    return "\n".join(lines) + "\n"


def _emit(out_dir: Path, name: str, text: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / name
    if target.exists() and target.read_text(encoding="utf-8") == text:
        return
    write_atomic(target, text.encode("utf-8"))


def parse_strips_csv(strips_text: str, zeros_text: str) -> list[Strip]:
    """Rebuild Strip records from the cached CSVs.  Widths are recomputed
    from the parsed endpoints; the emitted width column is only checked to
    the 12-significant-digit emission grid."""
    zero_rows: dict[int, list[ZeroRecord]] = {}
    for line in zeros_text.strip().splitlines()[1:]:
        j_s, t_s, m_s = line.split(",")
        zero_rows.setdefault(int(m_s), []).append(
            ZeroRecord(j=int(j_s), t=float(t_s), strip_m=int(m_s))
        )
    strips = []
    for line in strips_text.strip().splitlines()[1:]:
        parts = line.split(",")
        m = int(parts[0])
        bottom, top, width_csv = float(parts[1]), float(parts[2]), float(parts[3])
        width = top - bottom
        if abs(width - width_csv) > 1e-7 * max(1.0, abs(width)):
            raise CacheInvalid(f"strip {m}: width column inconsistent with bounds")
        zeros = tuple(zero_rows.get(m, ()))
        strip = Strip(
            m=m,
            bottom=bottom,
            top=top,
            width=width,
            gram_count=int(parts[4]),
            zeros=zeros,
            primary_index=int(parts[6]),
            primary_height=float(parts[7]),
            primary_stat=(int(parts[6]) - 0.5) / len(zeros),
        )
        strip.validate()
        strips.append(strip)
    return strips


def compute(config: RunConfig, force: bool = False) -> ComputeResult:
    """Populate the cache (Gram table, boundaries, zeros, strips) and emit
    gram.csv / strips.csv / zeros.csv.  A warm, matching cache short-circuits
    all computation."""
    cache = config.cache()
    if not force and cache.is_complete():
        strips = parse_strips_csv(cache.load("strips"), cache.load("zeros"))
        boundaries = [s.bottom for s in strips] + [strips[-1].top]
        for name in ("gram", "strips", "zeros"):
            _emit(config.out_dir, f"{name}.csv", cache.load(name))
        return ComputeResult(strips=strips, boundaries=boundaries, from_cache=True)

    tp, ep = config.trace_params, config.eval_params
    boundaries, min_abs = _boundary_batch(config)
    m_count = len(boundaries) - 1
    if config.progress:
        print(f"  {m_count} strips, top {boundaries[-1]:.3f}", file=sys.stderr)

    primary_jobs = [(m, tp, ep) for m in range(1, m_count + 1)]
    primaries_map = _run_jobs(
        primary_jobs, _primary_job, config.threads, "primaries", config.progress
    )
    primaries = []
    for m in range(1, m_count + 1):
        sigma, t = primaries_map[m]
        if abs(sigma - 0.5) > 1e-6:
            raise NotSpecial(f"primary zero of strip {m} off the critical line")
        primaries.append(t)

    table = default_table()
    table.extend_to_height(max(boundaries[-1], config.t_max) + 1.0)
    zero_jobs = [
        (m, boundaries[m - 1], boundaries[m], table.count_in(boundaries[m - 1], boundaries[m]), ep)
        for m in range(1, m_count + 1)
    ]
    zeros_map = _run_jobs(zero_jobs, _zeros_job, config.threads, "zeros", config.progress)
    zero_lists = [zeros_map[m][0] for m in range(1, m_count + 1)]

    strips = build_strips(
        m_count,
        tp,
        ep,
        boundaries=boundaries,
        primaries=primaries,
        zero_lists=zero_lists,
    )

    gram_text, _ = _gram_csv(config.t_max)
    strips_text = _strips_csv(strips)
    zeros_text = _zeros_csv(strips)
    boundaries_text = _boundaries_csv(boundaries, min_abs)

    cache.store("gram", gram_text)
    cache.store("boundaries", boundaries_text)
    cache.store("zeros", zeros_text)
    cache.store("strips", strips_text)
    _emit(config.out_dir, "gram.csv", gram_text)
    _emit(config.out_dir, "strips.csv", strips_text)
    _emit(config.out_dir, "zeros.csv", zeros_text)
    return ComputeResult(strips=strips, boundaries=boundaries)


def _fit_dict(fit: analysis.LinearFit) -> dict:
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "slope_se": fit.slope_se,
        "intercept_se": fit.intercept_se,
        "n": fit.n,
    }


@dataclass
class AnalysisResult:
    bottoms: analysis.LinearFit
    tops: analysis.LinearFit
    density_log: analysis.LinearFit
    density_linear: analysis.LinearFit
    primary: analysis.PrimaryStats
    bottom_dev: analysis.DeviationSeries
    density_dev: analysis.DeviationSeries
    arches: list[analysis.ArchPrediction]
    branch_report: list[analysis.BranchSpacing]

    def summary_lines(self) -> list[str]:
        out = [
            f"n_strips={self.bottoms.n}",
            f"slope={self.bottoms.slope:.5f} (se {self.bottoms.slope_se:.2e})",
            f"intercept={self.bottoms.intercept:.4f} (se {self.bottoms.intercept_se:.4f})",
            f"tops_intercept={self.tops.intercept:.4f} (se {self.tops.intercept_se:.4f})",
            f"density_log: slope={self.density_log.slope:.6f} intercept={self.density_log.intercept:.6f}",
            f"primary_mean={self.primary.mean:.4f}",
            f"primary_variance={self.primary.variance:.4f}",
            "quartile_variances="
            + ",".join(f"{v:.4f}" for v in self.primary.quartile_variances),
        ]
        q1 = [b.mean_gap for b in self.branch_report if b.q == 1 and b.mean_gap]
        q2 = [b.mean_gap for b in self.branch_report if b.q == 2 and b.mean_gap]
        if q1:
            out.append(f"branch_gap_q1={sum(q1) / len(q1):.4f} ({len(q1)} centers)")
        if q2 and q1:
            ratio = (sum(q2) / len(q2)) / (sum(q1) / len(q1))
            out.append(
                f"branch_gap_q2={sum(q2) / len(q2):.4f} ratio_q2_q1={ratio:.3f} "
                "(reported, not asserted; expected near 0.5)"
            )
        return out


def analyze(config: RunConfig) -> AnalysisResult:
    """Regressions and deviation series over the cached strips; writes
    fits.json, deviations.csv, arches.csv."""
    cache = config.cache()
    strips = parse_strips_csv(cache.load("strips"), cache.load("zeros"))
    bottoms = analysis.fit_bottoms(strips)
    tops = analysis.fit_tops(strips)
    density_log, density_dev = analysis.fit_density(strips)
    density_linear = analysis.fit_density_linear(strips)
    primary = analysis.primary_stats(strips)
    bottom_dev = analysis.bottom_deviation_series(strips)

    m_hi = float(strips[-1].m)
    q_max = 3 if m_hi >= 100 else 2
    p_max = max(4, math.ceil(q_max * math.log2(m_hi / math.log(2.0))))
    arches = analysis.arch_centers(p_max, q_max, m_limit=m_hi)
    branch_report = analysis.branch_spacing_report(strips, q_max=min(q_max, 2))

    fits = {
        "bottoms": _fit_dict(bottoms),
        "tops": _fit_dict(tops),
        "density_log": _fit_dict(density_log),
        "density_linear": _fit_dict(density_linear),
        "primary_stats": {
            "mean": primary.mean,
            "variance": primary.variance,
            "quartile_variances": list(primary.quartile_variances),
            "n": primary.n,
        },
    }
    config.out_dir.mkdir(parents=True, exist_ok=True)
    write_json_atomic(config.out_dir / "fits.json", fits)

    dens = dict(density_dev.records)
    lines = ["m,bottom_dev,density_dev"]
    for m, bdev in bottom_dev.records:
        lines.append(f"{m},{fmt(bdev)},{fmt(dens[m])}")
    _emit(config.out_dir, "deviations.csv", "\n".join(lines) + "\n")

    lines = ["p,q,m_center,t_center"]
    for a in arches:
        lines.append(f"{a.p},{a.q},{fmt(a.m_center)},{fmt(a.t_center)}")
    _emit(config.out_dir, "arches.csv", "\n".join(lines) + "\n")
    return AnalysisResult(
        bottoms=bottoms,
        tops=tops,
        density_log=density_log,
        density_linear=density_linear,
        primary=primary,
        bottom_dev=bottom_dev,
        density_dev=density_dev,
        arches=arches,
        branch_report=branch_report,
    )
