"""Predictor-corrector tracing of Im(zeta(s)) = 0 level curves.

Curves are launched on the vertical line sigma = sigma_start, where
zeta(s) = 1 + 2^-s + ... makes the branch structure unambiguous: the
contour meeting sigma = +infinity at height k pi / ln 2 is seeded at that
height and Newton-corrected.  Even k are strip boundaries (they cross the
critical line at special Gram points and continue to sigma_min); odd k are
primary contours (they terminate at the strip's primary zero).

The gradient of Im zeta in the (sigma, t) plane is (Im zeta', Re zeta') by
Cauchy-Riemann; the predictor steps along the unit tangent perpendicular
to it and the corrector is a Newton projection back onto the level set.

Step control: the step halves when the corrector struggles or when
|zeta| < 10 * zero_radius, and is additionally clamped to a third of the
Newton distance |zeta| / |zeta'| so the trace cannot step over an
on-contour zero (where Re zeta flips sign); a sign-flip backstop catches
the remaining pathological case.  A terminal zero is declared when
|zeta| < zero_radius and a full two-dimensional Newton on zeta converges;
the Newton result is the reported zero.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import (
    ConvergenceFailure,
    DomainError,
    EscapedStrip,
    MaxSteps,
    NoTerminalZero,
    NotSpecial,
    PhaseJump,
    SeedDrift,
    StepCollapse,
)
from .gram import default_table
from .zeta import (
    SIGMA_MAX,
    ComplexPoint,
    EvalParams,
    DEFAULT_EVAL,
    rs_theta,
    zeta_with_derivative,
)

_LN2 = math.log(2.0)
_MIN_STEP = 1e-6
_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class TraceParams:
    sigma_start: float = 5.0
    sigma_min: float = 0.0
    step: float = 0.02
    newton_tol: float = 1e-10
    zero_radius: float = 1e-4
    max_steps: int = 10**6

    def __post_init__(self) -> None:
        if self.sigma_start < 4.0:
            raise DomainError(f"sigma_start {self.sigma_start} < 4")
        if not 0.0 < self.step <= 0.1:
            raise DomainError(f"step {self.step} outside (0, 0.1]")
        if not 0.0 < self.zero_radius <= 1e-2:
            raise DomainError(f"zero_radius {self.zero_radius} outside (0, 1e-2]")


DEFAULT_TRACE = TraceParams()


@dataclass(frozen=True)
class ReachedSigmaMin:
    point: ComplexPoint


@dataclass(frozen=True)
class TerminatedAtZero:
    zero: ComplexPoint


@dataclass(frozen=True)
class Aborted:
    reason: str


Terminal = ReachedSigmaMin | TerminatedAtZero | Aborted


@dataclass
class ContourPath:
    """A traced Im(zeta) = 0 curve.

    ``samples`` has one row per accepted point: (sigma, t, Re zeta,
    Im zeta).  ``crossing_t`` is the height at which the curve crosses
    sigma = 1/2, when it does.
    """

    k: int
    samples: np.ndarray
    terminal: Terminal
    crossing_t: float | None

    @property
    def points(self) -> list[ComplexPoint]:
        return [ComplexPoint(row[0], row[1]) for row in self.samples]

    @property
    def zeta_values(self) -> np.ndarray:
        return self.samples[:, 2] + 1j * self.samples[:, 3]


def launch_point(
    k: int,
    params: TraceParams = DEFAULT_TRACE,
    eval_params: EvalParams = DEFAULT_EVAL,
) -> ComplexPoint:
    """Newton-corrected root of Im zeta(sigma_start + it) = 0 seeded at
    t = k pi / ln 2; Re zeta > 0 there."""
    if k < 2:
        raise DomainError(f"launch index k = {k} < 2")
    sigma = params.sigma_start
    seed = k * math.pi / _LN2
    t = seed
    for _ in range(12):
        z, dz = zeta_with_derivative(complex(sigma, t), eval_params)
        step = z.imag / dz.real  # d/dt Im zeta = Re zeta'
        t -= step
        if abs(step) < 8.0 * _EPS * max(1.0, abs(t)):
            break
    else:
        raise ConvergenceFailure(f"launch Newton for k = {k} did not settle")
    if abs(t - seed) > 0.5 * math.pi / _LN2:
        raise SeedDrift(f"launch for k = {k} drifted from {seed} to {t}")
    z, _ = zeta_with_derivative(complex(sigma, t), eval_params)
    if z.real <= 0.0:
        raise SeedDrift(f"launch for k = {k} landed on Re zeta <= 0 branch")
    return ComplexPoint(sigma, t)


def _newton_zero(s: complex, eval_params: EvalParams) -> complex | None:
    """Two-dimensional Newton on zeta(s) = 0; None when it does not settle.
    Converged means the update has shrunk to a few ulps of |s|."""
    for _ in range(60):
        z, dz = zeta_with_derivative(s, eval_params)
        if dz == 0:
            return None
        delta = z / dz
        s = s - delta
        if abs(delta) < 16.0 * _EPS * max(1.0, abs(s)):
            return s
    return None


def _cross_line(
    sigma_line: float,
    a: tuple[float, float],
    b: tuple[float, float],
    eval_params: EvalParams,
) -> float:
    """Height where the contour crosses the vertical line sigma = sigma_line,
    by 1-D Newton in t seeded from the chord between accepted points."""
    frac = (sigma_line - a[0]) / (b[0] - a[0])
    t = a[1] + frac * (b[1] - a[1])
    for _ in range(20):
        z, dz = zeta_with_derivative(complex(sigma_line, t), eval_params)
        step = z.imag / dz.real
        t -= step
        if abs(step) < 8.0 * _EPS * max(1.0, abs(t)):
            return t
    raise ConvergenceFailure(f"line crossing at sigma = {sigma_line} did not settle")


def trace(
    start: ComplexPoint,
    direction: int,
    params: TraceParams = DEFAULT_TRACE,
    eval_params: EvalParams = DEFAULT_EVAL,
) -> ContourPath:
    """Continue the Im(zeta) = 0 curve through ``start``.

    direction = -1 follows decreasing sigma (leftward, toward the critical
    strip), +1 increasing sigma.  Raises StepCollapse / MaxSteps on the
    corresponding failures; these would falsify the strip structure and are
    never downgraded.
    """
    s = complex(start.sigma, start.t)
    z, dz = zeta_with_derivative(s, eval_params)
    if abs(z.imag) > params.newton_tol * max(1.0, abs(z)):
        raise DomainError(f"trace start {start} is not on Im zeta = 0")

    rows = [(s.real, s.imag, z.real, z.imag)]
    crossing_t: float | None = None
    terminal: Terminal | None = None
    prev_tangent: complex | None = None
    h = params.step
    easy = 0

    for _ in range(params.max_steps):
        grad = complex(dz.imag, dz.real)  # grad of Im zeta in (sigma, t)
        if abs(grad) == 0.0:
            raise StepCollapse(f"vanishing gradient at {s} (zeta'(s) = 0?)")
        tangent = complex(dz.real, -dz.imag) / abs(dz)
        if prev_tangent is None:
            if (tangent.real > 0) != (direction > 0):
                tangent = -tangent
        elif (
            tangent.real * prev_tangent.real + tangent.imag * prev_tangent.imag
        ) < 0.0:
            tangent = -tangent

        # keep each step well inside the Newton distance to the nearest
        # zero: adjacent Im = 0 branches squeeze to that separation near
        # close zero pairs, and larger steps can hop across
        newton_dist = abs(z) / abs(dz)
        if newton_dist < 8.0 * h:
            h = max(newton_dist / 8.0, _MIN_STEP)

        # predictor + corrector, halving until the corrector settles
        while True:
            p = s + h * tangent
            zp = dzp = None
            accepted = False
            for _ in range(4):
                zp, dzp = zeta_with_derivative(p, eval_params)
                if abs(zp.imag) < params.newton_tol * max(1.0, abs(zp)):
                    accepted = True
                    break
                g = complex(dzp.imag, dzp.real)
                g2 = g.real * g.real + g.imag * g.imag
                if g2 == 0.0:
                    break
                delta = zp.imag / g2
                p = complex(p.real - delta * g.real, p.imag - delta * g.imag)
            if accepted:
                break
            h *= 0.5
            easy = 0
            if h < _MIN_STEP:
                raise StepCollapse(
                    f"step collapsed below {_MIN_STEP} near {s}; possible "
                    "multiple zero or contour intersection"
                )

        assert zp is not None and dzp is not None
        prev_s, prev_z = s, z
        s, z, dz = p, zp, dzp
        prev_tangent = tangent

        # on-contour zero passed between accepted points: Re flips sign
        if prev_z.real * z.real < 0.0:
            mid = 0.5 * (prev_s + s)
            loc = _newton_zero(mid, eval_params)
            if loc is None:
                raise StepCollapse(f"Re zeta sign flip near {mid} but Newton failed")
            terminal = TerminatedAtZero(ComplexPoint(loc.real, loc.imag))
            break

        if abs(z) < params.zero_radius:
            loc = _newton_zero(s, eval_params)
            if loc is None:
                raise StepCollapse(f"|zeta| < zero_radius near {s} but Newton failed")
            terminal = TerminatedAtZero(ComplexPoint(loc.real, loc.imag))
            break

        if crossing_t is None and (prev_s.real - 0.5) * (s.real - 0.5) <= 0.0:
            crossing_t = _cross_line(
                0.5, (prev_s.real, prev_s.imag), (s.real, s.imag), eval_params
            )

        if s.real <= params.sigma_min:
            rows.append((s.real, s.imag, z.real, z.imag))
            terminal = ReachedSigmaMin(ComplexPoint(s.real, s.imag))
            break

        rows.append((s.real, s.imag, z.real, z.imag))

        if s.real >= SIGMA_MAX - 0.01:
            terminal = Aborted("window_edge")
            break

        if abs(z) < 10.0 * params.zero_radius:
            h = max(0.5 * h, _MIN_STEP)
            easy = 0
        else:
            easy += 1
            if easy >= 5:
                h = min(params.step, 2.0 * h)
                easy = 0
    else:
        raise MaxSteps(f"trace from {start} exceeded {params.max_steps} steps")

    return ContourPath(
        k=0,
        samples=np.array(rows, dtype=np.float64),
        terminal=terminal,
        crossing_t=crossing_t,
    )


def _trace_from_launch(
    k: int, params: TraceParams, eval_params: EvalParams
) -> ContourPath:
    """Trace leftward from launch index k, retrying at a finer step when
    the terminal type contradicts the launch parity.

    Even k must cross the critical line and reach sigma_min; odd k must
    terminate at a zero.  A contradiction at the default step means the
    trace hopped branches inside a close-pair squeeze; the retry tightens
    the step the same way the zero scan refines its grid.  A contradiction
    that survives the finest step is surfaced by the callers.
    """
    start = launch_point(k, params, eval_params)
    expect_zero = bool(k % 2)
    path = trace(start, -1, params, eval_params)
    path.k = k
    for shrink in (4.0, 16.0):
        if isinstance(path.terminal, TerminatedAtZero) == expect_zero:
            break
        finer = replace(params, step=params.step / shrink)
        path = trace(start, -1, finer, eval_params)
        path.k = k
    return path


@lru_cache(maxsize=4096)
def _cached_boundary(
    m: int, params: TraceParams, eval_params: EvalParams
) -> tuple[float, float]:
    """(crossing height, min |zeta| from launch to crossing) for the
    boundary contour of strip m."""
    path = _trace_from_launch(2 * m, params, eval_params)
    if isinstance(path.terminal, TerminatedAtZero):
        raise NotSpecial(
            f"boundary contour k = {2 * m} terminated at a zero "
            f"{path.terminal.zero}; strip structure falsified"
        )
    if path.crossing_t is None:
        raise NotSpecial(f"boundary contour k = {2 * m} never crossed sigma = 1/2")
    right = path.samples[path.samples[:, 0] >= 0.5]
    min_abs = float(np.min(np.hypot(right[:, 2], right[:, 3])))
    return path.crossing_t, min_abs


def special_gram_point(
    m: int,
    params: TraceParams = DEFAULT_TRACE,
    eval_params: EvalParams = DEFAULT_EVAL,
) -> float:
    """Critical-line crossing height of the m-th strip-boundary contour.

    Asserts the crossing coincides with a Gram point (Re zeta > 0 there by
    construction of the launch branch) and that the contour stayed clear of
    zeros between launch and crossing.
    """
    if m < 1:
        raise DomainError(f"strip boundary index m = {m} < 1")
    crossing, min_abs = _cached_boundary(m, params, eval_params)
    if min_abs <= params.zero_radius:
        raise NotSpecial(
            f"boundary contour k = {2 * m} passed within {min_abs:.2e} of a zero"
        )
    residual = rs_theta(crossing) / math.pi
    if abs(residual - round(residual)) > 1e-6:
        raise NotSpecial(
            f"boundary crossing {crossing} is not a Gram point "
            f"(theta/pi residual {residual - round(residual):.2e})"
        )
    return crossing


@lru_cache(maxsize=4096)
def _cached_primary(
    m: int, params: TraceParams, eval_params: EvalParams
) -> tuple[float, float]:
    path = _trace_from_launch(2 * m + 1, params, eval_params)
    if isinstance(path.terminal, ReachedSigmaMin):
        raise NoTerminalZero(
            f"primary contour k = {2 * m + 1} reached sigma_min without a zero"
        )
    if not isinstance(path.terminal, TerminatedAtZero):
        raise NoTerminalZero(
            f"primary contour k = {2 * m + 1} ended as {path.terminal}"
        )
    zero = path.terminal.zero
    return zero.sigma, zero.t


def primary_zero_of_strip(
    m: int,
    params: TraceParams = DEFAULT_TRACE,
    eval_params: EvalParams = DEFAULT_EVAL,
    *,
    check_containment: bool = True,
) -> ComplexPoint:
    """Terminal zero of the contour launched at height (2m+1) pi / ln 2.

    The zero must lie on the critical line to 1e-6 and strictly inside
    strip m; violations raise EscapedStrip.
    """
    if m < 1:
        raise DomainError(f"strip index m = {m} < 1")
    sigma, t = _cached_primary(m, params, eval_params)
    if abs(sigma - 0.5) > 1e-6:
        raise EscapedStrip(
            f"primary zero of strip {m} at sigma = {sigma} is off the critical line"
        )
    if check_containment:
        bottom = special_gram_point(m, params, eval_params)
        top = special_gram_point(m + 1, params, eval_params)
        if not bottom < t < top:
            raise EscapedStrip(
                f"primary zero height {t} outside strip {m} = [{bottom}, {top})"
            )
    return ComplexPoint(sigma, t)


def unwrap_phase(path: ContourPath, zero_radius: float = 1e-4) -> np.ndarray:
    """Continuously unwrapped arg zeta along the path, anchored at the
    launch end where zeta is within 2^-sigma_start of 1.

    Raises PhaseJump when consecutive raw phases differ by >= pi, which
    signals sampling too coarse to unwrap; DomainError when the path holds
    a point with |zeta| < zero_radius (phase undefined that close to a
    zero)."""
    if path.samples.shape[0] == 0:
        raise DomainError("cannot unwrap an empty path")
    mags = np.hypot(path.samples[:, 2], path.samples[:, 3])
    if np.min(mags) < zero_radius:
        raise DomainError("path holds a point with |zeta| below zero_radius")
    raw = np.arctan2(path.samples[:, 3], path.samples[:, 2])
    deltas = np.diff(raw)
    deltas = (deltas + math.pi) % (2.0 * math.pi) - math.pi
    if deltas.size and np.max(np.abs(deltas)) >= math.pi - 1e-9:
        raise PhaseJump("consecutive phase samples differ by >= pi; refine the step")
    return np.concatenate(([raw[0]], raw[0] + np.cumsum(deltas)))


def verify_boundary_is_gram(crossing: float, tol: float = 1e-6) -> int:
    """Cross-module check: the crossing height must match a Gram-table
    entry; returns the Gram index."""
    idx = default_table().index_near(crossing, tol)
    if idx is None:
        raise NotSpecial(f"crossing {crossing} does not match a Gram-table entry")
    return idx


def dump_csv(path: ContourPath, directory: Path | str) -> Path:
    """Write the path as contour_k<k>.csv (sigma,t,re_zeta,im_zeta)."""
    target = Path(directory) / f"contour_k{path.k}.csv"
    lines = ["sigma,t,re_zeta,im_zeta"]
    for sigma, t, re, im in path.samples:
        lines.append(f"{sigma:.12g},{t:.12g},{re:.12g},{im:.12g}")
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target
