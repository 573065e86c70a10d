"""Shared oracle helpers.

Oracles are independent of the code paths they check: direct Dirichlet
summation for sigma > 1, interval bisection on sign changes for roots, and
central finite differences for derivatives.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
import pytest


def direct_sum_zeta(s: complex, n_terms: int) -> complex:
    """Partial sum of n^-s; a valid zeta oracle only for Re(s) > 1."""
    ns = np.arange(1, n_terms + 1, dtype=np.float64)
    return complex(np.exp(-s * np.log(ns)).sum())


def bisect_root(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12
) -> float:
    """Plain bisection on a sign change; f(lo) and f(hi) must differ in sign."""
    f_lo, f_hi = f(lo), f(hi)
    assert f_lo * f_hi < 0.0, f"no bracket on [{lo}, {hi}]"
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_lo * f_mid <= 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def central_diff(f: Callable[[complex], complex], s: complex, h: float = 1e-6) -> complex:
    return (f(s + h) - f(s - h)) / (2.0 * h)


@pytest.fixture(scope="session")
def rng() -> np.random.Generator:
    return np.random.default_rng(987654321)


# Known critical-line zero ordinates, frozen from bisection of the Hardy
# function (cross-checked against mpmath.zetazero during development).
FIRST_ZEROS = [
    14.134725141734694,
    21.022039638771555,
    25.010857580145688,
    30.424876125859513,
    32.935061587739190,
    37.586178158825671,
    40.918719012147495,
]

TWO_PI = 2.0 * math.pi
LN2 = math.log(2.0)
