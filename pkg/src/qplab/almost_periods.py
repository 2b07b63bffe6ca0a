"""Certified almost-period sets, inclusion lengths, and growth-exponent fits.

A tau with D(tau) < eps is an eps-almost period (D from qplab.signal). The
scan brackets the sublevel set {D < eps} on a window between an inner union of
intervals (certified members, via the Lipschitz bound) and an outer union
(certified to contain every member). Gap statistics of the two unions bracket
the inclusion length, and log-log regression of inclusion length against 1/eps
estimates its growth exponent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, EmptyAlmostPeriodSet, StepTooCoarse, TooFewSamples
from .signal import QuasiperiodicSignal, lipschitz_constant, translation_distance_many

DEFAULT_MAX_GRID_POINTS = 2**29
_CHUNK = 2**21


@dataclass(frozen=True)
class IntervalSet:
    """Inner/outer interval approximations of the eps-almost-period set on a window."""

    window: tuple[float, float]
    inner: tuple[tuple[float, float], ...]
    outer: tuple[tuple[float, float], ...]
    step: float
    eps: float

    def __post_init__(self):
        lo, hi = self.window
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        for seq in (self.inner, self.outer):
            prev = lo
            for a, b in seq:
                if a > b or a < lo - tol or b > hi + tol:
                    raise ValueError("interval outside window or inverted")
                if a < prev - tol:
                    raise ValueError("intervals not sorted/disjoint")
                prev = b
        for a, b in self.inner:
            if not any(c <= a + tol and b - tol <= d for c, d in self.outer):
                raise ValueError("inner interval not contained in any outer interval")


@dataclass(frozen=True)
class LengthSample:
    eps: float
    L_lower: float
    L_upper: float
    window_used: float
    resolved: bool


@dataclass(frozen=True)
class LengthCurve:
    """(eps, inclusion-length bounds) samples for one signal, eps strictly decreasing."""

    samples: tuple[LengthSample, ...]
    signal_id: str

    def __post_init__(self):
        eps_values = [s.eps for s in self.samples]
        if any(b >= a for a, b in zip(eps_values, eps_values[1:])):
            raise ValueError("eps values must be strictly decreasing")
        for s in self.samples:
            if s.resolved and not (0 <= s.L_lower <= s.L_upper):
                raise ValueError("need 0 <= L_lower <= L_upper")

    def resolved_samples(self) -> tuple[LengthSample, ...]:
        return tuple(s for s in self.samples if s.resolved)


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares slope of ln L against ln(1/eps), plus the pointwise max ratio."""

    slope: float
    intercept: float
    residual: float
    eps_range: tuple[float, float]
    max_ratio: float


@dataclass(frozen=True)
class WindowPolicy:
    """Adaptive scan-window policy for length curves.

    The window starts at ``initial_width`` (default 4/eps) and doubles until
    the outer set has at least ``min_hits`` intervals, the window covers
    everything, or ``max_doublings`` is reached.
    """

    initial_width: float | None = None
    min_hits: int = 5
    max_doublings: int = 20


def sublevel_scan(
    f: QuasiperiodicSignal,
    eps: float,
    window: tuple[float, float],
    step: float,
    max_grid_points: int = DEFAULT_MAX_GRID_POINTS,
) -> IntervalSet:
    """Bracket {tau in window : D(tau) < eps} between inner and outer intervals.

    With C the Lipschitz constant of D and h the actual grid step, a grid
    point with D < eps - C*h certifies the closed step-neighborhood around it
    (inner), and every member of the sublevel set lies within h/2 of a grid
    point with D < eps + C*h (outer). Requires step <= eps/(4C).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if step <= 0:
        raise ValueError("step must be positive")
    lo, hi = window
    if not hi > lo:
        raise ValueError("window must have positive width")
    C = lipschitz_constant(f)
    if step > eps / (4.0 * C):
        raise StepTooCoarse(
            f"step {step:g} exceeds eps/(4C) = {eps / (4.0 * C):g}"
        )
    m = int(math.ceil((hi - lo) / step))
    if m + 1 > max_grid_points:
        raise BudgetExceeded(f"scan grid needs {m + 1} points, cap is {max_grid_points}")
    h = (hi - lo) / m
    inner_cut = eps - C * h
    outer_cut = eps + C * h

    inner_runs: list[tuple[int, int]] = []
    outer_runs: list[tuple[int, int]] = []
    open_inner = -1
    open_outer = -1
    for start in range(0, m + 1, _CHUNK):
        stop = min(start + _CHUNK, m + 1)
        idx = np.arange(start, stop, dtype=np.float64)
        d = translation_distance_many(f, lo + idx * h)
        inner_mask = d < inner_cut
        outer_mask = d < outer_cut
        open_inner = _collect_runs(inner_mask, start, open_inner, inner_runs)
        open_outer = _collect_runs(outer_mask, start, open_outer, outer_runs)
    if open_inner >= 0:
        inner_runs.append((open_inner, m))
    if open_outer >= 0:
        outer_runs.append((open_outer, m))

    inner = _runs_to_intervals(inner_runs, lo, hi, h, halfwidth=h)
    outer = _runs_to_intervals(outer_runs, lo, hi, h, halfwidth=0.5 * h)
    return IntervalSet(window=(lo, hi), inner=inner, outer=outer, step=h, eps=eps)


def _collect_runs(
    mask: np.ndarray, offset: int, open_start: int, runs: list[tuple[int, int]]
) -> int:
    """Append finished True-runs of a chunked mask; return the still-open start."""
    if mask.size == 0:
        return open_start
    state = open_start >= 0
    start = open_start
    ext = np.empty(mask.size + 1, dtype=bool)
    ext[0] = state
    ext[1:] = mask
    for i in np.flatnonzero(ext[1:] != ext[:-1]):
        gi = offset + int(i)
        if state:
            runs.append((start, gi - 1))
            state = False
        else:
            start = gi
            state = True
    return start if state else -1


def _runs_to_intervals(
    runs: list[tuple[int, int]], lo: float, hi: float, h: float, halfwidth: float
) -> tuple[tuple[float, float], ...]:
    """Index runs -> clipped merged intervals, endpoints computed from indices."""
    intervals: list[tuple[float, float]] = []
    for i0, i1 in runs:
        a = max(lo, lo + i0 * h - halfwidth)
        b = min(hi, lo + i1 * h + halfwidth)
        if intervals and a <= intervals[-1][1] + 1e-12 * max(1.0, abs(hi)):
            intervals[-1] = (intervals[-1][0], max(intervals[-1][1], b))
        else:
            intervals.append((a, b))
    return tuple(intervals)


def _max_gap(intervals: Sequence[tuple[float, float]], window: tuple[float, float]) -> float:
    """Largest uncovered stretch, window edges counting as gap endpoints."""
    lo, hi = window
    if not intervals:
        return hi - lo
    gaps = [intervals[0][0] - lo]
    for (_, b), (a, _) in zip(intervals, intervals[1:]):
        gaps.append(a - b)
    gaps.append(hi - intervals[-1][1])
    return max(0.0, max(gaps))


def inclusion_length(s: IntervalSet) -> tuple[float, float]:
    """Bracket the inclusion length of the almost-period set on the window.

    The outer intervals over-cover the set, so their largest gap is a lower
    bound for the true largest gap; the inner intervals under-cover it, so
    their largest gap is an upper bound. Returns (L_lower, L_upper).
    """
    if not s.outer:
        raise EmptyAlmostPeriodSet(
            f"no almost period found in window {s.window}; enlarge the window"
        )
    return _max_gap(s.outer, s.window), _max_gap(s.inner, s.window)


def length_curve(
    f: QuasiperiodicSignal,
    eps_list: Sequence[float],
    policy: WindowPolicy = WindowPolicy(),
    max_grid_points: int = DEFAULT_MAX_GRID_POINTS,
) -> LengthCurve:
    """Inclusion-length bounds per eps with an adaptively grown scan window.

    A budget overrun on one eps marks that sample unresolved instead of
    failing the whole curve.
    """
    eps_values = list(eps_list)
    if not eps_values or any(e <= 0 for e in eps_values):
        raise ValueError("eps values must be positive")
    if any(b >= a for a, b in zip(eps_values, eps_values[1:])):
        raise ValueError("eps values must be strictly decreasing")
    C = lipschitz_constant(f)
    samples = []
    for eps in eps_values:
        width = policy.initial_width if policy.initial_width is not None else 4.0 / eps
        step = eps / (4.0 * C)
        sample = None
        for _ in range(policy.max_doublings + 1):
            try:
                scan = sublevel_scan(f, eps, (0.0, width), step, max_grid_points)
            except BudgetExceeded:
                break
            L_lower, L_upper = inclusion_length(scan)
            sample = LengthSample(eps, L_lower, L_upper, width, True)
            whole_window = (
                len(scan.outer) == 1
                and scan.outer[0][0] <= scan.window[0]
                and scan.outer[0][1] >= scan.window[1]
            )
            if len(scan.outer) >= policy.min_hits or whole_window:
                break
            width *= 2.0
        if sample is None:
            sample = LengthSample(eps, math.nan, math.nan, width, False)
        samples.append(sample)
    return LengthCurve(samples=tuple(samples), signal_id=f.describe())


def fit_exponent(curve: LengthCurve) -> ExponentFit:
    """Growth exponent of the inclusion length from a log-log least-squares fit.

    Fits ln(L_upper) against ln(1/eps) over resolved samples with positive
    length; also reports the pointwise maximum of ln L / ln(1/eps) over the
    same samples as a finite-scale stand-in for the limiting ratio.
    """
    usable = [s for s in curve.resolved_samples() if s.L_upper > 0]
    if len(usable) < 3:
        raise TooFewSamples(f"need >= 3 resolved samples with L > 0, have {len(usable)}")
    x = np.array([math.log(1.0 / s.eps) for s in usable])
    y = np.array([math.log(s.L_upper) for s in usable])
    xm = x.mean()
    ym = y.mean()
    denom = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum() / denom)
    intercept = float(ym - slope * xm)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    ratios = [yi / xi for xi, yi in zip(x, y) if abs(xi) > 1e-9]
    max_ratio = max(ratios) if ratios else math.nan
    return ExponentFit(
        slope=slope,
        intercept=intercept,
        residual=residual,
        eps_range=(usable[0].eps, usable[-1].eps),
        max_ratio=max_ratio,
    )
