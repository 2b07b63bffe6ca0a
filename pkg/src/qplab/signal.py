"""Quasiperiodic trigonometric sums and their translation-distance function.

A signal is a finite sum of complex harmonics A_j * exp(i*lambda_j*t). The
translation distance D(tau) = sum_j 2*|A_j|*|sin(lambda_j*tau/2)| measures how
far the tau-translate moves the signal in the uniform norm: it is always an
upper bound for sup_t |f(t+tau) - f(t)|, and equals it when the exponents are
rationally independent.
"""
from __future__ import annotations

import math
import re
from itertools import product
from typing import Iterable, Sequence

import numpy as np
from mpmath import mp, mpf

from .errors import BudgetExceeded, SignalParseError
from .precision import as_mpf, golden_ratio, sqrt2, sqrt3, two_pi

DEFAULT_MAX_ORACLE_POINTS = 2**26
_CHUNK = 2**21

_TERM_RE = re.compile(
    r"^\s*([+-]?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)"
    r"([+-]\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)i"
    r"@([+-]?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)\s*$"
)

PRESET_NAMES = ("golden", "golden1", "sqrt23")


class QuasiperiodicSignal:
    """Finite trigonometric sum with nonzero amplitudes and distinct exponents.

    ``independence_claimed`` records the caller's assertion that the exponents
    are rationally independent; it cannot be verified from finite-precision
    input and is never certified here.
    """

    __slots__ = ("terms", "independence_claimed", "label", "_amps", "_lams")

    def __init__(
        self,
        terms: Iterable[tuple[complex, object]],
        independence_claimed: bool | None = None,
        label: str = "",
    ):
        normalized: list[tuple[complex, mpf]] = []
        for amp, lam in terms:
            amp = complex(amp)
            lam = as_mpf(lam)
            if amp == 0:
                raise ValueError("zero amplitude term")
            if lam == 0:
                raise ValueError("zero exponent term")
            normalized.append((amp, lam))
        if not normalized:
            raise ValueError("signal needs at least one term")
        exponents = [lam for _, lam in normalized]
        if len({str(lam) for lam in exponents}) != len(exponents):
            raise ValueError("exponents must be pairwise distinct")
        self.terms: tuple[tuple[complex, mpf], ...] = tuple(normalized)
        if independence_claimed is None:
            # a single nonzero exponent is trivially independent
            independence_claimed = len(normalized) == 1
        self.independence_claimed = bool(independence_claimed)
        self.label = label
        self._amps = np.array([a for a, _ in self.terms], dtype=np.complex128)
        self._lams = np.array([float(l) for _, l in self.terms], dtype=np.float64)

    @property
    def n(self) -> int:
        return len(self.terms)

    @property
    def amplitude_moduli(self) -> np.ndarray:
        return np.abs(self._amps)

    @property
    def exponents_float(self) -> np.ndarray:
        return self._lams

    @property
    def exponents(self) -> tuple[mpf, ...]:
        return tuple(lam for _, lam in self.terms)

    def describe(self) -> str:
        if self.label:
            return self.label
        parts = [f"{a.real:g}{a.imag:+g}i@{float(l):.17g}" for a, l in self.terms]
        return ",".join(parts)

    def __repr__(self) -> str:
        return f"QuasiperiodicSignal({self.describe()!r}, n={self.n})"


def preset(name: str) -> QuasiperiodicSignal:
    """Named signals built from constants at full working precision."""
    tp = two_pi()
    if name in ("golden", "golden1"):
        return QuasiperiodicSignal(
            [(1, tp), (1, tp * golden_ratio())], independence_claimed=True, label=name
        )
    if name == "sqrt23":
        return QuasiperiodicSignal(
            [(1, tp), (1, tp * sqrt2()), (1, tp * sqrt3())],
            independence_claimed=True,
            label=name,
        )
    raise SignalParseError(f"unknown preset {name!r}")


def parse_signal(text: str) -> QuasiperiodicSignal:
    """Parse a comma-separated list of ``RE(+|-)IMi@LAMBDA`` terms or a preset name.

    Example: ``1+0i@6.283,2-1i@1.0``. Raises SignalParseError with the
    character position of the offending term.
    """
    stripped = text.strip()
    if not stripped:
        raise SignalParseError("empty signal literal", 0)
    if stripped in PRESET_NAMES:
        return preset(stripped)
    terms: list[tuple[complex, mpf]] = []
    offset = 0
    for piece in text.split(","):
        match = _TERM_RE.match(piece)
        if match is None:
            raise SignalParseError(f"malformed term {piece.strip()!r}", offset)
        re_part, im_part, lam_part = match.groups()
        amp = complex(float(re_part), float(im_part))
        if amp == 0:
            raise SignalParseError("zero amplitude", offset)
        lam = as_mpf(lam_part)
        if lam == 0:
            raise SignalParseError("zero exponent", offset)
        terms.append((amp, lam))
        offset += len(piece) + 1
    try:
        return QuasiperiodicSignal(terms, independence_claimed=None, label=text.strip())
    except ValueError as exc:
        raise SignalParseError(str(exc)) from exc


def evaluate(f: QuasiperiodicSignal, t: float) -> complex:
    """Value of the signal at time t, summed in fixed term order."""
    acc = 0j
    for amp, lam in zip(f._amps, f._lams):
        acc += amp * complex(math.cos(lam * t), math.sin(lam * t))
    return acc


def evaluate_many(f: QuasiperiodicSignal, t: np.ndarray) -> np.ndarray:
    """Vectorized signal values; same term-order summation as evaluate."""
    acc = np.zeros(t.shape, dtype=np.complex128)
    for amp, lam in zip(f._amps, f._lams):
        acc += amp * np.exp(1j * (lam * t))
    return acc


def translation_distance(f: QuasiperiodicSignal, tau: float) -> float:
    """D(tau) = sum_j 2|A_j| |sin(lambda_j tau / 2)|, summed in fixed term order."""
    acc = 0.0
    for amp, lam in zip(f._amps, f._lams):
        acc += 2.0 * abs(amp) * abs(math.sin(lam * tau * 0.5))
    return acc


def translation_distance_many(f: QuasiperiodicSignal, taus: np.ndarray) -> np.ndarray:
    """Vectorized D over an array of translations, fixed term order."""
    acc = np.zeros(taus.shape, dtype=np.float64)
    for amp, lam in zip(f._amps, f._lams):
        acc += (2.0 * abs(amp)) * np.abs(np.sin((lam * 0.5) * taus))
    return acc


def lipschitz_constant(f: QuasiperiodicSignal) -> float:
    """C = sum_j |A_j| |lambda_j|; bounds |f(t)-f(s)| and |D(t)-D(s)| by C|t-s|."""
    return float(sum(abs(a) * abs(l) for a, l in zip(f._amps, f._lams)))


def sup_oracle(
    f: QuasiperiodicSignal,
    tau: float,
    horizon: float,
    grid_step: float,
    max_points: int = DEFAULT_MAX_ORACLE_POINTS,
) -> float:
    """Brute-force grid maximum of |f(t+tau) - f(t)| over t in [0, horizon].

    A lower bound for the uniform translation distance; converges upward to
    D(tau) as the horizon grows and the step shrinks when the exponents are
    rationally independent.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    npts = int(math.floor(horizon / grid_step)) + 1
    if npts > max_points:
        raise BudgetExceeded(
            f"oracle grid needs {npts} points, cap is {max_points}"
        )
    # f(t+tau) - f(t) = sum_j B_j e^{i lambda_j t} with B_j = A_j (e^{i lambda_j tau} - 1)
    coeffs = f._amps * (np.exp(1j * f._lams * tau) - 1.0)
    best = 0.0
    for start in range(0, npts, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, npts), dtype=np.float64)
        t = k * grid_step
        acc = np.zeros(t.shape, dtype=np.complex128)
        for b, lam in zip(coeffs, f._lams):
            acc += b * np.exp(1j * (lam * t))
        best = max(best, float(np.max(np.abs(acc))))
    return best


def suspected_rational_relation(
    exponents: Sequence[object],
    max_coeff: int = 6,
    rel_tol: float = 1e-9,
) -> tuple[int, ...] | None:
    """Small-integer-relation heuristic for the exponent list.

    Returns coefficients c with |sum c_j lambda_j| < rel_tol * max|lambda| if
    any exist in the searched box, else None. A heuristic warning only: absence
    of a small relation certifies nothing.
    """
    lams = [as_mpf(x) for x in exponents]
    n = len(lams)
    if n > 4:
        raise ValueError("relation search supports at most 4 exponents")
    scale = max(abs(l) for l in lams)
    bound = mpf(rel_tol) * scale
    for coeffs in product(range(-max_coeff, max_coeff + 1), repeat=n):
        if all(c == 0 for c in coeffs):
            continue
        first = next(c for c in coeffs if c != 0)
        if first < 0:
            continue  # canonical sign
        combo = mpf(0)
        for c, lam in zip(coeffs, lams):
            combo += c * lam
        if abs(combo) < bound:
            return coeffs
    return None


