"""Numerical laboratory for almost periods of quasiperiodic signals.

Certified almost-period sets and inclusion lengths on scan windows, growth
exponents of the inclusion length, continued fractions and badly-approximable
scores for the exponents, and covering-number dimension estimates of the
signal hull modeled on the torus.
"""
from .precision import set_working_precision

set_working_precision()

from .errors import (  # noqa: E402
    BudgetExceeded,
    ConfigError,
    EmptyAlmostPeriodSet,
    GridTooCoarse,
    PrecisionExhausted,
    QplabError,
    SignalParseError,
    StepTooCoarse,
    TooFewSamples,
    TooFewScales,
)
from .signal import (  # noqa: E402
    QuasiperiodicSignal,
    evaluate,
    lipschitz_constant,
    parse_signal,
    preset,
    sup_oracle,
    translation_distance,
)

__version__ = "0.1.0"

__all__ = [
    "QuasiperiodicSignal",
    "evaluate",
    "translation_distance",
    "lipschitz_constant",
    "sup_oracle",
    "preset",
    "parse_signal",
    "QplabError",
    "BudgetExceeded",
    "StepTooCoarse",
    "GridTooCoarse",
    "EmptyAlmostPeriodSet",
    "TooFewSamples",
    "TooFewScales",
    "PrecisionExhausted",
    "SignalParseError",
    "ConfigError",
    "set_working_precision",
    "__version__",
]
