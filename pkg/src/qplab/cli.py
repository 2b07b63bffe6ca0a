"""Command-line front end.

Subcommands: eval, scan, length-curve, di-fit, cf, badness, simdenom,
kronecker, dimension, verify. Exit codes: 0 success, 1 input error, 2 budget
exhaustion, 3 verification-suite failure. Every report embeds the resolved
configuration, and identical configurations produce byte-identical output.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

from mpmath import mp

from . import verify as verify_mod
from .almost_periods import (
    WindowPolicy,
    fit_exponent,
    inclusion_length,
    length_curve,
    sublevel_scan,
)
from .diophantine import (
    badness_score,
    best_simultaneous_denominator,
    cf_expand,
    convergents,
    kronecker_residuals,
    kronecker_solve,
)
from .dimension import dimension_fit, equivalence_constants, hull_dimension_report
from .errors import BudgetExceeded, ConfigError, QplabError, SignalParseError
from .precision import golden_ratio, set_working_precision, sqrt2, sqrt3
from .reports import render_csv, render_json, write_text
from .signal import (
    evaluate,
    lipschitz_constant,
    parse_signal,
    suspected_rational_relation,
)

COMMANDS = (
    "eval",
    "scan",
    "length-curve",
    "di-fit",
    "cf",
    "badness",
    "simdenom",
    "kronecker",
    "dimension",
    "verify",
)

_CONSTANTS = {
    "phi": golden_ratio,
    "sqrt2": sqrt2,
    "sqrt3": sqrt3,
    "pi": lambda: mp.pi,
    "2pi": lambda: 2 * mp.pi,
}


@dataclass
class RunConfig:
    """Resolved options for one invocation; embedded verbatim in reports."""

    command: str
    signal: str | None = None
    eps: str | None = None
    window: str | None = None
    step: float | None = None
    t: float | None = None
    depth: int = 30
    x: str | None = None
    alpha: str | None = None
    delta: float | None = None
    qmax: int = 100000
    kappa: str | None = None
    tmax: float = 100.0
    grid: int = 2**29
    seed: int = 7
    suite: str = "golden"
    initial_width: float | None = None
    min_hits: int = 5
    max_doublings: int = 20
    precision_bits: int | None = None
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        for name in ("depth", "qmax", "grid", "min_hits", "max_doublings"):
            if getattr(self, name) is not None and getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.tmax is not None and self.tmax <= 0:
            raise ConfigError("tmax must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


def parse_constant(token: str):
    """A number token: named constant, p/q rational, or decimal literal."""
    token = token.strip()
    if token in _CONSTANTS:
        return _CONSTANTS[token]()
    if "/" in token:
        num, _, den = token.partition("/")
        try:
            return Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad rational {token!r}") from exc
    try:
        return mp.mpf(token)
    except ValueError as exc:
        raise ConfigError(f"bad number {token!r}") from exc


def parse_constant_list(text: str) -> list:
    return [parse_constant(tok) for tok in text.split(",") if tok.strip()]


def parse_eps_spec(text: str) -> list[float]:
    """Either a comma list of decreasing eps values or ``start:count:factor``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("eps range must be start:count:factor")
        try:
            start, count, factor = float(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ConfigError(f"bad eps range {text!r}") from exc
        if start <= 0 or count < 1 or factor <= 1:
            raise ConfigError("eps range needs start > 0, count >= 1, factor > 1")
        return [start * factor**-k for k in range(count)]
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad eps list {text!r}") from exc
    if not values:
        raise ConfigError("empty eps list")
    return values


def parse_window_spec(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError("window must be lo:hi")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"bad window {text!r}") from exc
    if hi <= lo:
        raise ConfigError("window must have positive width")
    return lo, hi


def read_config_file(path: str) -> dict:
    """Plain ``key = value`` lines with ``#`` comments; unknown keys rejected."""
    known = {f.name for f in fields(RunConfig)}
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key not in known or key == "command":
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


_INT_KEYS = {"depth", "qmax", "grid", "seed", "min_hits", "max_doublings", "precision_bits"}
_FLOAT_KEYS = {"step", "t", "delta", "tmax", "initial_width"}


def _coerce(key: str, value: str):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return value


def build_config(args: argparse.Namespace) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    kwargs: dict = {"command": args.command}
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        cli_value = getattr(args, f.name, None)
        if cli_value is not None:
            kwargs[f.name] = cli_value
        elif f.name in file_values:
            kwargs[f.name] = _coerce(f.name, file_values[f.name])
    return RunConfig(**kwargs)


def _parse_signal_checked(text: str):
    """Parse a signal literal; warn on stderr if a small integer relation
    between the exponents is detected (heuristic only, never certified)."""
    f = parse_signal(text)
    if f.n > 1 and f.n <= 4:
        relation = suspected_rational_relation(f.exponents)
        if relation is not None:
            print(
                f"warning: exponents admit a small integer relation {relation}; "
                "they may not be rationally independent",
                file=sys.stderr,
            )
    return f


def _window_policy(config: RunConfig) -> WindowPolicy:
    return WindowPolicy(
        initial_width=config.initial_width,
        min_hits=config.min_hits,
        max_doublings=config.max_doublings,
    )


def _require(config: RunConfig, *names: str) -> None:
    for name in names:
        if getattr(config, name) is None:
            raise ConfigError(f"{config.command} requires --{name.replace('_', '-')}")


def _emit(config: RunConfig, payload: dict, columns=None, rows=None) -> None:
    if config.format == "csv" and columns is not None:
        text = render_csv(columns, rows, header_comments=_flat_config(config))
    else:
        payload = dict(payload)
        payload["config"] = config.as_dict()
        text = render_json(payload)
    write_text(text, config.out)


def _flat_config(config: RunConfig) -> dict:
    return {k: v for k, v in config.as_dict().items() if v is not None}


def _cmd_eval(config: RunConfig) -> int:
    _require(config, "signal", "t")
    f = _parse_signal_checked(config.signal)
    value = evaluate(f, config.t)
    payload = {
        "t": config.t,
        "re": value.real,
        "im": value.imag,
        "abs": abs(value),
    }
    _emit(config, payload, columns=("t", "re", "im", "abs"), rows=[payload])
    return 0


def _cmd_scan(config: RunConfig) -> int:
    _require(config, "signal", "eps", "window")
    eps_values = parse_eps_spec(config.eps)
    if len(eps_values) != 1:
        raise ConfigError("scan takes a single eps")
    eps = eps_values[0]
    window = parse_window_spec(config.window)
    f = _parse_signal_checked(config.signal)
    step = config.step if config.step is not None else eps / (4.0 * lipschitz_constant(f))
    scan = sublevel_scan(f, eps, window, step, max_grid_points=config.grid)
    L_lower, L_upper = inclusion_length(scan)
    payload = {
        "eps": eps,
        "window": list(scan.window),
        "step": scan.step,
        "inner": [list(iv) for iv in scan.inner],
        "outer": [list(iv) for iv in scan.outer],
        "L_lower": L_lower,
        "L_upper": L_upper,
    }
    rows = [{"kind": "inner", "lo": a, "hi": b} for a, b in scan.inner]
    rows += [{"kind": "outer", "lo": a, "hi": b} for a, b in scan.outer]
    _emit(config, payload, columns=("kind", "lo", "hi"), rows=rows)
    return 0


def _curve_rows(curve) -> list[dict]:
    return [
        {
            "eps": s.eps,
            "L_lower": s.L_lower,
            "L_upper": s.L_upper,
            "window": s.window_used,
            "resolved": s.resolved,
        }
        for s in curve.samples
    ]


def _cmd_length_curve(config: RunConfig) -> int:
    _require(config, "signal", "eps")
    f = _parse_signal_checked(config.signal)
    curve = length_curve(
        f,
        parse_eps_spec(config.eps),
        policy=_window_policy(config),
        max_grid_points=config.grid,
    )
    rows = _curve_rows(curve)
    payload = {"signal_id": curve.signal_id, "samples": rows}
    _emit(
        config,
        payload,
        columns=("eps", "L_lower", "L_upper", "window", "resolved"),
        rows=rows,
    )
    return 0


def _cmd_di_fit(config: RunConfig) -> int:
    _require(config, "signal", "eps")
    f = _parse_signal_checked(config.signal)
    curve = length_curve(
        f,
        parse_eps_spec(config.eps),
        policy=_window_policy(config),
        max_grid_points=config.grid,
    )
    fit = fit_exponent(curve)
    rows = _curve_rows(curve)
    payload = {
        "signal_id": curve.signal_id,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual": fit.residual,
        "max_ratio": fit.max_ratio,
        "eps_range": list(fit.eps_range),
        "samples": rows,
    }
    _emit(
        config,
        payload,
        columns=("eps", "L_lower", "L_upper", "window", "resolved"),
        rows=rows,
    )
    return 0


def _cmd_cf(config: RunConfig) -> int:
    _require(config, "x")
    cf = cf_expand(parse_constant(config.x), config.depth)
    pairs = convergents(cf, len(cf.quotients))
    payload = {
        "a0": cf.a0,
        "quotients": list(cf.quotients),
        "convergents": [[str(p), str(q)] for p, q in pairs],
        "exact": cf.exact,
        "error_bound": float(cf.error_bound) if cf.error_bound is not None else None,
    }
    rows = [{"k": k, "p": str(p), "q": str(q)} for k, (p, q) in enumerate(pairs)]
    _emit(config, payload, columns=("k", "p", "q"), rows=rows)
    return 0


def _cmd_badness(config: RunConfig) -> int:
    _require(config, "alpha")
    report = badness_score(parse_constant_list(config.alpha), config.qmax)
    payload = {
        "n": report.n,
        "Q": report.Q,
        "score": report.score,
        "argmin_q": report.argmin_q,
    }
    _emit(config, payload, columns=("n", "Q", "score", "argmin_q"), rows=[payload])
    return 0


def _cmd_simdenom(config: RunConfig) -> int:
    _require(config, "alpha", "delta")
    q = best_simultaneous_denominator(
        parse_constant_list(config.alpha), config.delta, config.qmax
    )
    payload = {"q": q, "delta": config.delta, "qmax": config.qmax}
    _emit(config, payload, columns=("q", "delta", "qmax"), rows=[payload])
    return 0


def _cmd_kronecker(config: RunConfig) -> int:
    _require(config, "signal", "eps", "kappa")
    eps_values = parse_eps_spec(config.eps)
    if len(eps_values) != 1:
        raise ConfigError("kronecker takes a single eps")
    eps = eps_values[0]
    f = _parse_signal_checked(config.signal)
    lams = [float(l) for l in f.exponents_float]
    kaps = [float(k) for k in parse_constant_list(config.kappa)]
    if len(kaps) != len(lams):
        raise ConfigError(f"need {len(lams)} kappa values for this signal")
    t = kronecker_solve(lams, kaps, eps, config.tmax)
    payload = {
        "t": t,
        "residuals": list(kronecker_residuals(lams, kaps, t)) if t is not None else None,
        "eps": eps,
        "tmax": config.tmax,
    }
    rows = [{"t": t if t is not None else "", "max_residual": max(payload["residuals"]) if t is not None else ""}]
    _emit(config, payload, columns=("t", "max_residual"), rows=rows)
    return 0


def _cmd_dimension(config: RunConfig) -> int:
    _require(config, "signal", "eps")
    f = _parse_signal_checked(config.signal)
    eps_values = parse_eps_spec(config.eps)
    report = hull_dimension_report(f, eps_values)
    rows = [
        {"eps": e, "cover_upper": c, "packing_lower": p}
        for e, (c, p) in zip(report.eps_grid, report.counts)
    ]
    payload: dict = {"eps_grid": list(report.eps_grid), "counts": [list(c) for c in report.counts]}
    if len(eps_values) >= 4:
        lower, upper = dimension_fit(report)
        payload["lower_dim"] = lower
        payload["upper_dim"] = upper
    c1, c2 = equivalence_constants(f, 4000, config.seed)
    payload["c1_est"] = c1
    payload["c2_est"] = c2
    _emit(config, payload, columns=("eps", "cover_upper", "packing_lower"), rows=rows)
    return 0


def _cmd_verify(config: RunConfig) -> int:
    result = verify_mod.run_suite(config.suite, config.seed)
    for check in result["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status} {check['name']}")
    payload = dict(result)
    _emit(config, payload)
    print(f"suite {result['suite']}: {'PASS' if result['passed'] else 'FAIL'}")
    return 0 if result["passed"] else 3


_HANDLERS = {
    "eval": _cmd_eval,
    "scan": _cmd_scan,
    "length-curve": _cmd_length_curve,
    "di-fit": _cmd_di_fit,
    "cf": _cmd_cf,
    "badness": _cmd_badness,
    "simdenom": _cmd_simdenom,
    "kronecker": _cmd_kronecker,
    "dimension": _cmd_dimension,
    "verify": _cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qplab",
        description="Almost periods, inclusion lengths, and hull dimensions of quasiperiodic signals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="key = value config file")
        p.add_argument("--signal", default=None, help="signal literal or preset name")
        p.add_argument("--eps", default=None, help="eps list a,b,... or range start:count:factor")
        p.add_argument("--window", default=None, help="scan window lo:hi")
        p.add_argument("--step", type=float, default=None, help="scan step")
        p.add_argument("--seed", type=int, default=None, help="random seed for sampled checks")
        p.add_argument("--grid", type=int, default=None, help="max grid points per scan")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--precision-bits", dest="precision_bits", type=int, default=None)
        return p

    p = add("eval", "evaluate a signal at one time")
    p.add_argument("--t", type=float, default=None, help="time at which to evaluate")
    add("scan", "bracket the eps-almost-period set on a window")
    p = add("length-curve", "inclusion-length bounds over an eps ladder")
    p.add_argument("--initial-width", dest="initial_width", type=float, default=None)
    p.add_argument("--min-hits", dest="min_hits", type=int, default=None)
    p.add_argument("--max-doublings", dest="max_doublings", type=int, default=None)
    p = add("di-fit", "growth exponent of the inclusion length")
    p.add_argument("--initial-width", dest="initial_width", type=float, default=None)
    p.add_argument("--min-hits", dest="min_hits", type=int, default=None)
    p.add_argument("--max-doublings", dest="max_doublings", type=int, default=None)
    p = add("cf", "continued-fraction expansion with certified quotients")
    p.add_argument("--x", default=None, help="number: phi, sqrt2, sqrt3, p/q, or decimal")
    p.add_argument("--depth", type=int, default=None)
    p = add("badness", "badly-approximable score of a tuple")
    p.add_argument("--alpha", default=None, help="comma list of numbers")
    p.add_argument("--qmax", type=int, default=None)
    p = add("simdenom", "smallest simultaneous denominator")
    p.add_argument("--alpha", default=None, help="comma list of numbers")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--qmax", type=int, default=None)
    p = add("kronecker", "phase-alignment time for signal exponents")
    p.add_argument("--kappa", default=None, help="comma list of target phases")
    p.add_argument("--tmax", type=float, default=None)
    add("dimension", "covering/packing counts and dimension fit of the hull")
    p = add("verify", "run a bundled verification suite")
    p.add_argument("--suite", choices=verify_mod.SUITE_NAMES, default=None)
    return parser


def run(config: RunConfig) -> int:
    if config.precision_bits is not None:
        set_working_precision(config.precision_bits)
    return _HANDLERS[config.command](config)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
        return run(config)
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, SignalParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (QplabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
