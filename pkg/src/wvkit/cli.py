"""
Command-line front end.

    wvkit compute   -i problem.json
    wvkit decompose -i problem.json
    wvkit bounds    -i problem.json
    wvkit tradeoff  -i problem.json
    wvkit average   -i problem.json
    wvkit simulate  -i problem.json --g 0.01
    wvkit converge  -i problem.json --g 0.02 --format csv
    wvkit scan      -i problem.json --vary overlap
    wvkit fuzz      --trials 100000 --dims 2..8 --seed 42

stdout carries exactly one JSON document or CSV table; warnings and
diagnostics go to stderr.  Exit codes: 0 success, 2 invalid input,
3 a checked identity or inequality failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InequalityViolation, ParseError, ValidationError, WeakValueError
from .fuzz import CHECKS, REPLAY_COMMAND, draw_problem, evaluate, run_fuzz
from .hilbert import State, expectation, inner
from .meter_sim import MeterConfig, evolve_and_postselect, first_order_checks, first_order_prediction
from .problem import (
    dumps,
    flatten,
    get_basis,
    get_observable,
    get_state,
    load_document,
    parse_state,
    problem_document,
    to_jsonable,
)
from .weakvalue import (
    BOUND_SLACK,
    DEFAULT_OVERLAP_THRESHOLD,
    PpsEnsemble,
    anomaly_bounds,
    decompose_weak_value,
    identity_resolution_average,
    phase_analysis,
    tradeoff_check,
)

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 2, 3
COMMANDS = ("compute", "decompose", "bounds", "tradeoff", "average",
            "simulate", "converge", "scan", "fuzz")
METER_FIELDS = ("n_grid", "half_width", "sigma", "k0", "x0")


@dataclass
class RunConfig:
    command: str
    input_path: Optional[str] = None
    seed: int = 0
    output_format: str = "json"
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD
    slack: Optional[float] = None
    g: Optional[float] = None
    meter: dict = field(default_factory=dict)
    trials: int = 1000
    dims: tuple = tuple(range(2, 9))
    workers: int = 1
    steps: Optional[int] = None
    vary: str = "overlap"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if self.command != "fuzz" and self.input_path is None:
            raise ValidationError(f"command '{self.command}' requires --input")


class Outcome:
    """Payload for stdout plus the exit status it implies."""

    def __init__(self, payload, violated: bool = False, rows: list = None):
        self.payload = payload
        self.violated = violated
        self.rows = rows


def _ensemble(doc, cfg: RunConfig) -> PpsEnsemble:
    return PpsEnsemble(get_state(doc, "psi"), get_state(doc, "phi"), cfg.overlap_threshold)


def _slack(doc, cfg: RunConfig) -> float:
    if cfg.slack is not None:
        return cfg.slack
    return float(doc.get("slack", BOUND_SLACK))


def _meter(doc, cfg: RunConfig) -> MeterConfig:
    params = dict(doc.get("meter", {}))
    unknown = set(params) - set(METER_FIELDS)
    if unknown:
        raise ParseError(f"meter: unknown fields {sorted(unknown)}")
    params.update({k: v for k, v in cfg.meter.items() if v is not None})
    return MeterConfig(**params)


def _coupling(doc, cfg: RunConfig, default: float) -> float:
    return float(cfg.g if cfg.g is not None else doc.get("g", default))


def cmd_compute(doc, cfg):
    A = get_observable(doc, "A")
    e = _ensemble(doc, cfg)
    report = decompose_weak_value(A, e)
    return Outcome({
        "command": "compute",
        "weak_value": report.weak_value,
        "overlap": e.overlap,
        "overlap_modulus": abs(e.overlap),
    })


def cmd_decompose(doc, cfg):
    A = get_observable(doc, "A")
    e = _ensemble(doc, cfg)
    report = decompose_weak_value(A, e)
    diff = report.weak_value - (report.average + report.anomalous)
    residual = max(abs(diff.real), abs(diff.imag))
    phases = phase_analysis(report) if report.phase_phi_bar is not None else None
    payload = {"command": "decompose", **to_jsonable(report),
               "is_anomalous": report.is_anomalous,
               "decomposition_residual": residual,
               "phase_analysis": phases}
    return Outcome(payload, violated=residual >= 1e-10)


def cmd_bounds(doc, cfg):
    A = get_observable(doc, "A")
    e = _ensemble(doc, cfg)
    bounds = anomaly_bounds(A, e)
    violations = bounds.violations(_slack(doc, cfg))
    payload = {"command": "bounds", **to_jsonable(bounds),
               "slack": _slack(doc, cfg), "violations": violations}
    return Outcome(payload, violated=bool(violations))


def cmd_tradeoff(doc, cfg):
    A = get_observable(doc, "A")
    B = get_observable(doc, "B")
    e = _ensemble(doc, cfg)
    result = tradeoff_check(A, B, e, _slack(doc, cfg))
    payload = {"command": "tradeoff", **result._asdict(), "slack": _slack(doc, cfg)}
    return Outcome(payload, violated=not result.satisfied)


def cmd_average(doc, cfg):
    A = get_observable(doc, "A")
    psi = get_state(doc, "psi")
    res = identity_resolution_average(A, psi, get_basis(doc, A.dim))
    expected = expectation(A, psi)
    mean_error = abs(res.weighted_sum - expected)
    payload = {
        "command": "average",
        "expectation": expected,
        "weighted_sum": res.weighted_sum,
        "anomalous_weighted_sum": res.anomalous_weighted_sum,
        "mean_error": mean_error,
        "terms": [t._asdict() for t in res.terms],
    }
    return Outcome(payload, violated=mean_error >= 1e-9 or abs(res.anomalous_weighted_sum) >= 1e-9)


def cmd_simulate(doc, cfg):
    A = get_observable(doc, "A")
    e = _ensemble(doc, cfg)
    meter = _meter(doc, cfg)
    g = _coupling(doc, cfg, 0.01)
    result = evolve_and_postselect(A, e, meter, g)
    payload = {"command": "simulate", **to_jsonable(result),
               "x_shift": result.x_shift, "m_shift": result.m_shift,
               "first_order": first_order_prediction(A, e, meter, g)}
    return Outcome(payload)


def cmd_converge(doc, cfg):
    A = get_observable(doc, "A")
    e = _ensemble(doc, cfg)
    report = first_order_checks(A, e, _meter(doc, cfg), _coupling(doc, cfg, 0.02))
    payload = {"command": "converge", "g": report.g, "weak_value": report.weak_value,
               "rows": report.rows(), "ratio": report.ratio, "passed": report.passed}
    return Outcome(payload, violated=not report.converged, rows=report.rows())


def great_circle(start: State, end: State, steps: int) -> list:
    """Points ``(t, phi_t)`` on the geodesic between the rays of ``start`` and ``end``."""
    c = inner(start, end)
    aligned = end.amplitudes * (c.conjugate() / abs(c)) if abs(c) > 0 else end.amplitudes
    ortho = aligned - abs(c) * start.amplitudes
    norm = np.linalg.norm(ortho)
    if norm < 1e-12:
        raise ValidationError("scan: 'from' and 'to' are the same ray")
    ortho = ortho / norm
    theta = math.acos(min(abs(c), 1.0))
    out = []
    for j in range(steps):
        t = j / (steps - 1)
        vec = math.cos(t * theta) * start.amplitudes + math.sin(t * theta) * ortho
        out.append((t, State(vec / np.linalg.norm(vec))))
    return out


def cmd_scan(doc, cfg):
    if cfg.vary != "overlap":
        raise ValidationError(f"scan: unsupported --vary {cfg.vary!r}")
    A = get_observable(doc, "A")
    psi = get_state(doc, "psi")
    sweep = doc.get("scan")
    if not isinstance(sweep, dict):
        raise ParseError("document: missing object 'scan' with 'from', 'to'")
    start = parse_state(sweep.get("from"), "scan.from")
    end = parse_state(sweep.get("to"), "scan.to")
    steps = int(cfg.steps if cfg.steps is not None else sweep.get("steps", 51))
    if steps < 2:
        raise ValidationError("scan: steps must be >= 2")
    rows = []
    for t, phi in great_circle(start, end, steps):
        if abs(inner(phi, psi)) <= cfg.overlap_threshold:
            warnings.warn(f"scan: t={t!r} skipped, post-selection orthogonal to psi")
            continue
        e = PpsEnsemble(psi, phi, cfg.overlap_threshold)
        report = decompose_weak_value(A, e)
        bounds = anomaly_bounds(A, e, report)
        rows.append({
            "t": t,
            "overlap_modulus": abs(e.overlap),
            "anomaly_modulus": bounds.anomaly_modulus,
            "lower_bound": bounds.lower,
            "upper_bound": bounds.upper,
            "weak_value_re": report.weak_value.real,
            "weak_value_im": report.weak_value.imag,
        })
    return Outcome({"command": "scan", "rows": rows}, rows=rows)


def _counterexample(check: str, seed: int, index: int, dims, slack: float) -> dict:
    p = draw_problem(seed, index, dims)
    return {
        "check": check,
        "trial": index,
        "excess": evaluate(p, slack)[check],
        "problem": problem_document(
            p.A, p.B, p.psi, p.phi, p.basis, command=REPLAY_COMMAND[check], slack=slack
        ),
    }


def cmd_fuzz(doc, cfg):
    slack = cfg.slack if cfg.slack is not None else BOUND_SLACK
    summary = run_fuzz(cfg.trials, cfg.dims, cfg.seed, slack, cfg.workers)
    counterexamples = [
        _counterexample(name, cfg.seed, summary.first_violation[name], summary.dims, slack)
        for name in CHECKS if name in summary.first_violation
    ]
    payload = {
        "command": "fuzz",
        "trials": summary.trials,
        "dims": summary.dims,
        "seed": summary.seed,
        "slack": slack,
        "violations": summary.violations,
        "total_violations": summary.total_violations,
        "worst_excess": summary.worst_excess,
        "counterexamples": counterexamples,
    }
    return Outcome(payload, violated=summary.total_violations > 0)


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def run(cfg: RunConfig, out=None) -> int:
    """Execute one command, writing its report to ``out`` (stdout by default)."""
    out = out if out is not None else sys.stdout
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                doc = load_document(cfg.input_path) if cfg.input_path is not None else {}
                outcome = HANDLERS[cfg.command](doc, cfg)
            finally:
                for w in caught:
                    print(f"warning: {w.message}", file=sys.stderr)
    except InequalityViolation as exc:
        print(f"error: InequalityViolation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except WeakValueError as exc:
        where = f"{cfg.input_path}: " if cfg.input_path else ""
        print(f"error: {where}{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (TypeError, ValueError) as exc:
        print(f"error: {cfg.input_path}: ValidationError: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if cfg.output_format == "csv":
        write_csv(outcome.rows if outcome.rows is not None
                  else [flatten(to_jsonable(outcome.payload))], out)
    else:
        out.write(dumps(outcome.payload) + "\n")
    if outcome.violated:
        print(f"error: {cfg.command}: checked inequality or identity failed", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def write_csv(rows: list, out):
    rows = [flatten(to_jsonable(r)) for r in rows]
    columns = list(dict.fromkeys(k for r in rows for k in r))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in columns})
    out.write(buf.getvalue())


def parse_dims(text: str) -> tuple:
    """``"2..8"`` -> (2, ..., 8); ``"2,4,8"`` -> (2, 4, 8)."""
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split(".."))
            dims = tuple(range(lo, hi + 1))
        else:
            dims = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension range {text!r}") from None
    if not dims or min(dims) < 2:
        raise argparse.ArgumentTypeError("dimensions must be >= 2")
    return dims


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wvkit", description="Weak values of pre- and post-selected ensembles."
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", dest="input_path", help="problem document (JSON), '-' for stdin")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="output_format", choices=("json", "csv"), default=None)
    common.add_argument("--overlap-threshold", type=float, default=DEFAULT_OVERLAP_THRESHOLD)
    common.add_argument("--slack", type=float, default=None,
                        help="tolerance for inequality checks (default 1e-9)")
    common.add_argument("--g", type=float, default=None, help="coupling strength")
    for name in METER_FIELDS:
        kind = int if name == "n_grid" else float
        common.add_argument(f"--{name.replace('_', '-')}", dest=f"meter_{name}", type=kind, default=None)

    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "fuzz":
            p.add_argument("--trials", type=int, default=1000)
            p.add_argument("--dims", type=parse_dims, default=tuple(range(2, 9)))
            p.add_argument("--workers", type=int, default=1)
        if name == "scan":
            p.add_argument("--vary", choices=("overlap",), default="overlap")
            p.add_argument("--steps", type=int, default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fmt = args.output_format or ("csv" if args.command == "scan" else "json")
    return RunConfig(
        command=args.command,
        input_path=args.input_path,
        seed=args.seed,
        output_format=fmt,
        overlap_threshold=args.overlap_threshold,
        slack=args.slack,
        g=args.g,
        meter={name: getattr(args, f"meter_{name}") for name in METER_FIELDS},
        trials=getattr(args, "trials", 1000),
        dims=getattr(args, "dims", tuple(range(2, 9))),
        workers=getattr(args, "workers", 1),
        steps=getattr(args, "steps", None),
        vary=getattr(args, "vary", "overlap"),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValidationError as exc:
        print(f"error: ValidationError: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
