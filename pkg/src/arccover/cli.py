"""Command-line front end.

    arccover analyze    --seq 'powerlaw a=1 alpha=2' [--gauge 'monomial s=0.5']
    arccover simulate   --seq 'harmonic c=1.5' --horizon 100000 --trials 100
    arccover dimension  --seq 'powerlaw a=1 alpha=2' --tails 1000 [--window 0.3,0.2]
    arccover intersect  --seq 'powerlaw a=1 alpha=2' --tails 100 --copies 2
    arccover find-point --seq 'geometric q=0.5' --depth 3
    arccover sweep      --seq 'powerlaw a=1 alpha=2' --param alpha --values 1.25,1.5,2,3

Every artifact starts with a metadata header holding the resolved
configuration and the exact command that reproduces it.  Exit codes: 0 ok,
2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import shlex
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from ._validation import check_levels, check_window
from .dimension import estimate_dimension, intersection_experiment, shell_dimension
from .io import csv_text, json_text, metadata
from .point_finder import DEFAULT_SEARCH_CAP, SearchExhausted, check_certificate, find_point, verify_membership
from .rng import DEFAULT_SEED
from .sequences import parse_gauge, parse_sequence
from .series import classify_series_gauge, critical_exponent, shepp_test, sum_verdict
from .simulation import TrialConfig, run_ensemble, run_trial

__all__ = ["ExperimentConfig", "parse_args", "run_analyze", "run_command", "main"]

COMMANDS = ("analyze", "simulate", "dimension", "intersect", "find-point", "sweep")
EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    seq: str
    gauge: str | None = None
    seed: int = DEFAULT_SEED
    trials: int = 20
    horizon: int = 100_000
    tails: tuple = ()
    levels: tuple | None = None
    window: tuple | None = None
    depth: int = 3
    cap: int = DEFAULT_SEARCH_CAP
    copies: int = 2
    method: str = "tail"
    param: str | None = None
    values: tuple = ()
    out: str | None = field(default=None, compare=False)
    format: str = "json"

    def to_argv(self) -> list[str]:
        argv = [self.command, "--seq", self.seq]
        if self.gauge is not None:
            argv += ["--gauge", self.gauge]
        argv += ["--seed", str(self.seed), "--trials", str(self.trials), "--horizon", str(self.horizon)]
        if self.tails:
            argv += ["--tails", ",".join(str(m) for m in self.tails)]
        if self.levels is not None:
            argv += ["--levels", ",".join(str(j) for j in self.levels)]
        if self.window is not None:
            argv += ["--window", ",".join(repr(float(v)) for v in self.window)]
        argv += ["--depth", str(self.depth), "--cap", str(self.cap), "--copies", str(self.copies)]
        argv += ["--method", self.method]
        if self.param is not None:
            argv += ["--param", self.param]
        if self.values:
            argv += ["--values", ",".join(repr(float(v)) for v in self.values)]
        argv += ["--format", self.format]
        return argv

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d

    def header(self) -> dict:
        return metadata({"config": self.to_dict(), "command": shlex.join(["arccover", *self.to_argv()])})


# -- argument parsing -------------------------------------------------------


def _spec_type(parser_fn):
    def convert(text):
        try:
            return parser_fn(text).spec
        except (ValueError, OSError) as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return convert


def _int_list(text):
    try:
        return tuple(sorted({int(v) for v in text.split(",") if v}))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _levels(text):
    try:
        return check_levels(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _window(text):
    try:
        arc = check_window(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return (arc.center.position, arc.length)


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arccover", description="Random arc coverings of the circle.")
    parser.add_argument("--version", action="version", version=f"arccover {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--seq", type=_spec_type(parse_sequence), required=True, help="e.g. 'powerlaw a=1 alpha=2'")
        p.add_argument("--gauge", type=_spec_type(parse_gauge), help="e.g. 'monomial s=0.5'")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--trials", type=_positive, default=None)
        p.add_argument("--horizon", type=_positive, default=100_000)
        p.add_argument("--tails", type=_int_list, default=None, help="tail starts m, comma separated")
        p.add_argument("--levels", type=_levels, default=None, help="'lo:hi' or 'a,b,c'")
        p.add_argument("--window", type=_window, default=None, help="'center,length'")
        p.add_argument("--depth", type=_positive, default=3)
        p.add_argument("--cap", type=_positive, default=DEFAULT_SEARCH_CAP)
        p.add_argument("--copies", type=_positive, default=2)
        p.add_argument("--method", choices=("tail", "shell"), default=None)
        p.add_argument("--param", default=None, help="sweep parameter name")
        p.add_argument("--values", type=_float_list, default=None, help="sweep values")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="json")
    return parser


def parse_args(argv) -> ExperimentConfig:
    """Parse and resolve defaults; usage errors exit with status 2."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    command = ns.command
    trials = ns.trials if ns.trials is not None else (100 if command == "simulate" else 20)
    tails = ns.tails
    if tails is None:
        tails = (max(1, ns.horizon // 100),) if command in ("dimension", "intersect", "sweep") else ()
    if tails and not (1 <= tails[0] and tails[-1] <= ns.horizon):
        parser.error(f"tail starts must lie in [1, horizon={ns.horizon}], got {list(tails)}")
    method = ns.method or ("shell" if command == "sweep" else "tail")
    param, values = ns.param, ns.values or ()
    if command == "sweep":
        param = param or "alpha"
        if not values:
            values = (1.25, 1.5, 2.0, 3.0)
        seq = parse_sequence(ns.seq)
        for v in values:
            try:
                seq.with_param(param, v)
            except (ValueError, TypeError) as exc:
                parser.error(f"sweep {param}={v}: {exc}")
    seq_obj = parse_sequence(ns.seq)
    if seq_obj.size is not None and command in ("simulate", "dimension", "intersect", "sweep") and ns.horizon > seq_obj.size:
        parser.error(f"horizon {ns.horizon} exceeds the {seq_obj.size} explicit terms")
    return ExperimentConfig(
        command=command,
        seq=ns.seq,
        gauge=ns.gauge,
        seed=ns.seed,
        trials=trials,
        horizon=ns.horizon,
        tails=tuple(tails),
        levels=ns.levels,
        window=ns.window,
        depth=ns.depth,
        cap=ns.cap,
        copies=ns.copies,
        method=method,
        param=param,
        values=tuple(values),
        out=ns.out,
        format=ns.format,
    )


# -- commands ---------------------------------------------------------------


def run_analyze(config: ExperimentConfig) -> dict:
    seq = parse_sequence(config.seq)
    try:
        s_l = critical_exponent(seq)
        exponent = {"value": s_l.value, "method": s_l.method.value}
    except ValueError as exc:
        s_l, exponent = None, {"value": None, "method": "inconclusive", "reason": str(exc)}
    shepp = shepp_test(seq)
    total = sum_verdict(seq)
    prediction = {
        "covered_almost_surely": {"divergent": True, "convergent": False}.get(shepp.verdict.value),
        "lebesgue_measure": {"divergent": 1, "convergent": 0}.get(total.verdict.value),
        "dimension": s_l.value if s_l is not None else None,
    }
    if s_l is not None and s_l.value == 0:
        prediction["nonempty"] = True
    report = {
        "sequence": seq.spec,
        "critical_exponent": exponent,
        "shepp": shepp.to_dict(),
        "sum_lengths": total.to_dict(),
    }
    if config.gauge is not None:
        g = parse_gauge(config.gauge)
        gv = classify_series_gauge(seq, g)
        report["gauge"] = {"spec": g.spec, **gv.to_dict()}
        prediction["gauge_measure"] = {
            "divergent": "H^g(E cap V) = H^g(V) for every open V",
            "convergent": "H^g(E cap V) = 0 for every open V",
        }.get(gv.verdict.value, "undecided")
    report["prediction"] = prediction
    return report


def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, list):
            yield key, ";".join(",".join(str(x) for x in item) if isinstance(item, list) else str(item) for item in v)
        else:
            yield key, v


def _trial_config(config: ExperimentConfig, seq=None, checkpoints=None) -> TrialConfig:
    return TrialConfig(
        seq or parse_sequence(config.seq), config.horizon, config.seed, 0, checkpoints, config.tails
    )


def _dimension_estimates(config: ExperimentConfig, seq=None, method=None):
    base = _trial_config(config, seq, checkpoints=())
    m = config.tails[0] if config.tails else None
    window = config.window
    out = []
    for t in range(config.trials):
        cfg = base.with_trial(t)
        if (method or config.method) == "shell":
            out.append(shell_dimension(cfg, config.levels, window))
        else:
            out.append(estimate_dimension(run_trial(cfg), m, window, config.levels))
    return out


def _render(config: ExperimentConfig) -> str:
    meta = config.header()
    cmd = config.command
    if cmd == "analyze":
        report = run_analyze(config)
        if config.format == "json":
            return json_text(report, meta)
        return csv_text(["key", "value"], list(_flatten(report)), meta)

    if cmd == "simulate":
        stats = run_ensemble(_trial_config(config), config.trials)
        return stats.to_json(meta) if config.format == "json" else stats.to_csv(meta)

    if cmd in ("dimension", "intersect"):
        if cmd == "dimension":
            ests = _dimension_estimates(config)
        else:
            base = _trial_config(config, checkpoints=())
            ests = [
                intersection_experiment(base.with_trial(t), config.copies, config.tails[0], config.levels, config.window)
                for t in range(config.trials)
            ]
        slopes = [e.slope for e in ests]
        summary = {
            "mean_dimension": float(np.mean(slopes)),
            "std_dimension": float(np.std(slopes, ddof=1)) if len(slopes) > 1 else 0.0,
            "degenerate_trials": sum(e.degenerate for e in ests),
        }
        if config.format == "json":
            return json_text({"summary": summary, "trials": [e.to_dict() for e in ests]}, meta)
        rows = []
        for t, e in enumerate(ests):
            rows += [[t, *r, e.slope, e.degenerate] for r in e.rows()]
        rows.append(["mean", None, None, None, summary["mean_dimension"], summary["degenerate_trials"] > 0])
        return csv_text(["trial", "j", "N_j", "local_slope", "slope", "degenerate"], rows, meta)

    if cmd == "find-point":
        seq = parse_sequence(config.seq)
        try:
            cert = find_point(config.seed, 0, seq, config.depth, config.cap)
            payload = cert.to_dict()
            payload["status"] = "ok"
        except SearchExhausted as exc:
            cert = exc.partial
            payload = cert.to_dict() if cert is not None else {"seq": seq.spec, "indices": []}
            payload["status"] = "search-exhausted"
            payload["message"] = str(exc)
        if cert is not None:
            payload["checks"] = check_certificate(cert)
            payload["hits"] = verify_membership(cert.point, config.seed, 0, seq, cert.indices[-1])
        if config.format == "json":
            return json_text(payload, meta)
        rows = [[a["level"], a["n"], a["center"], a["length"], a["left"], a["right"]] for a in payload.get("arcs", [])]
        return csv_text(["level", "n", "center", "length", "left", "right"], rows, meta)

    if cmd == "sweep":
        base = parse_sequence(config.seq)
        rows = []
        for v in config.values:
            seq = base.with_param(config.param, v)
            ests = _dimension_estimates(config, seq)
            slopes = [e.slope for e in ests]
            try:
                theory = critical_exponent(seq).value
            except ValueError:
                theory = None
            rows.append(
                {
                    "value": float(v),
                    "seq": seq.spec,
                    "theory": theory,
                    "mean_dimension": float(np.mean(slopes)),
                    "std_dimension": float(np.std(slopes, ddof=1)) if len(slopes) > 1 else 0.0,
                }
            )
        if config.format == "json":
            return json_text({"param": config.param, "method": config.method, "rows": rows}, meta)
        header = [config.param, "theory", "mean_dimension", "std_dimension"]
        return csv_text(header, [[r["value"], r["theory"], r["mean_dimension"], r["std_dimension"]] for r in rows], meta)

    raise ValueError(f"unknown command {cmd!r}")


def run_command(config: ExperimentConfig, stdout=None) -> int:
    text = _render(config)
    if config.out is None:
        (stdout or sys.stdout).write(text)
        return EXIT_OK
    try:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"arccover: cannot write {config.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv=None) -> int:
    try:
        config = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run_command(config)


if __name__ == "__main__":
    sys.exit(main())
