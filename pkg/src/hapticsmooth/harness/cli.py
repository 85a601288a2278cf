"""Command-line front end.

Exit codes: 0 success, 2 argument error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from ..coupling import SIGN_MODES, CouplingParams
from ..predictor import PredictorConfig
from ..simulator import METHODS, SCENARIOS, RunConfig, make_scenario, reference_oracle
from ..wrench import Trace
from . import experiments
from .config import ConfigError, load_config, merge
from .metrics import metric_report, write_reports

logger = logging.getLogger("hapticsmooth")

# value type of every key accepted in a --config file
KEY_TYPES = {
    "scenario": str,
    "seed": int,
    "mass": float,
    "duration_ms": float,
    "window_size": int,
    "order": int,
    "order_auto": bool,
    "refit_interval": int,
    "sign_mode": str,
    "out_dir": str,
    "method": str,
    "sizes": str,
    "seeds": str,
    "haptic": bool,
    "start_ms": float,
}

BASE_DEFAULTS = {
    "scenario": "complex_contact",
    "seed": 0,
    "mass": None,
    "duration_ms": None,
    "window_size": 300,
    "order": 2,
    "order_auto": False,
    "refit_interval": 1,
    "sign_mode": "standard_damper",
    "out_dir": "out",
    "method": "adaptive_prediction",
    "sizes": "100,200,300,400,500",
    "seeds": "0-19",
    "haptic": False,
    "start_ms": 0.0,
}

COMMAND_DEFAULTS = {
    "simulate": {},
    "compare": {},
    "oracle": {},
    "metrics": {},
    "sweep-window": {"scenario": experiments.REGIME_SCENARIO, "seed": 7, "duration_ms": 40000.0},
    "ab-update": {"scenario": experiments.REGIME_SCENARIO},
}


class ArgumentError(ValueError):
    pass


def parse_int_list(text: str) -> list[int]:
    """``"1,2,5"`` or ranges like ``"0-19"``, comma separated."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            if sep and lo:
                a, b = int(lo), int(hi)
                if b < a:
                    raise ArgumentError(f"empty range {part!r}")
                out.extend(range(a, b + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise ArgumentError(f"cannot parse {part!r} as an integer or range") from None
    if not out:
        raise ArgumentError("empty list")
    return out


def _scenario_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--seed", type=int)
    p.add_argument("--mass", type=float, help="tool mass in kg")
    p.add_argument("--duration-ms", type=float)
    p.add_argument("--sign-mode", choices=SIGN_MODES)


def _predictor_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window-size", type=int)
    p.add_argument("--order", type=int)
    p.add_argument("--order-auto", action="store_const", const=True, help="select the AR order by FPE")
    p.add_argument("--refit-interval", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hapticsmooth", description="Force prediction and 1 kHz haptic upsampling experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="flat key = value file; flags override it")
        p.add_argument("--out-dir")
        return p

    p = command("simulate", "run one scenario with one method and write its traces")
    _scenario_options(p)
    _predictor_options(p)
    p.add_argument("--method", choices=METHODS)

    p = command("compare", "run all three methods on one scenario and score them against the oracle")
    _scenario_options(p)
    _predictor_options(p)

    p = command("sweep-window", "one-step prediction RMS for a range of window sizes")
    _scenario_options(p)
    _predictor_options(p)
    p.add_argument("--sizes", help="comma separated window sizes")

    p = command("ab-update", "prediction RMS with vs without coefficient refit over several seeds")
    _scenario_options(p)
    _predictor_options(p)
    p.add_argument("--seeds", help="e.g. 0-19 or 1,4,7")
    p.add_argument("--haptic", action="store_const", const=True, help="also score the 1 kHz output against the oracle")

    p = command("metrics", "recompute a metric report from stored trace CSVs")
    p.add_argument("--candidate", required=True, help="trace CSV to score")
    p.add_argument("--reference", required=True, help="reference trace CSV on the same timeline")
    p.add_argument("--baseline", help="optional trace CSV for the ANOVA F comparison")
    p.add_argument("--start-ms", type=float)
    p.add_argument("--method", help="row label in the output", default=None)

    p = command("oracle", "write the 1 ms reference trace of a scenario")
    _scenario_options(p)
    return parser


def resolve(args: argparse.Namespace) -> dict:
    flags = {k: v for k, v in vars(args).items() if k in KEY_TYPES}
    file_values = load_config(args.config) if args.config else {}
    defaults = {**BASE_DEFAULTS, **COMMAND_DEFAULTS[args.command]}
    return merge(flags, file_values, KEY_TYPES, defaults)


def _predictor(opts: dict) -> PredictorConfig:
    return PredictorConfig(
        window_size=opts["window_size"],
        order=opts["order"],
        order_auto=opts["order_auto"],
        refit_interval=opts["refit_interval"],
    )


def _scenario(opts: dict, seed: int | None = None):
    if opts["scenario"] not in SCENARIOS:
        raise ArgumentError(f"unknown scenario {opts['scenario']!r}")
    if opts["sign_mode"] not in SIGN_MODES:
        raise ArgumentError(f"unknown sign mode {opts['sign_mode']!r}")
    return make_scenario(
        opts["scenario"],
        opts["seed"] if seed is None else seed,
        mass=opts["mass"],
        duration_ms=opts["duration_ms"],
        coupling=CouplingParams(sign_mode=opts["sign_mode"]),
    )


def _plan(command: str, opts: dict):
    """Validate options and return a zero-argument callable doing the work.

    Everything raised here is an argument error.
    """
    out = Path(opts["out_dir"])
    if command == "simulate":
        if opts["method"] not in METHODS:
            raise ArgumentError(f"unknown method {opts['method']!r}")
        sc, cfg = _scenario(opts), RunConfig(opts["method"], _predictor(opts))

        def work():
            rec = experiments.simulate(sc, cfg, out)
            print(f"{sc.name} seed {sc.seed} {cfg.method}: {len(rec.haptic)} haptic samples, {len(rec.physics)} physics ticks -> {out}")

        return work
    if command == "compare":
        sc, pred = _scenario(opts), _predictor(opts)

        def work():
            comp = experiments.compare(sc, pred, out_dir=out)
            print(f"{sc.name} seed {sc.seed}, analysis from {comp.start_ms:.1f} ms")
            for m, rep in comp.reports.items():
                print(f"  {m:22s} rms {rep.rms_force_error:.4f} N  max jump {rep.max_interframe_jump:.4f} N  jerk {rep.mean_abs_jerk:.3e} N/ms^2")

        return work
    if command == "sweep-window":
        sizes = parse_int_list(opts["sizes"])
        if min(sizes) < 2:
            raise ArgumentError("window sizes must be at least 2")
        pred = _predictor(opts)
        for s in sizes:
            replace(pred, window_size=s)

        def work():
            rows = experiments.sweep_window(sizes, opts["seed"], opts["scenario"], opts["duration_ms"], pred, out_dir=out)
            for size, rms in rows:
                print(f"window {size:5d}: rms {rms:.5f} N")

        return work
    if command == "ab-update":
        seeds = parse_int_list(opts["seeds"])
        pred = _predictor(opts)
        _scenario(opts, seeds[0])

        def work():
            res = experiments.ab_update(
                seeds, opts["scenario"], opts["duration_ms"], pred, haptic=opts["haptic"], mass=opts["mass"], out_dir=out
            )
            for row in res.rows:
                print(f"seed {int(row[0]):3d}: without {row[1]:.4f} N  with {row[2]:.4f} N  F {row[3]:.2f}")
            print(f"refit better in {100 * res.win_fraction:.0f}% of seeds, pooled F {res.pooled_f:.2f}")

        return work
    if command == "metrics":
        start = opts["start_ms"]
        label = opts["method"] or "candidate"

        def work():
            cand = Trace.read_csv(opts["candidate"])
            ref = Trace.read_csv(opts["reference"])
            base = Trace.read_csv(opts["baseline"]) if opts.get("baseline") else None
            rep = metric_report(cand, ref, start, base)
            write_reports(out / "metrics.csv", {label: rep}, start)
            for k, v in rep.to_dict().items():
                print(f"{k}: {v!r}")

        return work
    if command == "oracle":
        sc = _scenario(opts)

        def work():
            tr = reference_oracle(sc)
            tr.write_csv(out / "oracle.csv")
            print(f"{sc.name} seed {sc.seed}: {len(tr)} oracle samples -> {out / 'oracle.csv'}")

        return work
    raise ArgumentError(f"unknown command {command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        opts = resolve(args)
        if args.command == "metrics":
            opts.update(candidate=args.candidate, reference=args.reference, baseline=args.baseline)
            opts["method"] = args.method
        work = _plan(args.command, opts)
    except (ArgumentError, ConfigError, ValueError) as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {e}", file=sys.stderr)
        return 2
    try:
        work()
    except Exception as e:  # noqa: BLE001
        logger.debug("failure", exc_info=True)
        print(f"{parser.prog} {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
