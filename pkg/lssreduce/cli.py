"""
Command-line interface for lssreduce

Usage:
    python -m lssreduce gen --n 8 --D 2 --seed 1 --out model.json
    python -m lssreduce reduce --model model.json --method n-match --N 1 --mode R --out r.json
    python -m lssreduce reduce --model model.json --method nice --preset mode1 --out r.json
    python -m lssreduce reduce --model model.json --method sequence --upsilon 12 --out r.json
    python -m lssreduce simulate --model model.json --switching 1:0.7,2:0.3 --out y.csv
    python -m lssreduce compare --model model.json --reduced r.json --seeds 500 --out results
    python -m lssreduce markov --model model.json --N 2
    python -m lssreduce verify --model model.json --reduced r.json --N 1
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import Settings, configure_logging, get_settings
from .errors import InvalidInputError, LssError, RankConditionError, SizeLimitError
from .experiment import ExperimentConfig, run_comparison, write_comparison
from .generate import random_lss, random_minimal_lss
from .model import format_word, load_model, markov_parameters_up_to, parse_word, save_model
from .moment import check_partial_realization, reduce as reduce_n
from .nice import check_selection, match_sequence, reduce_alpha, reduce_alphabeta, reduce_beta, sequence_languages
from .selection import (PRESETS, NiceColumnSelection, check_against, load_selection, save_selection,
                        select_nice_columns, select_nice_rows, validate_nice)
from .simulate import (SwitchingSequence, constant_input, random_switching, read_signal_csv, simulate,
                       white_noise, write_signal_csv)
from .subspaces import is_minimal, is_observable, is_span_reachable

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RANK = 2


def resolve_output(path, settings: Settings) -> Path:
    """Bare file names go to the configured output directory."""
    path = Path(path)
    if path.parent == Path("."):
        return settings.output_dir / path
    return path


def parse_per_mode(text: str):
    """
    Per-mode values for --min-dwell and --abscissa.

    "1=0.4,2=0.1" -> {1: 0.4, 2: 0.1}; a single number applies to every mode.
    """
    if "=" not in text:
        return float(text)
    values = {}
    for item in text.split(","):
        q, value = item.split("=")
        values[int(q)] = float(value)
    return values


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_json(data: dict, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
    return path


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_gen(args, settings: Settings) -> int:
    print("=" * 60)
    print("🏗️  Generating Random Switched System")
    print("=" * 60)
    kwargs = dict(seed=args.seed, stable=not args.unstable, abscissa=args.abscissa, zero_x0=args.zero_x0)
    if args.minimal:
        model = random_minimal_lss(args.n, args.D, args.m, args.p, **kwargs)
    else:
        model = random_lss(args.n, args.D, args.m, args.p, **kwargs)
    out = save_model(model, resolve_output(args.out, settings))
    kind = "unstable" if args.unstable else "stable"
    if args.abscissa is not None:
        kind = f"abscissa {args.abscissa}"
    print(f"✅ Saved {kind} system n={model.n}, D={model.D}, m={model.m}, p={model.p} to {out}")
    return EXIT_OK


def _load_beta_or_alpha(args, model, tol):
    """Selection for --method nice from a file, a preset or the greedy construction."""
    if args.preset:
        sel = PRESETS[args.preset]()
    elif args.selection:
        sel = load_selection(args.selection)
    elif args.select_dim is not None:
        if args.side == "row":
            return select_nice_rows(model, args.select_dim, tol)
        return select_nice_columns(model, args.select_dim, tol)
    else:
        raise InvalidInputError("--method nice needs --selection, --preset or --select-dim")
    check_against(sel, model)
    return sel


def _run_check(check):
    """Run an acceptance check; (None, reason) when it would list more than LSS_MAX_WORDS entries."""
    try:
        return check(), None
    except SizeLimitError as e:
        logger.warning("Check skipped: %s", e)
        return None, str(e)


def cmd_reduce(args, settings: Settings) -> int:
    tol = settings.rank_tol
    limit = settings.max_words
    print("=" * 60)
    print(f"🔨 Reducing {args.model} ({args.method})")
    print("=" * 60)
    model = load_model(args.model)
    report_extra = {}

    if args.method == "n-match":
        if args.N is None:
            raise InvalidInputError("--method n-match needs --N")
        report = reduce_n(model, args.N, args.mode, tol)
        check = lambda: check_partial_realization(model, report.reduced, report.matched_depth, limit)
    elif args.method == "nice":
        sel = _load_beta_or_alpha(args, model, tol)
        violations = validate_nice(sel)
        if violations:
            raise InvalidInputError("Selection is not nice: " + "; ".join(violations))
        if args.row_selection:
            alpha = load_selection(args.row_selection)
            check_against(alpha, model)
            violations = validate_nice(alpha)
            if violations:
                raise InvalidInputError("Row selection is not nice: " + "; ".join(violations))
            report = reduce_alphabeta(model, alpha, sel, tol)
            check = lambda: check_selection(model, report.reduced, (alpha, sel), max_words=limit)
        else:
            reducer = reduce_beta if isinstance(sel, NiceColumnSelection) else reduce_alpha
            report = reducer(model, sel, tol)
            check = lambda: check_selection(model, report.reduced, sel, max_words=limit)
        report_extra["selection_size"] = len(sel)
        if args.save_selection:
            save_selection(sel, resolve_output(args.save_selection, settings))
    else:
        if not args.upsilon:
            raise InvalidInputError("--method sequence needs --upsilon")
        upsilon = parse_word(args.upsilon, model.D)
        report = match_sequence(model, upsilon, args.side, tol)
        check = lambda: check_selection(model, report.reduced, sequence_languages(model, upsilon, args.side),
                                        max_words=limit)
        report_extra["upsilon"] = format_word(upsilon)
        report_extra["side"] = args.side

    out = save_model(report.reduced, resolve_output(args.out, settings))
    print(f"💾 Saved reduced model to {out}")

    error, skipped = _run_check(check)
    summary = {**report.summary(), **report_extra, "original_dim": model.n, "max_error": error,
               "check": "skipped" if skipped else "done"}
    if skipped:
        summary["check_skipped"] = skipped
    if args.report:
        _write_json(summary, resolve_output(args.report, settings))

    print(f"📖 Original dimension: {model.n}")
    print(f"✅ Reduced dimension:  {report.reduced.n}")
    print(f"   Ranks (V, W, WV):   {report.ranks}")
    if skipped:
        print(f"⚠️  Check skipped: {skipped}")
    else:
        print(f"   Max matched error:  {_fmt(error)}")
    return EXIT_OK


def cmd_simulate(args, settings: Settings) -> int:
    model = load_model(args.model)
    dt = args.dt or settings.dt
    if args.switching:
        mu = SwitchingSequence.parse(args.switching)
    else:
        mu = random_switching(model.D, args.horizon, parse_per_mode(args.min_dwell),
                              seed=args.seed, first_mode=args.first_mode)
    if args.input:
        u = read_signal_csv(args.input)
    elif args.zero_input:
        u = constant_input(model.m, mu.total_duration, dt)
    else:
        u = white_noise(model.m, mu.total_duration, dt, seed=args.seed)

    y = simulate(model, mu, u)
    out = write_signal_csv(y, resolve_output(args.out, settings))
    print(f"✅ Simulated {len(y.values)} samples along {mu}")
    print(f"💾 Saved output to {out}")
    return EXIT_OK


def cmd_compare(args, settings: Settings) -> int:
    model = load_model(args.model)
    reduced = load_model(args.reduced)
    config = ExperimentConfig(
        horizon=args.horizon,
        min_dwell=parse_per_mode(args.min_dwell),
        dt=args.dt or settings.dt,
        first_mode=args.first_mode,
    )
    n_jobs = args.n_jobs or settings.n_jobs

    print("=" * 60)
    print(f"📊 Comparing {args.model} (n={model.n}) with {args.reduced} (n={reduced.n})")
    print(f"   {args.seeds} random switching signals, horizon {config.horizon}")
    print("=" * 60)
    seeds = range(args.seed, args.seed + args.seeds)
    frame = run_comparison(model, reduced, seeds, config, n_jobs=n_jobs)
    metrics = write_comparison(model, reduced, frame, config, resolve_output(args.out, settings))

    print("\n" + "=" * 60)
    print("✅ Comparison Complete!")
    print("=" * 60)
    print(f"   Runs:      {metrics['runs']}")
    print(f"   Mean BFR:  {metrics['mean_bfr']:.4f}%")
    print(f"   Best BFR:  {metrics['best_bfr']:.4f}% (seed {metrics['best_seed']})")
    print(f"   Worst BFR: {metrics['worst_bfr']:.4f}% (seed {metrics['worst_seed']})")
    return EXIT_OK


def cmd_markov(args, settings: Settings) -> int:
    model = load_model(args.model)
    params = markov_parameters_up_to(model, args.N, settings.max_words)
    data = {format_word(w, empty=""): p.value.tolist() for w, p in params.items()}
    if args.out:
        out = _write_json(data, resolve_output(args.out, settings))
        print(f"💾 Saved {len(data)} Markov parameters to {out}")
    else:
        np.set_printoptions(precision=17)
        for w, p in params.items():
            print(f"M({format_word(w)}) =\n{p.value}")
    return EXIT_OK


def cmd_verify(args, settings: Settings) -> int:
    model = load_model(args.model)
    tol = settings.rank_tol
    result = {
        "span_reachable": is_span_reachable(model, tol),
        "observable": is_observable(model, tol),
        "minimal": is_minimal(model, tol),
    }
    if args.reduced:
        reduced = load_model(args.reduced)
        result["N"] = args.N
        result["max_markov_error"] = check_partial_realization(model, reduced, args.N, settings.max_words)

    print("=" * 60)
    print(f"🔍 Verification of {args.model}")
    print("=" * 60)
    for key, value in result.items():
        print(f"   {key}: {_fmt(value) if isinstance(value, float) else value}")
    if args.report:
        _write_json(result, resolve_output(args.report, settings))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lssreduce",
                                     description="Moment-matching model reduction for linear switched systems")
    parser.add_argument("--log-level", default=None, help="Logging level (default: LSS_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a random system")
    gen.add_argument("--n", type=int, required=True, help="State dimension")
    gen.add_argument("--D", type=int, default=2, help="Number of modes")
    gen.add_argument("--m", type=int, default=1, help="Inputs")
    gen.add_argument("--p", type=int, default=1, help="Outputs")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--unstable", action="store_true", help="Modes with eigenvalues in the right half plane")
    gen.add_argument("--abscissa", type=parse_per_mode, default=None,
                     help='Largest real part of each mode\'s spectrum: "q=val,..." or one value for every mode')
    gen.add_argument("--zero-x0", action="store_true", help="Use x0 = 0")
    gen.add_argument("--minimal", action="store_true", help="Redraw until the system is minimal")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    red = sub.add_parser("reduce", help="Reduce a system")
    red.add_argument("--model", required=True)
    red.add_argument("--method", choices=["n-match", "nice", "sequence"], default="n-match")
    red.add_argument("--N", type=int, default=None, help="Matching depth for n-match")
    red.add_argument("--mode", choices=["R", "O", "T"], default="R")
    red.add_argument("--selection", default=None, help="Nice selection JSON (columns or rows)")
    red.add_argument("--row-selection", default=None, help="Row selection JSON for a two-sided reduction")
    red.add_argument("--preset", choices=sorted(PRESETS), default=None)
    red.add_argument("--select-dim", type=int, default=None, help="Build a nice selection of this dimension")
    red.add_argument("--save-selection", default=None, help="Write the selection used to this file")
    red.add_argument("--upsilon", default=None, help="Mode sequence as a digit string, e.g. 1221")
    red.add_argument("--side", choices=["column", "row"], default="column")
    red.add_argument("--out", required=True)
    red.add_argument("--report", default=None, help="Report JSON path")
    red.set_defaults(func=cmd_reduce)

    sim = sub.add_parser("simulate", help="Simulate a system along a switching sequence")
    sim.add_argument("--model", required=True)
    sim.add_argument("--switching", default=None, help='Timed sequence "q:t,q:t,..."')
    sim.add_argument("--horizon", type=float, default=1.0)
    sim.add_argument("--min-dwell", default="0.1", help='"q=val,..." or one value for every mode')
    sim.add_argument("--first-mode", type=int, default=None)
    sim.add_argument("--input", default=None, help="Input CSV (t,v1..vm)")
    sim.add_argument("--zero-input", action="store_true")
    sim.add_argument("--dt", type=float, default=None)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    cmp_ = sub.add_parser("compare", help="BFR of a reduced model over many random runs")
    cmp_.add_argument("--model", required=True)
    cmp_.add_argument("--reduced", required=True)
    cmp_.add_argument("--seeds", type=int, default=500, help="Number of runs")
    cmp_.add_argument("--seed", type=int, default=0, help="First seed")
    cmp_.add_argument("--horizon", type=float, default=1.0)
    cmp_.add_argument("--min-dwell", default="1=0.4,2=0.1")
    cmp_.add_argument("--first-mode", type=int, default=None)
    cmp_.add_argument("--dt", type=float, default=None)
    cmp_.add_argument("--n-jobs", type=int, default=None)
    cmp_.add_argument("--out", required=True, help="Output directory")
    cmp_.set_defaults(func=cmd_compare)

    mk = sub.add_parser("markov", help="Markov parameters up to a word length")
    mk.add_argument("--model", required=True)
    mk.add_argument("--N", type=int, required=True)
    mk.add_argument("--out", default=None)
    mk.set_defaults(func=cmd_markov)

    ver = sub.add_parser("verify", help="Minimality and Markov-parameter checks")
    ver.add_argument("--model", required=True)
    ver.add_argument("--reduced", default=None)
    ver.add_argument("--N", type=int, default=1)
    ver.add_argument("--report", default=None)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = get_settings()
        configure_logging((args.log_level or settings.log_level).upper())
        return args.func(args, settings)
    except RankConditionError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_RANK
    except (LssError, FileNotFoundError, ValueError) as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_INVALID
