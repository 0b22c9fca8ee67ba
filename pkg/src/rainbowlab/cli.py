"""Command-line entry point: ``rainbowlab <subcommand> ...``.

Exit codes: 0 success, 1 ``check`` found the graph not rainbow connected,
2 usage error, 3 domain or capacity error, 4 I/O or file-format error.
"""

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from . import engine, harness, theory
from .exceptions import CapacityError, DomainError, GraphFormatError
from .graphs import Model, ModelParams, SeedPlan, derive_params, format_graph, read_graph, sample

EXIT_OK = 0
EXIT_NOT_CONNECTED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

SEED_ENV = "RAINBOW_SEED"
HELP_WIDTH = 80


class UsageError(Exception):
    pass


def _formatter(prog):
    # fixed width keeps --help output independent of the terminal
    return argparse.HelpFormatter(prog, width=HELP_WIDTH)


def _probability(text):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {text}")
    return value


def _add_common(sub, *, model=True, runs=False):
    sub.add_argument("--config", metavar="FILE", help="read 'key = value' defaults from FILE")
    sub.add_argument("--n", type=int, help="number of vertices")
    sub.add_argument("--c", type=float, help="edge density constant c > 1")
    if model:
        sub.add_argument(
            "--model", choices=[m.value for m in Model], default="family", help="random model (default: family)"
        )
    if runs:
        sub.add_argument("--trials", type=int, help="trials per scanned s")
        sub.add_argument("--seed", type=int, help=f"master seed (default: ${SEED_ENV} or 0)")
        sub.add_argument("--threads", type=int, help="worker threads (default: CPU count)")
        sub.add_argument("--p", type=_probability, help="force the edge probability")


def _add_scan(sub):
    _add_common(sub, model=False, runs=True)
    sub.add_argument("--s-min", type=int, help="first scanned s (default: sweep hint)")
    sub.add_argument("--s-max", type=int, help="last scanned s (default: sweep hint)")
    sub.add_argument("--out", metavar="PATH", help="write the success curve(s) to PATH")
    sub.add_argument("--format", choices=["csv", "json"], default="csv", help="format for --out (default: csv)")
    sub.add_argument("--records", metavar="PATH", help="write per-trial records as CSV to PATH")
    sub.add_argument("--timing", action="store_true", help="fill the elapsed_ms column of --records")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rainbowlab",
        description="Rainbow connectivity experiments on random edge-colored graphs.",
        formatter_class=_formatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    subs = parser.add_subparsers(dest="command", metavar="COMMAND")
    subs.required = True

    sp = subs.add_parser("sample", help="sample one graph and write it", formatter_class=_formatter)
    _add_common(sp, runs=False)
    sp.add_argument("--s", type=int, help="number of colors")
    sp.add_argument("--seed", type=int, help=f"master seed (default: ${SEED_ENV} or 0)")
    sp.add_argument("--trial", type=int, default=0, help="trial index within the seed plan (default: 0)")
    sp.add_argument("--p", type=_probability, help="force the edge probability")
    sp.add_argument("--out", metavar="PATH", help="output file (default: stdout)")

    sp = subs.add_parser("check", help="decide rainbow connectivity of a graph file", formatter_class=_formatter)
    sp.add_argument("file", help="colored edge list file")

    sp = subs.add_parser("bounds", help="print threshold bounds as JSON", formatter_class=_formatter)
    _add_common(sp, model=False)

    sp = subs.add_parser("firstmoment", help="expected rainbow path counts as JSON", formatter_class=_formatter)
    sp.add_argument("--config", metavar="FILE", help="read 'key = value' defaults from FILE")
    sp.add_argument("--n", type=int, help="number of vertices")
    sp.add_argument("--s", type=int, help="number of colors")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--c", type=float, help="derive p = c ln n / (s n)")
    group.add_argument("--p", type=_probability, help="edge probability, e.g. 0.5 or 1/4")

    sp = subs.add_parser("threshold", help="scan s and estimate the threshold", formatter_class=_formatter)
    _add_scan(sp)
    sp.add_argument(
        "--model", choices=[m.value for m in Model], default="family", help="random model (default: family)"
    )

    sp = subs.add_parser("compare", help="threshold scans of both models", formatter_class=_formatter)
    _add_scan(sp)

    sp = subs.add_parser("lemmas", help="empirical degree and doubling checks", formatter_class=_formatter)
    _add_common(sp, model=False, runs=True)
    sp.add_argument("--sources", type=int, default=20, help="sources for the doubling check (default: 20)")
    sp.add_argument("--exclude", type=int, default=0, help="excluded colors per source (default: 0)")
    return parser


def _read_config(path):
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _subparser(parser, name):
    action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return action.choices[name]


def _config_defaults(sub, command, path):
    by_dest = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, text in _read_config(path).items():
        action = by_dest.get(key)
        if action is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for {command}")
        if action.nargs == 0:
            defaults[key] = text.lower() in ("1", "true", "yes", "on")
            continue
        try:
            value = action.type(text) if action.type else text
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config key {key}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"config key {key}: invalid choice {text!r}")
        defaults[key] = value
    return defaults


def _parse(parser, argv):
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        # reparse with the file as defaults so explicit flags still win
        parser = build_parser()
        sub = _subparser(parser, args.command)
        sub.set_defaults(**_config_defaults(sub, args.command, args.config))
        args = parser.parse_args(argv)
    return args


def _require(args, *names):
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name, None) is None]
    if missing:
        raise UsageError(f"{args.command}: missing required {', '.join(missing)}")


def _seed(args):
    if getattr(args, "seed", None) is not None:
        return args.seed
    text = os.environ.get(SEED_ENV)
    if text is None or not text.strip():
        return 0
    try:
        return int(text, 10)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {text!r}") from None


def _threads(args):
    if args.threads is None:
        return os.cpu_count() or 1
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    return args.threads


def _s_range(args):
    if args.s_min is None and args.s_max is None:
        return None
    lo, hi = theory.sweep_hint(args.n) if None in (args.s_min, args.s_max) else (None, None)
    lo = args.s_min if args.s_min is not None else lo
    hi = args.s_max if args.s_max is not None else hi
    if lo > hi:
        raise UsageError("--s-min must not exceed --s-max")
    return range(lo, hi + 1)


def _print_json(data, out):
    out.write(json.dumps(data, indent=2) + "\n")


def _p_arg(args):
    return None if args.p is None else float(args.p)


def cmd_sample(args, out):
    _require(args, "n", "s")
    model = Model(args.model)
    if args.p is not None:
        c = float("nan") if args.c is None else args.c
        params = ModelParams(n=args.n, s=args.s, c=c, p=float(args.p), model=model)
    else:
        _require(args, "c")
        params = derive_params(args.n, args.s, args.c, model)
    graph = sample(params, SeedPlan(_seed(args)), args.trial)
    text = format_graph(graph)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_check(args, out):
    graph = read_graph(args.file)
    verdict = engine.is_rainbow_connected(graph)
    if verdict.connected:
        out.write("rainbow connected\n")
        return EXIT_OK
    u, v = verdict.witness
    out.write(f"not rainbow connected: no rainbow path between {u} and {v}\n")
    return EXIT_NOT_CONNECTED


def cmd_bounds(args, out):
    _require(args, "n", "c")
    _print_json(theory.bounds_report(args.n, args.c).to_dict(), out)
    return EXIT_OK


def cmd_firstmoment(args, out):
    _require(args, "n", "s")
    if args.p is None:
        _require(args, "c")
        p = derive_params(args.n, args.s, args.c).p
    else:
        p = args.p
    _print_json(theory.expected_rainbow_paths(args.n, args.s, p).to_dict(), out)
    return EXIT_OK


def _scan_kwargs(args):
    _require(args, "n", "c", "trials")
    return dict(
        trials_per_s=args.trials,
        master_seed=_seed(args),
        s_range=_s_range(args),
        p=_p_arg(args),
        workers=_threads(args),
    )


def _write_outputs(args, estimates):
    if args.out:
        harness.emit_results(estimates, args.out, args.format)
    if args.records:
        records = [r for est in estimates for r in est.records]
        harness.emit_results(records, args.records, "csv", include_timing=args.timing)


def _summary(est):
    return {
        "s_star": est.s_star,
        "successes": {str(s): pt.successes for s, pt in est.curve.items()},
        "trials_per_s": next(iter(est.curve.values())).trials,
    }


def cmd_threshold(args, out):
    est = harness.scan_threshold(args.n, args.c, Model(args.model), **_scan_kwargs(args))
    _write_outputs(args, [est])
    _print_json(est.to_dict(), out)
    return EXIT_OK


def cmd_compare(args, out):
    result = harness.compare_models(args.n, args.c, **_scan_kwargs(args))
    _write_outputs(args, list(result))
    _print_json(
        {
            "n": args.n,
            "c": args.c,
            "family": _summary(result.family),
            "uniform": _summary(result.uniform),
            "s_star_gap": result.gap,
        },
        out,
    )
    return EXIT_OK


def cmd_lemmas(args, out):
    _require(args, "n", "c", "trials")
    seed = _seed(args)
    p = _p_arg(args)
    fraction = harness.check_degree_lemma(args.n, args.c, args.trials, seed, p=p)
    checks = harness.check_doubling_lemma(args.n, args.c, args.sources, args.exclude, seed, p=p)
    _print_json(
        {
            "n": args.n,
            "c": args.c,
            "s": theory.s0_window(args.n, args.c)[0],
            "degree": {
                "bound": theory.degree_bound(args.n, args.c),
                "trials": args.trials,
                "holding_fraction": fraction,
            },
            "doubling": {
                "sources": len(checks),
                "exclusion_size": args.exclude,
                "runs_held": sum(ch.all_held for ch in checks),
                "checks": [
                    {
                        "source": ch.source,
                        "excluded": sorted(ch.excluded),
                        "steps": [list(st) for st in ch.steps],
                    }
                    for ch in checks
                ],
            },
        },
        out,
    )
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "check": cmd_check,
    "bounds": cmd_bounds,
    "firstmoment": cmd_firstmoment,
    "threshold": cmd_threshold,
    "compare": cmd_compare,
    "lemmas": cmd_lemmas,
}


def main(argv=None, out=None):
    """Run the CLI and return its exit code."""
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = _parse(parser, argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"rainbowlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"rainbowlab: {exc}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"rainbowlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GraphFormatError as exc:
        print(f"rainbowlab: {getattr(args, 'file', '')}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, CapacityError, ValueError, TypeError) as exc:
        print(f"rainbowlab: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"rainbowlab: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
