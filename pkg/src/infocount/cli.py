"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 capacity did not converge,
4 experiment over budget.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import channel as chan
from . import codec
from .combinatorics import TypeVector, entropy_rate, log2_count, multinomial_count
from .entropy import conditional_entropy, entropy, joint_entropy, mutual_information
from .errors import BudgetExceeded, InfoCountError, NotConverged
from .experiments import (
    DEFAULT_BUDGET,
    DEFAULT_COMPAT_TOL,
    RandomCodingConfig,
    binomial_limit_report,
    classify_by_type,
    no_gain_limit,
    random_coding_sweep,
)
from .probability import Distribution, JointDistribution

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_BUDGET = 0, 2, 3, 4

_UNITS = {2.0: "bits", math.e: "nats", 10.0: "hartleys"}


class ParseError(InfoCountError):
    pass


def _parse_base(text: str) -> float:
    if text == "e":
        return math.e
    try:
        base = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid base {text!r}") from None
    if not base > 0 or base == 1:
        raise argparse.ArgumentTypeError("base must be positive and != 1")
    return base


def _parse_counts(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(c) for c in text.replace(" ", "").split(",") if c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"counts must be comma-separated integers: {text!r}")


def _unit(base: float) -> str:
    return _UNITS.get(base, f"base{base:g}")


def _load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return obj


def _build(kind, obj, where):
    try:
        return kind.from_json(obj)
    except KeyError as exc:
        raise ParseError(f"{where}: missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InfoCountError):
            raise
        raise ParseError(f"{where}: {exc}") from None


def _distribution(obj, where) -> Distribution:
    if isinstance(obj, list):
        obj = {"probs": obj}
    return _build(Distribution, obj, where)


def _channel(obj, where, base_dir: Path) -> chan.DiscreteChannel:
    if isinstance(obj, str):
        path = base_dir / obj
        return _build(chan.DiscreteChannel, _load_json(path), str(path))
    return _build(chan.DiscreteChannel, obj, where)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(args, obj) -> None:
    _emit(args, json.dumps(obj, allow_nan=False) + "\n")


# ---------------------------------------------------------------- subcommands


def cmd_entropy(args) -> int:
    d = _build(Distribution, _load_json(args.file), args.file)
    h = entropy(d, args.base)
    _emit_json(args, {f"entropy_{_unit(args.base)}": h.value})
    return EXIT_OK


def cmd_joint_entropy(args) -> int:
    j = _build(JointDistribution, _load_json(args.file), args.file)
    _emit_json(args, {f"joint_entropy_{_unit(args.base)}": joint_entropy(j, args.base).value})
    return EXIT_OK


def cmd_conditional_entropy(args) -> int:
    j = _build(JointDistribution, _load_json(args.file), args.file)
    h = conditional_entropy(j, args.given, args.base)
    _emit_json(args, {f"conditional_entropy_{_unit(args.base)}": h.value, "given": args.given})
    return EXIT_OK


def cmd_mutual_info(args) -> int:
    d = _build(Distribution, _load_json(args.dist), args.dist)
    ch = _build(chan.DiscreteChannel, _load_json(args.channel), args.channel)
    mi = mutual_information(d, ch.transit, args.base)
    _emit_json(args, {f"mutual_information_{_unit(args.base)}": mi.value})
    return EXIT_OK


def cmd_capacity(args) -> int:
    ch = _build(chan.DiscreteChannel, _load_json(args.file), args.file)
    tol = args.tol if args.tol is not None else chan.DEFAULT_TOL
    code = EXIT_OK
    try:
        res = chan.capacity_iterative(ch, tol, args.max_iter, args.base)
    except NotConverged as exc:
        res, code = exc.result, EXIT_NOT_CONVERGED
        print(f"error: NotConverged: {exc}", file=sys.stderr)
    out = res.to_json()
    if args.oracle:
        orc = chan.capacity_grid_oracle(ch, args.resolution, args.base)
        out = {
            "iterative": out,
            "oracle": orc.to_json(),
            "difference": abs(res.capacity - orc.capacity),
        }
    _emit_json(args, out)
    return code


def cmd_count(args) -> int:
    t = TypeVector(args.counts)
    out = {
        "counts": list(t.counts),
        "T": t.T,
        "K": multinomial_count(t),
        "log2_K": log2_count(t),
    }
    if t.T > 0:
        out["entropy_rate_bits"] = entropy_rate(t)
        out["type_entropy_bits"] = entropy([c / t.T for c in t.counts]).value
    _emit_json(args, out)
    return EXIT_OK


def cmd_codec(args) -> int:
    try:
        data = Path(args.file).read_bytes()
    except OSError as exc:
        raise ParseError(f"{args.file}: {exc.strerror or exc}") from None
    if args.mode == "encode":
        alphabet = args.alphabet.encode("latin-1") if args.alphabet is not None else None
        if alphabet is not None:
            alphabet = bytes(sorted(set(alphabet)))
        blob = codec.encode_bytes(data, args.counts, alphabet)
    else:
        blob = codec.decode_bytes(data)
    if args.out:
        Path(args.out).write_bytes(blob)
    else:
        sys.stdout.buffer.write(blob)
        sys.stdout.buffer.flush()
    return EXIT_OK


def _experiment_report(cfg: dict, args, base_dir: Path):
    kind = cfg.get("kind")
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    compat_tol = args.tol if args.tol is not None else cfg.get("tol", DEFAULT_COMPAT_TOL)
    budget = float(cfg.get("budget", DEFAULT_BUDGET))
    try:
        if kind == "random_coding":
            ch = _channel(cfg["channel"], "channel", base_dir)
            rc = RandomCodingConfig(
                ch,
                _distribution(cfg["input"], "input"),
                cfg["block_lengths"],
                cfg["rates"],
                int(cfg["trials"]),
                seed,
                budget,
                cfg.get("method", "auto"),
            )
            return lambda: random_coding_sweep(rc, args.threads)
        if kind == "classify":
            ch = _channel(cfg["channel"], "channel", base_dir)
            d1 = _distribution(cfg["d1"], "d1")
            d2 = _distribution(cfg["d2"], "d2")
            Ts, trials = cfg["block_lengths"], int(cfg["trials"])
            return lambda: classify_by_type(ch, d1, d2, Ts, trials, seed, args.threads, budget)
        if kind == "no_gain":
            ch = _channel(cfg["channel"], "channel", base_dir)
            fs = [_distribution(d, "admissible_set") for d in cfg["admissible_set"]]
            Ts = cfg["T_values"]
            return lambda: no_gain_limit(ch, fs, Ts, compat_tol)
        if kind == "binomial_limit":
            Ts = cfg["T_values"]
            return lambda: binomial_limit_report(Ts)
    except KeyError as exc:
        raise ParseError(f"experiment config: missing field {exc}") from None
    raise ParseError(f"unknown experiment kind {kind!r}")


def cmd_experiment(args) -> int:
    cfg = _load_json(args.file)
    run = _experiment_report(cfg, args, Path(args.file).resolve().parent)
    report = run()
    text = report.to_text() if args.format == "text" else report.dumps()
    _emit(args, text)
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    print(f"seed={report.seed} wall_time={report.wall_time:.3f}s", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _common() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--base", type=_parse_base, default=argparse.SUPPRESS,
                   help="logarithm base: 2 (default), e, 10 or any positive number")
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                   help="capacity bracket width, or compatibility tolerance for experiments")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    p.add_argument("--out", default=argparse.SUPPRESS, help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="infocount",
        description="Entropy, enumerative coding and channel capacity toolkit.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", parents=[common], help="Shannon entropy of a distribution file")
    p.add_argument("file")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("joint-entropy", parents=[common], help="H(X,Y) of a joint distribution file")
    p.add_argument("file")
    p.set_defaults(func=cmd_joint_entropy)

    p = sub.add_parser("conditional-entropy", parents=[common],
                       help="H(X|Y) (--given y) or H(Y|X) (--given x)")
    p.add_argument("file")
    p.add_argument("--given", choices=["x", "y"], default="y")
    p.set_defaults(func=cmd_conditional_entropy)

    p = sub.add_parser("mutual-info", parents=[common], help="I(X;Y) for an input file and a channel file")
    p.add_argument("dist")
    p.add_argument("channel")
    p.set_defaults(func=cmd_mutual_info)

    p = sub.add_parser("capacity", parents=[common], help="capacity of a channel file")
    p.add_argument("file")
    p.add_argument("--oracle", action="store_true", help="also run the brute-force grid search")
    p.add_argument("--resolution", type=int, default=10_000)
    p.add_argument("--max-iter", type=int, default=chan.DEFAULT_MAX_ITER)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("count", parents=[common], help="number of sequences with given symbol counts")
    p.add_argument("counts", type=_parse_counts, help="e.g. 2,3")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("codec", parents=[common], help="enumerative encode/decode of a byte file")
    p.add_argument("mode", choices=["encode", "decode"])
    p.add_argument("file")
    p.add_argument("--counts", type=_parse_counts, default=None,
                   help="declared symbol counts, in alphabet order")
    p.add_argument("--alphabet", default=None,
                   help="symbols as a string (default: distinct bytes of the input)")
    p.set_defaults(func=cmd_codec)

    p = sub.add_parser("experiment", parents=[common], help="run an experiment config file")
    p.add_argument("file")
    p.add_argument("--csv", default=None, help="also write the result table as CSV")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("base", 2.0), ("tol", None), ("seed", None), ("threads", 1), ("out", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InfoCountError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
