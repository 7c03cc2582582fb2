"""Command line front end.

Exit codes: 0 success, 2 validation error, 3 a checked property is
violated (or a net/extraction fails), 4 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .compactness import (
    ANCHOR_POLICIES,
    extract_s_quasi_cauchy_subsequence,
    greedy_alpha_net,
    test_compact_image,
)
from .continuity import (
    FUNCTION_FAMILIES,
    FunctionSpec,
    classify_uniform_continuity,
    estimate_uniform_modulus,
    test_s_ward,
    test_sequential_continuity,
    test_uniform_limit,
    test_ward,
)
from .errors import ExtractionFailure, PreconditionError
from .nnorm import SpaceConfig, gram_nnorm_oracle, nnorm_inf, nnorm_p, parse_p
from .report import dumps
from .sequences import (
    FAMILIES,
    SequenceSpec,
    WitnessSet,
    catalog_sequence,
    classify,
    standard_witnesses,
)
from .suite import UNIFORM_LIMIT_CASES, ConfigError, load_config, run_suite, uniform_limit_case

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VIOLATION = 3
EXIT_INTERNAL = 4


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


# ------------------------------------------------------------------ parsing


def _vector(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}") from exc


def _param_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    if "," in text:
        return _vector(text)
    return text


def _params(items: list[str] | None) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"parameters are key=value, got {item!r}")
        out[key.strip()] = _param_value(value.strip())
    return out


def _space(args, d: int) -> SpaceConfig:
    return SpaceConfig(d=d, n=args.n, p=parse_p(args.p))


def _witnesses(args, cfg: SpaceConfig) -> WitnessSet:
    if not getattr(args, "witness", None):
        return standard_witnesses(cfg)
    tuples = []
    for text in args.witness:
        rows = [_vector(r) for r in text.split("|")]
        tuples.append(rows)
    ws = WitnessSet(np.asarray(tuples, dtype=float), label="explicit")
    ws.check(cfg)
    return ws


def _sequence(args, horizon: int, d: int) -> SequenceSpec:
    if args.seq_file:
        seq = SequenceSpec.from_text(Path(args.seq_file).read_text())
        return seq
    if args.seq not in FAMILIES or args.seq == "repeat-interleave":
        raise UsageError(f"unknown catalog sequence {args.seq!r}")
    return catalog_sequence(args.seq, _params(args.param), horizon=horizon, d=d, seed=args.seed)


def _function(args) -> FunctionSpec:
    if args.func_config:
        return FunctionSpec.from_text(Path(args.func_config).read_text())
    if args.func not in FUNCTION_FAMILIES or args.func in ("composition", "lincomb"):
        raise UsageError(f"unknown function family {args.func!r} (use --func-config for "
                         "compositions and combinations)")
    return FunctionSpec(args.func, _params(args.fparam))


def _emit(obj, out: str | None) -> None:
    text = dumps(obj) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- commands


def cmd_norm(args) -> int:
    vectors = [_vector(v) for v in args.vec or []]
    if args.file:
        rows = np.loadtxt(args.file, delimiter=",", ndmin=2)
        vectors.extend(rows.tolist())
    if not vectors:
        raise UsageError("no vectors given (use --vec or --file)")
    if len({len(v) for v in vectors}) != 1:
        raise UsageError("vectors have different lengths")
    d = len(vectors[0])
    if len(vectors) != args.n:
        raise UsageError(f"an {args.n}-norm takes {args.n} vectors, got {len(vectors)}")
    cfg = _space(args, d)
    if args.gram:
        if parse_p(args.p) != 2.0:
            raise UsageError("the Gram route only computes the p = 2 norm")
        value = gram_nnorm_oracle(vectors)
    elif cfg.p_is_inf:
        value = nnorm_inf(vectors, cfg, method=args.method)
    else:
        value = nnorm_p(vectors, cfg, method=args.method)
    print(f"{value:.12f}")
    return EXIT_OK


def cmd_classify(args) -> int:
    seq = _sequence(args, args.H, args.d)
    cfg = _space(args, seq.d)
    zeta = _vector(args.zeta) if args.zeta else None
    report = classify(seq, cfg, _witnesses(args, cfg), s_list=args.s or [1],
                      horizon=args.H if not args.seq_file else None, tau=args.tau, zeta=zeta)
    _emit(report.to_dict(), args.out)
    return EXIT_VIOLATION if report.any_violated else EXIT_OK


def _corpus(args, d: int) -> list[SequenceSpec]:
    names = args.seq or ["sqrt-ramp"]
    out = []
    for name in names:
        if name not in FAMILIES or name == "repeat-interleave":
            raise UsageError(f"unknown catalog sequence {name!r}")
        out.append(catalog_sequence(name, _params(args.param), horizon=args.H, d=d,
                                    seed=args.seed))
    return out


def cmd_func_test(args) -> int:
    f = _function(args)
    cfg = _space(args, args.d)
    ws = _witnesses(args, cfg)
    test = args.test
    if test in ("s-ward", "ward"):
        corpus = _corpus(args, args.d)
        if test == "ward":
            rep = test_ward(f, corpus, cfg, ws, args.H, args.tau)
        else:
            rep = test_s_ward(f, corpus, args.s, cfg, ws, args.H, args.tau)
        _emit(rep.to_dict(), args.out)
        return EXIT_VIOLATION if rep.violated else EXIT_OK
    if test == "continuity":
        zeta = _vector(args.zeta) if args.zeta else [0.0] * args.d
        rep = test_sequential_continuity(f, zeta, cfg, ws, args.H, args.tau)
        _emit(rep.to_dict(), args.out)
        return EXIT_VIOLATION if rep.violated else EXIT_OK
    if test == "uniform-modulus":
        if args.box is not None:
            table = estimate_uniform_modulus(f, -args.box, args.box, args.grid, cfg, ws,
                                             seed=args.seed)
            body = {"box": args.box, **table.to_dict(), "shrinking": table.is_shrinking()}
            _emit(body, args.out)
            return EXIT_OK if table.is_shrinking() else EXIT_VIOLATION
        body = classify_uniform_continuity(f, cfg, ws, grid=args.grid, seed=args.seed)
        _emit(body, args.out)
        return EXIT_OK if body["uniform"] else EXIT_VIOLATION
    # uniform-limit: the function flags are ignored, a shipped case is used
    if args.case not in UNIFORM_LIMIT_CASES:
        raise UsageError(f"unknown uniform-limit case {args.case!r}")
    f_seq, f_lim = uniform_limit_case(args.case, args.d)
    rep = test_uniform_limit(f_seq, f_lim, _corpus(args, args.d), args.s, cfg, ws,
                             args.H, args.tau)
    _emit(rep.to_dict(), args.out)
    return EXIT_VIOLATION if rep.violated else EXIT_OK


def _points(text: str, d: int, seed: int) -> np.ndarray:
    kind, _, count = text.partition(":")
    try:
        m = int(count)
    except ValueError as exc:
        raise UsageError(f"points are uniform:N or ramp:N, got {text!r}") from exc
    if m < 1:
        raise UsageError("point count must be positive")
    if kind == "uniform":
        return np.random.default_rng(seed).uniform(0, 1, (m, d))
    if kind == "ramp":
        return np.outer(np.arange(1, m + 1, dtype=float), np.ones(d))
    raise UsageError(f"unknown point set {kind!r}")


def cmd_compact(args) -> int:
    cfg = _space(args, args.d)
    ws = _witnesses(args, cfg)
    if args.mode == "net":
        pts = _points(args.points, args.d, args.seed)
        net = greedy_alpha_net(pts, args.alpha, cfg, args.policy,
                               cap=args.cap or pts.shape[0], witnesses=ws)
        _emit(net.to_dict(), args.out)
        return EXIT_OK if net.found else EXIT_VIOLATION
    seq = _sequence(args, args.H, args.d)
    if args.mode == "extract":
        try:
            ext = extract_s_quasi_cauchy_subsequence(seq, args.s, cfg, ws, args.H)
        except ExtractionFailure as exc:
            _emit({"status": "failed", "stage": exc.stage, "best_count": exc.best_count,
                   "reason": str(exc)}, args.out)
            return EXIT_VIOLATION
        _emit({"status": "succeeded", **ext.to_dict()}, args.out)
        return EXIT_OK
    f = _function(args)
    verdict, payload = test_compact_image(f, seq, args.s, cfg, ws, args.H, args.tau)
    _emit({"verdict": verdict.to_dict(), **payload}, args.out)
    if "extraction_failure" in payload or verdict.violated:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_suite(args) -> int:
    overrides = {"seed": args.seed, "H": args.H, "tau": args.tau, "output": args.out}
    cfg = load_config(args.config, overrides)
    body = run_suite(cfg, threads=args.threads)
    text = dumps(body) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    s = body["summary"]
    print(f"sections green {s['sections_green']}, skipped {s['sections_skipped']}, "
          f"expected counterexamples {s['expected_counterexamples']}, "
          f"unexpected violations {s['unexpected_violations']}", file=sys.stderr)
    return EXIT_OK if s["unexpected_violations"] == 0 else EXIT_VIOLATION


# ------------------------------------------------------------------- parser


def _space_flags(p, d_default: int | None = 2) -> None:
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--p", default="2", help="exponent >= 1 or 'inf'")
    if d_default is not None:
        p.add_argument("--d", type=int, default=d_default)
    p.add_argument("--witness", action="append",
                   help="witness tuple, rows separated by '|', e.g. '0,1' or '0,0,1|0,1,0'")


def _seq_flags(p, multiple: bool = False) -> None:
    if multiple:
        p.add_argument("--seq", action="append", help="catalog sequence (repeatable)")
    else:
        p.add_argument("--seq", default="alternating", help="catalog sequence")
        p.add_argument("--seq-file", help="JSON sequence spec")
    p.add_argument("--param", action="append", help="sequence parameter key=value")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--H", type=int, default=1000)
    p.add_argument("--tau", type=float, default=1e-3)


def _func_flags(p) -> None:
    p.add_argument("--func", default="coordinate-square")
    p.add_argument("--fparam", action="append", help="function parameter key=value")
    p.add_argument("--func-config", help="JSON function spec")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nward", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nward {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("norm", help="evaluate an n-norm")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--p", default="2")
    p.add_argument("--vec", action="append", help="comma separated vector (repeatable)")
    p.add_argument("--file", help="CSV file, one vector per row")
    p.add_argument("--method", choices=("combinations", "ordered"), default="combinations")
    p.add_argument("--gram", action="store_true", help="use the Gram determinant (p = 2)")
    p.set_defaults(func_cmd=cmd_norm)

    p = sub.add_parser("classify", help="classify a sequence")
    _space_flags(p)
    _seq_flags(p)
    p.add_argument("--s", type=int, action="append")
    p.add_argument("--zeta", help="limit candidate for the convergence check")
    p.add_argument("--out")
    p.set_defaults(func_cmd=cmd_classify)

    p = sub.add_parser("func-test", help="continuity harnesses for one map")
    _space_flags(p)
    _seq_flags(p, multiple=True)
    _func_flags(p)
    p.add_argument("--test", required=True,
                   choices=("s-ward", "ward", "continuity", "uniform-modulus", "uniform-limit"))
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--zeta")
    p.add_argument("--box", type=float, help="half width of one box for the modulus table")
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--case", default="scale-to-identity", help="uniform-limit case")
    p.add_argument("--out")
    p.set_defaults(func_cmd=cmd_func_test)

    p = sub.add_parser("compact", help="nets, extraction and compact images")
    _space_flags(p)
    _seq_flags(p)
    _func_flags(p)
    p.add_argument("--mode", choices=("net", "extract", "image"), default="net")
    p.add_argument("--points", default="uniform:1000", help="uniform:N or ramp:N")
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--cap", type=int, default=0, help="0 means the number of points")
    p.add_argument("--policy", choices=ANCHOR_POLICIES, default="center-basis")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func_cmd=cmd_compact)

    p = sub.add_parser("suite", help="run every theorem section")
    p.add_argument("--config", help="JSON config (default: the shipped one)")
    p.add_argument("--out", help="report path (overrides the config)")
    p.add_argument("--seed", type=int)
    p.add_argument("--H", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--threads", type=int, help="worker threads (default NWARD_THREADS)")
    p.set_defaults(func_cmd=cmd_suite)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func_cmd(args)
    except (UsageError, ConfigError, PreconditionError, ValueError, OSError) as exc:
        print(f"nward {args.command}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001
        print(f"nward {args.command}: internal error: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
