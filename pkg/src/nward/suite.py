"""Theorem suite: runs every property section and assembles one report.

Each section yields cases with one of the outcomes below.  Catalog
counterexamples (a sequence or map that is known to separate two notions)
are expected to show their violation.  One that is contradicted by a
definite verdict is an unexpected violation; one that cannot be resolved at
the configured (H, tau) is reported as not applicable.
"""
from __future__ import annotations

import json
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .compactness import (
    ball_norms,
    extract_s_quasi_cauchy_subsequence,
    greedy_alpha_net,
    test_compact_image,
)
from .continuity import (
    FunctionSpec,
    classify_uniform_continuity,
    identity,
    test_s_ward,
    test_sequential_continuity,
    test_uniform_limit,
    test_ward,
)
from .errors import ExtractionFailure, PreconditionError
from .nnorm import SpaceConfig, check_axioms, gram_nnorm_oracle, nnorm_p
from .sequences import (
    CAUCHY,
    FAMILIES,
    QUASI_CAUCHY,
    SequenceSpec,
    WitnessSet,
    catalog_sequence,
    classify,
    explicit_sequence,
    interleave_with_limit,
    repeat_interleave,
    s_property,
    s_quasi_cauchy_verdict,
    standard_witnesses,
    telescoping_residuals,
)

PASS = "pass"
EXPECTED = "expected-counterexample"
UNEXPECTED = "unexpected-violation"
NOT_APPLICABLE = "not-applicable"
SKIPPED = "skipped"
OUTCOMES = (PASS, EXPECTED, UNEXPECTED, NOT_APPLICABLE, SKIPPED)

SECTIONS = (
    ("norm-axioms", "the determinant n-norms satisfy the four n-norm axioms"),
    ("cauchy-binet", "the p = 2 n-norm equals the square root of the Gram determinant"),
    ("telescoping", "Delta_s x_k is the sum of s consecutive first differences"),
    ("verdict-chain", "Cauchy implies quasi-Cauchy implies s-quasi-Cauchy"),
    ("s-ward=>ward", "an s-ward continuous map is ward continuous"),
    ("s-ward=>continuous", "an s-ward continuous map is sequentially continuous"),
    ("uniform=>s-ward", "a uniformly continuous map is s-ward continuous"),
    ("uniform-limit", "a uniform limit of s-ward continuous maps is s-ward continuous"),
    ("compact-image", "an s-ward continuous image of an s-ward compact set is s-ward compact"),
    ("totally-bounded<=>s-ward-compact", "a set is totally bounded iff it is s-ward compact"),
)
FUNCTION_SECTIONS = {"s-ward=>ward", "s-ward=>continuous", "uniform=>s-ward", "uniform-limit",
                     "compact-image"}
UNIFORM_LIMIT_CASES = ("scale-to-identity", "constant-sequence", "shrinking-translation")

TELESCOPING_TOL = 1e-12
CAUCHY_BINET_RTOL = 1e-9
AXIOM_TOL = 1e-12


class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    space: SpaceConfig
    sequences: list[dict]
    functions: list[dict] | None
    s_list: list[int]
    horizon: int
    tau: float
    seed: int = 0
    witness_policy: str = "standard-basis"
    witnesses: list | None = None
    uniform_limits: list[str] = field(default_factory=lambda: list(UNIFORM_LIMIT_CASES))
    limit_points: list[list[float]] = field(default_factory=list)
    output: str | None = None
    axiom_samples: int = 500
    cauchy_binet_samples: int = 200
    compact: dict = field(default_factory=dict)
    random_witness_sets: int = 2

    def witness_set(self) -> WitnessSet:
        if self.witness_policy == "standard-basis":
            return standard_witnesses(self.space)
        ws = WitnessSet(np.asarray(self.witnesses, dtype=float), label="explicit")
        ws.check(self.space)
        return ws

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "sequences": self.sequences,
            "functions": self.functions,
            "s_list": self.s_list,
            "H": self.horizon,
            "tau": self.tau,
            "seed": self.seed,
            "witness_policy": self.witness_policy,
            "witnesses": self.witnesses,
            "uniform_limits": self.uniform_limits,
            "limit_points": self.limit_points,
            "axiom_samples": self.axiom_samples,
            "cauchy_binet_samples": self.cauchy_binet_samples,
            "compact": self.compact_settings(),
            "random_witness_sets": self.random_witness_sets,
        }

    def compact_settings(self) -> dict:
        out = {"alpha": 0.25, "points": 1000, "ramp_points": 50, "ramp_alpha": 0.5,
               "ramp_cap": 20, "extraction_H": 4096, "tau": 0.25}
        out.update(self.compact)
        return out


def default_config_text() -> str:
    return resources.files("nward").joinpath("data/default_suite.json").read_text()


def load_config(path: str | os.PathLike | None = None, overrides: dict | None = None) -> SuiteConfig:
    if path is None:
        raw = json.loads(default_config_text())
    else:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return parse_config(raw)


def parse_config(raw: dict) -> SuiteConfig:
    try:
        space = SpaceConfig.from_dict(raw.get("space", {"d": 2, "n": 2, "p": 2}))
        s_list = sorted({int(s) for s in raw.get("s_list", [1, 2, 3])})
        horizon = int(raw["H"])
        tau = float(raw["tau"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    if not s_list or s_list[0] < 1:
        raise ConfigError("s_list must hold positive integers")
    if not (tau > 0 and math.isfinite(tau)):
        raise ConfigError("tau must be positive and finite")
    if horizon < 4 * s_list[-1]:
        raise ConfigError(f"H must be at least 4 * max(s) = {4 * s_list[-1]}")
    sequences = raw.get("sequences") or []
    for entry in sequences:
        if entry.get("name") not in FAMILIES or entry.get("name") == "repeat-interleave":
            raise ConfigError(f"unknown catalog sequence {entry.get('name')!r}")
    functions = raw.get("functions")
    if functions:
        for entry in functions:
            try:
                FunctionSpec.from_dict(entry)
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"invalid function entry {entry}: {exc}") from exc
    limits = raw.get("uniform_limits", list(UNIFORM_LIMIT_CASES))
    for name in limits:
        if name not in UNIFORM_LIMIT_CASES:
            raise ConfigError(f"unknown uniform-limit case {name!r}")
    policy = raw.get("witness_policy", "standard-basis")
    if policy not in ("standard-basis", "explicit"):
        raise ConfigError(f"unknown witness policy {policy!r}")
    cfg = SuiteConfig(
        space=space, sequences=sequences, functions=functions or None, s_list=s_list,
        horizon=horizon, tau=tau, seed=int(raw.get("seed", 0)), witness_policy=policy,
        witnesses=raw.get("witnesses"), uniform_limits=list(limits),
        limit_points=raw.get("limit_points", []), output=raw.get("output"),
        axiom_samples=int(raw.get("axiom_samples", 500)),
        cauchy_binet_samples=int(raw.get("cauchy_binet_samples", 200)),
        compact=raw.get("compact", {}), random_witness_sets=int(raw.get("random_witness_sets", 2)),
    )
    try:
        cfg.witness_set()
        for entry in sequences:
            _build_sequence(entry, cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _build_sequence(entry: dict, cfg: SuiteConfig) -> SequenceSpec:
    seq = catalog_sequence(entry["name"], entry.get("params") or {}, horizon=cfg.horizon,
                           d=cfg.space.d, seed=int(entry.get("seed", cfg.seed)))
    seq.label = entry.get("label", entry["name"])
    return seq


# ------------------------------------------------------------------ context


class Context:
    """Objects shared by the sections, built once before any section runs."""

    def __init__(self, cfg: SuiteConfig):
        self.cfg = cfg
        self.space = cfg.space
        self._extractions: dict = {}
        self._lock = threading.Lock()
        self.witnesses = cfg.witness_set()
        self.sequences = [_build_sequence(e, cfg) for e in cfg.sequences]
        self.functions = [FunctionSpec.from_dict(e) for e in cfg.functions or []]
        self.expectations = {f.label: (e.get("expect") or "")
                             for f, e in zip(self.functions, cfg.functions or [])}
        self.s_ward_list = [s for s in cfg.s_list if s > 1] or [2]
        # base corpus: members that are quasi-Cauchy (hence s-quasi-Cauchy) at (H, tau)
        self.base_corpus = [
            seq for seq in self.sequences
            if s_quasi_cauchy_verdict(seq, 1, self.witnesses, self.space, cfg.horizon,
                                      cfg.tau).satisfied]
        self.closed_corpus = {s: self._interleave_closed(s) for s in self.s_ward_list}
        self.s_ward = {f.label: self._s_ward_results(f) for f in self.functions}

    def _interleave_closed(self, s: int) -> list[SequenceSpec]:
        out = list(self.base_corpus)
        for seq in self.base_corpus:
            inter = repeat_interleave(seq, s).truncated(self.cfg.horizon)
            inter.label = f"interleave{s}({seq.label})"
            if s_quasi_cauchy_verdict(inter, s, self.witnesses, self.space, self.cfg.horizon,
                                      self.cfg.tau).satisfied:
                out.append(inter)
        return out

    def _s_ward_results(self, f: FunctionSpec) -> dict:
        return {s: test_s_ward(f, self.closed_corpus[s], s, self.space, self.witnesses,
                               self.cfg.horizon, self.cfg.tau)
                for s in self.s_ward_list}

    def extraction(self, seq: SequenceSpec, s: int):
        """Cached extraction result, or the ExtractionFailure it raised."""
        key = (seq.label, s)
        with self._lock:
            if key not in self._extractions:
                h = min(self.cfg.horizon, int(self.cfg.compact_settings()["extraction_H"]))
                try:
                    self._extractions[key] = extract_s_quasi_cauchy_subsequence(
                        seq, s, self.space, self.witnesses, h)
                except ExtractionFailure as exc:
                    self._extractions[key] = exc
            return self._extractions[key]

    def passes_s_ward(self, f: FunctionSpec) -> bool:
        return not any(r.violated for r in self.s_ward[f.label].values())

    def rng(self, offset: int) -> np.random.Generator:
        return np.random.default_rng([self.cfg.seed, offset])


def _case(case: str, outcome: str, **payload) -> dict:
    return {"case": case, "outcome": outcome, **payload}


# ----------------------------------------------------------------- sections


def section_norm_axioms(ctx: Context) -> list[dict]:
    spaces = [ctx.space, SpaceConfig(3, 2, 2), SpaceConfig(4, 3, 2), SpaceConfig(4, 2, 1),
              SpaceConfig(3, 2, math.inf), SpaceConfig(5, 3, 3)]
    cases = []
    for i, space in enumerate(spaces):
        rng = ctx.rng(100 + i)
        samples = rng.uniform(-1, 1, (ctx.cfg.axiom_samples, space.n, space.d))
        rep = check_axioms(samples, space, AXIOM_TOL, rng)
        cases.append(_case(f"d={space.d},n={space.n},p={space.to_dict()['p']}",
                           PASS if rep.passed else UNEXPECTED, **rep.to_dict()))
    return cases


def section_cauchy_binet(ctx: Context) -> list[dict]:
    cases = []
    for i, (n, d) in enumerate([(2, 3), (2, 4), (2, 5), (3, 3), (3, 4), (3, 5)]):
        rng = ctx.rng(200 + i)
        space = SpaceConfig(d, n, 2.0)
        worst = 0.0
        count = max(1, ctx.cfg.cauchy_binet_samples // 6)
        for t in rng.uniform(-10, 10, (count, n, d)):
            oracle = gram_nnorm_oracle(t)
            worst = max(worst, abs(nnorm_p(t, space) - oracle) / max(oracle, 1e-300))
        cases.append(_case(f"n={n},d={d}", PASS if worst <= CAUCHY_BINET_RTOL else UNEXPECTED,
                           samples=count, worst_relative_error=worst, rtol=CAUCHY_BINET_RTOL))
    return cases


def _catalog(ctx: Context) -> list[SequenceSpec]:
    out = list(ctx.sequences)
    for seq in ctx.sequences:
        for s in ctx.s_ward_list:
            inter = repeat_interleave(seq, s).truncated(ctx.cfg.horizon)
            inter.label = f"interleave{s}({seq.label})"
            out.append(inter)
    return out


def section_telescoping(ctx: Context) -> list[dict]:
    cases = []
    for seq in _catalog(ctx):
        x = seq.values()
        worst = 0.0
        for s in range(1, 6):
            kmax = min(1000, seq.horizon - s)
            res = telescoping_residuals(seq, s, kmax)
            # local scale: largest coordinate among x_k .. x_{k+s}
            window = np.abs(x[: kmax + s]).max(axis=1)
            scale = np.array([window[k: k + s + 1].max() for k in range(kmax)])
            ratio = np.where(scale > 0, res / np.where(scale > 0, scale, 1.0),
                             np.where(res > 0, np.inf, 0.0))
            worst = max(worst, float(ratio.max()))
        cases.append(_case(seq.label, PASS if worst <= TELESCOPING_TOL else UNEXPECTED,
                           worst_scaled_residual=worst, s_range=[1, 5], k_max=1000))
    return cases


def _witness_grid(ctx: Context) -> list[WitnessSet]:
    grid = [ctx.witnesses]
    space = ctx.space
    for i in range(ctx.cfg.random_witness_sets):
        rng = ctx.rng(400 + i)
        tuples = rng.standard_normal((3, space.n - 1, space.d))
        grid.append(WitnessSet(tuples, label=f"gaussian-{i}"))
    return grid


def section_verdict_chain(ctx: Context) -> list[dict]:
    cfg = ctx.cfg
    cases = []
    for ws in _witness_grid(ctx):
        for seq in _catalog(ctx):
            rep = classify(seq, ctx.space, ws, cfg.s_list, cfg.horizon, cfg.tau)
            ok = rep.chain_consistent()
            cases.append(_case(f"{seq.label}/{ws.label}", PASS if ok else UNEXPECTED,
                               statuses={k: v.status for k, v in rep.verdicts.items()}))
    # catalog counterexamples: the converse implications fail
    d = ctx.space.d
    alt = catalog_sequence("alternating", horizon=cfg.horizon, d=d)
    rep = classify(alt, ctx.space, ctx.witnesses, [1, 2], cfg.horizon, cfg.tau)
    cases.append(_case("alternating/s=1",
                       _separation_outcome(rep.verdicts[s_property(2)], rep.verdicts[QUASI_CAUCHY]),
                       note="2-quasi-Cauchy but not quasi-Cauchy",
                       report=rep.to_dict()["properties"]))
    ramp = catalog_sequence("sqrt-ramp", horizon=cfg.horizon, d=d)
    rep = classify(ramp, ctx.space, ctx.witnesses, [1], cfg.horizon, cfg.tau)
    cases.append(_case("sqrt-ramp/Cauchy",
                       _separation_outcome(rep.verdicts[QUASI_CAUCHY], rep.verdicts[CAUCHY]),
                       note="quasi-Cauchy but not Cauchy", report=rep.to_dict()["properties"]))
    return cases


def _separation_outcome(holds: Verdict, fails: Verdict) -> str:
    """Grade a counterexample: shown, contradicted, or not resolved at (H, tau)."""
    if holds.satisfied and fails.violated:
        return EXPECTED
    if holds.violated or fails.satisfied:
        return UNEXPECTED
    return NOT_APPLICABLE


def _s_ward_payload(ctx: Context, f: FunctionSpec) -> dict:
    return {str(s): {"status": r.status, "witness_member": r.witness_member,
                     "tail_max": None if r.verdict is None else r.verdict.tail_max,
                     "tail_min": None if r.verdict is None else r.verdict.tail_min,
                     "degenerate": r.degenerate}
            for s, r in ctx.s_ward[f.label].items()}


def section_s_ward_ward(ctx: Context) -> list[dict]:
    cfg = ctx.cfg
    cases = []
    for f in ctx.functions:
        ward = test_ward(f, ctx.base_corpus, ctx.space, ctx.witnesses, cfg.horizon, cfg.tau)
        payload = {"s_ward": _s_ward_payload(ctx, f), "ward": ward.status}
        if ctx.expectations[f.label] == "ward-violated":
            outcome = (EXPECTED if ward.violated
                       else UNEXPECTED if ward.status == "satisfied" else NOT_APPLICABLE)
            payload["note"] = "continuous but not ward continuous on an unbounded ramp"
        elif ctx.passes_s_ward(f):
            outcome = UNEXPECTED if ward.violated else PASS
        else:
            outcome = NOT_APPLICABLE
        cases.append(_case(f.label, outcome, **payload))
    return cases


def _limit_points(ctx: Context) -> list[np.ndarray]:
    pts = [np.zeros(ctx.space.d)]
    for seq in ctx.sequences:
        if seq.family == "constant":
            pts.append(seq.values()[0].copy())
    pts.extend(np.asarray(p, dtype=float) for p in ctx.cfg.limit_points)
    uniq = []
    for p in pts:
        if not any(np.array_equal(p, q) for q in uniq):
            uniq.append(p)
    return uniq


def section_s_ward_continuous(ctx: Context) -> list[dict]:
    cfg = ctx.cfg
    cases = []
    for f in ctx.functions:
        if not ctx.passes_s_ward(f):
            cases.append(_case(f.label, NOT_APPLICABLE, s_ward=_s_ward_payload(ctx, f)))
            continue
        for zeta in _limit_points(ctx):
            rep = test_sequential_continuity(f, zeta, ctx.space, ctx.witnesses, cfg.horizon,
                                             cfg.tau)
            # the interleaving (x_1 x s, zeta x s, x_2 x s, ...) of a path to zeta is
            # s-quasi-Cauchy, and so is its image
            s = ctx.s_ward_list[-1]
            path = catalog_sequence("geometric", {"v": ctx.witnesses.tuples[0, 0].tolist()},
                                    horizon=cfg.horizon, d=ctx.space.d)
            path = explicit_sequence(path.values() + zeta)
            inter = interleave_with_limit(path, zeta, s).truncated(cfg.horizon)
            src = s_quasi_cauchy_verdict(inter, s, ctx.witnesses, ctx.space, cfg.horizon, cfg.tau)
            img = test_s_ward(f, [inter], s, ctx.space, ctx.witnesses, cfg.horizon, cfg.tau) \
                if src.satisfied else None
            ok = not rep.violated and src.satisfied and not (img and img.violated)
            cases.append(_case(f"{f.label}@{zeta.tolist()}", PASS if ok else UNEXPECTED,
                               continuity=rep.status,
                               interleaved_path=src.status,
                               interleaved_image=None if img is None else img.status))
    return cases


def section_uniform_s_ward(ctx: Context) -> list[dict]:
    cases = []
    for f in ctx.functions:
        uni = classify_uniform_continuity(f, ctx.space, ctx.witnesses, seed=ctx.cfg.seed)
        payload = {"uniform": uni["uniform"], "modulus_growth": uni["growth"],
                   "shrinking": uni["shrinking"], "s_ward": _s_ward_payload(ctx, f)}
        if not uni["uniform"]:
            outcome = NOT_APPLICABLE
        else:
            outcome = PASS if ctx.passes_s_ward(f) else UNEXPECTED
        cases.append(_case(f.label, outcome, **payload))
    return cases


def uniform_limit_case(name: str, d: int, terms: int = 8) -> tuple[list[FunctionSpec], FunctionSpec]:
    if name == "scale-to-identity":
        seq = [FunctionSpec("scale", {"c": 1 + 1 / t}, label=f"scale(1+1/{t})")
               for t in range(1, terms + 1)]
        return seq, identity(d)
    if name == "constant-sequence":
        A = np.eye(d) + 0.5 * np.eye(d, k=1)
        lim = FunctionSpec("linear", {"A": A}, label="shear")
        return [FunctionSpec("linear", {"A": A.copy()}, label="shear") for _ in range(terms)], lim
    if name == "shrinking-translation":
        b = np.ones(d)
        seq = [FunctionSpec("affine", {"A": np.eye(d), "b": b / t}, label=f"translate(b/{t})")
               for t in range(1, terms + 1)]
        return seq, FunctionSpec("linear", {"A": np.eye(d)}, label="linear(I)")
    raise ValueError(f"unknown uniform-limit case {name!r}")


def section_uniform_limit(ctx: Context) -> list[dict]:
    cfg = ctx.cfg
    cases = []
    for name in cfg.uniform_limits:
        f_seq, f_lim = uniform_limit_case(name, ctx.space.d)
        for s in ctx.s_ward_list:
            corpus = ctx.closed_corpus[s]
            try:
                rep = test_uniform_limit(f_seq, f_lim, corpus, s, ctx.space, ctx.witnesses,
                                         cfg.horizon, cfg.tau)
            except PreconditionError as exc:
                cases.append(_case(f"{name}/s={s}", UNEXPECTED, error=str(exc)))
                continue
            bound = rep.extra.get("decomposition", {}).get("bound_holds", True)
            ok = rep.status == "satisfied" and bound
            cases.append(_case(f"{name}/s={s}", PASS if ok else UNEXPECTED, status=rep.status,
                               sup_distance=rep.extra["sup_distance"],
                               decomposition=rep.extra.get("decomposition")))
    return cases


def section_compact_image(ctx: Context) -> list[dict]:
    cfg = ctx.cfg
    settings = cfg.compact_settings()
    h = min(cfg.horizon, int(settings["extraction_H"]))
    cases = []
    for f in ctx.functions:
        if not ctx.passes_s_ward(f):
            cases.append(_case(f.label, NOT_APPLICABLE, s_ward=_s_ward_payload(ctx, f)))
            continue
        for seq in ctx.sequences:
            for s in ctx.s_ward_list:
                verdict, payload = test_compact_image(f, seq, s, ctx.space, ctx.witnesses, h,
                                                      float(settings["tau"]),
                                                      extraction=ctx.extraction(seq, s))
                label = f"{f.label}/{seq.label}/s={s}"
                if "extraction_failure" in payload:
                    cases.append(_case(label, NOT_APPLICABLE, reason=payload["extraction_failure"]))
                    continue
                ok = not verdict.violated
                cases.append(_case(label, PASS if ok else UNEXPECTED, status=verdict.status,
                                   tail_max=verdict.tail_max,
                                   indices=payload["extraction"]["indices"]))
    return cases


def _separated(points, net, cfg) -> bool:
    for j, idx in enumerate(net.witness_indices):
        for ball in net.balls[:j]:
            if ball_norms(ball, points[idx][None], cfg)[0] < net.alpha:
                return False
    return True


def section_totally_bounded(ctx: Context) -> list[dict]:
    cfg = ctx.cfg
    space = ctx.space
    st = cfg.compact_settings()
    cases = []
    pts = ctx.rng(500).uniform(0, 1, (int(st["points"]), space.d))
    for policy in ("center-basis", "witness"):
        net = greedy_alpha_net(pts, float(st["alpha"]), space, policy, cap=pts.shape[0],
                               witnesses=ctx.witnesses)
        covered = np.zeros(pts.shape[0], dtype=bool)
        for ball in net.balls:
            covered |= ball_norms(ball, pts, space) < net.alpha
        ok = net.found and bool(covered.all())
        cases.append(_case(f"uniform-cube/{policy}", PASS if ok else UNEXPECTED,
                           status=net.status, centers=len(net.center_indices),
                           coverage_checked=int(pts.shape[0])))
    m = int(st["ramp_points"])
    ramp = np.outer(np.arange(1, m + 1, dtype=float), np.ones(space.d))
    net = greedy_alpha_net(ramp, float(st["ramp_alpha"]), space, "center-basis",
                           cap=int(st["ramp_cap"]))
    ok = (not net.found) and len(net.witness_indices) == int(st["ramp_cap"]) \
        and _separated(ramp, net, space)
    cases.append(_case("diagonal-ramp/packing", PASS if ok else UNEXPECTED, status=net.status,
                       packing_witness=net.witness_indices))
    h = min(cfg.horizon, int(st["extraction_H"]))
    for seq in ctx.sequences:
        for s in ctx.s_ward_list:
            label = f"extract/{seq.label}/s={s}"
            ext = ctx.extraction(seq, s)
            if isinstance(ext, ExtractionFailure):
                exc = ext
                # consistent only if the prefix also fails to be totally bounded
                packing = greedy_alpha_net(seq.values()[:h], 0.5, space, "witness",
                                           cap=int(st["ramp_cap"]), witnesses=ctx.witnesses)
                cases.append(_case(label, UNEXPECTED if packing.found else PASS,
                                   extraction="failed", reason=str(exc),
                                   packing_status=packing.status))
                continue
            ok = ext.envelope_holds(cfg.tau)
            cases.append(_case(label, PASS if ok else UNEXPECTED, extraction="succeeded",
                               indices=ext.indices, envelope_holds=ok))
    line = explicit_sequence(np.outer(np.arange(1, h + 1, dtype=float), np.eye(space.d)[0]),
                             label="axis-ramp")
    try:
        extract_s_quasi_cauchy_subsequence(line, 1, space, ctx.witnesses, h)
        cases.append(_case("extract/axis-ramp", UNEXPECTED, extraction="succeeded"))
    except ExtractionFailure as exc:
        cases.append(_case("extract/axis-ramp", PASS, extraction="failed", reason=str(exc)))
    return cases


SECTION_RUNNERS = {
    "norm-axioms": section_norm_axioms,
    "cauchy-binet": section_cauchy_binet,
    "telescoping": section_telescoping,
    "verdict-chain": section_verdict_chain,
    "s-ward=>ward": section_s_ward_ward,
    "s-ward=>continuous": section_s_ward_continuous,
    "uniform=>s-ward": section_uniform_s_ward,
    "uniform-limit": section_uniform_limit,
    "compact-image": section_compact_image,
    "totally-bounded<=>s-ward-compact": section_totally_bounded,
}


def _counts(cases: list[dict]) -> dict:
    counts = {o: 0 for o in OUTCOMES}
    for c in cases:
        counts[c["outcome"]] += 1
    counts["cases"] = len(cases)
    return counts


def thread_count() -> int:
    raw = os.environ.get("NWARD_THREADS", "").strip()
    n = int(raw) if raw else 0
    return n if n > 0 else (os.cpu_count() or 1)


def run_suite(cfg: SuiteConfig, threads: int | None = None) -> dict:
    """Run all sections and return the report body (no timestamps)."""
    ctx = Context(cfg)

    def run(name: str) -> list[dict]:
        if name in FUNCTION_SECTIONS and not ctx.functions:
            return [_case("function corpus", SKIPPED, reason="no function corpus configured")]
        return SECTION_RUNNERS[name](ctx)

    names = [name for name, _ in SECTIONS]
    threads = thread_count() if threads is None else threads
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, names))
    else:
        results = [run(name) for name in names]

    sections = []
    totals = {o: 0 for o in OUTCOMES}
    totals["cases"] = 0
    for (name, statement), cases in zip(SECTIONS, results):
        counts = _counts(cases)
        for k, v in counts.items():
            totals[k] += v
        if counts[SKIPPED] == counts["cases"]:
            status = "skipped"
        else:
            status = "green" if counts[UNEXPECTED] == 0 else "red"
        sections.append({"theorem": name, "statement": statement, "status": status,
                         "counts": counts, "cases": cases})
    return {
        "tool": "nward",
        "version": __version__,
        "config": cfg.to_dict(),
        "summary": {**totals, "expected_counterexamples": totals[EXPECTED],
                    "unexpected_violations": totals[UNEXPECTED],
                    "sections_green": sum(s["status"] == "green" for s in sections),
                    "sections_skipped": sum(s["status"] == "skipped" for s in sections)},
        "sections": sections,
    }
