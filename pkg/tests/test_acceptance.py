"""Acceptance gate: one test per criterion, each at its stated tolerance.

Every test records a PASS/FAIL line that is printed in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from nward.compactness import (
    ball_norms,
    extract_s_quasi_cauchy_subsequence,
    greedy_alpha_net,
)
from nward.continuity import FunctionSpec, test_s_ward
from nward.nnorm import SpaceConfig, check_axioms, gram_nnorm_oracle, nnorm_p
from nward.report import dumps
from nward.sequences import (
    CAUCHY,
    FAMILIES,
    QUASI_CAUCHY,
    WitnessSet,
    catalog_sequence,
    classify,
    difference_profile,
    repeat_interleave,
    s_property,
    standard_witnesses,
    telescoping_residuals,
)
from nward.suite import load_config, run_suite

PLANE = SpaceConfig(d=2, n=2, p=2)


@pytest.fixture(scope="module")
def suite_runs():
    cfg = load_config()
    t0 = time.perf_counter()
    first = run_suite(cfg)
    elapsed = time.perf_counter() - t0
    second = run_suite(load_config(), threads=1)
    return first, second, elapsed


def catalog(horizon=10_000, d=2):
    seqs = [catalog_sequence(name, horizon=horizon, d=d, seed=12345)
            for name in FAMILIES if name != "repeat-interleave"]
    seqs.append(catalog_sequence("constant", {"v": [1.0] * d}, horizon=horizon, d=d))
    seqs.append(catalog_sequence("geometric", {"v": [1.0] * d, "r": 0.9}, horizon=horizon, d=d))
    for base in list(seqs):
        for s in (2, 3):
            inter = repeat_interleave(base, s).truncated(horizon)
            inter.label = f"interleave{s}({base.label})"
            seqs.append(inter)
    return seqs


def test_criterion_1_cauchy_binet(acceptance):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.choice([2, 3]))
        d = int(rng.choice([3, 4, 5]))
        t = rng.uniform(-10, 10, (n, d))
        oracle = gram_nnorm_oracle(t)
        worst = max(worst, abs(nnorm_p(t, SpaceConfig(d=d, n=n, p=2)) - oracle) / oracle)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5
    acceptance(1, "Cauchy-Binet oracle", ok,
               f"200 tuples, worst rel err {worst:.2e} (<= 1e-9), {elapsed:.2f} s (< 5 s)")


def test_criterion_2_norm_axioms(acceptance):
    rng = np.random.default_rng(7)
    spaces = [SpaceConfig(2, 2, 2), SpaceConfig(3, 2, 2), SpaceConfig(4, 3, 2),
              SpaceConfig(4, 2, 1), SpaceConfig(3, 2, math.inf), SpaceConfig(5, 3, 3)]
    worst = {}
    ok = True
    for space in spaces:
        samples = rng.uniform(-1, 1, (500, space.n, space.d))
        rep = check_axioms(samples, space, 1e-12, rng)
        ok &= rep.passed
        for name, res in rep.axioms.items():
            worst[name] = max(worst.get(name, 0.0), res.worst_residual)
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    acceptance(2, "n-norm axioms", ok, f"500 samples x {len(spaces)} spaces, worst residuals: {detail}")


def test_criterion_3_telescoping(acceptance):
    worst = 0.0
    seqs = catalog()
    for seq in seqs:
        x = seq.values()
        for s in range(1, 6):
            kmax = min(1000, seq.horizon - s)
            res = telescoping_residuals(seq, s, kmax)
            for k in range(kmax):
                scale = np.abs(x[k: k + s + 1]).max()
                if res[k] > 0:
                    worst = max(worst, res[k] / scale)
    acceptance(3, "telescoping identity", worst <= 1e-12,
               f"{len(seqs)} catalog sequences, s=1..5, k<=1000, worst residual/scale {worst:.2e}")


def test_criterion_4_separation_catalog(acceptance):
    notes = []
    alt = catalog_sequence("alternating", horizon=1000)
    e2 = WitnessSet(np.array([[[0.0, 1.0]]]), label="(0,1)")
    rep = classify(alt, PLANE, e2, s_list=[1, 2], tau=1e-3)
    prof = difference_profile(alt, 1, e2, PLANE)
    ok_alt = (rep.status(s_property(2)) == "satisfied" and rep.status(QUASI_CAUCHY) == "violated"
              and float(np.abs(prof - 2.0).max()) <= 1e-12)
    notes.append(f"alternating 2-QC {rep.status(s_property(2))}, QC {rep.status(QUASI_CAUCHY)}, "
                 f"|profile-2| <= {np.abs(prof - 2.0).max():.0e}")

    ramp = catalog_sequence("sqrt-ramp", horizon=10_000)
    rep = classify(ramp, PLANE, tau=1e-2)
    ok_ramp = rep.status(QUASI_CAUCHY) == "satisfied" and rep.status(CAUCHY) == "violated"
    notes.append(f"sqrt-ramp QC {rep.status(QUASI_CAUCHY)}, Cauchy {rep.status(CAUCHY)}")

    square = FunctionSpec("coordinate-square")
    ws = standard_witnesses(PLANE)
    ok_sq = True
    dev = 0.0
    for s in (1, 2, 3):
        plain = test_s_ward(square, [ramp], s, PLANE, ws, 10_000, 1e-2)
        # on the s-interleaved ramp every nonzero image difference is (1, 0)
        inter = repeat_interleave(ramp, s).truncated(10_000)
        image = test_s_ward(square, [inter], s, PLANE, ws, 10_000, 1e-2)
        dev = max(dev, abs(image.verdict.witness_value - 1.0))
        ok_sq &= plain.violated and image.violated and dev <= 1e-9
    notes.append(f"coordinate-square s-ward violated s=1,2,3, image profile 1 +/- {dev:.0e}")
    acceptance(4, "separation catalog", ok_alt and ok_ramp and ok_sq, "; ".join(notes))


def test_criterion_5_verdict_monotonicity(acceptance):
    rng = np.random.default_rng(5)
    grid = [standard_witnesses(PLANE), WitnessSet(np.array([[[0.0, 1.0]]]), label="(0,1)"),
            WitnessSet(np.array([[[1.0, 1.0]]]), label="(1,1)")]
    grid += [WitnessSet(rng.standard_normal((3, 1, 2)), label=f"gaussian-{i}") for i in range(3)]
    checked, broken = 0, []
    for seq in catalog():
        for ws in grid:
            for tau in (1e-2, 1e-3):
                rep = classify(seq, PLANE, ws, s_list=[1, 2, 3, 4, 5], tau=tau)
                checked += 1
                if not rep.chain_consistent():
                    broken.append(f"{seq.label}/{ws.label}/{tau}")
    acceptance(5, "verdict monotonicity", not broken,
               f"{checked} classifications, {len(broken)} exceptions {broken[:3]}")


def test_criterion_6_theorem_suites(acceptance, suite_runs):
    body, _, elapsed = suite_runs
    sections = {s["theorem"]: s for s in body["sections"]}
    unexpected = body["summary"]["unexpected_violations"]
    uni = sections["uniform=>s-ward"]["cases"]
    uniform_pass = all(c["outcome"] == "pass" for c in uni if c["uniform"])
    ward_ok = sections["s-ward=>ward"]["counts"]["unexpected-violation"] == 0
    limits = sections["uniform-limit"]["cases"]
    limits_ok = (len({c["case"].split("/")[0] for c in limits}) == 3
                 and all(c["status"] == "satisfied" for c in limits))
    ok = unexpected == 0 and uniform_pass and ward_ok and limits_ok and elapsed < 60
    acceptance(6, "theorem suites", ok,
               f"{unexpected} unexpected violations, "
               f"{body['summary']['expected_counterexamples']} expected counterexamples, "
               f"{sum(c['uniform'] for c in uni)} uniform maps pass s-ward, "
               f"{len(limits)} uniform-limit cases satisfied, runtime {elapsed:.1f} s (< 60 s)")


def test_criterion_7_compactness(acceptance):
    notes = []
    pts = np.random.default_rng(0).uniform(0, 1, (1000, 2))
    net = greedy_alpha_net(pts, 0.25, PLANE, "center-basis", cap=1000)
    covered = np.zeros(len(pts), dtype=bool)
    for ball in net.balls:
        covered |= ball_norms(ball, pts, PLANE) < 0.25
    ok_net = net.found and bool(covered.all())
    notes.append(f"unit square net {net.status} with {len(net.balls)} centres, "
                 f"{int(covered.sum())}/1000 covered")

    ramp = np.outer(np.arange(1, 51, dtype=float), [1.0, 1.0])
    pack = greedy_alpha_net(ramp, 0.5, PLANE, "fixed-basis", cap=20)
    sep = min((ball_norms(b, ramp[i][None], PLANE)[0]
               for j, i in enumerate(pack.witness_indices) for b in pack.balls[:j]),
              default=math.inf)
    ok_pack = not pack.found and len(pack.witness_indices) == 20 and sep >= 0.5
    notes.append(f"ramp {pack.status}, witness {len(pack.witness_indices)} points, "
                 f"min separation {sep:.3g}")

    walk = catalog_sequence("random-walk-damped", {"step": 1, "damping": 1}, horizon=4096,
                            seed=12345)
    ext = extract_s_quasi_cauchy_subsequence(walk, 1, PLANE)
    ok_ext = ext.envelope_holds()
    slack = min(e - p for e, p in zip(ext.envelope, ext.profile))
    notes.append(f"walk extraction {len(ext.indices)} stages, min envelope slack {slack:.3g}")
    acceptance(7, "compactness", ok_net and ok_pack and ok_ext, "; ".join(notes))


def test_criterion_8_determinism(acceptance, suite_runs):
    first, second, _ = suite_runs
    a, b = dumps(first), dumps(second)
    acceptance(8, "determinism", a == b,
               f"two suite runs (threads auto vs 1), {len(a)} bytes, identical={a == b}")
