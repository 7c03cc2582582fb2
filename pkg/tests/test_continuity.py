import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nward.continuity import (
    FunctionSpec,
    classify_uniform_continuity,
    combine,
    constant_map,
    estimate_uniform_modulus,
    identity,
    image_sequence,
    image_witnesses,
    test_s_ward,
    test_sequential_continuity,
    test_uniform_limit,
    test_ward,
)
from nward.errors import NonUniformConvergence, PreconditionError
from nward.nnorm import SpaceConfig
from nward.sequences import (
    INCONCLUSIVE,
    SATISFIED,
    VIOLATED,
    WitnessSet,
    catalog_sequence,
    difference_profile,
    explicit_sequence,
    repeat_interleave,
    standard_witnesses,
)

CFG = SpaceConfig(d=2, n=2, p=2)
WS = standard_witnesses(CFG)
E2 = WitnessSet(np.array([[[0.0, 1.0]]]), label="e2")
H, TAU = 10_000, 1e-2

SHEAR = FunctionSpec("linear", {"A": [[1.0, 0.5], [0.0, 1.0]]}, label="shear")
ROTATION = FunctionSpec("linear", {"A": [[0.6, -0.8], [0.8, 0.6]]}, label="rotation")
SQUARE = FunctionSpec("coordinate-square")
CLIP = FunctionSpec("lipschitz-clip", {"M": 1.0})


def corpus(h=H):
    return [catalog_sequence("sqrt-ramp", horizon=h),
            catalog_sequence("geometric", {"v": [1, 1]}, horizon=h),
            catalog_sequence("random-walk-damped", {"step": 1, "damping": 1}, horizon=h, seed=4)]


# ---------------------------------------------------------- image sequences


def test_image_sequence_examples():
    ramp = catalog_sequence("sqrt-ramp", horizon=100)
    assert np.array_equal(image_sequence(identity(2), ramp).values(), ramp.values())
    k = np.arange(1, 101, dtype=float)
    assert np.allclose(image_sequence(SQUARE, ramp).values(), np.stack([k, 0 * k], 1),
                       rtol=1e-14, atol=0)
    recip = explicit_sequence(np.stack([1 / k, 0 * k], 1))
    doubled = image_sequence(FunctionSpec("scale", {"c": 2.0}), recip).values()
    assert np.array_equal(doubled, np.stack([2 / k, 0 * k], 1))


def test_function_round_trip():
    f = combine(FunctionSpec("composition", parts=[SHEAR, CLIP]), SQUARE, 0.5, -2.0)
    g = FunctionSpec.from_text(f.to_text())
    x = np.random.default_rng(0).normal(size=(50, 2))
    assert np.array_equal(f(x), g(x))
    assert np.allclose(f(x), 0.5 * CLIP(SHEAR(x)) - 2.0 * SQUARE(x))


def test_function_validation():
    with pytest.raises(ValueError):
        FunctionSpec("nope")
    with pytest.raises(ValueError):
        FunctionSpec("lipschitz-clip", {"M": 0})
    with pytest.raises(ValueError):
        FunctionSpec("linear", {"A": [[1.0, 2.0]]})
    with pytest.raises(ValueError):
        FunctionSpec("lincomb", {"coeffs": [1.0]}, [SHEAR, CLIP])


# -------------------------------------------------------------- s-ward tests


@pytest.mark.parametrize("f", [SHEAR, ROTATION, identity(2), CLIP])
@pytest.mark.parametrize("s", [1, 2, 3])
def test_lipschitz_maps_keep_quasi_cauchy(f, s):
    rep = test_s_ward(f, corpus(), s, CFG, WS, H, TAU)
    assert rep.status == SATISFIED
    assert rep.summary == "no violation found"


def test_square_on_sqrt_ramp_has_unit_image_profile():
    ramp = catalog_sequence("sqrt-ramp", horizon=H)
    rep = test_s_ward(SQUARE, [ramp], 1, CFG, E2, H, TAU)
    assert rep.status == VIOLATED
    # (sqrt(k + 1))^2 - (sqrt(k))^2 rounds to 1 within a few ulps of k
    assert abs(rep.verdict.tail_min - 1.0) <= 1e-9
    assert abs(rep.verdict.tail_max - 1.0) <= 1e-9


@pytest.mark.parametrize("s", [1, 2, 3])
def test_square_violates_s_ward(s):
    ramp = catalog_sequence("sqrt-ramp", horizon=H)
    rep = test_s_ward(SQUARE, [ramp], s, CFG, WS, H, TAU)
    assert rep.status == VIOLATED
    # on the s-interleave the image differences are exactly (1, 0) or 0
    inter = repeat_interleave(ramp, s).truncated(H)
    rep = test_s_ward(SQUARE, [inter], s, CFG, WS, H, TAU)
    assert rep.status == VIOLATED
    assert abs(rep.verdict.witness_value - 1.0) <= 1e-9


def test_constant_map_in_the_plane_is_satisfied_with_flag():
    rep = test_s_ward(constant_map([2.0, -1.0]), corpus(), 2, CFG, WS, H, TAU)
    assert rep.status == SATISFIED
    assert rep.degenerate and rep.excluded_tuples == []
    assert rep.verdict.tail_max == 0.0


def test_constant_map_with_dependent_images_is_inconclusive():
    cfg = SpaceConfig(d=3, n=3)
    seqs = [catalog_sequence("geometric", {"v": [1, 1, 1]}, horizon=1000, d=3)]
    rep = test_s_ward(constant_map([2.0, -1.0, 0.5]), seqs, 1, cfg, None, 1000, 1e-3)
    assert rep.status == INCONCLUSIVE
    assert rep.degenerate and rep.excluded_tuples == [0, 1, 2]
    assert rep.extra["image_delta_max"] == 0.0


def test_projection_drops_degenerate_witnesses():
    proj = FunctionSpec("linear", {"A": [[1.0, 0.0], [0.0, 0.0]]})
    img = image_witnesses(proj, WS)
    assert img.excluded == [1] and img.kept == [0]


def test_s_ward_precondition():
    with pytest.raises(PreconditionError):
        test_s_ward(SHEAR, [catalog_sequence("alternating", horizon=1000)], 1, CFG, WS, 1000, 1e-3)
    with pytest.raises(ValueError):
        test_s_ward(SHEAR, [], 1, CFG, WS, 1000, 1e-3)


def test_ward_examples():
    assert test_ward(identity(2), corpus(), CFG, WS, H, TAU).status == SATISFIED
    assert test_ward(SQUARE, corpus(), CFG, WS, H, TAU).status == VIOLATED


def test_s_ward_passer_passes_ward_on_base():
    base = corpus()
    for f in (SHEAR, CLIP, identity(2)):
        for s in (2, 3):
            closed = base + [repeat_interleave(q, s).truncated(H) for q in base]
            if not test_s_ward(f, closed, s, CFG, WS, H, TAU).violated:
                assert not test_ward(f, base, CFG, WS, H, TAU).violated


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=4, max_size=4),
       st.integers(1, 3))
def test_linear_image_profile_scales_by_determinant(entries, s):
    A = np.array(entries).reshape(2, 2)
    det = abs(np.linalg.det(A))
    if det < 1e-3:
        return
    f = FunctionSpec("linear", {"A": A})
    seq = catalog_sequence("random-walk-damped", {"step": 1, "damping": 0.5}, horizon=200, seed=1)
    img_w = image_witnesses(f, WS)
    if img_w.witnesses is None or len(img_w.kept) < 2:
        return
    got = difference_profile(image_sequence(f, seq), s, img_w.witnesses, CFG)
    want = det * difference_profile(seq, s, WS, CFG)
    assert np.allclose(got, want, rtol=1e-9, atol=1e-12)


# ------------------------------------------------------- pointwise continuity


def test_sequential_continuity_examples():
    rep = test_sequential_continuity(SHEAR, [0, 0], CFG, WS, 1000, 1e-3)
    assert rep.status == SATISFIED
    k = np.arange(1, 1001, dtype=float)
    path = explicit_sequence(np.stack([1 + 1 / k, 0 * k], 1))
    rep = test_sequential_continuity(SQUARE, [1, 0], CFG, WS, 1000, 1e-2, paths=[path])
    assert rep.status == SATISFIED
    for zeta in ([0.0, 0.0], [3.0, -0.5], [0.9, 1.0]):
        assert test_sequential_continuity(CLIP, zeta, CFG, WS, 1000, 1e-3).status == SATISFIED


# ----------------------------------------------------------------- modulus


@pytest.mark.parametrize("c", [0.5, 1.0, -2.0])
def test_scale_modulus_is_linear_in_delta(c):
    f = FunctionSpec("scale", {"c": c})
    table = estimate_uniform_modulus(f, -1, 1, 10, CFG, WS)
    ratio = table.values / table.deltas
    assert np.allclose(ratio, ratio[0], rtol=1e-12)
    base = estimate_uniform_modulus(identity(2), -1, 1, 10, CFG, WS)
    # ||c dx, c mu|| = c^2 ||dx, mu|| in the plane
    assert np.allclose(table.values, c * c * base.values, rtol=1e-12)
    assert table.is_shrinking()


def test_identity_modulus_factor():
    table = estimate_uniform_modulus(identity(2), -1, 1, 10, CFG, WS)
    assert np.all(table.values <= table.deltas * (1 + 1e-12))
    assert np.all(table.values >= 0.9 * table.deltas)


@pytest.mark.parametrize("M", [1.0, 4.0])
def test_square_modulus_on_box(M):
    table = estimate_uniform_modulus(SQUARE, -M, M, 10, CFG, WS)
    assert table.is_shrinking()
    assert np.all(table.values <= (2 * M + table.deltas) * table.deltas * (1 + 1e-12))


def test_uniform_classification():
    assert classify_uniform_continuity(SHEAR, CFG, WS)["uniform"]
    assert classify_uniform_continuity(CLIP, CFG, WS)["uniform"]
    res = classify_uniform_continuity(SQUARE, CFG, WS)
    assert not res["uniform"] and res["growth"] > 4


# ------------------------------------------------------------ uniform limit


def test_uniform_limit_cases():
    base = [catalog_sequence("geometric", {"v": [1, 1]}, horizon=2000),
            catalog_sequence("random-walk-damped", {"step": 1, "damping": 1}, horizon=2000)]
    A = [[1.0, 0.5], [0.0, 1.0]]
    cases = [
        ([FunctionSpec("scale", {"c": 1 + 1 / t}) for t in range(1, 9)], identity(2)),
        ([FunctionSpec("linear", {"A": A}) for _ in range(8)], FunctionSpec("linear", {"A": A})),
        ([FunctionSpec("affine", {"A": np.eye(2), "b": np.ones(2) / t}) for t in range(1, 9)],
         FunctionSpec("linear", {"A": np.eye(2)})),
    ]
    for f_seq, f_lim in cases:
        rep = test_uniform_limit(f_seq, f_lim, base, 2, CFG, WS, 2000, 1e-3)
        assert rep.status == SATISFIED
        assert rep.extra["decomposition"]["bound_holds"]


def test_uniform_limit_rejects_diverging_terms():
    base = [catalog_sequence("geometric", {"v": [1, 1]}, horizon=2000)]
    f_seq = [FunctionSpec("scale", {"c": 1 + t / 1000}) for t in range(1, 9)]
    with pytest.raises(NonUniformConvergence):
        test_uniform_limit(f_seq, identity(2), base, 1, CFG, WS, 2000, 1e-3)


def test_uniform_limit_rejects_violating_terms():
    base = [catalog_sequence("sqrt-ramp", horizon=H)]
    with pytest.raises(PreconditionError):
        test_uniform_limit([SQUARE, SQUARE], SQUARE, base, 1, CFG, WS, H, TAU)


def test_reports_serialize():
    rep = test_s_ward(SHEAR, corpus(), 2, CFG, WS, H, TAU)
    d = rep.to_dict()
    assert d["status"] == SATISFIED and len(d["members"]) == 3
    assert math.isfinite(d["witness"]["tail_max"])
