"""Anchored balls, greedy nets and nested-ball subsequence extraction.

A ball with centre ``a``, anchors ``x_1..x_{n-1}`` and radius ``alpha`` is
``{x : ||a - x, x_1 - x, ..., x_{n-1} - x|| < alpha}``.  Every slot is shifted
by the tested point.  A :class:`Ball` may carry several anchor sets, in which
case membership means membership of every such ball (a finite intersection).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .continuity import FunctionSpec, image_witnesses
from .errors import ExtractionFailure
from .nnorm import SpaceConfig, nnorm_many
from .sequences import (
    INCONCLUSIVE,
    SequenceSpec,
    Verdict,
    WitnessSet,
    explicit_sequence,
    forward_differences,
    standard_witnesses,
    tail_start,
    tail_verdict,
)

NET_FOUND = "net-found"
PACKING_EXCEEDED = "packing-exceeded"
ANCHOR_POLICIES = ("center-basis", "fixed-basis", "witness")


@dataclass
class Ball:
    center: np.ndarray  # (d,)
    anchors: np.ndarray  # (A, n-1, d)
    radius: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        anchors = np.asarray(self.anchors, dtype=float)
        if anchors.ndim == 2:
            anchors = anchors[None]
        self.anchors = anchors
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        if anchors.shape[-1] != self.center.size:
            raise ValueError("anchor and centre dimensions differ")

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "anchors": self.anchors.tolist(),
                "radius": self.radius}


def ball_norms(ball: Ball, points, cfg: SpaceConfig) -> np.ndarray:
    """max over anchor sets of ||a - x, x_1 - x, ...|| for each row x of ``points``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != cfg.d or ball.center.size != cfg.d:
        raise ValueError(f"points and ball must live in R^{cfg.d}")
    if ball.anchors.shape[1] != cfg.n - 1:
        raise ValueError(f"a ball needs {cfg.n - 1} anchors per set")
    first = ball.center[None, :] - pts  # (K, d)
    out = np.zeros(pts.shape[0])
    for anchor_set in ball.anchors:
        rest = anchor_set[None, :, :] - pts[:, None, :]  # (K, n-1, d)
        tuples = np.concatenate([first[:, None, :], rest], axis=1)
        out = np.maximum(out, nnorm_many(tuples, cfg.p))
    return out


def ball_contains(ball: Ball, x, cfg: SpaceConfig) -> bool:
    return bool(ball_norms(ball, np.asarray(x, dtype=float)[None], cfg)[0] < ball.radius)


def make_ball(center, alpha: float, cfg: SpaceConfig, policy: str = "center-basis",
              witnesses: WitnessSet | None = None) -> Ball:
    """Ball at ``center`` with anchors chosen by ``policy``.

    center-basis: anchors ``center + e_1 .. center + e_{n-1}``.
    fixed-basis:  anchors ``e_1 .. e_{n-1}``.
    witness:      one anchor set ``center + mu`` per witness tuple, so the
                  ball is the intersection of the balls ``||a - x, mu|| < alpha``.
    """
    center = np.asarray(center, dtype=float)
    basis = np.eye(cfg.d)[: cfg.n - 1]
    if policy == "center-basis":
        anchors = center + basis
    elif policy == "fixed-basis":
        anchors = basis
    elif policy == "witness":
        witnesses = standard_witnesses(cfg) if witnesses is None else witnesses
        anchors = center + witnesses.tuples
    else:
        raise ValueError(f"unknown anchor policy {policy!r}")
    return Ball(center, anchors, alpha)


@dataclass
class NetResult:
    status: str
    alpha: float
    policy: str
    center_indices: list[int]
    balls: list[Ball] = field(default_factory=list)
    witness_indices: list[int] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.status == NET_FOUND

    def to_dict(self) -> dict:
        return {"status": self.status, "alpha": self.alpha, "anchor_policy": self.policy,
                "center_indices": self.center_indices,
                "centers": [b.center.tolist() for b in self.balls],
                "anchors": [b.anchors.tolist() for b in self.balls],
                "packing_witness": self.witness_indices}


def greedy_alpha_net(points, alpha: float, cfg: SpaceConfig, policy: str = "center-basis",
                     cap: int = 1000, witnesses: WitnessSet | None = None) -> NetResult:
    """Cover ``points`` by balls centred at points, lowest uncovered index first.

    Stops with ``packing-exceeded`` once ``cap`` centres are placed and a
    point is still uncovered; the centres then form the packing witness, each
    lying outside the balls of all earlier ones.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if cap < 1:
        raise ValueError("cap must be at least 1")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise ValueError("empty point set")
    covered = np.zeros(pts.shape[0], dtype=bool)
    centers: list[int] = []
    balls: list[Ball] = []
    while not covered.all():
        i = int(np.argmin(covered))  # lowest uncovered index
        if len(centers) == cap:
            return NetResult(PACKING_EXCEEDED, alpha, policy, centers, balls, list(centers))
        ball = make_ball(pts[i], alpha, cfg, policy, witnesses)
        centers.append(i)
        balls.append(ball)
        open_idx = np.flatnonzero(~covered)
        covered[open_idx[ball_norms(ball, pts[open_idx], cfg) < alpha]] = True
        covered[i] = True
    return NetResult(NET_FOUND, alpha, policy, centers, balls)


# ---------------------------------------------------------------- extraction


@dataclass
class Extraction:
    indices: list[int]
    envelope: list[float]  # 1/k per stage
    profile: list[float]  # Delta_s profile of the subsequence, k = 1..m-s
    stage_counts: list[int]

    def envelope_holds(self, tau: float = 0.0) -> bool:
        """d_{n_k}(s) <= 1/k + tau at every stage with a defined difference."""
        return all(self.profile[k] <= self.envelope[k] + tau for k in range(len(self.profile)))

    def to_dict(self) -> dict:
        return {"indices": self.indices, "envelope": self.envelope, "profile": self.profile,
                "stage_counts": self.stage_counts, "envelope_holds": self.envelope_holds()}


def _subsequence_profile(values, s, witnesses, cfg) -> np.ndarray:
    if values.shape[0] <= s:
        return np.zeros(0)
    diffs = forward_differences(values, s)
    norms = [nnorm_many(np.concatenate(
        [diffs[:, None, :], np.broadcast_to(t, (diffs.shape[0],) + t.shape)], axis=1), cfg.p)
        for t in witnesses.tuples]
    return np.max(norms, axis=0)


def extract_s_quasi_cauchy_subsequence(seq: SequenceSpec, s: int, cfg: SpaceConfig,
                                       witnesses: WitnessSet | None = None,
                                       horizon: int | None = None) -> Extraction:
    """Nested-ball extraction of an s-quasi-Cauchy subsequence.

    Stage k covers the remaining candidate points by ``witness`` balls of
    radius 1/(2k) (diameter below 1/k in every witness seminorm), keeps the
    ball holding the most candidates, and picks its smallest index above the
    previous pick.  Runs floor(log2 H) stages.  Raises ExtractionFailure when
    the best ball holds fewer than s + 1 candidates.
    """
    witnesses = standard_witnesses(cfg) if witnesses is None else witnesses
    horizon = seq.horizon if horizon is None else horizon
    if horizon > seq.horizon:
        raise ValueError("horizon exceeds the sequence prefix")
    x = seq.values()[:horizon]
    stages = int(np.floor(np.log2(horizon)))
    candidates = np.arange(horizon)  # 0-based indices into x
    picks: list[int] = []
    counts: list[int] = []
    for k in range(1, stages + 1):
        alpha = 1.0 / (2 * k)
        # same covering order as greedy_alpha_net, counting full ball membership
        pts = x[candidates]
        covered = np.zeros(candidates.size, dtype=bool)
        best_members = None
        while not covered.all():
            i = int(np.argmin(covered))
            inside = ball_norms(make_ball(pts[i], alpha, cfg, "witness", witnesses),
                                pts, cfg) < alpha
            inside[i] = True
            covered |= inside
            if best_members is None or inside.sum() > best_members.size:
                best_members = candidates[inside]
        counts.append(int(best_members.size))
        if best_members.size < s + 1:
            raise ExtractionFailure(
                f"stage {k}: best ball of radius {alpha:g} holds {best_members.size} "
                f"candidate(s), need {s + 1}", stage=k, best_count=int(best_members.size))
        pick = int(best_members[0])
        picks.append(pick)
        candidates = best_members[best_members > pick]
        if candidates.size == 0 and k < stages:
            raise ExtractionFailure(f"stage {k}: no candidates left after the pick",
                                    stage=k, best_count=0)
    values = x[picks]
    profile = _subsequence_profile(values, s, witnesses, cfg)
    return Extraction(
        indices=[p + 1 for p in picks],
        envelope=[1.0 / k for k in range(1, stages + 1)],
        profile=profile.tolist(),
        stage_counts=counts,
    )


def test_compact_image(f: FunctionSpec, seq: SequenceSpec, s: int, cfg: SpaceConfig,
                       witnesses: WitnessSet | None = None, horizon: int | None = None,
                       tau: float = 0.25,
                       extraction: Extraction | ExtractionFailure | None = None,
                       ) -> tuple[Verdict, dict]:
    """Apply ``f`` to an extracted subsequence and check its Delta_s tail < tau.

    Measured against the image witness tuples.  Returns the verdict and a
    payload with the extraction; an extraction failure or fully degenerate
    image witnesses give an inconclusive verdict.  A previously computed
    ``extraction`` (or the failure it raised) may be passed in.
    """
    witnesses = standard_witnesses(cfg) if witnesses is None else witnesses
    if extraction is None:
        try:
            extraction = extract_s_quasi_cauchy_subsequence(seq, s, cfg, witnesses, horizon)
        except ExtractionFailure as exc:
            extraction = exc
    if isinstance(extraction, ExtractionFailure):
        return (Verdict(INCONCLUSIVE, tau, float("nan"), float("nan"), 0),
                {"extraction_failure": str(extraction)})
    ext = extraction
    img_w = image_witnesses(f, witnesses)
    payload = {"extraction": ext.to_dict(), "excluded_tuples": img_w.excluded}
    if img_w.witnesses is None:
        return Verdict(INCONCLUSIVE, tau, float("nan"), float("nan"), 0), payload
    sub = explicit_sequence(seq.values()[np.array(ext.indices) - 1], label=f"sub({seq.label})")
    image = f(sub.values())
    profile = _subsequence_profile(image, s, img_w.witnesses, cfg)
    m = len(ext.indices)
    ks = np.arange(tail_start(m), m - s + 1)
    if ks.size == 0:
        return Verdict(INCONCLUSIVE, tau, float("nan"), float("nan"), 0), payload
    payload["image_profile"] = profile.tolist()
    return tail_verdict(profile[ks - 1], ks, tau), payload


test_compact_image.__test__ = False
