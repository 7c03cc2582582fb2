"""Sequences in R^d, forward differences and finite-horizon classification.

Indices are 1-based throughout, matching the usual ``x_1, x_2, ...``
convention: ``seq.values()[k - 1]`` is ``x_k``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .nnorm import SpaceConfig, is_independent, nnorm_against

# Tail window starts at ceil(H/2); "violated" needs this share of tail values >= 10 * threshold.
VIOLATION_SHARE = 0.25
VIOLATION_FACTOR = 10.0
WITNESS_RTOL = 1e-9

LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
LCG_MASK = (1 << 64) - 1

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


# ------------------------------------------------------------------ witnesses


@dataclass
class WitnessSet:
    """Finite family of (n-1)-tuples standing in for "for all mu in X"."""

    tuples: np.ndarray  # (T, n-1, d)
    label: str = "explicit"

    def __post_init__(self):
        arr = np.asarray(self.tuples, dtype=float)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[0] == 0:
            raise ValueError("a witness set needs at least one (n-1)-tuple")
        if not np.all(np.isfinite(arr)):
            raise ValueError("witness entries must be finite")
        for i, t in enumerate(arr):
            if not is_independent(t, WITNESS_RTOL):
                raise ValueError(f"witness tuple {i} is linearly dependent")
        self.tuples = arr

    def __len__(self):
        return self.tuples.shape[0]

    def check(self, cfg: SpaceConfig):
        if self.tuples.shape[1:] != (cfg.n - 1, cfg.d):
            raise ValueError(
                f"witness tuples have shape {self.tuples.shape[1:]}, "
                f"expected {(cfg.n - 1, cfg.d)}")

    def to_dict(self) -> dict:
        return {"label": self.label, "tuples": self.tuples.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "WitnessSet":
        return cls(np.asarray(data["tuples"], dtype=float), data.get("label", "explicit"))


def standard_witnesses(cfg: SpaceConfig) -> WitnessSet:
    """All (n-1)-subsets of the standard basis, in lexicographic order."""
    eye = np.eye(cfg.d)
    tuples = [eye[list(c)] for c in itertools.combinations(range(cfg.d), cfg.n - 1)]
    return WitnessSet(np.array(tuples), label="standard-basis")


# ------------------------------------------------------------------ sequences

FAMILIES = (
    "alternating",
    "sqrt-ramp",
    "harmonic-partial-sums",
    "geometric",
    "constant",
    "random-walk-damped",
    "repeat-interleave",
)

_FAMILY_PARAMS = {
    "alternating": {"v"},
    "sqrt-ramp": {"v"},
    "harmonic-partial-sums": {"v"},
    "geometric": {"v", "r"},
    "constant": {"v"},
    "random-walk-damped": {"step", "damping"},
    "repeat-interleave": {"base", "s"},
}


@dataclass
class SequenceSpec:
    """A sequence known on indices ``1..horizon``.

    ``kind`` is ``"family"`` (closed-form generator from the catalog) or
    ``"explicit"`` (a stored prefix).  Values are computed once and cached.
    """

    kind: str
    horizon: int
    d: int
    family: str | None = None
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    prefix: np.ndarray | None = None
    label: str = ""
    _cache: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("family", "explicit"):
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if self.kind == "explicit":
            arr = np.asarray(self.prefix, dtype=float)
            if arr.ndim != 2 or arr.shape[1] != self.d or arr.shape[0] < self.horizon:
                raise ValueError(f"explicit prefix must have shape (>= {self.horizon}, {self.d})")
            if not np.all(np.isfinite(arr)):
                raise ValueError("sequence entries must be finite")
            self.prefix = arr[: self.horizon]
        else:
            if self.family not in FAMILIES:
                raise ValueError(f"unknown sequence family {self.family!r}")
            unknown = set(self.params) - _FAMILY_PARAMS[self.family]
            if unknown:
                raise ValueError(f"unknown parameters for {self.family}: {sorted(unknown)}")
        if not self.label:
            self.label = self.family if self.kind == "family" else "explicit"

    def values(self) -> np.ndarray:
        if self._cache is None:
            if self.kind == "explicit":
                vals = self.prefix
            else:
                vals = _generate(self.family, self.params, self.horizon, self.d, self.seed)
            vals = np.ascontiguousarray(vals, dtype=float)
            vals.setflags(write=False)
            self._cache = vals
        return self._cache

    def at(self, k: int) -> np.ndarray:
        if not 1 <= k <= self.horizon:
            raise IndexError(f"index {k} outside 1..{self.horizon}")
        return self.values()[k - 1]

    def truncated(self, horizon: int) -> "SequenceSpec":
        if horizon > self.horizon:
            raise ValueError(f"horizon {horizon} exceeds available {self.horizon}")
        return explicit_sequence(self.values()[:horizon], label=self.label)

    # serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        if self.kind == "explicit":
            return {"kind": "explicit", "label": self.label, "H": self.horizon,
                    "values": self.values().tolist()}
        params = dict(self.params)
        if isinstance(params.get("base"), SequenceSpec):
            params["base"] = params["base"].to_dict()
        return {"kind": "family", "name": self.family, "params": _plain(params),
                "H": self.horizon, "d": self.d, "seed": self.seed}

    @classmethod
    def from_dict(cls, data: dict) -> "SequenceSpec":
        if data.get("kind", "family") == "explicit":
            vals = np.asarray(data["values"], dtype=float)
            return explicit_sequence(vals[: data.get("H", len(vals))], label=data.get("label", ""))
        return catalog_sequence(data["name"], data.get("params") or {}, horizon=int(data["H"]),
                                d=int(data.get("d", 2)), seed=int(data.get("seed", 0)))

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_text(cls, text: str) -> "SequenceSpec":
        return cls.from_dict(json.loads(text))


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def explicit_sequence(values, label: str = "explicit") -> SequenceSpec:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError("explicit sequence values must be a (H, d) array")
    return SequenceSpec(kind="explicit", horizon=arr.shape[0], d=arr.shape[1], prefix=arr,
                        label=label)


def lcg_uniform(seed: int, count: int) -> np.ndarray:
    """``count`` uniforms in [0, 1) from the 64-bit LCG (top 53 bits of each state)."""
    state = seed & LCG_MASK
    out = np.empty(count)
    for i in range(count):
        state = (LCG_MULTIPLIER * state + LCG_INCREMENT) & LCG_MASK
        out[i] = (state >> 11) * (1.0 / (1 << 53))
    return out


def _direction(params: dict, d: int) -> np.ndarray:
    v = params.get("v")
    if v is None:
        e = np.zeros(d)
        e[0] = 1.0
        return e
    v = np.asarray(v, dtype=float)
    if v.shape != (d,) or not np.all(np.isfinite(v)):
        raise ValueError(f"direction v must be {d} finite numbers")
    return v


def _generate(family: str, params: dict, horizon: int, d: int, seed: int) -> np.ndarray:
    k = np.arange(1, horizon + 1, dtype=float)[:, None]
    if family == "repeat-interleave":
        base = params["base"]
        if isinstance(base, dict):
            base = SequenceSpec.from_dict(base)
        s = int(params["s"])
        if s < 1:
            raise ValueError("repeat-interleave needs s >= 1")
        if base.d != d:
            raise ValueError("base sequence dimension mismatch")
        blocks = -(-horizon // s)
        if blocks > base.horizon:
            raise ValueError("base sequence too short for the requested horizon")
        return np.repeat(base.values()[:blocks], s, axis=0)[:horizon]
    if family == "random-walk-damped":
        step = float(params.get("step", 1.0))
        damping = float(params.get("damping", 1.0))
        xi = 2.0 * lcg_uniform(seed, horizon * d).reshape(horizon, d) - 1.0
        return np.cumsum(step * xi / k**damping, axis=0)
    v = _direction(params, d)
    if family == "alternating":
        sign = np.where(k % 2 == 0, 1.0, -1.0)
        return sign * v
    if family == "sqrt-ramp":
        return np.sqrt(k) * v
    if family == "harmonic-partial-sums":
        return np.cumsum(1.0 / k, axis=0) * v
    if family == "geometric":
        r = float(params.get("r", 0.5))
        return r**k * v
    if family == "constant":
        return np.broadcast_to(v, (horizon, d)).copy()
    raise ValueError(f"unknown sequence family {family!r}")


def catalog_sequence(name: str, params: dict | None = None, *, horizon: int, d: int = 2,
                     seed: int = 0) -> SequenceSpec:
    """Build a catalog sequence.  ``repeat-interleave`` takes ``base`` and ``s``
    and has horizon ``s * base.horizon`` unless ``horizon`` asks for fewer."""
    params = dict(params or {})
    if name == "repeat-interleave":
        base = params.get("base")
        if base is None or "s" not in params:
            raise ValueError("repeat-interleave needs 'base' and 's'")
        if isinstance(base, dict):
            base = SequenceSpec.from_dict(base)
            params["base"] = base
        d = base.d
        horizon = min(horizon, base.horizon * int(params["s"]))
    spec = SequenceSpec(kind="family", horizon=horizon, d=d, family=name, params=params,
                        seed=seed)
    spec.values()  # surface parameter errors now
    return spec


def repeat_interleave(base: SequenceSpec, s: int) -> SequenceSpec:
    """(x_1 repeated s times, x_2 repeated s times, ...)."""
    return catalog_sequence("repeat-interleave", {"base": base, "s": s},
                            horizon=base.horizon * s, d=base.d)


def interleave_with_limit(base: SequenceSpec, zeta, s: int) -> SequenceSpec:
    """(x_1 x s, zeta x s, x_2 x s, zeta x s, ...), length ``2 * s * H``."""
    zeta = np.asarray(zeta, dtype=float)
    x = base.values()
    blocks = np.stack([x, np.broadcast_to(zeta, x.shape)], axis=1).reshape(-1, base.d)
    return explicit_sequence(np.repeat(blocks, s, axis=0), label=f"{base.label}+limit")


def linear_combination(seq_a: SequenceSpec, seq_b: SequenceSpec, a: float,
                       b: float) -> SequenceSpec:
    if seq_a.horizon != seq_b.horizon or seq_a.d != seq_b.d:
        raise ValueError("sequences must share horizon and dimension")
    vals = a * seq_a.values() + b * seq_b.values()
    return explicit_sequence(vals, label=f"{a}*{seq_a.label}+{b}*{seq_b.label}")


# ------------------------------------------------------------- differences


def forward_difference(seq: SequenceSpec, s: int, k: int) -> np.ndarray:
    """x_{k+s} - x_k."""
    if s < 1 or k < 1:
        raise ValueError("s and k must be positive")
    if k + s > seq.horizon:
        raise IndexError(f"k + s = {k + s} exceeds horizon {seq.horizon}")
    x = seq.values()
    return x[k + s - 1] - x[k - 1]


def forward_differences(values: np.ndarray, s: int) -> np.ndarray:
    """All Delta_s x_k for k = 1..H-s as an (H-s, d) array."""
    return values[s:] - values[:-s]


def telescoping_residuals(seq: SequenceSpec, s: int, kmax: int | None = None) -> np.ndarray:
    """Max-norm of Delta_s x_k - sum_{j<s} Delta_1 x_{k+j} for k = 1..kmax."""
    x = seq.values()
    kmax = seq.horizon - s if kmax is None else min(kmax, seq.horizon - s)
    direct = x[s: s + kmax] - x[:kmax]
    steps = x[1:] - x[:-1]
    summed = np.zeros_like(direct)
    for j in range(s):
        summed += steps[j: j + kmax]
    return np.abs(direct - summed).max(axis=1)


def telescoping_check(seq: SequenceSpec, s: int, k: int) -> float:
    if k < 1 or k + s > seq.horizon:
        raise IndexError(f"k + s = {k + s} exceeds horizon {seq.horizon}")
    x = seq.values()
    direct = x[k + s - 1] - x[k - 1]
    summed = np.zeros(seq.d)
    for j in range(s):
        summed += x[k + j] - x[k + j - 1]
    return float(np.abs(direct - summed).max())


def _witness_norms(diffs: np.ndarray, witnesses: WitnessSet, p: float) -> np.ndarray:
    """(T, K) array of ||diff_k, mu_t||."""
    return np.stack([nnorm_against(diffs, t, p) for t in witnesses.tuples])


def difference_profile(seq: SequenceSpec, s: int, witnesses: WitnessSet, cfg: SpaceConfig,
                       horizon: int | None = None) -> np.ndarray:
    """d_k = max over witness tuples of ||Delta_s x_k, mu||, for k = 1..H-s."""
    profile, _ = _profile_with_argmax(seq, s, witnesses, cfg, horizon)
    return profile


def _profile_with_argmax(seq, s, witnesses, cfg, horizon=None):
    if seq.d != cfg.d:
        raise ValueError(f"sequence dimension {seq.d} does not match d={cfg.d}")
    witnesses.check(cfg)
    horizon = seq.horizon if horizon is None else horizon
    if s < 1 or s >= horizon:
        raise ValueError(f"need 1 <= s < H, got s={s}, H={horizon}")
    diffs = forward_differences(seq.values()[:horizon], s)
    norms = _witness_norms(diffs, witnesses, cfg.p)
    return norms.max(axis=0), norms.argmax(axis=0)


# ------------------------------------------------------------------ verdicts


@dataclass
class Verdict:
    status: str
    threshold: float
    tail_max: float
    tail_min: float
    tail_size: int
    exceed_count: int = 0
    witness_k: int | None = None
    witness_m: int | None = None
    witness_tuple_index: int | None = None
    witness_value: float | None = None

    @property
    def satisfied(self) -> bool:
        return self.status == SATISFIED

    @property
    def violated(self) -> bool:
        return self.status == VIOLATED

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "threshold": self.threshold,
            "tail_max": self.tail_max,
            "tail_min": self.tail_min,
            "tail_size": self.tail_size,
            "exceed_count": self.exceed_count,
            "witness_k": self.witness_k,
            "witness_m": self.witness_m,
            "witness_tuple_index": self.witness_tuple_index,
            "witness_value": self.witness_value,
        }


def tail_verdict(values, ks, threshold: float, tuple_idx=None, ms=None) -> Verdict:
    """Three-valued verdict on tail values ``values`` observed at indices ``ks``.

    satisfied: max < threshold.  violated: at least a quarter of the values
    reach ``10 * threshold``; the witness is the largest.  Otherwise
    inconclusive.  The witness is recorded for every status.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empty tail window")
    i = int(values.argmax())
    exceed = int(np.sum(values >= VIOLATION_FACTOR * threshold))
    if values[i] < threshold:
        status = SATISFIED
    elif exceed >= VIOLATION_SHARE * values.size:
        status = VIOLATED
    else:
        status = INCONCLUSIVE
    return Verdict(
        status=status,
        threshold=float(threshold),
        tail_max=float(values[i]),
        tail_min=float(values.min()),
        tail_size=int(values.size),
        exceed_count=exceed,
        witness_k=int(ks[i]),
        witness_m=None if ms is None else int(ms[i]),
        witness_tuple_index=None if tuple_idx is None else int(tuple_idx[i]),
        witness_value=float(values[i]),
    )


def tail_start(horizon: int) -> int:
    return -(-horizon // 2)


def s_quasi_cauchy_verdict(seq, s, witnesses, cfg, horizon, tau) -> Verdict:
    """Delta_s profile over the tail, against threshold ``s * tau``.

    The threshold scales with ``s`` so that quasi-Cauchy at ``tau`` implies
    s-quasi-Cauchy at the same ``tau`` through the telescoping bound
    ``d_k(s) <= sum_j d_{k+j}(1)``.
    """
    profile, arg = _profile_with_argmax(seq, s, witnesses, cfg, horizon)
    k0 = tail_start(horizon)
    ks = np.arange(k0, horizon - s + 1)
    if ks.size == 0:
        raise ValueError(f"horizon {horizon} too short for s={s}")
    return tail_verdict(profile[ks - 1], ks, s * tau, arg[ks - 1])


def cauchy_pairs(horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """Tail pairs (k, m) with m in {k+1, k+ceil(k/2), 2k} and m <= H."""
    k0 = tail_start(horizon)
    ks, ms = [], []
    for gap in ("one", "half", "double"):
        k = np.arange(k0, horizon + 1)
        if gap == "one":
            m = k + 1
        elif gap == "half":
            m = k + (k + 1) // 2
        else:
            m = 2 * k
        ok = m <= horizon
        ks.append(k[ok])
        ms.append(m[ok])
    return np.concatenate(ks), np.concatenate(ms)


def cauchy_verdict(seq, witnesses, cfg, horizon, tau) -> Verdict:
    x = seq.values()
    ks, ms = cauchy_pairs(horizon)
    norms = _witness_norms(x[ms - 1] - x[ks - 1], witnesses, cfg.p)
    pair_val = norms.max(axis=0)
    pair_arg = norms.argmax(axis=0)
    # reduce pairs to one value per k (max over its partners)
    uniq, inv = np.unique(ks, return_inverse=True)
    order = np.lexsort((np.arange(pair_val.size), -pair_val, inv))
    first = np.ones(order.size, dtype=bool)
    first[1:] = inv[order[1:]] != inv[order[:-1]]
    pick = order[first]  # per k: largest value, earliest pair on ties
    return tail_verdict(pair_val[pick], uniq, tau, pair_arg[pick], ms[pick])


def convergence_verdict(seq, zeta, witnesses, cfg, horizon, tau) -> Verdict:
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != (cfg.d,):
        raise ValueError(f"limit point must have {cfg.d} coordinates")
    x = seq.values()
    ks = np.arange(tail_start(horizon), horizon + 1)
    norms = _witness_norms(x[ks - 1] - zeta, witnesses, cfg.p)
    return tail_verdict(norms.max(axis=0), ks, tau, norms.argmax(axis=0))


# ------------------------------------------------------------ classification

CONVERGENT = "convergent"
CAUCHY = "cauchy"
QUASI_CAUCHY = "quasi-cauchy"


def s_property(s: int) -> str:
    return QUASI_CAUCHY if s == 1 else f"{s}-quasi-cauchy"


@dataclass
class ClassificationReport:
    sequence: str
    horizon: int
    tau: float
    cfg: SpaceConfig
    witnesses: WitnessSet
    verdicts: dict[str, Verdict]

    def status(self, prop: str) -> str:
        return self.verdicts[prop].status

    @property
    def any_violated(self) -> bool:
        return any(v.violated for v in self.verdicts.values())

    def chain_consistent(self) -> bool:
        """Cauchy => quasi-Cauchy => s-quasi-Cauchy among satisfied verdicts."""
        v = self.verdicts
        if v[CAUCHY].satisfied and not v[QUASI_CAUCHY].satisfied:
            return False
        if v[QUASI_CAUCHY].satisfied:
            return all(verdict.satisfied for name, verdict in v.items()
                       if name.endswith("-quasi-cauchy"))
        return True

    def to_dict(self) -> dict:
        rows = []
        for name, verdict in self.verdicts.items():
            rows.append({
                "property": name,
                "status": verdict.status,
                "witness_k": verdict.witness_k,
                "witness_m": verdict.witness_m,
                "witness_tuple_index": verdict.witness_tuple_index,
                "witness_value": verdict.witness_value,
                "tail_max": verdict.tail_max,
                "tail_min": verdict.tail_min,
                "threshold": verdict.threshold,
                "H": self.horizon,
                "tau": self.tau,
            })
        return {"sequence": self.sequence, "H": self.horizon, "tau": self.tau,
                "space": self.cfg.to_dict(), "witnesses": self.witnesses.to_dict(),
                "properties": rows}


def classify(seq: SequenceSpec, cfg: SpaceConfig, witnesses: WitnessSet | None = None,
             s_list=(1,), horizon: int | None = None, tau: float = 1e-3,
             zeta=None) -> ClassificationReport:
    """Classify ``seq`` at horizon ``H`` against a witness set.

    Always reports Cauchy and quasi-Cauchy, plus s-quasi-Cauchy for every
    ``s > 1`` in ``s_list`` and convergence to ``zeta`` when given.
    """
    witnesses = standard_witnesses(cfg) if witnesses is None else witnesses
    witnesses.check(cfg)
    horizon = seq.horizon if horizon is None else int(horizon)
    if horizon > seq.horizon:
        raise ValueError(f"horizon {horizon} exceeds the sequence's {seq.horizon}")
    s_values = sorted({int(s) for s in s_list} | {1})
    if s_values[0] < 1:
        raise ValueError("s must be positive")
    if horizon < 4 * s_values[-1]:
        raise ValueError(f"need H >= 4 * max(s) = {4 * s_values[-1]}")
    if not (tau > 0 and math.isfinite(tau)):
        raise ValueError("tau must be positive and finite")
    if seq.d != cfg.d:
        raise ValueError(f"sequence dimension {seq.d} does not match d={cfg.d}")

    verdicts: dict[str, Verdict] = {}
    if zeta is not None:
        verdicts[CONVERGENT] = convergence_verdict(seq, zeta, witnesses, cfg, horizon, tau)
    verdicts[CAUCHY] = cauchy_verdict(seq, witnesses, cfg, horizon, tau)
    for s in s_values:
        verdicts[s_property(s)] = s_quasi_cauchy_verdict(seq, s, witnesses, cfg, horizon, tau)
    return ClassificationReport(seq.label, horizon, tau, cfg, witnesses, verdicts)
