"""Determinant-based n-norms on finite-dimensional spaces.

Vectors are plain float arrays of length ``d``; a tuple of ``n`` of them is an
``(n, d)`` array, and batches of tuples are ``(..., n, d)`` arrays.  The p-norm
sums ``|det|**p`` over the n x n minors of the tuple, and the sup-norm takes the
largest ``|det|``.  Minors are evaluated with ``numpy.linalg.det`` (LU with
partial pivoting).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

INF = math.inf

MAX_N = 8
MAX_D = 32
# Ordered enumeration visits d**n index tuples; refuse anything larger.
MAX_ORDERED_TERMS = 2_000_000

RANK_RTOL = 1e-12


@dataclass(frozen=True)
class SpaceConfig:
    d: int
    n: int = 2
    p: float = 2.0

    def __post_init__(self):
        if not (isinstance(self.d, (int, np.integer)) and isinstance(self.n, (int, np.integer))):
            raise ValueError("d and n must be integers")
        if not 2 <= self.n <= self.d:
            raise ValueError(f"need 2 <= n <= d, got n={self.n}, d={self.d}")
        if self.n > MAX_N or self.d > MAX_D:
            raise ValueError(f"n is capped at {MAX_N} and d at {MAX_D}")
        p = float(self.p)
        if math.isnan(p) or p < 1:
            raise ValueError(f"p must be >= 1 or inf, got {self.p}")
        object.__setattr__(self, "p", p)

    @property
    def p_is_inf(self) -> bool:
        return math.isinf(self.p)

    def to_dict(self) -> dict:
        return {"d": self.d, "n": self.n, "p": "inf" if self.p_is_inf else self.p}

    @classmethod
    def from_dict(cls, data: dict) -> "SpaceConfig":
        return cls(d=int(data["d"]), n=int(data.get("n", 2)), p=parse_p(data.get("p", 2.0)))


def parse_p(value) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return INF
        return float(value)
    return float(value)


@lru_cache(maxsize=None)
def _combinations(d: int, n: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(d), n)), dtype=np.intp)


def as_tuple(vectors, cfg: SpaceConfig | None = None) -> np.ndarray:
    """Validate and convert ``vectors`` to an ``(n, d)`` float array."""
    arr = np.asarray(vectors, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"a vector tuple must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    if cfg is not None and arr.shape != (cfg.n, cfg.d):
        raise ValueError(f"expected {cfg.n} vectors of length {cfg.d}, got shape {arr.shape}")
    return arr


def minor_dets(tuples: np.ndarray) -> np.ndarray:
    """Determinants of all n x n column minors, one per increasing index tuple.

    ``tuples`` has shape ``(..., n, d)``; the result has shape ``(..., C(d, n))``.
    """
    n, d = tuples.shape[-2:]
    combos = _combinations(d, n)
    sub = tuples[..., combos]  # (..., n, C, n)
    sub = np.moveaxis(sub, -3, -2)  # (..., C, n, n)
    with np.errstate(divide="ignore", invalid="ignore"):  # singular LU pivots
        return np.linalg.det(sub)


def _reduce(dets: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(dets)
    if math.isinf(p):
        return a.max(axis=-1)
    top = a.max(axis=-1)
    safe = np.where(top > 0, top, 1.0)
    scaled = a / safe[..., None]
    if p == 2.0:
        s = np.sqrt(np.sum(scaled * scaled, axis=-1))
    elif p == 1.0:
        s = np.sum(scaled, axis=-1)
    else:
        s = np.sum(scaled**p, axis=-1) ** (1.0 / p)
    return np.where(top > 0, top * s, 0.0)


def nnorm_many(tuples, p: float = 2.0) -> np.ndarray:
    """n-norm of every tuple in a ``(..., n, d)`` batch."""
    tuples = np.asarray(tuples, dtype=float)
    if tuples.shape[-2] > tuples.shape[-1]:
        raise ValueError("tuple has more vectors than coordinates")
    return _reduce(minor_dets(tuples), float(p))


def nnorm_against(first, others, p: float = 2.0) -> np.ndarray:
    """``||first_k, others...||`` for each row ``first_k`` of a ``(K, d)`` array."""
    first = np.asarray(first, dtype=float)
    others = np.asarray(others, dtype=float)
    k = first.shape[0]
    rest = np.broadcast_to(others, (k,) + others.shape)
    return nnorm_many(np.concatenate([first[:, None, :], rest], axis=1), p)


def _ordered_dets(arr: np.ndarray) -> np.ndarray:
    n, d = arr.shape
    if d**n > MAX_ORDERED_TERMS:
        raise ValueError(f"ordered enumeration of {d}**{n} index tuples is too large")
    idx = np.array(list(itertools.product(range(d), repeat=n)), dtype=np.intp)
    sub = np.moveaxis(arr[:, idx], 0, -2)  # (d**n, n, n), M[i][k] = v_i[t_k]
    return np.linalg.det(sub)


def nnorm_p(vectors, cfg: SpaceConfig, method: str = "combinations") -> float:
    """p-norm of a tuple, ``[(1/n!) sum_t |det M_t|^p]^(1/p)`` over ordered index tuples.

    ``method="ordered"`` enumerates all d**n ordered tuples literally;
    ``"combinations"`` visits only increasing tuples, which carry the same
    total because every ordering of a column set has the same ``|det|`` and
    repeated columns give zero.
    """
    if cfg.p_is_inf:
        raise ValueError("nnorm_p needs a finite exponent; use nnorm_inf")
    arr = as_tuple(vectors, cfg)
    if method == "combinations":
        return float(_reduce(minor_dets(arr), cfg.p))
    if method == "ordered":
        a = np.abs(_ordered_dets(arr))
        top = a.max()
        if top == 0:
            return 0.0
        total = np.sum((a / top) ** cfg.p) / math.factorial(cfg.n)
        return float(top * total ** (1.0 / cfg.p))
    raise ValueError(f"unknown method {method!r}")


def nnorm_inf(vectors, cfg: SpaceConfig, method: str = "combinations") -> float:
    if not cfg.p_is_inf:
        raise ValueError("nnorm_inf needs p = inf")
    arr = as_tuple(vectors, cfg)
    if method == "combinations":
        return float(np.abs(minor_dets(arr)).max())
    if method == "ordered":
        return float(np.abs(_ordered_dets(arr)).max())
    raise ValueError(f"unknown method {method!r}")


def nnorm(vectors, cfg: SpaceConfig) -> float:
    if cfg.p_is_inf:
        return nnorm_inf(vectors, cfg)
    return nnorm_p(vectors, cfg)


def gram_nnorm_oracle(vectors) -> float:
    """sqrt(det G) with G the Gram matrix; equals the p = 2 n-norm (Cauchy-Binet)."""
    arr = as_tuple(vectors)
    gram = arr @ arr.T
    return math.sqrt(max(float(np.linalg.det(gram)), 0.0))


def numerical_rank(vectors, rtol: float = RANK_RTOL) -> int:
    arr = np.asarray(vectors, dtype=float)
    sv = np.linalg.svd(arr, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def is_independent(vectors, rtol: float = RANK_RTOL) -> bool:
    arr = np.asarray(vectors, dtype=float)
    return numerical_rank(arr, rtol) == arr.shape[0]


# ----------------------------------------------------------------- axioms


@dataclass
class AxiomResult:
    passed: bool
    worst_residual: float
    checks: int

    def to_dict(self) -> dict:
        return {"passed": self.passed, "worst_residual": self.worst_residual, "checks": self.checks}


@dataclass
class AxiomReport:
    tol: float
    axioms: dict[str, AxiomResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.axioms.values())

    def to_dict(self) -> dict:
        return {"tol": self.tol, "passed": self.passed,
                "axioms": {k: v.to_dict() for k, v in self.axioms.items()}}


_SCALES = (-3.0, 0.5, 2.5)


def check_axioms(samples, cfg: SpaceConfig, tol: float = 1e-12, rng=None) -> AxiomReport:
    """Numerically check the four n-norm axioms on each sample tuple.

    Residuals are absolute: permutation ``|N(perm t) - N(t)|``, homogeneity
    ``|N(scaled t) - |delta| N(t)|``, triangle ``N(u+v, rest) - N(u, rest) -
    N(v, rest)`` (must not exceed ``tol``), and for degeneracy the norm of a
    rank-deficient variant of each sample relative to ``scale**n``.
    """
    samples = [as_tuple(s, cfg) for s in samples]
    if not samples:
        raise ValueError("check_axioms needs at least one sample")
    rng = np.random.default_rng(0) if rng is None else rng
    n = cfg.n
    perms = list(itertools.permutations(range(n)))
    if len(perms) > 24:
        perms = [perms[i] for i in rng.choice(len(perms), 24, replace=False)]

    perm_worst = homog_worst = tri_worst = 0.0
    dep_worst = 0.0
    indep_ok = True
    tri_checks = 0
    for t in samples:
        base = nnorm(t, cfg)
        for perm in perms:
            perm_worst = max(perm_worst, abs(nnorm(t[list(perm)], cfg) - base))
        for slot in range(n):
            for delta in _SCALES:
                scaled = t.copy()
                scaled[slot] *= delta
                homog_worst = max(homog_worst, abs(nnorm(scaled, cfg) - abs(delta) * base))
        # triangle in the first slot: split the first vector into two random parts
        u = rng.uniform(-1, 1, cfg.d) * np.abs(t).max()
        v = t[0] - u
        lhs = nnorm(np.vstack([u + v, t[1:]]), cfg)
        rhs = nnorm(np.vstack([u, t[1:]]), cfg) + nnorm(np.vstack([v, t[1:]]), cfg)
        tri_worst = max(tri_worst, lhs - rhs)
        tri_checks += 1
        # degeneracy: last vector replaced by a combination of the others
        scale = max(float(np.abs(t).max()), 1e-300)
        dep = t.copy()
        dep[-1] = rng.uniform(-1, 1, n - 1) @ t[:-1]
        dep_worst = max(dep_worst, nnorm(dep, cfg) / scale**n)
        if is_independent(t):
            indep_ok = indep_ok and base > 1e-9 * scale**n
        else:
            dep_worst = max(dep_worst, base / scale**n)

    report = AxiomReport(tol=tol)
    report.axioms["zero-iff-dependent"] = AxiomResult(
        passed=dep_worst <= 1e-9 and indep_ok, worst_residual=dep_worst, checks=2 * len(samples))
    report.axioms["permutation"] = AxiomResult(
        passed=perm_worst <= tol, worst_residual=perm_worst, checks=len(samples) * len(perms))
    report.axioms["homogeneity"] = AxiomResult(
        passed=homog_worst <= tol, worst_residual=homog_worst,
        checks=len(samples) * n * len(_SCALES))
    report.axioms["triangle"] = AxiomResult(
        passed=tri_worst <= tol, worst_residual=tri_worst,
        checks=tri_checks)
    return report
