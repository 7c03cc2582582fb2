"""Net sizes against alpha for each anchor policy, and nested-ball extraction
on bounded and unbounded sequences."""
import numpy as np

from nward.compactness import ANCHOR_POLICIES, extract_s_quasi_cauchy_subsequence, greedy_alpha_net
from nward.errors import ExtractionFailure
from nward.nnorm import SpaceConfig
from nward.sequences import catalog_sequence, explicit_sequence


def main() -> None:
    cfg = SpaceConfig(d=2, n=2, p=2)
    pts = np.random.default_rng(0).uniform(0, 1, (1000, 2))
    alphas = [0.5, 0.25, 0.1, 0.05, 0.02]
    print("centres needed to cover 1000 uniform points in [0,1]^2")
    print(f"{'policy':14s} " + " ".join(f"{a:>7g}" for a in alphas))
    for policy in ANCHOR_POLICIES:
        sizes = [len(greedy_alpha_net(pts, a, cfg, policy, cap=1000).center_indices)
                 for a in alphas]
        print(f"{policy:14s} " + " ".join(f"{n:7d}" for n in sizes))

    print("\nnested-ball extraction, H = 4096")
    seqs = [catalog_sequence("random-walk-damped", {"step": 1, "damping": 1}, horizon=4096),
            catalog_sequence("alternating", horizon=4096),
            catalog_sequence("sqrt-ramp", horizon=4096),
            explicit_sequence(np.outer(np.arange(1, 4097.0), [1.0, 0.0]), label="axis-ramp")]
    for seq in seqs:
        for s in (1, 2):
            try:
                ext = extract_s_quasi_cauchy_subsequence(seq, s, cfg)
                worst = max(p - e for p, e in zip(ext.profile, ext.envelope))
                print(f"  {seq.label:20s} s={s}: indices {ext.indices[:6]}..., "
                      f"max(profile - 1/k) = {worst:.3g}")
            except ExtractionFailure as exc:
                print(f"  {seq.label:20s} s={s}: failed ({exc})")


if __name__ == "__main__":
    main()
