"""Classify the catalog at a few horizons and print the verdict table.

Shows which separations (s-quasi-Cauchy vs quasi-Cauchy vs Cauchy) become
visible as H grows, and where a verdict is still inconclusive.
"""
import argparse

from nward.nnorm import SpaceConfig
from nward.sequences import CAUCHY, FAMILIES, QUASI_CAUCHY, catalog_sequence, classify, s_property

SHORT = {"satisfied": "sat", "violated": "VIOL", "inconclusive": "?"}


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--tau", type=float, default=1e-2)
    ap.add_argument("--horizons", type=int, nargs="+", default=[1000, 10_000, 100_000])
    args = ap.parse_args()
    cfg = SpaceConfig(d=2, n=2, p=2)
    props = [CAUCHY, QUASI_CAUCHY, s_property(2), s_property(3)]
    print(f"{'sequence':24s} {'H':>7s} " + " ".join(f"{p:>15s}" for p in props))
    for name in FAMILIES:
        if name == "repeat-interleave":
            continue
        for h in args.horizons:
            seq = catalog_sequence(name, horizon=h, seed=12345)
            rep = classify(seq, cfg, s_list=[2, 3], tau=args.tau)
            row = " ".join(f"{SHORT[rep.status(p)]:>15s}" for p in props)
            print(f"{name:24s} {h:7d} {row}")


if __name__ == "__main__":
    main()
