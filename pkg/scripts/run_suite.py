"""Run the theorem suite and write the JSON report plus a per-section table.

    python scripts/run_suite.py [--config path] [--out suite_report.json]
"""
import argparse
import sys
import time

from nward.report import digest, dumps
from nward.suite import load_config, run_suite


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--config")
    ap.add_argument("--out", default="suite_report.json")
    ap.add_argument("--threads", type=int)
    args = ap.parse_args()

    cfg = load_config(args.config)
    t0 = time.perf_counter()
    body = run_suite(cfg, threads=args.threads)
    elapsed = time.perf_counter() - t0
    with open(args.out, "w") as fh:
        fh.write(dumps(body) + "\n")

    print(f"{'section':36s} {'status':8s} {'pass':>5s} {'cex':>4s} {'n/a':>4s} {'bad':>4s}")
    for sec in body["sections"]:
        c = sec["counts"]
        print(f"{sec['theorem']:36s} {sec['status']:8s} {c['pass']:5d} "
              f"{c['expected-counterexample']:4d} {c['not-applicable']:4d} "
              f"{c['unexpected-violation']:4d}")
    s = body["summary"]
    print(f"\n{s['cases']} cases, {s['expected_counterexamples']} expected counterexamples, "
          f"{s['unexpected_violations']} unexpected, {elapsed:.1f} s")
    print(f"report {args.out}  sha256 {digest(body)}")
    return 0 if s["unexpected_violations"] == 0 else 3


if __name__ == "__main__":
    sys.exit(main())
