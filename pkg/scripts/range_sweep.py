"""Check that d_min stops changing once the range reaches F + G, lifting each witness upward."""

import argparse
from dataclasses import dataclass
from fractions import Fraction

from clawdeg.approxdeg import range_equality_report
from clawdeg.properties import claw


@dataclass
class SweepConfig:
    eps: Fraction = Fraction(1, 3)
    max_size: int = 4  # largest F + G
    extra: int = 2  # how far past F + G to go


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=Fraction, default=SweepConfig.eps)
    ap.add_argument("--max-size", type=int, default=SweepConfig.max_size)
    ap.add_argument("--extra", type=int, default=SweepConfig.extra)
    a = ap.parse_args()
    cfg = SweepConfig(a.eps, a.max_size, a.extra)

    failures = 0
    for n in range(2, cfg.max_size + 1):
        for F in range(1, n // 2 + 1):
            G = n - F
            ms = list(range(n + 1, n + 1 + cfg.extra))
            r = range_equality_report(claw(F, G, n), n, ms, cfg.eps, raw_budget=0)
            ds = [e.d_min for e in r.entries]
            print(f"(F,G)=({F},{G})  M'={n}: d={r.base.d_min}  M={ms}: d={ds}  "
                  f"equal={r.equal} lifted={r.lifted_ok}")
            failures += not r.passed
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
