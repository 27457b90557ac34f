"""Average LP claw witnesses into collision polynomials and report the promise gap."""

import argparse
from dataclasses import dataclass
from fractions import Fraction

from clawdeg.approxdeg import DegreeQuery, min_approx_degree
from clawdeg.multisym import expand_freq_to_raw
from clawdeg.properties import claw
from clawdeg.reductions import claw_to_collision_average, injectivity_prob, intersect_prob


@dataclass
class ReductionConfig:
    eps: Fraction = Fraction(1, 3)
    ranges: tuple = (4, 6)
    shapes: tuple = ((1, 1), (1, 2))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=Fraction, default=ReductionConfig.eps)
    ap.add_argument("--M", type=int, nargs="+", default=list(ReductionConfig.ranges))
    a = ap.parse_args()
    cfg = ReductionConfig(a.eps, tuple(a.M))

    failures = 0
    for M in cfg.ranges:
        for F, G in cfg.shapes:
            res = min_approx_degree(DegreeQuery(claw(F, G, M), cfg.eps))
            base = expand_freq_to_raw(res.witness, (F, G))
            ca = claw_to_collision_average(base, M, F, G, cfg.eps)
            bound = injectivity_prob(M, F) * intersect_prob(M, F, G)
            print(f"M={M} F={F} G={G} deg={ca.poly.degree()}  one-to-one in [{ca.one_to_one_min}, "
                  f"{ca.one_to_one_max}]  two-to-one in [{ca.two_to_one_min}, {ca.two_to_one_max}]  "
                  f"pcl_min={ca.pcl_min} (>= {bound})  normalized err={ca.normalized_error}")
            failures += not (ca.small_side_ok and ca.large_side_ok)
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
