"""Tabulate minimum approximate degrees for small claw, collision and OR instances.

    python scripts/degree_table.py --eps 1/10 1/3 2/5
"""

import argparse
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

from clawdeg.approxdeg import DegreeQuery, min_approx_degree
from clawdeg.properties import claw, collision, kclaw, or_on_second


@dataclass
class TableConfig:
    eps: List[Fraction] = field(default_factory=lambda: [Fraction(1, 10), Fraction(1, 3)])
    max_range: int = 5
    raw: bool = False  # also solve in raw space when there are at most 256 points


def instances(cfg: TableConfig):
    for M in range(2, cfg.max_range + 1):
        for F, G in ((1, 1), (1, 2), (2, 2), (1, 3)):
            if F + G <= M + 1:
                yield claw(F, G, M)
    yield kclaw((1, 1, 1), 3)
    for M in (2, 4, 6):
        yield collision(M)
    for G in (1, 2, 3, 4):
        yield or_on_second((G,), 2)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", nargs="+", type=Fraction, default=TableConfig().eps)
    ap.add_argument("--max-range", type=int, default=5)
    ap.add_argument("--raw", action="store_true")
    a = ap.parse_args()
    cfg = TableConfig(a.eps, a.max_range, a.raw)

    print(f"{'instance':<22}{'eps':>6}{'d_min':>7}{'orbits':>8}{'raw':>6}{'secs':>8}")
    for spec in instances(cfg):
        for eps in cfg.eps:
            t = time.time()
            r = min_approx_degree(DegreeQuery(spec, eps))
            raw = "-"
            if cfg.raw and spec.M ** sum(spec.domains) <= 256:
                raw = str(min_approx_degree(DegreeQuery(spec, eps, space="raw")).d_min)
            print(f"{spec.label():<22}{str(eps):>6}{str(r.d_min):>7}{r.orbit_count:>8}{raw:>6}"
                  f"{time.time() - t:>8.2f}")


if __name__ == "__main__":
    main()
