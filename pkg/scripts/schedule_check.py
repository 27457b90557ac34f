"""Sweep the block schedule over (F, G) and print any violated property."""

import argparse
from dataclasses import dataclass

from clawdeg.reductions import mk_schedule, schedule_violations


@dataclass
class ScheduleConfig:
    max_F: int = 50
    max_G: int = 200


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-F", type=int, default=ScheduleConfig.max_F)
    ap.add_argument("--max-G", type=int, default=ScheduleConfig.max_G)
    a = ap.parse_args()
    cfg = ScheduleConfig(a.max_F, a.max_G)

    checked = bad = 0
    for F in range(1, cfg.max_F + 1):
        for G in range(F, min(F * F, cfg.max_G) + 1):
            checked += 1
            for msg in schedule_violations(F, G, mk_schedule(F, G)):
                bad += 1
                print(f"F={F} G={G}: {msg}")
    print(f"{checked} (F, G) pairs, {bad} violations")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
