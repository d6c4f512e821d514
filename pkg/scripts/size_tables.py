#!/usr/bin/env python3
"""Print the closed-form conversion size tables for the parametric toy
family (C private outcomes, A actions, H informed-player levels).

Columns: H, normal-form plans, basic, pruned, folded.
"""
from __future__ import annotations

import argparse

from pubcoord import (
    count_basic,
    count_folded,
    count_normal_plans,
    count_pruned,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--chance", type=int, default=3)
    ap.add_argument("--actions", type=int, default=2)
    ap.add_argument("--max-depth", type=int, default=14)
    args = ap.parse_args()
    c, a = args.chance, args.actions
    for both in (False, True):
        label = "both players" if both else "informed player only"
        print(f"\nC={c} A={a}, private outcome for {label}")
        print(f"{'H':>3} {'normal':>10} {'basic':>10} "
              f"{'pruned':>10} {'folded':>10}")
        for h in range(1, args.max_depth + 1):
            print(f"{h:>3} {count_normal_plans(c, a, h):>10.2E} "
                  f"{count_basic(c, a, h, both):>10.2E} "
                  f"{count_pruned(c, a, h, both):>10.2E} "
                  f"{count_folded(c, a, h):>10.2E}")


if __name__ == "__main__":
    main()
