#!/usr/bin/env python3
"""Write generated instance families to a directory as ER-DIMACS files.

Examples:
    python3 scripts/gen_instances.py --out /tmp/smoke --family band \
        --windows 4 9 14 19 24 --per-window 4
    python3 scripts/gen_instances.py --out /tmp/fuzz --family random --count 50
"""

import argparse
import random
from pathlib import Path

from dper.formula import serialize
from dper.gen import band_instance, random_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True)
    ap.add_argument("--family", choices=("band", "random"), default="band")
    ap.add_argument("--windows", type=int, nargs="+", default=[4, 9, 14, 19, 24])
    ap.add_argument("--per-window", type=int, default=4)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if args.family == "band":
        for w in args.windows:
            for i in range(args.per_window):
                rng = random.Random(args.seed + 1000 * w + i)
                p = band_instance(rng, w)
                name = f"band_w{w:02d}_{i}.cnf"
                (out / name).write_text(serialize(p))
                written.append(name)
    else:
        for i in range(args.count):
            rng = random.Random(args.seed + i)
            p = random_instance(rng)
            name = f"rand_{i:04d}.cnf"
            (out / name).write_text(serialize(p))
            written.append(name)
    print(f"wrote {len(written)} instances to {out}")


if __name__ == "__main__":
    main()
