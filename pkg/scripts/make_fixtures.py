"""Write synthetic ASTD/LABR/HARD/SANAD source files.

    python scripts/make_fixtures.py fixtures/ --scale small --seed 0
"""

import argparse

from aradhati.synth import write_sources


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", help="directory for astd.tsv, labr.tsv, hard.tsv, sanad.tsv")
    ap.add_argument("--scale", choices=("small", "full"), default="small")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    for name, path in write_sources(args.out, scale=args.scale, seed=args.seed).items():
        print(f"{name:<6} {path}")


if __name__ == "__main__":
    main()
