"""Write a synthetic CelebA-layout annotation file (40 attributes, random labels)."""

import argparse
from pathlib import Path

from facedp.synthetic import celeba_text, random_database


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", type=Path)
    parser.add_argument("-n", type=int, default=10_000)
    parser.add_argument("--rate", type=float, default=0.5, help="Bernoulli rate for every attribute")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    args.out.write_text(celeba_text(random_database(args.n, rate=args.rate, seed=args.seed)))
    print(f"wrote {args.n} records to {args.out}")


if __name__ == "__main__":
    main()
