#!/usr/bin/env python3
"""Plot mean and one standard deviation of smoothed returns from one or more result directories."""
import argparse
import glob
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def load(directory):
    files = sorted(glob.glob(os.path.join(directory, "curve_trial*.csv")))
    if not files:
        raise SystemExit(f"no curve_trial*.csv in {directory}")
    return pd.concat([pd.read_csv(f) for f in files], ignore_index=True)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("dirs", nargs="+", help="output directories written by `amtd train`")
    p.add_argument("--column", default="smoothed_return",
                   choices=["raw_return", "smoothed_return", "eval_return", "smoothed_eval_return"])
    p.add_argument("--x", default="episode", choices=["episode", "step"])
    p.add_argument("-o", "--output", default="curves.png")
    args = p.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4))
    for d in args.dirs:
        df = load(d)
        df = df[df[args.column].notna()]
        g = df.groupby("episode")
        mean, std = g[args.column].mean(), g[args.column].std().fillna(0.0)
        x = g[args.x].mean() if args.x == "step" else mean.index
        ax.plot(x, mean, label=os.path.basename(os.path.normpath(d)))
        ax.fill_between(x, mean - std, mean + std, alpha=0.2)
    ax.set_xlabel(args.x)
    ax.set_ylabel(args.column.replace("_", " "))
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=120)
    print(args.output)


if __name__ == "__main__":
    main()
