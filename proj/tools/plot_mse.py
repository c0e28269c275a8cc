#!/usr/bin/env python3
"""Plot MSE-vs-iteration curves from a maxcon CSV file."""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv")
    parser.add_argument("--out", default=None, help="image path (default: <csv>.png)")
    args = parser.parse_args()

    df = pd.read_csv(args.csv)
    fig, ax = plt.subplots(figsize=(6, 4))
    for (algo, topo, sigma2, window), cell in df.groupby(["algorithm", "topology", "sigma2", "window"]):
        label = f"{algo} {topo} $\\sigma^2$={sigma2:g} C={window}"
        ax.semilogy(cell["iteration"], cell["mse"], label=label)
    ax.set_xlabel("iteration")
    ax.set_ylabel("network-wide MSE")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out or args.csv.rsplit(".", 1)[0] + ".png", dpi=150)


if __name__ == "__main__":
    main()
