"""Plot `epsample bench` CSV output: median of a metric against the swept axis, one line per method.

    epsample bench --axis output_size --csv out.csv
    python3 scripts/plot_bench.py out.csv --metric error --out error.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("--metric", default="error")
    ap.add_argument("--out", default="bench.png")
    ap.add_argument("--logy", action="store_true")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    df = df[df["status"] == "ok"]
    axis = df["axis"].iloc[0]
    med = df.groupby(["method", "value"])[args.metric].median().reset_index()

    fig, ax = plt.subplots(figsize=(6, 4))
    for method, g in med.groupby("method"):
        ax.plot(g["value"], g[args.metric], marker="o", label=method)
    ax.set_xlabel(axis)
    ax.set_ylabel(args.metric)
    if args.logy:
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)


if __name__ == "__main__":
    main()
