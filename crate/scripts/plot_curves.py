#!/usr/bin/env python3
"""Plot one or more curve.csv files written by `nemsc sweep`.

Each file contributes f(z) (the elastic term with the load removed) and the
rough total pressure; the smooth total is drawn dashed. Intersections of f
with a total-pressure curve are the equilibria.

    scripts/plot_curves.py out/si_au/curve.csv out/si_au_rough_10nm/curve.csv -o fig.png
"""
import argparse
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def read_curve(path):
    return pd.read_csv(path, comment="#")


def label_for(path):
    return os.path.basename(os.path.dirname(os.path.abspath(path))) or path


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("curves", nargs="+", help="curve.csv files")
    ap.add_argument("-o", "--output", default="curves.png")
    ap.add_argument("--no-smooth", action="store_true", help="omit the smooth-surface curves")
    a = ap.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for i, path in enumerate(a.curves):
        d = read_curve(path)
        color = f"C{i}"
        name = label_for(path)
        ax.plot(d.z_nm, d.p_tot_rough_Pa, color=color, label=f"{name}: total")
        if not a.no_smooth:
            ax.plot(d.z_nm, d.p_tot_smooth_Pa, color=color, ls="--", lw=0.8)
        if i == 0:
            ax.plot(d.z_nm, d.f_Pa, color="k", lw=1.2, label="f(z)")
    ax.set_xlabel("separation z (nm)")
    ax.set_ylabel("pressure (Pa)")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(a.output, dpi=150)
    print(f"wrote {a.output}")


if __name__ == "__main__":
    main()
