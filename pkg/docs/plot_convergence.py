#!/usr/bin/env python3
"""Plot a convergence sweep CSV produced by `macolloc sweep`.

Usage: python docs/plot_convergence.py conv.csv [out.png]
"""

import sys

import matplotlib.pyplot as plt

from macolloc.cli import read_sweep_rows


def main(argv):
    if not 1 <= len(argv) <= 2:
        print(__doc__)
        return 2
    rows = read_sweep_rows(argv[0])
    degrees = [r["degree"] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 5))
    for key, label in [
        ("rmse_solution", "rmse vs exact"),
        ("max_solution", "max error vs exact"),
        ("max_boundary", "max boundary error"),
        ("max_pde", "max pde error"),
    ]:
        vals = [r[key] for r in rows]
        if any(v is not None for v in vals):
            ax.semilogy(degrees, vals, marker="o", label=label)
    ax.set_xlabel("total degree")
    ax.set_ylabel("error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    if len(argv) == 2:
        fig.savefig(argv[1], dpi=150)
        print(f"saved {argv[1]}")
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
