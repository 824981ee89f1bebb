"""Two-panel risk plot from the CSVs written by `steinrisk figure1`."""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def panel(ax, table, title):
    for name, rows in table.groupby("estimator", sort=False):
        style = "--" if name == "JS" else "-"
        ax.plot(rows["theta_norm"], rows["risk_hat"], style, label=name)
    ax.set_xlabel("|theta|")
    ax.set_ylabel("risk")
    ax.set_title(title)
    ax.legend(fontsize="small")


def main(out_dir):
    out = Path(out_dir)
    left = pd.read_csv(out / "left_panel.csv", comment="#")
    right = pd.read_csv(out / "right_panel.csv", comment="#")
    fig, (a, b) = plt.subplots(1, 2, figsize=(11, 4.5), sharey=True)
    panel(a, left, "James-Stein and ADM, m = (k-2)/d")
    panel(b, right, "ADM(m*), James-Stein, positive part")
    fig.tight_layout()
    fig.savefig(out / "risk_curves.png", dpi=150)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else ".")
