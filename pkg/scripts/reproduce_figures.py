"""Write the data for every reference figure to CSV, optionally plotting it.

    python3 scripts/reproduce_figures.py --outdir results/ [--plot] [--jobs 4]
"""

import argparse
import logging
import time
from pathlib import Path

from fbec.figures import FIGURES, figure
from fbec.sweep import read_csv

# x column, y columns, log-x, log-y
PLOTS = {
    "fig2": ("eps", None, True, False),
    "fig3": ("n_nodes", None, False, False),
    "fig4": ("eps", None, True, False),
    "fig5": ("n_nodes", None, False, False),
    "fig6": ("n_nodes", None, False, False),
    "fig7": ("d_max", None, False, True),
    "fig8": ("rho_s_op", None, False, False),
    "fig9": ("rho_s_op", ["eta"], False, False),
    "fig10": ("eps", None, True, False),
}


def plot(csv_path, png_path, name):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    table = read_csv(csv_path)
    xcol, ycols, logx, logy = PLOTS[name]
    ycols = ycols or [h for h in table.header if h != xcol]
    fig, ax = plt.subplots(figsize=(6, 4))
    x = table.column(xcol)
    for col in ycols:
        ax.plot(x, table.column(col), label=col)
    ax.set_xscale("log" if logx else "linear")
    ax.set_yscale("log" if logy else "linear")
    ax.set_xlabel(xcol)
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    ax.set_title(name)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--outdir", default="results")
    parser.add_argument("--figures", nargs="*", default=list(FIGURES), choices=FIGURES)
    parser.add_argument("--method", default="exact", choices=("exact", "closed"))
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--plot", action="store_true", help="also render PNGs (needs matplotlib)")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in args.figures:
        t0 = time.perf_counter()
        table = figure(name, method=args.method, jobs=args.jobs)
        path = outdir / f"{name}.csv"
        table.write(path)
        logging.info("%-5s %4d rows  %.1fs  -> %s", name, len(table.rows), time.perf_counter() - t0, path)
        if args.plot:
            plot(path, outdir / f"{name}.png", name)


if __name__ == "__main__":
    main()
