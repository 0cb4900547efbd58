#!/usr/bin/env python3
"""Batch figure rendering for simulation output directories.

Reads the CSV artifacts written by `nlwrad run` / `nlwrad preset` and renders
the qualitative figures: energy budget, log-log Q(t) decay with t^{-kappa}
guide lines, identity residual vs dr with the windowed-inequality slack,
radiation profile, and the scattering-defect ladder.  Rendering is read-only
and non-interactive; one image per requested figure.

    python plots/render.py <dir> [--figs energy qdecay morawetz radiation defect]
                                 [--format png|svg]
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FIGURES = ("energy", "qdecay", "morawetz", "radiation", "defect")


class MissingColumnError(KeyError):
    """A required column is absent from a CSV artifact."""

    def __init__(self, path, column):
        super().__init__(f"{path}: missing column {column!r}")
        self.path = path
        self.column = column


class EmptySeriesWarning(UserWarning):
    pass


def read_table(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(x) for x in row] for row in reader]
    data = np.asarray(rows, dtype=float) if rows else np.empty((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}


def column(table: dict, path: Path, name: str) -> np.ndarray:
    if name not in table:
        raise MissingColumnError(path, name)
    return table[name]


def _finish(fig, out_dir: Path, name: str, fmt: str, figures: dict, close: bool):
    path = out_dir / f"{name}.{fmt}"
    fig.savefig(path, dpi=150, bbox_inches="tight")
    figures[name] = (path, fig)
    if close:
        plt.close(fig)


def render_energy(src: Path, fig):
    path = src / "energy.csv"
    table = read_table(path)
    t = column(table, path, "t")
    ax = fig.subplots()
    for name in ("kinetic", "gradient", "potential", "total"):
        ax.plot(t, column(table, path, name), label=name)
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.set_title("energy budget")
    ax.legend()


def render_qdecay(src: Path, fig):
    path = src / "q_series.csv"
    table = read_table(path)
    t = column(table, path, "t")
    q = column(table, path, "Q")
    ax = fig.subplots()
    ax.set_xlabel("t")
    ax.set_ylabel("Q(t)")
    ax.set_title("decay of Q")
    pos = (t > 0) & (q > 0)
    if not np.any(pos):
        warnings.warn("q_series.csv has no positive samples; empty decay plot",
                      EmptySeriesWarning, stacklevel=2)
        ax.text(0.5, 0.5, "no Q samples", ha="center", va="center",
                transform=ax.transAxes)
        return
    ax.loglog(t[pos], q[pos], label="Q(t)")
    # guide lines t^{-kappa}, one per tkq_* column, anchored past t = 10
    kappas = [name[4:] for name in table if name.startswith("tkq_")]
    anchor_idx = np.argmax(t[pos] >= 10.0) if np.any(t[pos] >= 10.0) else 0
    ta = t[pos][anchor_idx]
    qa = q[pos][anchor_idx]
    for ks in kappas:
        k = float(ks)
        ax.loglog(t[pos], qa * (t[pos] / ta) ** (-k), "--",
                  label=f"t^-{ks} guide")
    ax.legend()


def render_morawetz(src: Path, fig):
    id_path = src / "identity.csv"
    mz_path = src / "morawetz.csv"
    id_table = read_table(id_path)
    mz_table = read_table(mz_path)
    ax1, ax2 = fig.subplots(1, 2)

    dr = column(id_table, id_path, "dr")
    res = column(id_table, id_path, "residual")
    two_e = column(id_table, id_path, "two_energy")
    R = column(id_table, id_path, "R")
    t2 = column(id_table, id_path, "t2")
    rel = np.divide(res, two_e, out=np.zeros_like(res), where=two_e > 0)
    for key in sorted({(Ri, t2i) for Ri, t2i in zip(R, t2)}):
        sel = (R == key[0]) & (t2 == key[1])
        if np.count_nonzero(sel) == 0:
            continue
        order = np.argsort(dr[sel])
        ax1.loglog(dr[sel][order], rel[sel][order], "o-",
                   label=f"R={key[0]:g}, t2={key[1]:g}")
    if len(dr):
        d0 = np.sort(np.unique(dr))
        ax1.loglog(d0, rel.max() * (d0 / dr.max()) ** 2, "k--", label="slope 2")
    ax1.set_xlabel("dr")
    ax1.set_ylabel("residual / 2E")
    ax1.set_title("identity residual vs dr")
    ax1.legend(fontsize=7)

    slack = column(mz_table, mz_path, "slack")
    rhs = column(mz_table, mz_path, "rhs")
    idx = np.arange(len(slack))
    ax2.bar(idx - 0.2, rhs, width=0.4, label="rhs")
    ax2.bar(idx + 0.2, slack, width=0.4, label="slack")
    ax2.set_xlabel("window index (R, r)")
    ax2.set_title("windowed inequality")
    ax2.axhline(0.0, color="k", lw=0.8)
    ax2.legend()


def render_radiation(src: Path, fig):
    path = src / "radiation.csv"
    table = read_table(path)
    eta = column(table, path, "eta")
    g = column(table, path, "g_plus")
    tail = column(table, path, "tail")
    ax = fig.subplots()
    ax.plot(eta, g, label="g+")
    ok = np.isfinite(tail)
    ax.plot(eta[ok], np.abs(tail[ok]), ":", label="|variation tail|")
    ax.set_xlabel("eta = t - r")
    ax.set_ylabel("g+(eta)")
    ax.set_title("radiation profile")
    ax.legend()


def render_defect(src: Path, fig):
    path = src / "defect.csv"
    table = read_table(path)
    t1 = column(table, path, "T1")
    delta = column(table, path, "delta")
    ax = fig.subplots()
    if np.any(delta > 0):
        ax.semilogy(t1, delta, "o-")
    else:
        ax.plot(t1, delta, "o-")
    ax.set_xlabel("release time T1")
    ax.set_ylabel("defect")
    ax.set_title("scattering defect ladder")


_RENDERERS = {
    "energy": render_energy,
    "qdecay": render_qdecay,
    "morawetz": render_morawetz,
    "radiation": render_radiation,
    "defect": render_defect,
}


def render(src_dir, figures=None, fmt: str = "png", out_dir=None, close: bool = True):
    """Render the requested figures from a simulation output directory.

    Returns {figure name: (image path, matplotlib Figure)}; figures are
    closed after saving unless close=False.
    """
    src = Path(src_dir)
    if not src.is_dir():
        raise FileNotFoundError(f"no such directory: {src}")
    names = list(figures) if figures else list(FIGURES)
    unknown = [n for n in names if n not in _RENDERERS]
    if unknown:
        raise ValueError(f"unknown figures {unknown}; available: {sorted(_RENDERERS)}")
    out = Path(out_dir) if out_dir else src
    out.mkdir(parents=True, exist_ok=True)

    done: dict = {}
    for name in names:
        size = (9.0, 3.6) if name == "morawetz" else (6.0, 4.0)
        fig = plt.figure(figsize=size)
        try:
            _RENDERERS[name](src, fig)
        except Exception:
            plt.close(fig)
            raise
        _finish(fig, out, name, fmt, done, close)
    return done


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory", help="simulation output directory with CSV artifacts")
    ap.add_argument("--figs", nargs="+", default=None, choices=FIGURES,
                    help="subset of figures (default: all)")
    ap.add_argument("--format", default="png", choices=("png", "svg"))
    ap.add_argument("--out", default=None, help="image output directory (default: input)")
    args = ap.parse_args(argv)
    try:
        done = render(args.directory, args.figs, args.format, args.out)
    except (FileNotFoundError, MissingColumnError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for name, (path, _) in done.items():
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
