#!/usr/bin/env python3
"""Plot the figure CSVs written by sip-dyn.

Expects one output directory per config under RESULTS, named after the config
file stem (results/fig3a_sweep_L/branches.csv, ...). With --sip-dyn the
configs are run first.
"""
import argparse
import json
import subprocess
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd
from matplotlib.patches import Patch

ROOT = Path(__file__).resolve().parent.parent
LABEL_COLORS = {"coexistence": 0, "infection_free": 1, "collapse": 2, "undecided": 3}


def run_configs(binary, results):
    for cfg in sorted((ROOT / "configs").glob("*.json")):
        cmd = json.loads(cfg.read_text())["command"]
        subprocess.run([binary, cmd, "--config", str(cfg), "--out", str(results / cfg.stem)], check=True)


def percapita(d, ax):
    df = pd.read_csv(d / "percapita.csv")
    for col in df.columns[1:]:
        ax.plot(df["S"], df[col], label=col)
    ax.axhline(0, color="k", lw=0.5)
    ax.set_xlabel("S")
    ax.set_ylabel("per-capita growth")
    ax.legend()


def branches(d, ax, name):
    df = pd.read_csv(d / "branches.csv")
    for bid, b in df.groupby("branch_id"):
        for stable, part in b.groupby("stable"):
            ax.plot(part["param"], part["S"], ".", ms=1.5, color="C0" if stable else "C3")
    ev = pd.read_csv(d / "events.csv")
    for _, e in ev.iterrows():
        ax.annotate(e["label"], (e["param"], e["S"]), fontsize=8)
        ax.plot(e["param"], e["S"], "k*", ms=6)
    ax.set_xlabel(name)
    ax.set_ylabel("S")


def curve(d, ax, p1, p2):
    df = pd.read_csv(d / "curve.csv")
    ax.plot(df["p1"], df["p2"], "-")
    sp = pd.read_csv(d / "special_points.csv")
    for _, s in sp.iterrows():
        ax.plot(s["p1"], s["p2"], "ko" if s["feasible"] else "kx")
        ax.annotate(s["kind"], (s["p1"], s["p2"]), fontsize=8)
    ax.set_xlabel(p1)
    ax.set_ylabel(p2)


def regions(d, ax):
    df = pd.read_csv(d / "regions.csv")
    grid = df.assign(code=df["label"].map(LABEL_COLORS)).pivot(index="r", columns="L", values="code")
    ax.pcolormesh(grid.columns, grid.index, grid.values, cmap="Set2", vmin=0, vmax=3, shading="nearest")
    ax.set_xlabel("L")
    ax.set_ylabel("r")
    cmap = plt.get_cmap("Set2")
    handles = [Patch(color=cmap(v / 3), label=k) for k, v in LABEL_COLORS.items()]
    ax.legend(handles=handles, fontsize=7, loc="lower left")


def trajectory(d, ax):
    df = pd.read_csv(d / "trajectory.csv")
    for c in "SIP":
        ax.plot(df["t"], df[c], label=c)
    ax.set_xlabel("t")
    ax.legend()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("results", type=Path)
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--sip-dyn", help="run every shipped config with this binary first")
    args = ap.parse_args()
    if args.sip_dyn:
        run_configs(args.sip_dyn, args.results)
    args.out.mkdir(parents=True, exist_ok=True)

    plots = {
        "fig1_percapita": percapita,
        "fig3a_sweep_L": lambda d, ax: branches(d, ax, "L"),
        "fig3b_sweep_r": lambda d, ax: branches(d, ax, "r"),
        "fig4a_hopf_curve": lambda d, ax: curve(d, ax, "L", "a0"),
        "fig4b_fold_curve": lambda d, ax: curve(d, ax, "L", "e0"),
        "fig5_regions": regions,
        "fig6a_coexistence": trajectory,
        "fig6b_infection_free": trajectory,
        "fig7a_stable": trajectory,
        "fig7b_unstable": trajectory,
        "fig7c_collapse": trajectory,
    }
    for stem, draw in plots.items():
        d = args.results / stem
        if not d.is_dir():
            print(f"skipping {stem}: no {d}")
            continue
        fig, ax = plt.subplots(figsize=(5, 4))
        draw(d, ax)
        ax.set_title(stem, loc="left", fontsize=9)
        fig.tight_layout()
        fig.savefig(args.out / f"{stem}.png", dpi=150)
        plt.close(fig)


if __name__ == "__main__":
    main()
