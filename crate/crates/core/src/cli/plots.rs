//! Matplotlib scripts written next to the CSV outputs. The CSVs are the
//! results; these only render them.

pub const TRAJECTORY: &str = r#"#!/usr/bin/env python3
"""Per-site populations against rescaled time, from trajectory.csv."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "trajectory.csv"
with open(path) as f:
    rows = list(csv.reader(f))
header, data = rows[0], [[float(x) for x in r] for r in rows[1:]]
t = [r[0] for r in data]
fig, ax = plt.subplots(figsize=(8, 4))
for k, name in enumerate(header[1:], start=1):
    ax.plot(t, [r[k] for r in data], label=name.replace("site_", "site "))
ax.set_xlabel("t / t_m")
ax.set_ylabel("population")
ax.legend(ncol=4, fontsize="small")
fig.tight_layout()
fig.savefig("trajectory.png", dpi=150)
"#;

pub const HEATMAP: &str = r#"#!/usr/bin/env python3
"""Mean figure of merit over (size, E) per disorder kind, with the 0.90 contour."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

cells = defaultdict(dict)
with open("heatmap.csv") as f:
    for r in csv.DictReader(f):
        cells[r["kind"]][(int(r["size"]), float(r["E"]))] = float(r["mean"])
lines = defaultdict(lambda: defaultdict(list))
with open("contour.csv") as f:
    for r in csv.DictReader(f):
        lines[r["kind"]][int(r["polyline"])].append((float(r["size"]), float(r["E"])))

kinds = sorted(cells)
fig, axes = plt.subplots(1, len(kinds), figsize=(6 * len(kinds), 4.5), squeeze=False)
for ax, kind in zip(axes[0], kinds):
    sizes = sorted({s for s, _ in cells[kind]})
    es = sorted({e for _, e in cells[kind]})
    z = [[cells[kind][(s, e)] for s in sizes] for e in es]
    im = ax.pcolormesh(sizes, es, z, shading="nearest", vmin=0, vmax=1, cmap="viridis")
    for poly in lines[kind].values():
        ax.plot([p[0] for p in poly], [p[1] for p in poly], color="white", lw=1.5)
    ax.set_title(kind)
    ax.set_xlabel("N")
    ax.set_ylabel("E")
    fig.colorbar(im, ax=ax)
fig.tight_layout()
fig.savefig("heatmap.png", dpi=150)
"#;

pub const PHASE_SCAN: &str = r#"#!/usr/bin/env python3
"""Estimated against true phase, one panel per size, one curve per disorder setting."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(lambda: defaultdict(list))
with open("phase_scan.csv") as f:
    for r in csv.DictReader(f):
        label = "clean" if r["kind"] == "none" else f'{r["kind"]} E={r["E"]}'
        curves[int(r["n"])][label].append(
            (float(r["theta_true"]), float(r["theta_mean"]), float(r["std_of_mean"]))
        )

sizes = sorted(curves)
fig, axes = plt.subplots(1, len(sizes), figsize=(5 * len(sizes), 4.5), squeeze=False)
for ax, n in zip(axes[0], sizes):
    for label, pts in curves[n].items():
        ax.errorbar([p[0] for p in pts], [p[1] for p in pts], yerr=[p[2] for p in pts],
                    marker="o", ms=3, capsize=2, label=label)
    ax.plot([0, 360], [0, 360], color="grey", lw=0.8, ls="--")
    ax.set_title(f"N = {n}")
    ax.set_xlabel("true phase (deg)")
    ax.set_ylabel("estimated phase (deg)")
    ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig("phase_scan.png", dpi=150)
"#;
