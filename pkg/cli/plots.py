"""
SVG line charts of a trajectory CSV, one file per figure.

Output is byte-identical for identical input: fixed SVG hash salt and no
date metadata.
"""

from pathlib import Path
from typing import Dict, List, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from cli.csv_io import column  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "plate-swarm"

# figure key -> (title, y label, [(column, legend)])
FIGURES: Dict[str, Tuple[str, str, List[Tuple[str, str]]]] = {
    "attitude": ("Plate attitude quaternion", "quaternion [-]",
                 [("quat_p_w", "w"), ("quat_p_x", "x"), ("quat_p_y", "y"), ("quat_p_z", "z")]),
    "omega": ("Plate angular velocity", "Ω_p [rad/s]",
              [("Omega_p_x", "Ω₁"), ("Omega_p_y", "Ω₂"), ("Omega_p_z", "Ω₃")]),
    "plate-pos": ("Plate position", "o_p [m]",
                  [("o_p_x", "x"), ("o_p_y", "y"), ("o_p_z", "z")]),
    "plate-vel": ("Plate velocity", "ȯ_p [m/s]",
                  [("v_p_x", "x"), ("v_p_y", "y"), ("v_p_z", "z")]),
    "ball-pos": ("Ball position on the plate", "r_b [m]",
                 [("r_b_1", "r₁"), ("r_b_2", "r₂")]),
    "ball-vel": ("Ball velocity on the plate", "ṙ_b [m/s]",
                 [("rdot_b_1", "ṙ₁"), ("rdot_b_2", "ṙ₂")]),
}


def plot_figure(matrix, key: str, out_dir) -> Path:
    title, ylabel, series = FIGURES[key]
    t = column(matrix, "t")
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, label in series:
        ax.plot(t, column(matrix, name), label=label, linewidth=1.2)
    ax.set_title(title)
    ax.set_xlabel("t [s]")
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    path = Path(out_dir) / f"{key}.svg"
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_figures(matrix, keys, out_dir) -> List[Path]:
    if "all" in keys:
        keys = list(FIGURES)
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    paths = [plot_figure(matrix, k, out_dir) for k in keys]
    for p in paths:
        print(f"[Plot] Wrote {p}")
    return paths
