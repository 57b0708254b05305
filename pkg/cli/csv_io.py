"""
Trajectory and control-trace CSV files, and the run summary computed from them.

The trajectory header is a fixed constant. Values are written with
'{:.16e}' (17 significant digits), which reads back bit-exact, so a summary
recomputed from the file by read_trajectory_csv() + convergence_metrics()
matches summary.json exactly.
"""

import csv
import json
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from geom.so3 import rotation_to_quaternion
from models.errors import TrajectoryFileError
from models.state import N_QUADS

FLOAT_FORMAT = "{:.16e}"
INTERNAL_WINDOW = 5.0


def _vec(name: str, axes: str) -> List[str]:
    return [f"{name}_{a}" for a in axes]


def _trajectory_columns() -> List[str]:
    cols = ["t"]
    cols += _vec("o_p", "xyz") + _vec("v_p", "xyz") + _vec("quat_p", "wxyz") + _vec("Omega_p", "xyz")
    cols += _vec("r_b", "12") + _vec("rdot_b", "12")
    for i in range(1, N_QUADS + 1):
        cols += _vec(f"q{i}", "xyz") + _vec(f"omega{i}", "xyz")
    for i in range(1, N_QUADS + 1):
        cols += _vec(f"quat{i}", "wxyz") + _vec(f"Omega{i}", "xyz") + [f"f{i}"] + _vec(f"M{i}", "xyz")
    cols += ["E_kin", "E_pot", "V", "V2", "res_q_max", "res_omega_max", "res_R_max"]
    return cols


TRAJECTORY_COLUMNS = _trajectory_columns()
TRAJECTORY_HEADER = ",".join(TRAJECTORY_COLUMNS)
COLUMN_INDEX = {name: k for k, name in enumerate(TRAJECTORY_COLUMNS)}

CONTROL_FIELDS = [
    ("U1", 3), ("U2", 3), ("F", 3), ("tau", 3),
    ("mu", 9), ("u_par", 9), ("u_perp", 9), ("u_cmd", 9), ("q_id", 9),
    ("f_cmd", 3), ("M_cmd", 9), ("e_R", 9), ("e_Omega", 9),
]


def _control_columns() -> List[str]:
    cols = ["t"]
    for name, width in CONTROL_FIELDS:
        if width == 3 and name in ("U1", "U2", "F", "tau"):
            cols += _vec(name, "xyz")
        elif width == 3:
            cols += [f"{name}{i}" for i in range(1, N_QUADS + 1)]
        else:
            cols += [f"{name}{i}_{a}" for i in range(1, N_QUADS + 1) for a in "xyz"]
    return cols


CONTROL_COLUMNS = _control_columns()


# ═══════════════════════════════════════════════════════
#  WRITE
# ═══════════════════════════════════════════════════════

def trajectory_matrix(traj) -> np.ndarray:
    """One row per sample in TRAJECTORY_COLUMNS order."""
    rows = []
    diag = traj.diagnostics
    for k in range(len(traj)):
        s = traj.state(k)
        row = [traj.t[k], *s.o_p, *s.v_p, *rotation_to_quaternion(s.R_p), *s.Omega_p, *s.r_b, *s.rdot_b]
        for i in range(N_QUADS):
            row += [*s.q[i], *s.omega[i]]
        for i in range(N_QUADS):
            row += [*rotation_to_quaternion(s.R[i]), *s.Omega[i], traj.f[k, i], *traj.M[k, i]]
        row += [diag[name][k] for name in ("E_kin", "E_pot", "V", "V2", "res_q_max", "res_omega_max", "res_R_max")]
        rows.append(row)
    return np.array(rows, dtype=float).reshape(-1, len(TRAJECTORY_COLUMNS))


def _write(path: Path, header: List[str], matrix: np.ndarray) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in matrix:
            w.writerow([FLOAT_FORMAT.format(v) for v in row])
    return path


def write_trajectory_csv(traj, path) -> np.ndarray:
    """Write trajectory.csv; returns the matrix exactly as it reads back."""
    matrix = trajectory_matrix(traj)
    _write(Path(path), TRAJECTORY_COLUMNS, matrix)
    return matrix


def write_controls_csv(traj, path) -> bool:
    """controls.csv with every ControlTrace field; False when no controller ran."""
    if not traj.has_trace:
        return False
    blocks = [traj.t[:, None]]
    for name, width in CONTROL_FIELDS:
        blocks.append(np.asarray(traj.trace[name], dtype=float).reshape(len(traj), width))
    _write(Path(path), CONTROL_COLUMNS, np.hstack(blocks))
    return True


# ═══════════════════════════════════════════════════════
#  READ / SUMMARY
# ═══════════════════════════════════════════════════════

def read_trajectory_csv(path) -> Tuple[List[str], np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise TrajectoryFileError("file not found", str(path))
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise TrajectoryFileError("empty file", str(path))
    header = rows[0]
    if header != TRAJECTORY_COLUMNS:
        raise TrajectoryFileError("header does not match the trajectory schema", str(path))
    body = rows[1:]
    if not body:
        raise TrajectoryFileError("no samples", str(path))
    try:
        matrix = np.array([[float(v) for v in row] for row in body])
    except ValueError as e:
        raise TrajectoryFileError(f"non-numeric value ({e})", str(path))
    if matrix.ndim != 2 or matrix.shape[1] != len(TRAJECTORY_COLUMNS):
        raise TrajectoryFileError(f"rows must have {len(TRAJECTORY_COLUMNS)} values", str(path))
    return header, matrix


def column(matrix: np.ndarray, name: str) -> np.ndarray:
    return matrix[:, COLUMN_INDEX[name]]


def columns(matrix: np.ndarray, *names: str) -> np.ndarray:
    return matrix[:, [COLUMN_INDEX[n] for n in names]]


def convergence_metrics(matrix: np.ndarray) -> Dict[str, float]:
    """Terminal and whole-run metrics from a trajectory matrix."""
    last = matrix[-1]
    t = column(matrix, "t")
    quat = columns(matrix, *_vec("quat_p", "wxyz"))[-1]
    # η = ½(R − Rᵀ)∨ = 2w(x, y, z) for a unit quaternion
    eta = 2.0 * quat[0] * quat[1:]
    start = int(np.searchsorted(t, t[-1] - INTERNAL_WINDOW, side="left"))
    v_xy = columns(matrix, "v_p_x", "v_p_y")[start:]
    energy = column(matrix, "E_kin") + column(matrix, "E_pot")
    return {
        "t_final": float(t[-1]),
        "r_b_norm": float(np.linalg.norm(last[[COLUMN_INDEX["r_b_1"], COLUMN_INDEX["r_b_2"]]])),
        "eta_norm": float(np.linalg.norm(eta)),
        "height_abs": float(abs(last[COLUMN_INDEX["o_p_z"]])),
        "Omega_p_norm": float(np.linalg.norm(columns(matrix, *_vec("Omega_p", "xyz"))[-1])),
        "v_xy_spread": float(np.max(v_xy.max(axis=0) - v_xy.min(axis=0))),
        "v_xy_final": [float(v) for v in v_xy[-1]],
        "V_final": float(last[COLUMN_INDEX["V"]]),
        "V2_final": float(last[COLUMN_INDEX["V2"]]),
        "energy_drift": float(np.max(np.abs(energy - energy[0])) / max(abs(energy[0]), 1e-300)),
        "max_res_q": float(np.max(column(matrix, "res_q_max"))),
        "max_res_omega": float(np.max(column(matrix, "res_omega_max"))),
        "max_res_R": float(np.max(column(matrix, "res_R_max"))),
    }


def write_summary(path, matrix: np.ndarray, meta: dict) -> dict:
    summary = {**meta, "metrics": convergence_metrics(matrix),
               "terminal_state": dict(zip(TRAJECTORY_COLUMNS, (float(v) for v in matrix[-1])))}
    Path(path).write_text(json.dumps(summary, indent=2), encoding="utf-8")
    return summary
