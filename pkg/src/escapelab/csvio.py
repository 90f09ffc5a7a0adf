"""CSV interchange: the single file format the lab reads and writes.

Headers mandatory, UTF-8, '.' decimal.  Floats are serialized with
repr-fidelity (shortest round-trip form) so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import os
from typing import Iterable

__all__ = [
    "fmt",
    "write_rows",
    "read_rows",
    "write_trajectory",
    "write_stage_times",
    "write_bd_path",
    "write_genealogy",
    "write_partitions",
    "SCHEMAS",
]

SCHEMAS = {
    "trajectory": ["t", "v", "vstar", "p"],
    "stage_times": ["cycle", "T_s", "T_I", "T_II", "T_III", "T_IV"],
    "bd_path": ["t", "N_v", "N_vstar", "N_p"],
    "genealogy": ["child", "parent", "t"],
    "partitions": ["replicate", "case", "n", "n0", "blocks"],
    "outcomes": ["path_id", "outcome", "t_resolved", "v", "vstar", "p"],
    "predictor_report": [
        "alpha", "f", "regime", "phi_lim", "psi_lim", "H", "p_failed",
        "rho_W", "rho_M", "rho_M_stderr", "P_uW_failed", "P_uW_lost", "P_uM", "P_uC",
    ],
    "summary": ["quantity", "value"],
    "limit_curves": ["f", "phi_lim", "psi_lim"],
}


def fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_rows(path: str, header: list[str], rows: Iterable[Iterable]) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def read_rows(path: str) -> tuple[list[str], list[list[str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, [row for row in r]


def write_trajectory(path: str, times, states) -> None:
    write_rows(path, SCHEMAS["trajectory"],
               ((float(t), float(s[0]), float(s[1]), float(s[2]))
                for t, s in zip(times, states)))


def write_stage_times(path: str, cycles) -> None:
    write_rows(path, SCHEMAS["stage_times"],
               ((c.cycle, c.T_s, c.T_I, c.T_II, c.T_III, c.T_IV) for c in cycles))


def write_bd_path(path: str, times, counts) -> None:
    write_rows(path, SCHEMAS["bd_path"],
               ((float(t), int(c[0]), int(c[1]), int(c[2]))
                for t, c in zip(times, counts)))


def write_genealogy(path: str, genealogy) -> None:
    rows = ((child, int(genealogy.parent[child]), float(genealogy.birth_time[child]))
            for child in range(genealogy.n_founders, len(genealogy.parent)))
    write_rows(path, SCHEMAS["genealogy"], rows)


def write_partitions(path: str, rows) -> None:
    """rows of (replicate, case, partition: LineagePartition)."""
    write_rows(path, SCHEMAS["partitions"],
               ((rep, case, part.n, part.n0, part.key()) for rep, case, part in rows))
