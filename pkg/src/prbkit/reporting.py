"""Result containers and deterministic writers (JSON, CSV, text tables).

Everything here writes bytes that depend only on the inputs — no
timestamps, no environment — so repeated runs of the same study are
byte-identical.  Stiffness values are stored in solver units (N*mm/rad)
and divided by 1000 only in the display tables, which follow the
4-decimal N*m/rad convention used in the robotics literature.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from prbkit.beam import BeamSpec
from prbkit.chain import PRBModel
from prbkit.fitting import LoadGrid, force_cost, position_cost
from prbkit.metrics import ErrorReport, build_error_report, estimate_case_wrenches


@dataclass(frozen=True)
class FitReport:
    """Everything worth keeping from one synthesis run."""

    member: str                  # preset name or config stem
    dof: int
    model: PRBModel
    errors: ErrorReport
    force_cost: float            # stiffness objective at the optimum
    per_joint_force_cost: tuple
    position_cost: float         # mean tip gap over the grid, mm
    grid: dict                   # LoadGrid.describe()
    case_count: int
    grid_multiplier: int

    def to_json_dict(self) -> dict:
        return {
            "member": self.member,
            "dof": self.dof,
            "model": self.model.to_json_dict(),
            "errors": self.errors.as_dict(),
            "force_cost": self.force_cost,
            "per_joint_force_cost": list(self.per_joint_force_cost),
            "position_cost": self.position_cost,
            "grid": self.grid,
            "case_count": self.case_count,
            "grid_multiplier": self.grid_multiplier,
        }


def build_fit_report(member: str, grid: LoadGrid, model: PRBModel,
                     cases, grid_multiplier: int) -> FitReport:
    e_f, per_joint = force_cost(cases, model.stiffness)
    e_x, _ = position_cost(cases)
    return FitReport(
        member=member,
        dof=len(model.lengths),
        model=model,
        errors=build_error_report(model, cases),
        force_cost=e_f,
        per_joint_force_cost=tuple(float(v) for v in per_joint),
        position_cost=e_x,
        grid=grid.describe(),
        case_count=len(cases),
        grid_multiplier=grid_multiplier,
    )


# ---------------------------------------------------------------------------
# byte-stable primitives

def json_bytes(payload: dict) -> bytes:
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()


def write_json(payload: dict, path) -> None:
    with open(path, "wb") as fh:
        fh.write(json_bytes(payload))


def _num(value) -> str:
    if value is None:
        return "n/a"
    return format(float(value), ".12g")


def csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, (int, float, np.floating))
                         or v is None else str(v) for v in row])
    return buf.getvalue().encode()


def write_csv(header, rows, path) -> None:
    with open(path, "wb") as fh:
        fh.write(csv_bytes(header, rows))


# ---------------------------------------------------------------------------
# per-study writers

#: columns of the centerline CSV written by the solve command
CENTERLINE_HEADER = ("s", "theta", "m", "x", "y")


def centerline_rows(solution):
    return [[s, th, m, x, y] for s, th, m, x, y in
            zip(solution.s, solution.theta, solution.moment,
                solution.x, solution.y)]


def case_rows(model: PRBModel, cases) -> tuple:
    """Per-case residual table: applied wrench, recovered wrench, both tips."""
    recovered = estimate_case_wrenches(model, cases)
    rows = []
    for case, rec in zip(cases, recovered):
        rows.append(list(case.wrench.as_array()) + list(rec)
                    + list(case.continuum_tip) + list(case.prb_tip))
    header = ("fx_N", "fy_N", "mt_Nmm",
              "fx_rec_N", "fy_rec_N", "mt_rec_Nmm",
              "x_cont_mm", "y_cont_mm", "theta_cont_rad",
              "x_prb_mm", "y_prb_mm", "theta_prb_rad")
    return header, rows


def segment_sweep_rows(sweep_rows) -> tuple:
    # lengths in mm, stiffness in N*mm/rad, errors in percent
    header = ("l1", "l2", "l3", "k1", "k2", "k3",
              "ex", "ey", "etheta", "efx", "efy", "em")
    rows = []
    for r in sweep_rows:
        e = r.errors
        rows.append(list(r.lengths) + list(r.stiffness)
                    + [e.e_x, e.e_y, e.e_theta, e.e_fx, e.e_fy, e.e_m])
    return header, rows


def length_sweep_rows(entries) -> tuple:
    """entries: list of (length, model, cases) from the length sweep."""
    n = len(entries[0][1].stiffness)
    header = ["length_mm"] + [f"k{i + 1}_Nmm_rad" for i in range(n)]
    rows = [[length] + list(model.stiffness)
            for length, model, _cases in entries]
    return tuple(header), rows


# ---------------------------------------------------------------------------
# display tables: N*m/rad and percent, 4 decimals

#: order of the six error metrics in tables, matching ErrorReport.as_dict
ERROR_KEYS = ("e_x_percent", "e_y_percent", "e_theta_percent",
              "e_fx_percent", "e_fy_percent", "e_m_percent")


def stiffness_table(rows) -> str:
    """rows: (dof, stiffness N*mm/rad) pairs -> text table in N*m/rad."""
    rows = sorted(rows, key=lambda r: r[0])
    width = max(len(stiffness) for _dof, stiffness in rows)
    lines = ["n    " + " ".join(f"{'k' + str(i + 1):>8}" for i in range(width))]
    for dof, stiffness in rows:
        cells = [f"{k / 1000.0:8.4f}" for k in stiffness]
        cells += [" " * 8] * (width - len(cells))
        lines.append(f"{dof:<4d} " + " ".join(cells))
    return "\n".join(lines)


def error_table(rows) -> str:
    """rows: (dof, errors-dict) pairs -> text table in percent."""
    rows = sorted(rows, key=lambda r: r[0])
    header = "n    " + " ".join(
        f"{name[:-8] + '%':>9}" for name in ERROR_KEYS)

    def cell(v):
        return f"{'n/a':>9}" if v is None else f"{v:9.4f}"

    lines = [header]
    for dof, errors in rows:
        lines.append(f"{dof:<4d} "
                     + " ".join(cell(errors.get(k)) for k in ERROR_KEYS))
    return "\n".join(lines)


def stiffness_csv_rows(rows) -> tuple:
    """Display-rounded stiffness table (N*m/rad, 4 decimals) as CSV rows."""
    rows = sorted(rows, key=lambda r: r[0])
    width = max(len(stiffness) for _dof, stiffness in rows)
    header = ["n"] + [f"k{i + 1}" for i in range(width)]
    out = []
    for dof, stiffness in rows:
        cells = [f"{k / 1000.0:.4f}" for k in stiffness]
        cells += [""] * (width - len(cells))
        out.append([str(dof)] + cells)
    return tuple(header), out


def error_csv_rows(rows) -> tuple:
    """Display-rounded error table (percent, 4 decimals) as CSV rows."""
    rows = sorted(rows, key=lambda r: r[0])
    header = ["n"] + [name[:-8] for name in ERROR_KEYS]
    out = []
    for dof, errors in rows:
        cells = ["n/a" if errors.get(k) is None else f"{errors[k]:.4f}"
                 for k in ERROR_KEYS]
        out.append([str(dof)] + cells)
    return tuple(header), out


def report_table_rows(reports) -> tuple:
    """(stiffness-pairs, error-pairs) from FitReport objects."""
    k_rows = [(r.dof, tuple(r.model.stiffness)) for r in reports]
    e_rows = [(r.dof, r.errors.as_dict()) for r in reports]
    return k_rows, e_rows


def summary_lines(report: FitReport) -> list:
    """Short console summary for one fit."""
    k = ", ".join(f"{v / 1000.0:.4f}" for v in report.model.stiffness)
    out = [
        f"member          {report.member}",
        f"dof             {report.dof}",
        f"load cases      {report.case_count}",
        f"stiffness       [{k}] N*m/rad",
        f"position cost   {report.position_cost:.6g} mm",
        f"force cost      {report.force_cost:.6g}",
    ]
    e = report.errors.as_dict()
    pairs = ", ".join(f"{name}={'n/a' if val is None else format(val, '.4f')}"
                      for name, val in e.items()
                      if name.startswith("e_"))
    out.append(f"errors (%)      {pairs}")
    if report.errors.theta_normalizer_substituted:
        out.append("note            rest tip angle is zero; angle errors are "
                   "normalized by the largest loaded tip angle instead")
    return out
