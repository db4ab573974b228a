"""Command-line front end.

Subcommands:

  solve           integrate one tip-load case, write the centerline CSV
  fit             synthesize joint models for a list of chain sizes
  sweep-segments  fit every 3-segment partition of the member
  sweep-length    refit a preset at several total lengths, power-law fit
  report          re-render saved fit reports as text tables

Members and load grids come either from a named preset (--preset) or
from a TOML config file (--config) with [member] / [grid] sections;
flags override config values.  Output files land in --out, else the
config `out`, else $PRB_OUT_DIR, else the working directory.

Exit codes: 0 success, 1 numerical failure (shooting or stiffness fit),
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:                       # Python < 3.11
    import tomli as tomllib

from prbkit.beam import (BeamSpec, CurvatureProfile, ShootingError,
                         StiffnessProfile, solve_deflection)
from prbkit.fitting import (FitError, LoadGrid, build_load_grid, fit,
                            power_law_fit, sweep_lengths,
                            sweep_segment_combinations)
from prbkit.presets import get_preset, preset_names
from prbkit import reporting


class UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


@dataclass
class RunConfig:
    """Fully resolved settings for one command invocation."""

    name: str                    # artifact filename stem
    spec: BeamSpec
    grid: LoadGrid
    dof_list: tuple
    grid_multiplier: int
    resolution: int              # segment-sweep compositions per member
    sweep_lengths_mm: tuple      # total lengths for sweep-length
    out_dir: Path
    jobs: int


# ---------------------------------------------------------------------------
# argument and config parsing

def _first_given(*values):
    """First value that is not None; keeps explicit zeros visible to validation."""
    for v in values:
        if v is not None:
            return v
    return None


def _wrench_arg(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected three comma-separated numbers fx,fy,mt, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected three comma-separated numbers fx,fy,mt, got {text!r}"
        ) from None


def _counts_arg(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected three comma-separated integers, got {text!r}")
    try:
        counts = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected three comma-separated integers, got {text!r}") from None
    if any(c < 1 for c in counts):
        raise argparse.ArgumentTypeError("axis counts must be >= 1")
    return counts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prbkit",
        description="Pseudo-rigid-body model synthesis for planar "
                    "highly flexible members.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--preset", choices=preset_names(),
                       help="built-in case study")
        p.add_argument("--config", type=Path,
                       help="TOML config with [member]/[grid] sections")
        p.add_argument("--grid-multiplier", type=int, default=None,
                       help="integration intervals per chain segment "
                            "(default 120)")
        p.add_argument("--load-counts", type=_counts_arg, default=None,
                       help="override the three load-grid axis counts, "
                            "e.g. 5,9,5")
        p.add_argument("--out", type=Path, default=None,
                       help="output directory (default $PRB_OUT_DIR or .)")

    p_solve = sub.add_parser("solve", help="integrate one tip-load case")
    add_common(p_solve)
    group = p_solve.add_mutually_exclusive_group()
    group.add_argument("--wrench", type=_wrench_arg, default=None,
                       metavar="FX,FY,MT",
                       help="tip load: forces in N, moment in N*mm")
    group.add_argument("--moment", type=float, default=None,
                       help="pure tip moment in N*mm")
    p_solve.add_argument("--grid-count", type=int, default=1200,
                         help="integration intervals for the centerline")
    p_solve.set_defaults(func=cmd_solve)

    p_fit = sub.add_parser("fit", help="synthesize joint models")
    add_common(p_fit)
    p_fit.add_argument("--dof", action="append", type=int, default=None,
                       help="chain size; repeat for several (default: "
                            "preset list)")
    p_fit.add_argument("--jobs", type=int, default=None,
                       help="parallel fits across chain sizes (default 1)")
    p_fit.set_defaults(func=cmd_fit)

    p_seg = sub.add_parser("sweep-segments",
                           help="fit every 3-segment partition")
    add_common(p_seg)
    p_seg.add_argument("--resolution", type=int, default=None,
                       help="partition step is length/resolution "
                            "(default 13)")
    p_seg.set_defaults(func=cmd_sweep_segments)

    p_len = sub.add_parser("sweep-length",
                           help="refit at several total lengths")
    add_common(p_len)
    p_len.add_argument("--dof", action="append", type=int, default=None,
                       help="chain size for every length (default: preset)")
    p_len.set_defaults(func=cmd_sweep_length)

    p_rep = sub.add_parser("report", help="render saved fit reports")
    p_rep.add_argument("reports", nargs="+", type=Path,
                       help="fit report JSON files")
    p_rep.add_argument("--out", type=Path, default=None,
                       help="also write display-table CSVs here")
    p_rep.set_defaults(func=cmd_report)

    return parser


def _load_config(path: Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"malformed config {path}: {exc}") from None


def _profile_from_table(table, length, cls, where):
    if not isinstance(table, dict) or "kind" not in table:
        raise UsageError(f"[{where}] needs a 'kind' key")
    kind = table["kind"]
    try:
        if kind == "straight" and cls is CurvatureProfile:
            return CurvatureProfile.straight(length)
        if kind == "constant":
            return cls.constant(float(table["value"]), length)
        if kind == "linear":
            return cls.linear(float(table["base"]), float(table["tip"]),
                              length)
        if kind == "tabulated":
            s = tuple(float(v) for v in table["s"])
            values = tuple(float(v) for v in table["values"])
            return cls.tabulated(s, values, length)
    except KeyError as exc:
        raise UsageError(f"[{where}] kind {kind!r} is missing key "
                         f"{exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise UsageError(f"[{where}]: {exc}") from None
    raise UsageError(f"[{where}] has unknown kind {kind!r}")


def _member_from_config(cfg: dict) -> BeamSpec:
    member = cfg.get("member")
    if not isinstance(member, dict) or "length" not in member:
        raise UsageError("config needs [member] with a length "
                         "(or use --preset)")
    length = float(member["length"])
    if "stiffness" not in member:
        raise UsageError("[member] needs a [member.stiffness] table")
    stiffness = _profile_from_table(member["stiffness"], length,
                                    StiffnessProfile, "member.stiffness")
    curv_table = member.get("curvature", {"kind": "straight"})
    curvature = _profile_from_table(curv_table, length,
                                    CurvatureProfile, "member.curvature")
    try:
        return BeamSpec(length, stiffness, curvature)
    except ValueError as exc:
        raise UsageError(f"[member]: {exc}") from None


def resolve_run_config(args) -> RunConfig:
    cfg = _load_config(args.config) if args.config else {}

    preset_name = args.preset or cfg.get("preset")
    load_counts = getattr(args, "load_counts", None) or cfg.get("load_counts")
    preset = None
    if preset_name:
        try:
            preset = get_preset(preset_name)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None

    if preset is not None:
        spec, grid = preset.spec, preset.grid
        dof_list = preset.dof_list
        lengths = preset.sweep_lengths_mm
        name = cfg.get("name") or preset.name
    else:
        if not cfg:
            raise UsageError("need --preset or --config")
        spec = _member_from_config(cfg)
        if "grid" not in cfg:
            raise UsageError("config needs a [grid] section (kind + axes)")
        try:
            grid = build_load_grid(cfg["grid"])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"[grid]: {exc}") from None
        dof_list = ()
        lengths = ()
        name = cfg.get("name") or args.config.stem

    if "grid" in cfg and preset is not None:
        try:
            grid = build_load_grid(cfg["grid"])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"[grid]: {exc}") from None
    if load_counts is not None:
        try:
            grid = grid.with_counts(load_counts)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    dof_flag = getattr(args, "dof", None)
    if dof_flag:
        dof_list = tuple(dof_flag)
    elif cfg.get("dof"):
        dof_list = tuple(int(d) for d in cfg["dof"])
    for d in dof_list:
        if int(d) < 1:
            raise UsageError("every --dof must be >= 1")

    if cfg.get("lengths"):
        lengths = tuple(float(v) for v in cfg["lengths"])

    multiplier = _first_given(args.grid_multiplier, cfg.get("grid_multiplier"), 120)
    if multiplier < 1:
        raise UsageError("--grid-multiplier must be >= 1")
    resolution = _first_given(getattr(args, "resolution", None), cfg.get("resolution"), 13)
    if int(resolution) < 3:
        raise UsageError("--resolution must be >= 3")
    jobs = _first_given(getattr(args, "jobs", None), cfg.get("jobs"), 1)
    if jobs < 1:
        raise UsageError("--jobs must be >= 1")

    out_dir = args.out or cfg.get("out") or os.environ.get("PRB_OUT_DIR") or "."
    return RunConfig(name=name, spec=spec, grid=grid,
                     dof_list=tuple(int(d) for d in dof_list),
                     grid_multiplier=int(multiplier),
                     resolution=int(resolution),
                     sweep_lengths_mm=tuple(lengths),
                     out_dir=Path(out_dir), jobs=int(jobs))


def _prepare_out(run: RunConfig) -> Path:
    run.out_dir.mkdir(parents=True, exist_ok=True)
    return run.out_dir


def _write_manifest(run: RunConfig, command: str, outputs, extra=None):
    payload = {
        "command": command,
        "member": run.name,
        "member_digest": run.spec.digest(),
        "grid": run.grid.describe(),
        "grid_multiplier": run.grid_multiplier,
        "outputs": sorted(outputs),
    }
    if extra:
        payload.update(extra)
    path = run.out_dir / f"{run.name}_{command}_run.json"
    reporting.write_json(payload, path)
    return path


# ---------------------------------------------------------------------------
# subcommands

def cmd_solve(run: RunConfig, args) -> int:
    if args.wrench is not None:
        wrench = args.wrench
    elif args.moment is not None:
        wrench = (0.0, 0.0, args.moment)
    else:
        wrench = (0.0, 0.0, 0.0)
    if args.grid_count < 1:
        raise UsageError("--grid-count must be >= 1")

    solution = solve_deflection(run.spec, wrench, args.grid_count)

    out = _prepare_out(run)
    csv_path = out / f"{run.name}_centerline.csv"
    reporting.write_csv(reporting.CENTERLINE_HEADER,
                        reporting.centerline_rows(solution), csv_path)
    _write_manifest(run, "solve", [csv_path.name],
                    extra={"wrench": list(wrench),
                           "grid_count": args.grid_count})

    print(f"tip: x={solution.x[-1]:.6g} mm  y={solution.y[-1]:.6g} mm  "
          f"theta={solution.theta[-1]:.6g} rad")
    print(f"base moment {solution.moment[0]:.6g} N*mm, "
          f"{solution.shooting_iterations} shooting iterations, "
          f"residual {solution.shooting_residual:.3g}")
    print(f"wrote {csv_path}")
    return 0


def _fit_one(run: RunConfig, dof: int):
    model, cases = fit(run.spec, dof, run.grid,
                       grid_multiplier=run.grid_multiplier)
    return reporting.build_fit_report(run.name, run.grid, model, cases,
                                      run.grid_multiplier), cases


def cmd_fit(run: RunConfig, args) -> int:
    dof_list = run.dof_list or (10,)
    out = _prepare_out(run)

    results = {}
    failures = {}
    if run.jobs > 1:
        with ThreadPoolExecutor(max_workers=run.jobs) as pool:
            futures = [(dof, pool.submit(_fit_one, run, dof))
                       for dof in dof_list]
            for dof, future in futures:       # fixed order, not as-completed
                try:
                    results[dof] = future.result()
                except FitError as exc:
                    failures[dof] = str(exc)
    else:
        for dof in dof_list:
            try:
                results[dof] = _fit_one(run, dof)
            except FitError as exc:
                failures[dof] = str(exc)

    outputs = []
    reports = []
    for dof in dof_list:
        if dof not in results:
            continue
        report, cases = results[dof]
        reports.append(report)
        json_path = out / f"{run.name}_n{dof}_report.json"
        reporting.write_json(report.to_json_dict(), json_path)
        header, rows = reporting.case_rows(report.model, cases)
        csv_path = out / f"{run.name}_n{dof}_cases.csv"
        reporting.write_csv(header, rows, csv_path)
        outputs += [json_path.name, csv_path.name]

    if reports:
        k_rows, e_rows = reporting.report_table_rows(reports)
        k_header, k_cells = reporting.stiffness_csv_rows(k_rows)
        e_header, e_cells = reporting.error_csv_rows(e_rows)
        k_path = out / f"{run.name}_stiffness_table.csv"
        e_path = out / f"{run.name}_error_table.csv"
        reporting.write_csv(k_header, k_cells, k_path)
        reporting.write_csv(e_header, e_cells, e_path)
        outputs += [k_path.name, e_path.name]

        print(f"member {run.name}  (digest {run.spec.digest()}, "
              f"{run.grid.case_count} load cases)")
        print()
        print("stiffness, N*m/rad")
        print(reporting.stiffness_table(k_rows))
        print()
        print("errors, percent")
        print(reporting.error_table(e_rows))

    for dof, message in failures.items():
        print(f"fit failed for dof {dof}: {message}", file=sys.stderr)

    _write_manifest(run, "fit", outputs,
                    extra={"dof": list(dof_list),
                           "failed_dof": sorted(failures)})
    return 1 if failures else 0


def cmd_sweep_segments(run: RunConfig, args) -> int:
    rows = sweep_segment_combinations(run.spec, run.grid,
                                      resolution=run.resolution,
                                      grid_multiplier=run.grid_multiplier)
    out = _prepare_out(run)
    header, cells = reporting.segment_sweep_rows(rows)
    csv_path = out / f"{run.name}_segments_r{run.resolution}.csv"
    reporting.write_csv(header, cells, csv_path)
    _write_manifest(run, "sweep-segments", [csv_path.name],
                    extra={"resolution": run.resolution})

    best = min(rows, key=lambda r: r.errors.e_x + r.errors.e_y)
    print(f"{len(rows)} partitions -> {csv_path}")
    print(f"least tip error at lengths {tuple(round(v, 4) for v in best.lengths)} mm")
    return 0


def cmd_sweep_length(run: RunConfig, args) -> int:
    if not run.sweep_lengths_mm:
        raise UsageError("sweep-length needs a preset or config with a "
                         "lengths list")
    dof = (run.dof_list or (30,))[0]
    entries = sweep_lengths(run.spec, dof, run.sweep_lengths_mm, run.grid,
                            grid_multiplier=run.grid_multiplier)

    out = _prepare_out(run)
    header, cells = reporting.length_sweep_rows(entries)
    csv_path = out / f"{run.name}_length_sweep.csv"
    reporting.write_csv(header, cells, csv_path)

    lengths = [length for length, _model, _cases in entries]
    fits = {}
    for i in range(dof):
        points = [(length, entries[j][1].stiffness[i])
                  for j, length in enumerate(lengths)]
        try:
            law = power_law_fit(points)
        except FitError as exc:
            fits[f"k{i + 1}"] = {"error": str(exc)}
            continue
        fits[f"k{i + 1}"] = {
            "coefficient": law.kappa,
            "exponent": law.sigma,
            "rms_log_residual": law.rms_log_residual,
            "n_rejected": law.n_rejected,
        }
    law_path = out / f"{run.name}_power_law.json"
    reporting.write_json(fits, law_path)
    _write_manifest(run, "sweep-length",
                    [csv_path.name, law_path.name],
                    extra={"dof": dof, "lengths": list(lengths)})

    print(f"{len(entries)} lengths -> {csv_path}")
    for key in ("k1", "k2"):
        if key in fits and "exponent" in fits[key]:
            f = fits[key]
            print(f"{key}: k = {f['coefficient']:.4f} * S^-{f['exponent']:.4f}"
                  f"  (rms log residual {f['rms_log_residual']:.2e})")
    return 0


def cmd_report(args) -> int:
    k_rows, e_rows = [], []
    for path in args.reports:
        try:
            with open(path, "rb") as fh:
                payload = json.load(fh)
            dof = int(payload["dof"])
            k_rows.append((dof,
                           tuple(payload["model"]["stiffness_Nmm_per_rad"])))
            e_rows.append((dof, payload["errors"]))
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read fit report {path}: {exc}") from None

    print("stiffness, N*m/rad")
    print(reporting.stiffness_table(k_rows))
    print()
    print("errors, percent")
    print(reporting.error_table(e_rows))

    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        k_header, k_cells = reporting.stiffness_csv_rows(k_rows)
        e_header, e_cells = reporting.error_csv_rows(e_rows)
        reporting.write_csv(k_header, k_cells,
                            args.out / "report_stiffness_table.csv")
        reporting.write_csv(e_header, e_cells,
                            args.out / "report_error_table.csv")
        print(f"\nwrote tables to {args.out}")
    return 0


# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.func is cmd_report:
            return cmd_report(args)
        run = resolve_run_config(args)
        return args.func(run, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ShootingError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except FitError as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
