"""Built-in case-study members with their load grids.

Five presets, all in mm / N / rad:

- catheter: straight, uniform EI = 17.185 N*mm^2 (E = 350 MPa times
  I = 4.91e-2 mm^4), S = 50 mm, box load grid.
- catheter_nonuniform_ei: same member with EI falling linearly to half
  its base value at the tip, EI(s) = EI * (1 - s / (2S)).
- ctr_inner: inner tube of a two-tube concentric-tube robot for eye
  surgery; nitinol, E = 71 GPa, OD 0.406 / ID 0.203 mm, so
  I = pi (d_o^4 - d_i^4) / 64 and EI ~ 88.78 N*mm^2; arc radius 27 mm,
  length 27 mm (a one-radian arc); polar load grid capped at the
  7.5 mN membrane-peeling force scale.
- ctr_variable_curvature: same tube but with the bend radius shrinking
  linearly from 27 mm at the base to 9 mm at the tip; kappa = 1/r(s) is
  stored as a dense table (541 points, interpolation error ~4e-7 /mm,
  far below solver truncation).
- ctr_variable_length: the ctr_inner tube refit at ten total lengths
  from S/2 to S with a fixed 30-joint chain, on a tenth-scale load grid
  so every length stays in the near-linear regime the power-law trend
  assumes.

Full grids match the case-study load counts (11*31*10 = 3410 box,
11*31*20 = 6820 polar); `reduced=True` swaps in small grids for quick
runs without touching the load ranges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from prbkit.beam import BeamSpec, CurvatureProfile, StiffnessProfile
from prbkit.fitting import LoadGrid

# Catheter: E = 350 MPa = 350 N/mm^2, I = 4.91e-2 mm^4.
CATHETER_LENGTH = 50.0                    # mm
CATHETER_EI = 350.0 * 4.91e-2             # = 17.185 N*mm^2

# CTR inner tube: nitinol E = 71 GPa = 71000 N/mm^2.
TUBE_OUTER_DIAMETER = 0.406               # mm
TUBE_INNER_DIAMETER = 0.203               # mm
TUBE_E = 71000.0                          # N/mm^2
TUBE_I = math.pi * (TUBE_OUTER_DIAMETER ** 4 - TUBE_INNER_DIAMETER ** 4) / 64.0
TUBE_EI = TUBE_E * TUBE_I                 # ~88.7777 N*mm^2
TUBE_LENGTH = 27.0                        # mm
TUBE_RADIUS = 27.0                        # mm, rest bend radius

#: Default chain sizes fitted by the study commands.
DEFAULT_DOF = (3, 4, 10, 15, 20)

#: Axis counts used when a preset grid is reduced for quick runs.
REDUCED_COUNTS = (5, 9, 5)


@dataclass(frozen=True)
class Preset:
    """One ready-to-run case study."""

    name: str
    spec: BeamSpec
    grid: LoadGrid
    dof_list: tuple              # chain sizes the study commands fit
    sweep_lengths_mm: tuple = () # variable-length preset only
    note: str = ""               # one-line description of the member




def _catheter_grid() -> LoadGrid:
    return LoadGrid.box(fx=(-0.004, 0.004, 11), fy=(-0.004, 0.004, 31),
                        mt=(-0.25, 0.25, 10))


def _tube_grid() -> LoadGrid:
    return LoadGrid.polar(f=(0.0, 0.0075, 11), psi=(0.0, 2.0 * math.pi, 31),
                          mt=(0.0, 0.2, 20))


def _catheter() -> Preset:
    spec = BeamSpec(CATHETER_LENGTH,
                    StiffnessProfile.constant(CATHETER_EI, CATHETER_LENGTH),
                    CurvatureProfile.straight(CATHETER_LENGTH))
    return Preset("catheter", spec, _catheter_grid(), DEFAULT_DOF,
                  note="straight catheter, EI = 350 MPa * 4.91e-2 mm^4")


def _catheter_nonuniform_ei() -> Preset:
    spec = BeamSpec(CATHETER_LENGTH,
                    StiffnessProfile.linear(CATHETER_EI, CATHETER_EI / 2.0,
                                            CATHETER_LENGTH),
                    CurvatureProfile.straight(CATHETER_LENGTH))
    return Preset("catheter_nonuniform_ei", spec, _catheter_grid(), DEFAULT_DOF,
                  note="catheter with EI(s) = EI * (1 - s/(2S))")


def _ctr_inner() -> Preset:
    spec = BeamSpec(TUBE_LENGTH,
                    StiffnessProfile.constant(TUBE_EI, TUBE_LENGTH),
                    CurvatureProfile.constant(1.0 / TUBE_RADIUS, TUBE_LENGTH))
    return Preset("ctr_inner", spec, _tube_grid(), DEFAULT_DOF,
                  note="CTR inner tube, EI = 71 GPa * pi (0.406^4 - 0.203^4)/64 mm^4")


def _ctr_variable_curvature() -> Preset:
    # Bend radius r(s) linear from 27 mm to 9 mm; curvature is its
    # reciprocal, tabulated densely because 1/r(s) is not linear.
    s_points = np.linspace(0.0, TUBE_LENGTH, 541)
    radius = TUBE_RADIUS + (9.0 - TUBE_RADIUS) * (s_points / TUBE_LENGTH)
    spec = BeamSpec(TUBE_LENGTH,
                    StiffnessProfile.constant(TUBE_EI, TUBE_LENGTH),
                    CurvatureProfile.tabulated(tuple(s_points),
                                               tuple(1.0 / radius)))
    return Preset("ctr_variable_curvature", spec, _tube_grid(), DEFAULT_DOF,
                  note="CTR tube with bend radius linear 27 -> 9 mm tip")


def _ctr_variable_length() -> Preset:
    base = _ctr_inner()
    grid = LoadGrid.polar(f=(0.0, 0.00075, 5), psi=(0.0, 2.0 * math.pi, 9),
                          mt=(0.0, 0.02, 5))
    lengths = tuple(np.linspace(TUBE_LENGTH / 2.0, TUBE_LENGTH, 10))
    return Preset("ctr_variable_length", base.spec, grid, (30,),
                  sweep_lengths_mm=lengths,
                  note="ctr_inner refit at 10 lengths, tenth-scale loads")


_BUILDERS = {
    "catheter": _catheter,
    "catheter_nonuniform_ei": _catheter_nonuniform_ei,
    "ctr_inner": _ctr_inner,
    "ctr_variable_curvature": _ctr_variable_curvature,
    "ctr_variable_length": _ctr_variable_length,
}


def preset_names() -> tuple:
    return tuple(_BUILDERS)


def get_preset(name: str, reduced: bool = False,
               load_counts=None) -> Preset:
    """Look up a preset by name.

    reduced=True swaps the full load grid for the small quick-run grid;
    load_counts (three ints) overrides the axis counts directly and
    wins over `reduced`.
    """
    try:
        preset = _BUILDERS[name]()
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; choose from {', '.join(_BUILDERS)}"
        ) from None
    if load_counts is not None:
        return _replace_grid(preset, preset.grid.with_counts(load_counts))
    if reduced:
        return _replace_grid(preset, preset.grid.with_counts(REDUCED_COUNTS))
    return preset


def _replace_grid(preset: Preset, grid: LoadGrid) -> Preset:
    return Preset(preset.name, preset.spec, grid, preset.dof_list,
                  preset.sweep_lengths_mm, preset.note)
