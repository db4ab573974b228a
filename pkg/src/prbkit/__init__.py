"""Pseudo-rigid-body model synthesis for planar highly flexible members."""

from prbkit.beam import (
    BatchDeflections,
    BeamSpec,
    CenterlineSolution,
    CurvatureProfile,
    ShootingError,
    StiffnessProfile,
    TipWrench,
    make_wrench,
    sample_centerline,
    solve_deflection,
    solve_deflection_batch,
)
from prbkit.chain import (
    JointState,
    PRBModel,
    SingularStateError,
    estimate_wrench,
    forward_kinematics,
    jacobian,
    joint_angles,
    joint_positions,
    joint_torques,
    segment_angles,
)
from prbkit.fitting import (
    FitCase,
    FitError,
    GridAxis,
    LoadGrid,
    PowerLawFit,
    build_load_grid,
    fit,
    force_cost,
    optimal_stiffness,
    position_cost,
    power_law_fit,
    sweep_lengths,
    sweep_segment_combinations,
    tip_gap_study,
)
from prbkit.metrics import ErrorReport, build_error_report
from prbkit.presets import Preset, get_preset, preset_names
from prbkit.reporting import FitReport, build_fit_report

__version__ = "0.1.0"
