"""Accuracy metrics comparing a fitted chain against the member it mimics.

Position metrics normalize mean absolute tip-coordinate gaps by the
member length; the tip-angle metric normalizes by the unloaded tip
angle (or, for a straight member whose unloaded tip angle is zero, by
the largest loaded tip angle — flagged).  Force metrics compare the
wrench recovered from spring deflections against the true applied
wrench, normalized per component by the largest magnitude applied; a
component that is identically zero across the grid has no meaningful
relative error and is reported as None rather than a silent zero.
All six are percentages.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from prbkit.chain import PRBModel, estimate_wrench_batch


@dataclass(frozen=True)
class ErrorReport:
    """Relative tip-pose and wrench-recovery errors of a fitted chain,
    averaged over a load grid.  All values percent; None marks a wrench
    component never exercised by the grid (error undefined)."""

    e_x: float
    e_y: float
    e_theta: float
    e_fx: Optional[float]
    e_fy: Optional[float]
    e_m: Optional[float]
    # True when the member is straight at rest and the tip-angle error
    # was normalized by the largest loaded tip angle instead.
    theta_normalizer_substituted: bool = False

    def as_dict(self) -> dict:
        return {
            "e_x_percent": self.e_x,
            "e_y_percent": self.e_y,
            "e_theta_percent": self.e_theta,
            "e_fx_percent": self.e_fx,
            "e_fy_percent": self.e_fy,
            "e_m_percent": self.e_m,
            "theta_normalizer_substituted": self.theta_normalizer_substituted,
        }


def position_errors(model: PRBModel, cases):
    """Mean |tip gap| per coordinate, normalized: x and y by member
    length, angle by the rest tip angle (see module docstring).

    Returns (e_x, e_y, e_theta, substituted) with errors in percent.
    """
    cont = np.array([c.continuum_tip for c in cases])
    prb = np.array([c.prb_tip for c in cases])
    gaps = np.mean(np.abs(cont - prb), axis=0)
    length = float(np.sum(model.lengths))
    rest_tip_angle = float(np.sum(model.rest_angles)) + model.tip_offset
    substituted = False
    angle_scale = abs(rest_tip_angle)
    if angle_scale == 0.0:
        angle_scale = float(np.max(np.abs(cont[:, 2])))
        substituted = True
    e_x = 100.0 * gaps[0] / length
    e_y = 100.0 * gaps[1] / length
    e_theta = 100.0 * gaps[2] / angle_scale if angle_scale > 0.0 else 0.0
    return e_x, e_y, e_theta, substituted


def estimate_case_wrenches(model: PRBModel, cases) -> np.ndarray:
    """Wrench recovered from each case's spring deflections, (N, 3).

    A load case whose chain state is exactly rank-deficient (straight
    chain under pure axial force, for instance) has an unobservable
    wrench component; the minimum-norm recovery reads it as zero, so
    its full magnitude shows up in the error metrics instead of the
    whole report failing.
    """
    dphi = np.array([c.delta_phi for c in cases])
    jac = np.array([c.jacobian for c in cases])
    return estimate_wrench_batch(model.stiffness, dphi, jac,
                                 on_singular="minimum-norm")


def force_errors(model: PRBModel, cases):
    """Mean |recovered - applied| per wrench component, normalized by the
    largest applied magnitude of that component.  Returns (e_fx, e_fy,
    e_m) in percent, None where the component is identically zero."""
    applied = np.array([c.wrench.as_array() for c in cases])
    recovered = estimate_case_wrenches(model, cases)
    mean_err = np.mean(np.abs(recovered - applied), axis=0)
    scale = np.max(np.abs(applied), axis=0)
    out = []
    for err, sc in zip(mean_err, scale):
        out.append(float(100.0 * err / sc) if sc > 0.0 else None)
    return tuple(out)


def build_error_report(model: PRBModel, cases) -> ErrorReport:
    """Full six-metric report for a fitted chain over its load cases."""
    e_x, e_y, e_theta, substituted = position_errors(model, cases)
    e_fx, e_fy, e_m = force_errors(model, cases)
    return ErrorReport(e_x=float(e_x), e_y=float(e_y), e_theta=float(e_theta),
                       e_fx=e_fx, e_fy=e_fy, e_m=e_m,
                       theta_normalizer_substituted=substituted)
