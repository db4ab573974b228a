"""Planar pseudo-rigid-body chain: kinematics, statics, wrench recovery.

The surrogate for a flexible member is a serial chain of n rigid
segments joined by torsional springs.  Joint i sits at the far end of
segment i-1 (joint 1 is the clamped base), phi_i is the relative joint
angle (phi_1 measured from the base frame x-axis) and theta_i is the
absolute segment angle, the partial sum of the phi.  A fixed passive
angle tip_offset is added after the last segment so the chain tip
reports the member's tangent direction rather than the last chord
direction.  Tip pose is p = (x, y, theta); the chain Jacobian J maps
joint rates to tip rates and its transpose maps a tip wrench
w = (fx, fy, mt) to joint torques tau = J^T w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from prbkit.beam import TipWrench


class SingularStateError(RuntimeError):
    """Raised when wrench recovery meets a rank-deficient configuration."""


def _finite_tuple(values, name, positive=False):
    out = tuple(float(v) for v in values)
    for v in out:
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")
        if positive and v <= 0.0:
            raise ValueError(f"{name} must be positive, got {v!r}")
    return out


@dataclass(frozen=True)
class PRBModel:
    """A fitted pseudo-rigid-body chain."""

    lengths: tuple        # segment lengths l_1..l_n, mm
    stiffness: tuple      # joint spring constants k_1..k_n, N*mm/rad
    rest_angles: tuple    # unloaded joint angles phi0_1..phi0_n, rad
    tip_offset: float     # passive angle phi_{n+1} after the last segment, rad
    source_digest: str = ""   # digest of the BeamSpec this chain was fitted to

    def __post_init__(self):
        object.__setattr__(self, "lengths", _finite_tuple(self.lengths, "lengths", positive=True))
        object.__setattr__(self, "stiffness", _finite_tuple(self.stiffness, "stiffness", positive=True))
        object.__setattr__(self, "rest_angles", _finite_tuple(self.rest_angles, "rest_angles"))
        object.__setattr__(self, "tip_offset", float(self.tip_offset))
        if not math.isfinite(self.tip_offset):
            raise ValueError("tip_offset must be finite")
        n = len(self.lengths)
        if n < 1:
            raise ValueError("a chain needs at least one segment")
        if len(self.stiffness) != n or len(self.rest_angles) != n:
            raise ValueError("lengths, stiffness and rest_angles must have equal size")

    @property
    def n(self) -> int:
        return len(self.lengths)

    @property
    def rest_state(self) -> "JointState":
        return JointState(self.rest_angles)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "lengths_mm": list(self.lengths),
            "stiffness_Nmm_per_rad": list(self.stiffness),
            "rest_angles_rad": list(self.rest_angles),
            "tip_offset_rad": self.tip_offset,
            "source_spec_digest": self.source_digest,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PRBModel":
        model = cls(
            lengths=tuple(data["lengths_mm"]),
            stiffness=tuple(data["stiffness_Nmm_per_rad"]),
            rest_angles=tuple(data["rest_angles_rad"]),
            tip_offset=data["tip_offset_rad"],
            source_digest=data.get("source_spec_digest", ""),
        )
        if int(data["n"]) != model.n:
            raise ValueError(f"inconsistent chain size: n={data['n']} with "
                             f"{model.n} segment entries")
        return model


@dataclass(frozen=True)
class JointState:
    """Joint angles phi_1..phi_n of a chain configuration, rad."""

    angles: tuple

    def __post_init__(self):
        object.__setattr__(self, "angles", _finite_tuple(self.angles, "joint angles"))
        if len(self.angles) < 1:
            raise ValueError("a state needs at least one joint angle")

    @property
    def n(self) -> int:
        return len(self.angles)

    @property
    def segment_angles(self) -> np.ndarray:
        """Absolute segment angles theta_j = phi_1 + ... + phi_j."""
        return np.cumsum(self.angles)

    def deflection(self, model: PRBModel) -> np.ndarray:
        """Spring deflections delta_phi = phi - phi0 against a model's rest."""
        if model.n != self.n:
            raise ValueError(f"state has {self.n} joints, model has {model.n}")
        return np.asarray(self.angles) - np.asarray(model.rest_angles)


def segment_angles(points) -> np.ndarray:
    """Chord direction of each segment through consecutive centerline points.

    points is a sequence of n+1 rows whose first two entries are (x, y);
    returns the n chord angles atan2(dy, dx).  The two-argument arctangent
    keeps segments pointing backwards (|angle| > pi/2) in the right
    quadrant, where a plain arctan of the slope would fold them over.
    """
    pts = np.asarray([(row[0], row[1]) for row in points], dtype=float)
    if pts.shape[0] < 2:
        raise ValueError("need at least two points")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    d = np.diff(pts, axis=0)
    if np.any(np.hypot(d[:, 0], d[:, 1]) == 0.0):
        raise ValueError("consecutive points coincide; chord angle undefined")
    return np.arctan2(d[:, 1], d[:, 0])


def joint_angles(seg_angles) -> JointState:
    """Relative joint angles from absolute segment angles.

    phi_1 = theta_1 (from the base frame), phi_i = theta_i - theta_{i-1}.
    Inverse of JointState.segment_angles.
    """
    th = np.asarray(seg_angles, dtype=float)
    phi = np.diff(th, prepend=0.0)
    return JointState(tuple(phi))


def joint_positions(model: PRBModel, state: JointState) -> np.ndarray:
    """Positions of joint 1..n and the tip as an (n+1, 2) array.

    Row i is the base of segment i+1 (row 0 is the clamped base at the
    origin, the last row is the chain tip).
    """
    if model.n != state.n:
        raise ValueError(f"state has {state.n} joints, model has {model.n}")
    th = state.segment_angles
    l = np.asarray(model.lengths)
    xs = np.concatenate(([0.0], np.cumsum(l * np.cos(th))))
    ys = np.concatenate(([0.0], np.cumsum(l * np.sin(th))))
    return np.column_stack([xs, ys])


def forward_kinematics(model: PRBModel, state: JointState):
    """Tip pose (x, y, theta) of the chain; theta includes tip_offset."""
    pos = joint_positions(model, state)
    theta_tip = state.segment_angles[-1] + model.tip_offset
    return (pos[-1, 0], pos[-1, 1], theta_tip)


def jacobian(model: PRBModel, state: JointState) -> np.ndarray:
    """Chain Jacobian J (3 x n): tip-pose rates per joint rate.

    Column i is [-(y_n - y_{i-1}), x_n - x_{i-1}, 1]: rotating joint i
    swings the tip about that joint's position; the unit last row is
    because every joint rate adds directly to the tip angle.
    """
    pos = joint_positions(model, state)
    tip = pos[-1]
    arms = tip - pos[:-1]                    # joint i -> tip
    jac = np.empty((3, model.n))
    jac[0] = -arms[:, 1]
    jac[1] = arms[:, 0]
    jac[2] = 1.0
    return jac


def joint_torques(jac: np.ndarray, wrench: TipWrench) -> np.ndarray:
    """Static joint torques tau = J^T w balancing a tip wrench, N*mm."""
    return jac.T @ wrench.as_array()


def estimate_wrench_batch(stiffness, delta_phi, jacobians,
                          on_singular: str = "raise") -> np.ndarray:
    """Recover tip wrenches from spring torques for stacked cases.

    Solves J^T w = K * delta_phi in the least-squares sense per case via
    QR of J^T (exact solve when n = 3).  stiffness is (n,), delta_phi is
    (N, n), jacobians is (N, 3, n); returns (N, 3) rows (fx, fy, mt).

    A rank-deficient configuration (e.g. a chain folded onto a line,
    where one force component produces no spring torque at all) raises
    SingularStateError by default.  With on_singular="minimum-norm",
    such cases instead get the minimum-norm least-squares wrench: the
    unobservable component comes back as zero.
    """
    if on_singular not in ("raise", "minimum-norm"):
        raise ValueError(f"unknown on_singular policy {on_singular!r}")
    dphi = np.atleast_2d(np.asarray(delta_phi, dtype=float))
    jt = np.asarray(jacobians, dtype=float)
    if jt.ndim == 2:
        jt = jt[None, :, :]
    n = dphi.shape[1]
    if n < 3:
        raise ValueError(f"need at least 3 joints to recover a 3-component wrench, got {n}")
    tau = dphi * np.asarray(stiffness, dtype=float)
    jt_stack = np.swapaxes(jt, 1, 2)                    # (N, n, 3)
    q, r = np.linalg.qr(jt_stack)                       # J^T = Q R, Q: (N, n, 3)
    diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
    scale = np.max(np.abs(r), axis=(1, 2))
    bad = np.any(diag <= 1e-12 * np.maximum(scale, 1e-300)[:, None], axis=1)
    if np.any(bad):
        if on_singular == "raise":
            raise SingularStateError(
                f"rank-deficient configuration; cannot recover a wrench "
                f"(case index {int(np.flatnonzero(bad)[0])})")
        # Patch singular rows with identity so the batched solve stays
        # finite, then overwrite them with per-case minimum-norm answers.
        r = r.copy()
        r[bad] = np.eye(3)
    rhs = np.einsum("qji,qj->qi", q, tau)
    out = np.linalg.solve(r, rhs[:, :, None])[:, :, 0]
    if np.any(bad):
        for i in np.flatnonzero(bad):
            out[i] = np.linalg.lstsq(jt_stack[i], tau[i], rcond=1e-10)[0]
    return out


def estimate_wrench(model: PRBModel, state: JointState) -> TipWrench:
    """Recover the tip wrench that holds the chain in `state`.

    Balances spring torques K (phi - phi0) against J^T w; for n > 3 the
    system is overdetermined and the least-squares wrench is returned.
    """
    dphi = state.deflection(model)
    jac = jacobian(model, state)
    w = estimate_wrench_batch(model.stiffness, dphi[None, :], jac[None, :, :])[0]
    return TipWrench(w[0], w[1], w[2])
