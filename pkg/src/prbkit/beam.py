"""Planar large-deflection beam model and boundary-value solver.

A highly flexible member is modelled as an inextensible planar Euler
elastica, clamped at the base and loaded by a wrench at the free tip.
With arc length s in [0, S], tangent angle theta(s), internal bending
moment m(s) and centerline position (x(s), y(s)), the governing
first-order system is

    theta'(s) = m(s) / EI(s) + kappa(s)
    m'(s)     = fx * sin(theta) - fy * cos(theta)
    x'(s)     = cos(theta)
    y'(s)     = sin(theta)

with theta(0) = x(0) = y(0) = 0 and the terminal condition m(S) = mt.
The moment equation is the arc-length derivative of the static balance
m(s) = mt + f*(xt - x)*sin(psi) - f*(yt - y)*cos(psi) for a tip force of
magnitude f acting along direction psi, so the two-point boundary value
problem is solved by shooting on the single unknown m(0).

Units are millimetres, newtons and radians throughout: EI in N*mm^2,
moments in N*mm, curvature in 1/mm.

The integrator is a classical fixed-step fourth-order Runge-Kutta on a
uniform grid.  A fixed grid keeps results deterministic and lets the
rigid-segment sampling land exactly on grid nodes.  All load cases of a
study share the same grid, so the solver evaluates whole batches of
wrenches in lock-step; per-case results are independent of how many
other cases ride along in the batch.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

#: Absolute tolerance on the terminal-moment residual |m(S) - mt|, N*mm.
SHOOTING_TOLERANCE = 1e-10

#: Iteration cap for the secant shooting loop.
SHOOTING_MAX_ITERATIONS = 50


class ShootingError(RuntimeError):
    """Raised when the shooting iteration fails to meet the residual
    tolerance (excessive load or pathological stiffness profile)."""

    def __init__(self, message, wrench=None):
        super().__init__(message)
        self.wrench = wrench


def _as_positive_float(value, name):
    v = float(value)
    if not math.isfinite(v) or v <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return v


def _as_finite_float(value, name):
    v = float(value)
    if not math.isfinite(v):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return v


def _validate_breakpoints(s_points, length):
    pts = tuple(float(p) for p in s_points)
    if len(pts) < 2:
        raise ValueError("tabulated profile needs at least two breakpoints")
    if any(not math.isfinite(p) for p in pts):
        raise ValueError("tabulated breakpoints must be finite")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise ValueError("tabulated breakpoints must be strictly increasing")
    tol = 1e-9 * length
    if abs(pts[0]) > tol or abs(pts[-1] - length) > tol:
        raise ValueError(
            f"tabulated breakpoints must span [0, {length}]: got "
            f"[{pts[0]}, {pts[-1]}]"
        )
    return pts


@dataclass(frozen=True)
class StiffnessProfile:
    """Flexural rigidity EI(s) > 0 along the member, N*mm^2.

    kind is one of "constant", "linear" (EI varies linearly from base
    to tip) or "tabulated" (piecewise-linear between sample points).
    """

    kind: str
    length: float                       # domain [0, length], mm
    values: tuple                       # constant: (EI,); linear: (EI0, EIS); tabulated: samples
    s_points: tuple = ()                # tabulated only: breakpoint positions

    @classmethod
    def constant(cls, ei, length):
        return cls("constant", _as_positive_float(length, "length"),
                   (_as_positive_float(ei, "EI"),))

    @classmethod
    def linear(cls, ei_base, ei_tip, length):
        return cls("linear", _as_positive_float(length, "length"),
                   (_as_positive_float(ei_base, "EI base"),
                    _as_positive_float(ei_tip, "EI tip")))

    @classmethod
    def tabulated(cls, s_points, values, length=None):
        if length is None:
            length = s_points[-1]
        length = _as_positive_float(length, "length")
        pts = _validate_breakpoints(s_points, length)
        vals = tuple(_as_positive_float(v, "EI sample") for v in values)
        if len(vals) != len(pts):
            raise ValueError("breakpoints and EI samples must pair up")
        return cls("tabulated", length, vals, pts)

    def at(self, s):
        """Evaluate EI at arc length(s) s (scalar or array), N*mm^2."""
        s = np.asarray(s, dtype=float)
        if self.kind == "constant":
            return np.full(s.shape, self.values[0])
        if self.kind == "linear":
            ei0, eis = self.values
            return ei0 + (eis - ei0) * (s / self.length)
        return np.interp(s, self.s_points, self.values)


@dataclass(frozen=True)
class CurvatureProfile:
    """Intrinsic (rest) centerline curvature kappa(s) = 1/r(s), 1/mm.

    kappa identically zero describes a straight member.  Same kinds as
    StiffnessProfile; values may take any finite sign.
    """

    kind: str
    length: float
    values: tuple
    s_points: tuple = ()

    @classmethod
    def straight(cls, length):
        return cls.constant(0.0, length)

    @classmethod
    def constant(cls, kappa, length):
        return cls("constant", _as_positive_float(length, "length"),
                   (_as_finite_float(kappa, "kappa"),))

    @classmethod
    def linear(cls, kappa_base, kappa_tip, length):
        return cls("linear", _as_positive_float(length, "length"),
                   (_as_finite_float(kappa_base, "kappa base"),
                    _as_finite_float(kappa_tip, "kappa tip")))

    @classmethod
    def tabulated(cls, s_points, values, length=None):
        if length is None:
            length = s_points[-1]
        length = _as_positive_float(length, "length")
        pts = _validate_breakpoints(s_points, length)
        vals = tuple(_as_finite_float(v, "kappa sample") for v in values)
        if len(vals) != len(pts):
            raise ValueError("breakpoints and kappa samples must pair up")
        return cls("tabulated", length, vals, pts)

    def at(self, s):
        """Evaluate kappa at arc length(s) s (scalar or array), 1/mm."""
        s = np.asarray(s, dtype=float)
        if self.kind == "constant":
            return np.full(s.shape, self.values[0])
        if self.kind == "linear":
            k0, ks = self.values
            return k0 + (ks - k0) * (s / self.length)
        return np.interp(s, self.s_points, self.values)


def _restrict_profile(profile, new_length):
    """The same physical profile cut to the domain [0, new_length]."""
    cls = type(profile)
    if profile.kind == "constant":
        return cls(profile.kind, new_length, profile.values)
    if profile.kind == "linear":
        v0, v1 = profile.values
        v_cut = v0 + (v1 - v0) * (new_length / profile.length)
        return cls(profile.kind, new_length, (v0, v_cut))
    kept = [p for p in profile.s_points if p < new_length * (1.0 - 1e-12)]
    values = profile.values[: len(kept)] + (float(profile.at(new_length)),)
    return cls(profile.kind, new_length, values, tuple(kept) + (new_length,))


@dataclass(frozen=True)
class BeamSpec:
    """Geometry and elasticity of one member: total arc length S (mm)
    plus stiffness and rest-curvature profiles defined on [0, S]."""

    length: float
    stiffness: StiffnessProfile
    curvature: CurvatureProfile

    def __post_init__(self):
        object.__setattr__(self, "length", _as_positive_float(self.length, "length"))
        for prof, name in ((self.stiffness, "stiffness"), (self.curvature, "curvature")):
            if abs(prof.length - self.length) > 1e-9 * self.length:
                raise ValueError(
                    f"{name} profile is defined on [0, {prof.length}] "
                    f"but the member has length {self.length}"
                )

    def digest(self) -> str:
        """Short content hash of the physical parameters, for tracing
        fitted models back to the member they describe."""
        payload = {
            "length": repr(self.length),
            "stiffness": [self.stiffness.kind,
                          [repr(v) for v in self.stiffness.values],
                          [repr(p) for p in self.stiffness.s_points]],
            "curvature": [self.curvature.kind,
                          [repr(v) for v in self.curvature.values],
                          [repr(p) for p in self.curvature.s_points]],
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def truncated(self, new_length) -> "BeamSpec":
        """The same member cut at arc length new_length <= S, keeping the
        stiffness and curvature it has on the remaining span."""
        new_length = _as_positive_float(new_length, "length")
        if new_length > self.length * (1.0 + 1e-12):
            raise ValueError(
                f"cannot extend a member: {new_length} > {self.length}")
        return BeamSpec(new_length,
                        _restrict_profile(self.stiffness, new_length),
                        _restrict_profile(self.curvature, new_length))


@dataclass(frozen=True)
class TipWrench:
    """Dead load applied at the free tip: planar force (fx, fy) in N and
    moment mt in N*mm, expressed in the base frame."""

    fx: float
    fy: float
    mt: float

    def __post_init__(self):
        for name in ("fx", "fy", "mt"):
            object.__setattr__(self, name, _as_finite_float(getattr(self, name), name))

    @property
    def magnitude(self):
        """Force magnitude f = |(fx, fy)|, N."""
        return math.hypot(self.fx, self.fy)

    @property
    def angle(self):
        """Force direction psi = atan2(fy, fx), rad."""
        return math.atan2(self.fy, self.fx)

    def as_array(self):
        return np.array([self.fx, self.fy, self.mt])


def make_wrench(f, psi, mt) -> TipWrench:
    """Build a TipWrench from polar force coordinates (f >= 0, psi in rad)."""
    f = float(f)
    if not math.isfinite(f) or f < 0.0:
        raise ValueError(f"force magnitude must be >= 0 and finite, got {f!r}")
    psi = _as_finite_float(psi, "psi")
    return TipWrench(f * math.cos(psi), f * math.sin(psi), float(mt))


@dataclass(eq=False)
class CenterlineSolution:
    """Solved centerline on the uniform grid s_j = j*S/G, j = 0..G."""

    s: np.ndarray          # arc length, mm
    theta: np.ndarray      # tangent angle, rad
    moment: np.ndarray     # internal moment, N*mm
    x: np.ndarray          # mm
    y: np.ndarray          # mm
    shooting_residual: float
    shooting_iterations: int

    @property
    def grid_count(self) -> int:
        return len(self.s) - 1

    @property
    def tip_pose(self):
        """(x, y, theta) of the free tip."""
        return (self.x[-1], self.y[-1], self.theta[-1])


@dataclass(eq=False)
class BatchDeflections:
    """Per-case sampled geometry for a batch of wrenches sharing one grid.

    Arrays are indexed [case, node] where nodes are the requested
    record indices (always including the tip as the last entry).
    """

    s_nodes: np.ndarray      # (R,) arc lengths of the recorded nodes
    x: np.ndarray            # (N, R)
    y: np.ndarray            # (N, R)
    theta: np.ndarray        # (N, R)
    moment: np.ndarray       # (N, R) internal moment, N*mm
    base_moment: np.ndarray  # (N,) converged m(0), N*mm
    residual: np.ndarray     # (N,) terminal-moment residual, N*mm
    iterations: np.ndarray   # (N,) residual evaluations used by shooting


def _integrate(inv_ei, kappa, h, fx, fy, m0, record):
    """RK4 sweep of the full state for every case in the batch.

    inv_ei and kappa are tabulated on the half-step grid (2G+1 points).
    record maps grid-node index -> output column, or is None to keep
    only the running state.  Returns (theta, m, x, y) finals plus the
    recorded columns.
    """
    n_cases = fx.shape[0]
    steps = (inv_ei.shape[0] - 1) // 2
    theta = np.zeros(n_cases)
    m = m0.astype(float).copy()
    x = np.zeros(n_cases)
    y = np.zeros(n_cases)

    if record is not None:
        rec_x = np.empty((n_cases, len(record)))
        rec_y = np.empty((n_cases, len(record)))
        rec_t = np.empty((n_cases, len(record)))
        rec_m = np.empty((n_cases, len(record)))
        rec_pos = {node: col for col, node in enumerate(record)}
    else:
        rec_x = rec_y = rec_t = rec_m = None
        rec_pos = {}

    def store(node):
        col = rec_pos.get(node)
        if col is not None:
            rec_x[:, col] = x
            rec_y[:, col] = y
            rec_t[:, col] = theta
            rec_m[:, col] = m

    store(0)
    half = 0.5 * h
    sixth = h / 6.0
    for j in range(steps):
        i0 = 2 * j
        ie0, ie1, ie2 = inv_ei[i0], inv_ei[i0 + 1], inv_ei[i0 + 2]
        k0, k1, k2 = kappa[i0], kappa[i0 + 1], kappa[i0 + 2]

        c1 = np.cos(theta)
        s1 = np.sin(theta)
        t1 = m * ie0 + k0
        u1 = fx * s1 - fy * c1

        th = theta + half * t1
        c2 = np.cos(th)
        s2 = np.sin(th)
        t2 = (m + half * u1) * ie1 + k1
        u2 = fx * s2 - fy * c2

        th = theta + half * t2
        c3 = np.cos(th)
        s3 = np.sin(th)
        t3 = (m + half * u2) * ie1 + k1
        u3 = fx * s3 - fy * c3

        th = theta + h * t3
        c4 = np.cos(th)
        s4 = np.sin(th)
        t4 = (m + h * u3) * ie2 + k2
        u4 = fx * s4 - fy * c4

        theta = theta + sixth * (t1 + 2.0 * t2 + 2.0 * t3 + t4)
        m = m + sixth * (u1 + 2.0 * u2 + 2.0 * u3 + u4)
        x = x + sixth * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
        y = y + sixth * (s1 + 2.0 * s2 + 2.0 * s3 + s4)
        store(j + 1)

    return theta, m, x, y, rec_x, rec_y, rec_t, rec_m


def _bisect_base_moment(inv_ei, kappa, h, fx, fy, mt, f_mag):
    """Fallback root bracketing for one stubborn case."""
    span = 4.0 * f_mag * (h * ((inv_ei.shape[0] - 1) // 2))
    lo, hi = mt - span, mt + span

    def residual(m0):
        m_end = _integrate(
            inv_ei, kappa, h, np.array([fx]), np.array([fy]), np.array([m0]), None)[1]
        return m_end[0] - mt

    r_lo, r_hi = residual(lo), residual(hi)
    used = 2
    if abs(r_lo) <= SHOOTING_TOLERANCE:
        return lo, r_lo, used
    if abs(r_hi) <= SHOOTING_TOLERANCE:
        return hi, r_hi, used
    if r_lo * r_hi > 0.0:
        raise ShootingError(
            "shooting failed: terminal-moment residual has no sign change on "
            f"the bracket m(0) in [{lo}, {hi}] (wrench fx={fx}, fy={fy}, mt={mt})",
            wrench=TipWrench(fx, fy, mt))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r_mid = residual(mid)
        used += 1
        if abs(r_mid) <= SHOOTING_TOLERANCE:
            return mid, r_mid, used
        if r_lo * r_mid <= 0.0:
            hi, r_hi = mid, r_mid
        else:
            lo, r_lo = mid, r_mid
    raise ShootingError(
        f"shooting failed: bisection stalled (wrench fx={fx}, fy={fy}, mt={mt})",
        wrench=TipWrench(fx, fy, mt))


def solve_deflection_batch(spec, wrenches, grid_count,
                           record_indices=None) -> BatchDeflections:
    """Solve the tip-loaded deflection BVP for many wrenches at once.

    wrenches is an (N, 3) array-like of rows (fx, fy, mt).  All cases
    share the uniform grid with `grid_count` intervals.  record_indices
    selects which grid nodes to keep (default: node 0 and the tip).
    Each case converges or raises independently of its batch mates.
    """
    w = np.atleast_2d(np.asarray(wrenches, dtype=float))
    if w.ndim != 2 or w.shape[1] != 3:
        raise ValueError(f"wrenches must be (N, 3) rows of (fx, fy, mt), got {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("wrench components must be finite")
    grid_count = int(grid_count)
    if grid_count < 1:
        raise ValueError("grid_count must be >= 1")

    s_half = np.linspace(0.0, spec.length, 2 * grid_count + 1)
    ei = np.asarray(spec.stiffness.at(s_half), dtype=float)
    if np.any(ei <= 0.0) or not np.all(np.isfinite(ei)):
        raise ValueError("stiffness profile must be positive and finite on [0, S]")
    inv_ei = 1.0 / ei
    kappa = np.asarray(spec.curvature.at(s_half), dtype=float)
    h = spec.length / grid_count

    if record_indices is None:
        record_indices = (0, grid_count)
    record = [int(i) for i in record_indices]
    if any(i < 0 or i > grid_count for i in record):
        raise ValueError("record_indices out of range")
    if record != sorted(record):
        raise ValueError("record_indices must be sorted")

    fx, fy, mt = w[:, 0].copy(), w[:, 1].copy(), w[:, 2].copy()
    f_mag = np.hypot(fx, fy)
    n_cases = w.shape[0]

    def residuals(m0):
        return _integrate(inv_ei, kappa, h, fx, fy, m0, None)[1] - mt

    # Secant iteration on m(0), all cases in lock-step; converged cases
    # are frozen so their history never depends on the rest of the batch.
    m_prev = mt + f_mag * spec.length
    r_prev = residuals(m_prev)
    iterations = np.ones(n_cases, dtype=int)
    converged = np.abs(r_prev) <= SHOOTING_TOLERANCE
    m_best = m_prev.copy()

    if not converged.all():
        m_curr = np.where(converged, m_prev, mt)
        r_curr = residuals(m_curr)
        iterations += ~converged
        converged |= np.abs(r_curr) <= SHOOTING_TOLERANCE

        for _ in range(SHOOTING_MAX_ITERATIONS):
            if converged.all():
                break
            active = ~converged
            denom = r_curr - r_prev
            safe = np.where(denom == 0.0, 1.0, denom)
            step = r_curr * (m_curr - m_prev) / safe
            m_next = np.where(active & (denom != 0.0), m_curr - step, m_curr)
            m_prev = np.where(active, m_curr, m_prev)
            r_prev = np.where(active, r_curr, r_prev)
            m_curr = m_next
            r_new = residuals(m_curr)
            r_curr = np.where(active, r_new, r_curr)
            iterations += active
            converged |= np.abs(r_curr) <= SHOOTING_TOLERANCE

        m_best = np.where(converged, m_curr, m_best)

        for idx in np.flatnonzero(~converged):
            m0, _, used = _bisect_base_moment(
                inv_ei, kappa, h, fx[idx], fy[idx], mt[idx], f_mag[idx])
            m_best[idx] = m0
            iterations[idx] += used
            converged[idx] = True

    _, m_end, _, _, rec_x, rec_y, rec_t, rec_m = _integrate(
        inv_ei, kappa, h, fx, fy, m_best, record)
    residual = m_end - mt

    return BatchDeflections(
        s_nodes=s_half[::2][record],
        x=rec_x, y=rec_y, theta=rec_t, moment=rec_m,
        base_moment=m_best,
        residual=residual,
        iterations=iterations,
    )


def solve_deflection(spec, wrench, grid_count) -> CenterlineSolution:
    """Solve one tip-loaded deflection BVP, keeping the full centerline.

    The terminal moment satisfies |m(S) - mt| <= SHOOTING_TOLERANCE on
    success; otherwise ShootingError is raised.
    """
    if isinstance(wrench, TipWrench):
        row = [wrench.fx, wrench.fy, wrench.mt]
    else:
        row = list(wrench)
    batch = solve_deflection_batch(
        spec, [row], grid_count, record_indices=range(grid_count + 1))
    return CenterlineSolution(
        s=batch.s_nodes,
        theta=batch.theta[0],
        moment=batch.moment[0],
        x=batch.x[0],
        y=batch.y[0],
        shooting_residual=float(batch.residual[0]),
        shooting_iterations=int(batch.iterations[0]),
    )


def sample_centerline(solution: CenterlineSolution, n: int):
    """Pick n+1 equidistant centerline points (x_i, y_i, s_i), i = 0..n.

    n must divide the solution's grid count so every sample point is a
    grid node; samples are the stored node values, never re-integrated.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    g = solution.grid_count
    if g % n != 0:
        raise ValueError(f"segment count {n} does not divide grid count {g}")
    stride = g // n
    idx = range(0, g + 1, stride)
    return [(solution.x[i], solution.y[i], solution.s[i]) for i in idx]
