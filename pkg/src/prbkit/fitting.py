"""Synthesis of pseudo-rigid-body chains from solved beam deflections.

The fitting recipe, given a member and a grid of tip wrenches:

1. solve the unloaded member once; chord angles of the n sampled
   segments give the rest joint angles phi0 and the passive tip offset
   (continuum tip tangent minus last chord direction);
2. solve the member under every wrench of the grid; chord angles give
   the loaded joint angles, hence spring deflections delta_phi;
3. joint torques follow from statics, tau = J^T w, with the chain
   Jacobian taken at each loaded configuration;
4. each spring constant gets the closed-form least-squares value

       k_i = sum_q tau_iq * dphi_iq / sum_q dphi_iq^2,

   the unique minimizer of the per-joint quadratic force cost.

Everything downstream (costs, error tables, sweeps over segment
lengths and member lengths, power-law stiffness trends) builds on the
(model, cases) pair returned by fit().
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from prbkit import metrics
from prbkit.beam import BeamSpec, TipWrench, solve_deflection_batch
from prbkit.chain import PRBModel

#: Fitted spring denominators below this are treated as "joint never
#: moved" and reported as a diagnostic failure, (N*rad)^2.
DEGENERATE_DEFLECTION = 1e-20


class FitError(RuntimeError):
    """A stiffness fit produced no usable spring for some joint."""

    def __init__(self, message, joint=None):
        super().__init__(message)
        self.joint = joint          # offending joint, 0-based, or None


@dataclass(frozen=True)
class GridAxis:
    """One axis of a load grid: `count` evenly spaced values on [lo, hi]."""

    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("axis bounds must be finite")
        if self.lo > self.hi:
            raise ValueError(f"axis bounds out of order: [{self.lo}, {self.hi}]")
        if int(self.count) < 1:
            raise ValueError("axis count must be >= 1")
        object.__setattr__(self, "count", int(self.count))

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class LoadGrid:
    """Cartesian product of three load axes, enumerated lexicographically
    (first axis slowest).  kind "box" spans (fx, fy, mt) directly; kind
    "polar" spans force magnitude, direction and moment (f, psi, mt)."""

    kind: str
    axes: tuple                  # three GridAxis

    AXIS_NAMES = {"box": ("fx", "fy", "mt"), "polar": ("f", "psi", "mt")}

    def __post_init__(self):
        if self.kind not in self.AXIS_NAMES:
            raise ValueError(f"unknown grid kind {self.kind!r}")
        axes = tuple(self.axes)
        if len(axes) != 3 or not all(isinstance(a, GridAxis) for a in axes):
            raise ValueError("a load grid needs exactly three GridAxis entries")
        if self.kind == "polar" and axes[0].lo < 0.0:
            raise ValueError("polar force-magnitude axis must be non-negative")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def box(cls, fx, fy, mt):
        return cls("box", (GridAxis(*fx), GridAxis(*fy), GridAxis(*mt)))

    @classmethod
    def polar(cls, f, psi, mt):
        return cls("polar", (GridAxis(*f), GridAxis(*psi), GridAxis(*mt)))

    @property
    def axis_names(self):
        return self.AXIS_NAMES[self.kind]

    @property
    def case_count(self) -> int:
        return self.axes[0].count * self.axes[1].count * self.axes[2].count

    def with_counts(self, counts) -> "LoadGrid":
        """Same axis ranges with different point counts."""
        counts = tuple(int(c) for c in counts)
        if len(counts) != 3:
            raise ValueError("axis counts must be three integers")
        axes = tuple(GridAxis(ax.lo, ax.hi, c)
                     for ax, c in zip(self.axes, counts))
        return LoadGrid(self.kind, axes)

    def points(self) -> np.ndarray:
        """All load cases as (N, 3) rows of raw axis coordinates, grid
        order (first axis slowest)."""
        a, b, c = (ax.points() for ax in self.axes)
        aa, bb, cc = np.meshgrid(a, b, c, indexing="ij")
        return np.column_stack([aa.ravel(), bb.ravel(), cc.ravel()])

    def wrenches(self) -> np.ndarray:
        """All load cases as (N, 3) rows of (fx, fy, mt), grid order."""
        cols = self.points()
        if self.kind == "box":
            return cols
        f, psi, mt = cols[:, 0], cols[:, 1], cols[:, 2]
        return np.column_stack([f * np.cos(psi), f * np.sin(psi), mt])

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "axes": {name: [ax.lo, ax.hi, ax.count]
                     for name, ax in zip(self.axis_names, self.axes)},
            "case_count": self.case_count,
        }


def build_load_grid(description: dict) -> LoadGrid:
    """Build a LoadGrid from a flat mapping, e.g. parsed configuration:
    {"kind": "polar", "f": [0, 7.5e-3, 11], "psi": [...], "mt": [...]}."""
    kind = description.get("kind")
    names = LoadGrid.AXIS_NAMES.get(kind)
    if names is None:
        raise ValueError(f"grid kind must be 'box' or 'polar', got {kind!r}")
    axes = []
    for name in names:
        if name not in description:
            raise ValueError(f"grid description is missing axis {name!r}")
        axes.append(GridAxis(*description[name]))
    return LoadGrid(kind, tuple(axes))


@dataclass(eq=False)
class FitCase:
    """One load case of a fit: what the continuum did and how the
    chain mirrors it."""

    wrench: TipWrench
    delta_phi: np.ndarray      # spring deflections, (n,), rad
    jacobian: np.ndarray       # chain Jacobian at the loaded state, (3, n)
    continuum_tip: tuple       # (x, y, theta) of the solved member
    prb_tip: tuple             # (x, y, theta) of the chain under the same state


def _sample_plan(n, lengths, total, multiplier):
    """Choose a grid size whose nodes hit every segment boundary.

    Returns (grid_count, node_indices).  Segment boundaries must be
    rational fractions of the total length (true for equal segments and
    for sweep compositions); the grid count is the smallest multiple of
    their common denominator that is >= multiplier * n.
    """
    cum = np.cumsum(lengths)
    fracs = [Fraction(float(c / total)).limit_denominator(10 ** 6) for c in cum[:-1]]
    den = 1
    for fr in fracs:
        den = den * fr.denominator // math.gcd(den, fr.denominator)
    for fr, c in zip(fracs, cum[:-1]):
        if abs(float(fr) - c / total) > 1e-12:
            raise ValueError(
                "segment boundaries must be simple fractions of the total "
                f"length; {c} / {total} is not")
    target = multiplier * n
    grid_count = ((target + den - 1) // den) * den
    indices = [0]
    indices += [fr.numerator * (grid_count // fr.denominator) for fr in fracs]
    indices.append(grid_count)
    return grid_count, indices


def _chord_angles(x, y):
    """Chord angles per case from sampled points, arrays (N, n+1) -> (N, n)."""
    dx = np.diff(x, axis=1)
    dy = np.diff(y, axis=1)
    if np.any(np.hypot(dx, dy) == 0.0):
        raise FitError("coincident sample points; chord angles undefined")
    return np.arctan2(dy, dx)


def _relative_angles(theta_hat):
    return np.diff(theta_hat, axis=1, prepend=0.0)


def fit(spec: BeamSpec, n: int, grid: LoadGrid,
        segment_lengths=None, grid_multiplier: int = 120):
    """Fit an n-joint chain to `spec` over a grid of tip loads.

    Returns (model, cases).  Segment lengths default to equal; explicit
    lengths must be positive and sum to the member length.  The solver
    grid has about grid_multiplier * n intervals, rounded up so that
    every segment boundary is a grid node.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if segment_lengths is None:
        lengths = np.full(n, spec.length / n)
    else:
        lengths = np.asarray([float(v) for v in segment_lengths])
        if lengths.shape != (n,):
            raise ValueError(f"expected {n} segment lengths, got {lengths.shape}")
        if np.any(lengths <= 0.0):
            raise ValueError("segment lengths must be positive")
        if abs(lengths.sum() - spec.length) > 1e-9 * spec.length:
            raise ValueError(
                f"segment lengths sum to {lengths.sum()}, member is {spec.length}")
    grid_count, indices = _sample_plan(n, lengths, spec.length, int(grid_multiplier))

    rest = solve_deflection_batch(spec, [[0.0, 0.0, 0.0]], grid_count, indices)
    wrenches = grid.wrenches()
    loaded = solve_deflection_batch(spec, wrenches, grid_count, indices)
    return _fit_from_samples(spec.digest(), rest, loaded, wrenches)


def _fit_from_samples(digest, rest, loaded, wrenches):
    """Core of fit(): everything after the BVP solves.

    Link lengths come from the recorded sample abscissae, so any two
    fits that sample the same grid nodes agree bitwise, however their
    segment lengths were originally written down.
    """
    lengths = np.diff(rest.s_nodes)
    n = len(lengths)
    theta0_hat = _chord_angles(rest.x, rest.y)[0]
    phi0 = np.diff(theta0_hat, prepend=0.0)
    tip_offset = rest.theta[0, -1] - theta0_hat[-1]

    theta_hat = _chord_angles(loaded.x, loaded.y)      # (N, n)
    phi = _relative_angles(theta_hat)
    dphi = phi - phi0

    # Chain geometry at each loaded state: joint positions, then static
    # joint torques tau_i = moment of the tip wrench about joint i.
    ct = np.cos(theta_hat) * lengths
    st = np.sin(theta_hat) * lengths
    zeros = np.zeros((theta_hat.shape[0], 1))
    jx = np.concatenate([zeros, np.cumsum(ct, axis=1)], axis=1)   # (N, n+1)
    jy = np.concatenate([zeros, np.cumsum(st, axis=1)], axis=1)
    arm_x = jx[:, -1:] - jx[:, :-1]                               # joint -> tip
    arm_y = jy[:, -1:] - jy[:, :-1]
    fx = wrenches[:, 0:1]
    fy = wrenches[:, 1:2]
    mt = wrenches[:, 2:3]
    tau = -arm_y * fx + arm_x * fy + mt                           # (N, n)

    denom = np.sum(dphi * dphi, axis=0)
    degenerate = np.flatnonzero(denom < DEGENERATE_DEFLECTION)
    if degenerate.size:
        j = int(degenerate[0])
        raise FitError(
            f"joint {j} never deflects over this load grid; its stiffness "
            "is unidentifiable", joint=j)
    k = np.sum(tau * dphi, axis=0) / denom
    bad = np.flatnonzero(k <= 0.0)
    if bad.size:
        j = int(bad[0])
        raise FitError(
            f"fitted stiffness for joint {j} is not positive ({k[j]}); the "
            "chain cannot represent this member over this load grid", joint=j)

    model = PRBModel(tuple(lengths), tuple(k), tuple(phi0), float(tip_offset),
                     source_digest=digest)

    cases = []
    for q in range(wrenches.shape[0]):
        jac = np.empty((3, n))
        jac[0] = -arm_y[q]
        jac[1] = arm_x[q]
        jac[2] = 1.0
        cases.append(FitCase(
            wrench=TipWrench(*wrenches[q]),
            delta_phi=dphi[q],
            jacobian=jac,
            continuum_tip=(loaded.x[q, -1], loaded.y[q, -1], loaded.theta[q, -1]),
            prb_tip=(jx[q, -1], jy[q, -1], theta_hat[q, -1] + tip_offset),
        ))
    return model, cases


def optimal_stiffness(cases, i: int) -> float:
    """Closed-form spring constant for joint i (0-based) from fit cases:
    the stationary point of the per-joint quadratic force cost."""
    dphi = np.array([c.delta_phi[i] for c in cases])
    tau = np.array([c.jacobian[:, i] @ c.wrench.as_array() for c in cases])
    denom = float(np.sum(dphi * dphi))
    if denom < DEGENERATE_DEFLECTION:
        raise FitError(f"joint {i} never deflects; stiffness unidentifiable", joint=i)
    return float(np.sum(tau * dphi) / denom)


def force_cost(cases, stiffness):
    """Mean squared torque imbalance of springs `stiffness` over the cases.

    Returns (E_f, per_joint) with per_joint summing exactly to E_f:
    E_f = (1/N) sum_q ||K dphi_q - J_q^T w_q||^2.
    """
    k = np.asarray(stiffness, dtype=float)
    dphi = np.array([c.delta_phi for c in cases])
    tau = np.array([c.jacobian.T @ c.wrench.as_array() for c in cases])
    residual = k * dphi - tau
    per_joint = np.sum(residual * residual, axis=0) / len(cases)
    return float(np.sum(per_joint)), per_joint


def position_cost(cases):
    """Mean tip-pose mismatch between member and chain over the cases.

    Returns (E_x, components): E_x = (1/N) sum_q ||p_q - p_hat_q|| with
    position in mm and angle in rad stacked in one 3-vector; components
    are the mean absolute per-axis gaps (|dx|, |dy|, |dtheta|).
    """
    d = np.array([np.subtract(c.continuum_tip, c.prb_tip) for c in cases])
    norms = np.sqrt(np.sum(d * d, axis=1))
    return float(np.mean(norms)), np.mean(np.abs(d), axis=0)


@dataclass(eq=False)
class SweepRow:
    """One segment-length combination of a 3-joint sweep."""

    lengths: tuple             # (l1, l2, l3), mm
    stiffness: tuple           # fitted (k1, k2, k3), N*mm/rad
    errors: "metrics.ErrorReport"


def sweep_segment_combinations(spec: BeamSpec, grid: LoadGrid,
                               resolution: int = 13,
                               grid_multiplier: int = 120):
    """Fit every 3-segment partition of the member at a given resolution.

    Segment lengths run over all positive multiples of S/resolution that
    sum to S — C(resolution-1, 2) combinations, ordered lexicographically
    by (l1, l2).  Returns a list of SweepRow.
    """
    resolution = int(resolution)
    if resolution < 3:
        raise ValueError("resolution must be >= 3")
    # One shared solve: every partition samples nodes of the same grid.
    den = resolution
    target = grid_multiplier * 3
    grid_count = ((target + den - 1) // den) * den
    all_nodes = range(grid_count + 1)
    rest = solve_deflection_batch(spec, [[0.0, 0.0, 0.0]], grid_count, all_nodes)
    wrenches = grid.wrenches()
    loaded = solve_deflection_batch(spec, wrenches, grid_count, all_nodes)

    digest = spec.digest()
    unit = grid_count // resolution
    rows = []
    for a in range(1, resolution - 1):
        for b in range(1, resolution - a):
            c = resolution - a - b
            idx = [0, a * unit, (a + b) * unit, grid_count]
            sub_rest = _view_nodes(rest, idx)
            sub_loaded = _view_nodes(loaded, idx)
            model, cases = _fit_from_samples(digest, sub_rest,
                                             sub_loaded, wrenches)
            report = metrics.build_error_report(model, cases)
            rows.append(SweepRow(model.lengths, model.stiffness, report))
    return rows


def _view_nodes(batch, node_indices):
    """Restrict a full-grid BatchDeflections to chosen node columns.

    Copies are forced C-contiguous: column picking yields transposed
    memory layouts, which ufuncs would propagate, silently changing
    numpy's reduction order — and with it the low bits of the fitted
    stiffness — relative to a fit that recorded only these nodes.
    """
    import copy
    view = copy.copy(batch)
    view.s_nodes = np.ascontiguousarray(batch.s_nodes[node_indices])
    view.x = np.ascontiguousarray(batch.x[:, node_indices])
    view.y = np.ascontiguousarray(batch.y[:, node_indices])
    view.theta = np.ascontiguousarray(batch.theta[:, node_indices])
    view.moment = np.ascontiguousarray(batch.moment[:, node_indices])
    return view


def sweep_lengths(spec: BeamSpec, n: int, lengths_mm, grid: LoadGrid,
                  grid_multiplier: int = 120):
    """Fit the same member truncated to several total lengths.

    Returns a list of (length, model, cases) in the given order; lengths
    must lie in (0, spec.length].
    """
    out = []
    for s in lengths_mm:
        sub = spec.truncated(float(s))
        model, cases = fit(sub, n, grid, grid_multiplier=grid_multiplier)
        out.append((float(s), model, cases))
    return out


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares power law k = kappa * s**(-sigma) in log-log space."""

    kappa: float               # prefactor, same units as k times mm**sigma
    sigma: float               # decay exponent
    rms_log_residual: float    # RMS residual of log k
    n_rejected: int            # non-positive points dropped before the fit


def power_law_fit(points) -> PowerLawFit:
    """Fit k = kappa * s**(-sigma) to (s, k) pairs by linear least squares
    on (log s, log k).  Non-positive entries cannot be log-fitted and are
    dropped (counted in n_rejected); at least 3 usable points required."""
    pts = [(float(s), float(k)) for s, k in points]
    usable = [(s, k) for s, k in pts if s > 0.0 and k > 0.0]
    n_rejected = len(pts) - len(usable)
    if len(usable) < 3:
        raise FitError(
            f"power-law fit needs at least 3 positive points, got {len(usable)}")
    log_s = np.log([s for s, _ in usable])
    log_k = np.log([k for _, k in usable])
    slope, intercept = np.polyfit(log_s, log_k, 1)
    residual = log_k - (slope * log_s + intercept)
    return PowerLawFit(
        kappa=float(np.exp(intercept)),
        sigma=float(-slope),
        rms_log_residual=float(np.sqrt(np.mean(residual ** 2))),
        n_rejected=n_rejected,
    )


def tip_gap_study(spec: BeamSpec, wrenches, n_values, grid_multiplier: int = 120):
    """Chain-vs-continuum tip gap as the segment count grows.

    For each n, the chain is built from the member's own sampled chord
    angles (equal segments), so the gap isolates the chord-versus-arc
    geometry.  Returns a list of dicts with the raw tip gap at rest and
    under each wrench, plus the load-induced gap (loaded minus rest
    tip mismatch), all in mm.
    """
    w = np.atleast_2d(np.asarray(wrenches, dtype=float))
    rows = []
    for n in n_values:
        n = int(n)
        grid_count = grid_multiplier * n
        indices = range(0, grid_count + 1, grid_multiplier)
        lengths = np.full(n, spec.length / n)
        rest = solve_deflection_batch(spec, [[0.0, 0.0, 0.0]], grid_count, indices)
        loaded = solve_deflection_batch(spec, w, grid_count, indices)

        def tip_mismatch(batch):
            th = _chord_angles(batch.x, batch.y)
            px = np.sum(np.cos(th) * lengths, axis=1)
            py = np.sum(np.sin(th) * lengths, axis=1)
            return np.column_stack([px - batch.x[:, -1], py - batch.y[:, -1]])

        rest_vec = tip_mismatch(rest)[0]
        load_vec = tip_mismatch(loaded)
        rows.append({
            "n": n,
            "rest_gap": float(np.hypot(*rest_vec)),
            "loaded_gap": np.hypot(load_vec[:, 0], load_vec[:, 1]),
            "deflection_gap": np.hypot(load_vec[:, 0] - rest_vec[0],
                                       load_vec[:, 1] - rest_vec[1]),
        })
    return rows
