"""Explicit upwind simulation of controlled hyperbolic systems on boxes.

The scheme is first-order dimension-split upwinding: each axis substep
diagonalizes its Jacobian, applies one-sided differences per characteristic
sign, and maps back; the source term follows as an explicit substep.
Boundary data enters through ghost states whose incoming characteristic
components are prescribed by the active control law and whose outgoing
components copy the adjacent interior cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .boundary import (
    BoundaryPartition,
    assemble_boundary_data,
    boundary_integral,
    partition_boundary,
    rectangle_faces,
    scalar_feedback_control,
    uniform_componentwise_controls,
)
from .errors import CflViolation, DegenerateSeries, NonFinite, SizeMismatch
from .potential import LyapunovPotential
from .sysdef import HyperbolicSystem

DEFAULT_CFL = 0.45
DEFAULT_BUMP_AMPLITUDE = 0.1
# Fit window skips this fraction of the samples (startup transient).
FIT_SKIP_FRACTION = 0.10


@dataclass(frozen=True)
class Grid:
    """Uniform cell grid on an axis-aligned box, 1 or 2 space dimensions."""

    cells_per_axis: tuple[int, ...]
    lengths: tuple[float, ...]

    def __post_init__(self) -> None:
        ns = tuple(int(n) for n in np.atleast_1d(self.cells_per_axis))
        ls = tuple(float(l) for l in np.atleast_1d(self.lengths))
        if len(ns) not in (1, 2) or len(ls) != len(ns):
            raise SizeMismatch(f"unsupported grid description: cells {ns}, lengths {ls}")
        if any(n < 4 for n in ns):
            raise ValueError(f"need at least 4 cells per axis, got {ns}")
        if any(not (np.isfinite(l) and l > 0.0) for l in ls):
            raise ValueError(f"box lengths {ls} must be positive")
        object.__setattr__(self, "cells_per_axis", ns)
        object.__setattr__(self, "lengths", ls)

    @property
    def d(self) -> int:
        return len(self.cells_per_axis)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(l / n for l, n in zip(self.lengths, self.cells_per_axis))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def cell_centers(self) -> np.ndarray:
        """Cell center coordinates, shape (*cells_per_axis, d)."""
        axes = [
            (np.arange(n) + 0.5) * h
            for n, h in zip(self.cells_per_axis, self.spacing)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1)


@dataclass(frozen=True)
class ControlLaw:
    """Which boundary datum the incoming characteristics receive."""

    mode: str
    gain: float = 0.0
    datum: float | Callable[[float], float] | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("zero", "scalar", "componentwise", "prescribed"):
            raise ValueError(f"unknown control mode {self.mode!r}")
        if self.mode == "scalar" and not -1.0 <= self.gain <= 1.0:
            raise ValueError(f"scalar feedback gain {self.gain} must lie in [-1, 1]")
        if self.mode == "prescribed" and self.datum is None:
            raise ValueError("prescribed mode needs a datum value or callable")

    @classmethod
    def zero(cls) -> "ControlLaw":
        return cls(mode="zero")

    @classmethod
    def scalar(cls, gain: float) -> "ControlLaw":
        return cls(mode="scalar", gain=float(gain))

    @classmethod
    def componentwise(cls) -> "ControlLaw":
        return cls(mode="componentwise")

    @classmethod
    def prescribed(cls, datum) -> "ControlLaw":
        return cls(mode="prescribed", datum=datum)


@dataclass
class SimState:
    """Field values at one instant plus the boundary data last applied."""

    t: float
    w: np.ndarray
    ghost: np.ndarray


@dataclass
class RunRecord:
    """Telemetry of a controlled run.

    One row per completed step plus a final row at the end time; c_fit is
    the fitted exponential decay rate of the weighted functional (None when
    the series is degenerate, e.g. identically zero data) and c_l the rate
    certified by the potential.
    """

    times: np.ndarray
    lyapunov: np.ndarray
    boundary: np.ndarray
    controls: np.ndarray
    final_state: SimState
    c_fit: float | None
    c_l: float
    steps: int
    snapshots: tuple = field(default_factory=tuple)


def default_bump(grid: Grid, n: int, amplitude: float = DEFAULT_BUMP_AMPLITUDE) -> np.ndarray:
    """Smooth product-of-sin^2 disturbance, identical in every component."""
    centers = grid.cell_centers()
    bump = np.full(centers.shape[:-1], float(amplitude))
    for k, l in enumerate(grid.lengths):
        bump = bump * np.sin(np.pi * centers[..., k] / l) ** 2
    return np.repeat(bump[..., None], n, axis=-1)


def boundary_face_count(grid: Grid) -> int:
    return 2 if grid.d == 1 else 2 * sum(grid.cells_per_axis)


def initial_state(grid: Grid, w0) -> SimState:
    """Initial state at t = 0 from an array or a callable of cell centers."""
    if callable(w0):
        w = np.asarray(w0(grid.cell_centers()), dtype=float)
    else:
        w = np.array(w0, dtype=float)
    if w.shape[:-1] != grid.cells_per_axis or w.ndim != grid.d + 1:
        raise SizeMismatch(f"initial data shape {w.shape} does not match grid {grid.cells_per_axis}")
    if not np.isfinite(w).all():
        raise NonFinite("initial data must be finite")
    ghost = np.zeros((boundary_face_count(grid), w.shape[-1]))
    return SimState(t=0.0, w=w, ghost=ghost)


def lyapunov_value(grid: Grid, state, pot: LyapunovPotential | None = None) -> float:
    """Midpoint quadrature of |w|^2 exp(mu) over the box."""
    w = state.w if isinstance(state, SimState) else np.asarray(state, dtype=float)
    density = np.sum(w * w, axis=-1)
    if pot is not None:
        density = density * np.exp(grid.cell_centers() @ pot.m)
    return float(grid.cell_volume * np.sum(density))


class _RunContext:
    """Precomputed geometry and eigendata shared by all steps of a run."""

    def __init__(
        self,
        system: HyperbolicSystem,
        grid: Grid,
        pot: LyapunovPotential | None,
        control: ControlLaw,
        partition: BoundaryPartition | None = None,
    ) -> None:
        if system.d != grid.d:
            raise SizeMismatch(f"system dimension {system.d} does not match grid {grid.d}")
        self.system = system
        self.grid = grid
        self.pot = pot
        self.control = control
        self.partition = partition or partition_boundary(
            system, rectangle_faces(grid.cells_per_axis, grid.lengths)
        )
        faces = self.partition.faces
        if len(faces) != boundary_face_count(grid):
            raise SizeMismatch("partition does not describe this grid's boundary")
        # Axis sweeps use the pencil along +e_k; the low-side ghost rows are
        # the same eigenvectors, so one decomposition per axis suffices.
        self.axis_eigs = [self.partition.eigendata[(k, 1)] for k in range(grid.d)]
        cells = np.array([face.cell for face in faces])
        self.trace_cells = tuple(cells[:, k] for k in range(grid.d))
        self.low_faces = []
        self.high_faces = []
        for k in range(grid.d):
            axis_match = np.array([face.axis == k for face in faces])
            orient = np.array([face.orientation for face in faces])
            self.low_faces.append(np.nonzero(axis_match & (orient < 0))[0])
            self.high_faces.append(np.nonzero(axis_match & (orient > 0))[0])
        self.rho_max = system.max_wave_speed()

    def cfl_bound(self, cfl: float) -> float:
        if self.rho_max == 0.0:
            return math.inf
        return cfl * min(self.grid.spacing) / self.rho_max


def _uniform_controls(ctx: _RunContext, state: SimState, trace: np.ndarray) -> np.ndarray:
    """Per-characteristic uniform control magnitudes for the current state."""
    partition = ctx.partition
    values = np.zeros(partition.n)
    if not partition.has_inflow() or ctx.control.mode == "zero":
        return values
    inflow_mask = np.array([idx.size > 0 for idx in partition.gamma_minus])
    if ctx.control.mode == "scalar":
        level = scalar_feedback_control(partition, trace, ctx.pot, ctx.control.gain)
        values[inflow_mask] = level
    elif ctx.control.mode == "componentwise":
        values = uniform_componentwise_controls(partition, trace, ctx.pot)
    else:
        datum = ctx.control.datum
        level = float(datum(state.t)) if callable(datum) else float(datum)
        values[inflow_mask] = level
    return values


def _axis_sweep(
    ctx: _RunContext, k: int, w: np.ndarray, ghost: np.ndarray | None, dt: float
) -> np.ndarray:
    """One upwind transport substep along axis k (ghost=None means periodic)."""
    eig = ctx.axis_eigs[k]
    lam = eig.eigenvalues
    t = eig.T
    dx = ctx.grid.spacing[k]
    g = w @ t
    if ghost is None:
        g_prev = np.roll(g, 1, axis=k)
        g_next = np.roll(g, -1, axis=k)
    else:
        slab = _ghost_shape(g, k)
        g_low = (ghost[ctx.low_faces[k]] @ t).reshape(slab)
        g_high = (ghost[ctx.high_faces[k]] @ t).reshape(slab)
        body = np.take(g, range(g.shape[k] - 1), axis=k)
        g_prev = np.concatenate([g_low, body], axis=k)
        body = np.take(g, range(1, g.shape[k]), axis=k)
        g_next = np.concatenate([body, g_high], axis=k)
    backward = (g - g_prev) / dx
    forward = (g_next - g) / dx
    lam_pos = np.maximum(lam, 0.0)
    lam_neg = np.minimum(lam, 0.0)
    flux = lam_pos * backward + lam_neg * forward
    return w - dt * (flux @ t.T)


def _ghost_shape(g: np.ndarray, k: int) -> tuple[int, ...]:
    shape = list(g.shape)
    shape[k] = 1
    return tuple(shape)


def _advance(
    ctx: _RunContext, state: SimState, dt: float, cfl: float, periodic: bool = False
) -> tuple[SimState, np.ndarray]:
    """One explicit step; returns the new state and the applied controls."""
    bound = ctx.cfl_bound(cfl)
    if dt > bound * (1.0 + 1e-9):
        raise CflViolation(f"dt = {dt:.6e} exceeds the stability bound {bound:.6e}")
    if periodic:
        controls = np.zeros(ctx.partition.n)
        ghost_arg = None
        ghost_store = state.ghost
    else:
        trace = state.w[ctx.trace_cells]
        controls = _uniform_controls(ctx, state, trace)
        ghost_store = assemble_boundary_data(ctx.partition, trace, uniform_controls=controls)
        ghost_arg = ghost_store
    w = state.w
    for k in range(ctx.grid.d):
        w = _axis_sweep(ctx, k, w, ghost_arg, dt)
    if ctx.system.source.any():
        w = w - dt * (w @ ctx.system.source.T)
    if not np.isfinite(w).all():
        raise NonFinite(f"non-finite field values after the step ending at t = {state.t + dt:.6e}")
    return SimState(t=state.t + dt, w=w, ghost=ghost_store), controls


def step(
    system: HyperbolicSystem,
    grid: Grid,
    state: SimState,
    pot: LyapunovPotential | None,
    control: ControlLaw,
    dt: float,
    cfl: float = DEFAULT_CFL,
    periodic: bool = False,
) -> SimState:
    """Advance one explicit upwind step of size dt."""
    ctx = _RunContext(system, grid, pot, control)
    new_state, _ = _advance(ctx, state, dt, cfl, periodic=periodic)
    return new_state


def run(
    system: HyperbolicSystem,
    grid: Grid,
    w0,
    pot: LyapunovPotential,
    control: ControlLaw,
    t_end: float,
    cfl: float = DEFAULT_CFL,
    snapshot_times: Sequence[float] = (),
) -> RunRecord:
    """Simulate up to t_end, recording the weighted functional, the
    boundary flux of the applied data, and the control magnitudes."""
    if not (np.isfinite(t_end) and t_end > 0.0):
        raise ValueError(f"t_end = {t_end} must be positive")
    ctx = _RunContext(system, grid, pot, control)
    state = initial_state(grid, w0)

    bound = ctx.cfl_bound(cfl)
    if not math.isfinite(bound):
        bound = cfl * min(grid.spacing)  # pure source dynamics: fall back to unit speed
    steps = max(1, math.ceil(t_end / bound * (1.0 - 1e-12)))
    dt = t_end / steps

    times = np.empty(steps + 1)
    lyap = np.empty(steps + 1)
    bnd = np.empty(steps + 1)
    ctrl = np.empty((steps + 1, system.n))
    snapshots = []
    queue = sorted(float(s) for s in snapshot_times)

    for i in range(steps):
        new_state, controls = _advance(ctx, state, dt, cfl)
        times[i] = state.t
        lyap[i] = lyapunov_value(grid, state, pot)
        bnd[i] = boundary_integral(ctx.partition, new_state.ghost, pot)
        ctrl[i] = controls
        state = new_state
        while queue and state.t >= queue[0] - 1e-12:
            snapshots.append((state.t, state))
            queue.pop(0)

    # Final row: boundary data that would be applied at t_end.
    trace = state.w[ctx.trace_cells]
    controls = _uniform_controls(ctx, state, trace)
    ghost = assemble_boundary_data(ctx.partition, trace, uniform_controls=controls)
    times[steps] = state.t
    lyap[steps] = lyapunov_value(grid, state, pot)
    bnd[steps] = boundary_integral(ctx.partition, ghost, pot)
    ctrl[steps] = controls

    try:
        c_fit = fit_decay_rate(np.column_stack([times, lyap]))
    except DegenerateSeries:
        c_fit = None
    return RunRecord(
        times=times,
        lyapunov=lyap,
        boundary=bnd,
        controls=ctrl,
        final_state=state,
        c_fit=c_fit,
        c_l=pot.c_l,
        steps=steps,
        snapshots=tuple(snapshots),
    )


def fit_decay_rate(series) -> float:
    """Least-squares exponential rate of a positive series, sign-flipped.

    The first tenth of the samples is excluded as startup transient; the
    remaining window must hold at least 10 strictly positive values.
    """
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise SizeMismatch(f"expected rows of (t, L), got shape {arr.shape}")
    start = math.ceil(FIT_SKIP_FRACTION * arr.shape[0])
    window = arr[start:]
    if window.shape[0] < 10:
        raise DegenerateSeries(f"only {window.shape[0]} samples in the fit window")
    t = window[:, 0]
    values = window[:, 1]
    if np.any(values <= 0.0):
        raise DegenerateSeries("series is not strictly positive in the fit window")
    slope = np.polyfit(t, np.log(values), 1)[0]
    return float(-slope)


def write_csv(record: RunRecord, path) -> None:
    """Telemetry as CSV: t, L, boundary_integral, control_1..control_n."""
    n = record.controls.shape[1]
    header = ["t", "L", "boundary_integral"] + [f"control_{i + 1}" for i in range(n)]
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(record.times.size):
            row = [record.times[i], record.lyapunov[i], record.boundary[i]]
            row.extend(record.controls[i])
            fh.write(",".join(f"{value:.17g}" for value in row) + "\n")


def write_snapshot(grid: Grid, state: SimState, path) -> None:
    """Plain-text dump of the field components at one instant."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# t = {state.t:.17g}\n")
        fh.write(f"# cells = {' '.join(str(n) for n in grid.cells_per_axis)}\n")
        n = state.w.shape[-1]
        for c in range(n):
            fh.write(f"# component {c + 1}\n")
            block = state.w[..., c]
            if grid.d == 1:
                fh.write(" ".join(f"{v:.17g}" for v in block) + "\n")
            else:
                for row in block:
                    fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
