"""Classical phase-space transport: Vlasov solver, flow maps, pullbacks.

The Hamiltonian is kinetic |xi|^2 plus a mean-field potential, so
characteristics obey q' = 2p, p' = force(q, t) with force = -d/dx of the
effective potential.  The density is advanced by a semi-Lagrangian scheme:
each step interpolates the current field at the feet of backward RK4
characteristics, with the self-consistent force handled by one
predictor/corrector sweep (force taken linear in time inside the step).
Interpolation is periodic cubic in both phase-space directions.

Force histories are kept as knot rows so that later consumers (expansion
cascade, Egorov comparisons) can re-integrate characteristics through the
same field without re-solving.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from .grids import PhaseGrid, SpaceGrid, SymbolField
from .potentials import PotentialSpec
from .spectral import integrate, spectral_derivative

__all__ = [
    "ForcePath",
    "interp_periodic",
    "solve_vlasov",
    "ClassicalTrajectory",
    "FlowMap",
    "integrate_flow",
    "transport_pullback",
]

MASS_DRIFT_LIMIT = 1e-3


def _row_at(row: np.ndarray, positions: np.ndarray, x: SpaceGrid) -> np.ndarray:
    idx = (positions - (-x.half_width)) / x.dx
    flat = map_coordinates(row, [idx.ravel()], order=3, mode="grid-wrap")
    return flat.reshape(positions.shape)


def interp_periodic(values: np.ndarray, qx: np.ndarray, qxi: np.ndarray,
                    grid: PhaseGrid) -> np.ndarray:
    """Cubic interpolation of a phase-space sample array, periodic wrap."""
    ix = (qx - (-grid.x.half_width)) / grid.x.dx
    ik = (qxi - (-grid.xi.half_width)) / grid.xi.dx
    flat = map_coordinates(values, [ix.ravel(), ik.ravel()], order=3,
                           mode="grid-wrap")
    return flat.reshape(qx.shape)


@dataclass(frozen=True)
class ForcePath:
    """Force rows -dV_eff/dx on knot times, linear in t between knots.

    A single knot means a static force.  ``force_dx`` rows (the spatial
    derivative, used by variational Jacobian integration) are carried along.
    """

    x: SpaceGrid
    times: np.ndarray
    force: np.ndarray
    force_dx: np.ndarray

    def __post_init__(self):
        if self.force.shape != (len(self.times), self.x.npts):
            raise ValueError("force row array does not match knots and grid")

    def _blend(self, t: float) -> tuple:
        knots = self.times
        if len(knots) == 1:
            return 0, 0, 0.0
        t = min(max(t, knots[0]), knots[-1])
        step = knots[1] - knots[0]
        i = min(int((t - knots[0]) / step), len(knots) - 2)
        w = (t - knots[i]) / step
        return i, i + 1, w

    def row(self, t: float) -> np.ndarray:
        i, j, w = self._blend(t)
        return (1.0 - w) * self.force[i] + w * self.force[j]

    def row_dx(self, t: float) -> np.ndarray:
        i, j, w = self._blend(t)
        return (1.0 - w) * self.force_dx[i] + w * self.force_dx[j]

    def eval(self, positions: np.ndarray, t: float) -> np.ndarray:
        return _row_at(self.row(t), positions, self.x)

    def eval_dx(self, positions: np.ndarray, t: float) -> np.ndarray:
        return _row_at(self.row_dx(t), positions, self.x)

    @classmethod
    def static(cls, x: SpaceGrid, force_row: np.ndarray) -> "ForcePath":
        return cls(x, np.zeros(1), force_row[None, :].copy(),
                   spectral_derivative(force_row, x.dx)[None, :])

    @classmethod
    def from_potential(cls, pot: PotentialSpec, x: SpaceGrid) -> "ForcePath":
        """Static force of the external potential alone (no mean field)."""
        return cls.static(x, -spectral_derivative(pot.sample_external(x), x.dx))


def _force_row_from(values: np.ndarray, grid: PhaseGrid,
                    pot: PotentialSpec) -> np.ndarray:
    marginal = values.sum(axis=1) * grid.xi.dx
    veff = pot.mean_field(grid.x, marginal)
    return -spectral_derivative(veff, grid.x.dx)


def _backward_feet(grid: PhaseGrid, f_old: np.ndarray, f_new: np.ndarray,
                   dt: float) -> tuple:
    """Feet at t of backward characteristics from the nodes at t + dt.

    The force is linear in time between the rows at t (f_old) and t + dt
    (f_new); RK4 in the backward direction.
    """
    x = grid.x
    qx, qxi = grid.meshes()
    f_mid = 0.5 * (f_old + f_new)

    k1x = -2.0 * qxi
    k1p = -_row_at(f_new, qx, x)
    q2 = qx + 0.5 * dt * k1x
    k2x = -2.0 * (qxi + 0.5 * dt * k1p)
    k2p = -_row_at(f_mid, q2, x)
    q3 = qx + 0.5 * dt * k2x
    k3x = -2.0 * (qxi + 0.5 * dt * k2p)
    k3p = -_row_at(f_mid, q3, x)
    q4 = qx + dt * k3x
    k4x = -2.0 * (qxi + dt * k3p)
    k4p = -_row_at(f_old, q4, x)

    feet_x = qx + (dt / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
    feet_p = qxi + (dt / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
    return feet_x, feet_p


@dataclass(frozen=True)
class ClassicalTrajectory:
    grid: PhaseGrid
    dt: float
    times: np.ndarray
    fields: tuple
    mass_series: np.ndarray
    min_series: np.ndarray
    force_path: ForcePath

    def field_at(self, t: float) -> SymbolField:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9:
            raise KeyError(f"no snapshot stored at t = {t}")
        return self.fields[i]


def _snap_steps(t_end: float, dt: float, snapshot_times) -> tuple:
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError("t_end must be an integer number of steps")
    if snapshot_times is None:
        snapshot_times = [0.0, t_end]
    wanted = set()
    for t in snapshot_times:
        k = int(round(t / dt))
        if not 0 <= k <= n_steps or abs(k * dt - t) > 1e-9:
            raise ValueError(f"snapshot time {t} is not on the step lattice")
        wanted.add(k)
    return n_steps, wanted


def solve_vlasov(initial: SymbolField, pot: PotentialSpec, t_end: float,
                 dt: float, snapshot_times=None) -> ClassicalTrajectory:
    """Self-consistent Vlasov evolution of a phase-space density."""
    grid = initial.grid
    n_steps, wanted = _snap_steps(t_end, dt, snapshot_times)
    v = np.array(initial.values, dtype=float)
    mass0 = integrate(initial)

    knot_force = np.empty((n_steps + 1, grid.x.npts))
    knot_force[0] = _force_row_from(v, grid, pot)

    snap_t, snap_f, masses, mins = [], [], [], []

    def record(k, arr):
        if k in wanted:
            snap_t.append(k * dt)
            snap_f.append(SymbolField(grid, arr.copy()))
        masses.append(arr.sum() * grid.cell)
        mins.append(arr.min())

    record(0, v)
    for k in range(n_steps):
        f_old = knot_force[k]
        # predictor: freeze the force across the step
        fx, fp = _backward_feet(grid, f_old, f_old, dt)
        v_star = interp_periodic(v, fx, fp, grid)
        f_pred = _force_row_from(v_star, grid, pot)
        # corrector: force linear in time toward the predicted endpoint
        fx, fp = _backward_feet(grid, f_old, f_pred, dt)
        v = interp_periodic(v, fx, fp, grid)
        knot_force[k + 1] = _force_row_from(v, grid, pot)
        record(k + 1, v)
        drift = abs(masses[-1] - mass0) / abs(mass0)
        if drift > MASS_DRIFT_LIMIT:
            raise RuntimeError(
                f"mass drift {drift:.3e} beyond {MASS_DRIFT_LIMIT} "
                f"at t = {(k + 1) * dt:.6g}")

    path = ForcePath(grid.x, np.arange(n_steps + 1) * dt, knot_force,
                     spectral_derivative(knot_force, grid.x.dx, axis=1))
    return ClassicalTrajectory(grid, dt, np.array(snap_t), tuple(snap_f),
                               np.array(masses), np.array(mins), path)


@dataclass(frozen=True)
class FlowMap:
    """Endpoint positions (and Jacobian determinant) of characteristics
    started on the grid nodes."""

    grid: PhaseGrid
    t_start: float
    t_end: float
    qx: np.ndarray
    qxi: np.ndarray
    det_jac: np.ndarray


def integrate_flow(grid: PhaseGrid, path: ForcePath, t_start: float,
                   t_end: float, dt: float, with_jacobian: bool = False) -> FlowMap:
    """RK4 characteristics from the nodes at t_start to t_end.

    ``t_end < t_start`` integrates backward (the inverse flow).  The 2x2
    tangent system rides along when a Jacobian is requested, which keeps the
    determinant free of interpolation noise.
    """
    n = int(round(abs(t_end - t_start) / dt))
    if n == 0 and abs(t_end - t_start) > 1e-12:
        raise ValueError("dt larger than the requested flow interval")
    step = (t_end - t_start) / n if n else 0.0
    qx, qxi = grid.meshes()
    qx, qxi = qx.copy(), qxi.copy()
    if with_jacobian:
        j11 = np.ones_like(qx)
        j12 = np.zeros_like(qx)
        j21 = np.zeros_like(qx)
        j22 = np.ones_like(qx)

    def rhs(px, pp, tau, jac):
        dx = 2.0 * pp
        dp = path.eval(px, tau)
        if jac is None:
            return dx, dp, None
        g = path.eval_dx(px, tau)
        a, b, c, d = jac
        return dx, dp, (2.0 * c, 2.0 * d, g * a, g * b)

    for k in range(n):
        t0 = t_start + k * step
        jac = (j11, j12, j21, j22) if with_jacobian else None
        k1 = rhs(qx, qxi, t0, jac)
        jac2 = None if jac is None else tuple(
            j + 0.5 * step * dj for j, dj in zip(jac, k1[2]))
        k2 = rhs(qx + 0.5 * step * k1[0], qxi + 0.5 * step * k1[1],
                 t0 + 0.5 * step, jac2)
        jac3 = None if jac is None else tuple(
            j + 0.5 * step * dj for j, dj in zip(jac, k2[2]))
        k3 = rhs(qx + 0.5 * step * k2[0], qxi + 0.5 * step * k2[1],
                 t0 + 0.5 * step, jac3)
        jac4 = None if jac is None else tuple(
            j + step * dj for j, dj in zip(jac, k3[2]))
        k4 = rhs(qx + step * k3[0], qxi + step * k3[1], t0 + step, jac4)
        qx = qx + (step / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        qxi = qxi + (step / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if with_jacobian:
            j11, j12, j21, j22 = (
                j + (step / 6.0) * (a + 2 * b + 2 * c + d)
                for j, a, b, c, d in zip(jac, k1[2], k2[2], k3[2], k4[2]))

    det = (j11 * j22 - j12 * j21) if with_jacobian else np.ones_like(qx)
    return FlowMap(grid, t_start, t_end, qx, qxi, det)


def transport_pullback(field: SymbolField, path: ForcePath, t: float,
                       dt: float) -> SymbolField:
    """Push the initial field along the flow: u(t) = u(0) at the backward
    feet of the characteristics through the nodes."""
    back = integrate_flow(field.grid, path, t, 0.0, dt)
    vals = interp_periodic(np.asarray(field.values, dtype=float),
                           back.qx, back.qxi, field.grid)
    return field.with_values(vals)
