"""Self-consistent quantum propagation of density operators.

The Hamiltonian is the h-scaled kinetic operator (symbol |xi|^2) plus a
multiplication potential, optionally self-consistent: V_eff = V + W * n with
n the position density of the evolving state.  Time stepping is Strang
splitting

    exp(-i dt V/2h) exp(-i dt T/h) exp(-i dt V/2h)

applied as a conjugation of the density matrix, with the kinetic factor
diagonal in the h-Fourier basis (four FFT sweeps per step, no dense
propagator).  Every factor is unitary, so trace, hermiticity, and the
spectrum are preserved to roundoff regardless of dt; dt only controls
accuracy.  Self-consistency uses one predictor pass per step: the potential
is evaluated at the step midpoint through the average of the current and
predicted densities, which is exact for the affine map state -> V_eff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coherent import antiwick_quantize, heat_smooth
from .grids import PhaseGrid, SpaceGrid, SymbolField, dual_momentum_grid
from .potentials import PotentialSpec
from .spectral import h_fourier, h_fourier_inverse, integrate
from .weyl import OperatorMatrix

__all__ = [
    "gaussian_symbol",
    "initial_density",
    "mean_field_potential",
    "split_step",
    "QuantumTrajectory",
    "propagate_tdhf",
    "conjugate_flow",
]


def gaussian_symbol(grid: PhaseGrid, center=(-1.0, 0.0),
                    widths=(1.0, 0.5)) -> SymbolField:
    """Normalized phase-space Gaussian (discrete integral exactly 1)."""
    xc, kc = center
    a, b = widths
    f = grid.sample(lambda u, v: np.exp(-((u - xc) / a) ** 2
                                        - ((v - kc) / b) ** 2))
    return f.with_values(f.values / integrate(f))


def initial_density(g: SymbolField, h: float) -> OperatorMatrix:
    """Density operator (2 pi h) Op^AW(g): positive, trace exactly one when
    g integrates to one."""
    op = antiwick_quantize(g, h)
    return OperatorMatrix(op.grid, h, 2.0 * np.pi * h * op.mat)


def initial_symbol(g: SymbolField, h: float) -> SymbolField:
    """Weyl symbol of initial_density(g, h) divided by (2 pi h): the heat
    regularization of g at time h/4.  Exact companion of initial_density."""
    return heat_smooth(g, h)


def mean_field_potential(pot: PotentialSpec, rho: OperatorMatrix) -> np.ndarray:
    density = np.real(np.diagonal(rho.mat)) / rho.grid.dx
    return pot.mean_field(rho.grid, density)


def _kinetic_conjugate(mat: np.ndarray, x: SpaceGrid, xi: SpaceGrid,
                       h: float, phase: np.ndarray) -> np.ndarray:
    def apply_k(m):
        cols = h_fourier(m.T, x, xi, h) * phase
        return h_fourier_inverse(cols, x, xi, h).T

    return apply_k(apply_k(mat).conj().T).conj().T


def split_step(rho: OperatorMatrix, v_row: np.ndarray, dt: float,
               xi: SpaceGrid, kin_phase: np.ndarray) -> OperatorMatrix:
    """One Strang step of the conjugation rho -> U rho U^*."""
    half = np.exp(-0.5j * dt * v_row / rho.h)
    m = half[:, None] * rho.mat * half.conj()[None, :]
    m = _kinetic_conjugate(m, rho.grid, xi, rho.h, kin_phase)
    m = half[:, None] * m * half.conj()[None, :]
    return OperatorMatrix(rho.grid, rho.h, m)


@dataclass(frozen=True)
class QuantumTrajectory:
    grid: SpaceGrid
    h: float
    dt: float
    times: np.ndarray
    states: tuple
    trace_series: np.ndarray
    hermiticity_series: np.ndarray
    min_eig_series: np.ndarray

    def state_at(self, t: float) -> OperatorMatrix:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9:
            raise KeyError(f"no snapshot stored at t = {t}")
        return self.states[i]


def _snapshot_steps(t_end, dt, snapshot_times):
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


def propagate_tdhf(rho0: OperatorMatrix, pot: PotentialSpec, t_end: float,
                   dt: float, snapshot_times=None) -> QuantumTrajectory:
    """Evolve a density operator under the self-consistent Hamiltonian."""
    x = rho0.grid
    h = rho0.h
    xi = dual_momentum_grid(x, h)
    kin_phase = np.exp(-1j * dt * xi.nodes ** 2 / h)
    n_steps, wanted = _snapshot_steps(t_end, dt, snapshot_times)

    rho = rho0
    times, states, traces, herms, eigs = [], [], [], [], []

    def record(k, state):
        if k not in wanted:
            return
        times.append(k * dt)
        states.append(state)
        traces.append(np.trace(state.mat).real)
        herms.append(state.hermiticity_defect())
        eigs.append(float(np.linalg.eigvalsh(state.mat).min()))

    record(0, rho)
    static = not pot.has_interaction
    v_static = pot.sample_external(x) if static else None
    for k in range(n_steps):
        if static:
            v_mid = v_static
        else:
            v_now = mean_field_potential(pot, rho)
            rho_pred = split_step(rho, v_now, dt, xi, kin_phase)
            v_mid = 0.5 * (v_now + mean_field_potential(pot, rho_pred))
        rho = split_step(rho, v_mid, dt, xi, kin_phase)
        record(k + 1, rho)

    return QuantumTrajectory(x, h, dt, np.array(times), tuple(states),
                             np.array(traces), np.array(herms), np.array(eigs))


def conjugate_flow(op0: OperatorMatrix, v_row: np.ndarray, t_end: float,
                   dt: float) -> OperatorMatrix:
    """Conjugate an operator through the unitary group of a static external
    potential: op(t) = U(t) op U(t)^*.  Used for quantum-classical
    correspondence checks with the interaction switched off."""
    x = op0.grid
    xi = dual_momentum_grid(x, op0.h)
    kin_phase = np.exp(-1j * dt * xi.nodes ** 2 / op0.h)
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError("t_end must be an integer number of steps")
    op = op0
    for _ in range(n_steps):
        op = split_step(op, v_row, dt, xi, kin_phase)
    return op
