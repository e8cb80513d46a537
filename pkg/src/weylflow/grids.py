"""Periodic grids and sampled phase-space fields.

Position space is the torus [-L, L) sampled at M evenly spaced nodes
x_j = -L + j*dx with dx = 2L/M.  Momentum axes use the same layout.  For a
given semiclassical parameter h the momentum axis dual to a position grid
has nodes xi_k = (pi*h/L)*k, k = -M/2 .. M/2-1, so that dx*dxi = 2*pi*h/M
and the discrete h-scaled Fourier transform is exactly unitary.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "SpaceGrid",
    "PhaseGrid",
    "SymbolField",
    "dual_momentum_grid",
    "dual_phase_grid",
    "is_dual_pair",
]

# Relative slack when checking that a momentum axis is the h-dual of a
# position axis.  Duality is a structural precondition for the quantization
# transforms, not an approximation, so the tolerance is tight.
DUALITY_RTOL = 1.0e-9


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform periodic grid on [-half_width, half_width).

    Parameters
    ----------
    half_width : float
        Half box size L; nodes cover [-L, L).
    npts : int
        Number of nodes M, required even so momentum bands split cleanly.
    """

    half_width: float
    npts: int

    def __post_init__(self) -> None:
        if self.half_width <= 0.0:
            raise ValueError("grid half_width must be positive")
        if self.npts < 4 or self.npts % 2:
            raise ValueError("grid npts must be an even integer >= 4")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.npts

    @cached_property
    def nodes(self) -> np.ndarray:
        j = np.arange(self.npts)
        return -self.half_width + j * self.dx

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular frequencies 2*pi*fftfreq for unscaled spectral calculus."""
        return 2.0 * np.pi * np.fft.fftfreq(self.npts, d=self.dx)


def dual_momentum_grid(x: SpaceGrid, h: float) -> SpaceGrid:
    """Momentum axis dual to ``x`` at parameter ``h``.

    Nodes are xi_k = (pi*h/L)*k for k = -M/2 .. M/2-1, i.e. a SpaceGrid of
    half width pi*h*M/(2L) with the same point count.
    """
    if h <= 0.0:
        raise ValueError("h must be positive")
    return SpaceGrid(np.pi * h * x.npts / (2.0 * x.half_width), x.npts)


def is_dual_pair(x: SpaceGrid, xi: SpaceGrid, h: float) -> bool:
    if xi.npts != x.npts:
        return False
    want = np.pi * h * x.npts / (2.0 * x.half_width)
    return abs(xi.half_width - want) <= DUALITY_RTOL * max(1.0, want)


@dataclass(frozen=True)
class PhaseGrid:
    """Tensor grid (position axis) x (momentum axis)."""

    x: SpaceGrid
    xi: SpaceGrid

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x.npts, self.xi.npts)

    @property
    def cell(self) -> float:
        return self.x.dx * self.xi.dx

    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x.nodes, self.xi.nodes, indexing="ij")

    def sample(self, fn) -> "SymbolField":
        """Evaluate ``fn(x, xi)`` on the grid (broadcasting meshes)."""
        X, XI = self.meshes()
        return SymbolField(self, np.asarray(fn(X, XI)))


def dual_phase_grid(x: SpaceGrid, h: float) -> PhaseGrid:
    return PhaseGrid(x, dual_momentum_grid(x, h))


@dataclass(frozen=True)
class SymbolField:
    """Phase-space function sampled on a PhaseGrid.

    values[j, k] is the sample at (x_j, xi_k).  Real symbols may be stored
    with a real dtype; quantization handles either.
    """

    grid: PhaseGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    def with_values(self, values: np.ndarray) -> "SymbolField":
        return SymbolField(self.grid, values)

    def real_if_close(self, tol: float = 1.0e-12) -> "SymbolField":
        """Drop an imaginary part below ``tol`` (relative to the field scale)."""
        if not np.iscomplexobj(self.values):
            return self
        scale = max(1.0, float(np.abs(self.values).max()))
        if float(np.abs(self.values.imag).max()) <= tol * scale:
            return SymbolField(self.grid, self.values.real.copy())
        return self

    def __add__(self, other: "SymbolField") -> "SymbolField":
        return SymbolField(self.grid, self.values + _vals(other, self.grid))

    def __sub__(self, other: "SymbolField") -> "SymbolField":
        return SymbolField(self.grid, self.values - _vals(other, self.grid))

    def __mul__(self, c) -> "SymbolField":
        return SymbolField(self.grid, self.values * c)

    __rmul__ = __mul__


def _vals(other: SymbolField, grid: PhaseGrid) -> np.ndarray:
    if other.grid is not grid and other.grid != grid:
        raise ValueError("fields live on different grids")
    return other.values
