"""Quadrature, norms, h-scaled Fourier transforms and spectral derivatives.

Everything here is rectangle-rule / FFT calculus on the periodic grids of
:mod:`weylflow.grids`.  The rectangle rule is spectrally accurate for smooth
periodic integrands and is used for every phase-space integral and norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import PhaseGrid, SpaceGrid, SymbolField, is_dual_pair

__all__ = [
    "integrate",
    "norm_l1",
    "norm_l2",
    "norm_sup",
    "h_fourier",
    "h_fourier_inverse",
    "spectral_derivative",
    "field_derivative",
    "fourier_upsample",
    "periodic_convolution",
    "SlopeFit",
    "fit_loglog_slope",
]


def integrate(field: SymbolField) -> complex | float:
    """Rectangle-rule integral of a sampled phase-space function."""
    total = field.values.sum() * field.grid.cell
    return float(total) if not np.iscomplexobj(field.values) else complex(total)


def norm_l1(field: SymbolField) -> float:
    return float(np.abs(field.values).sum() * field.grid.cell)


def norm_l2(field: SymbolField) -> float:
    return float(np.sqrt((np.abs(field.values) ** 2).sum() * field.grid.cell))


def norm_sup(field: SymbolField) -> float:
    return float(np.abs(field.values).max())


def _dual_signs(npts: int) -> np.ndarray:
    # (-1)^k for k = -M/2 .. M/2-1, the phase picked up by the -L grid offset
    k = np.arange(npts) - npts // 2
    return np.where(k % 2 == 0, 1.0, -1.0)


def h_fourier(f: np.ndarray, x: SpaceGrid, xi: SpaceGrid, h: float) -> np.ndarray:
    """Unitary h-scaled Fourier transform onto the dual momentum grid.

    fhat[k] = (2 pi h)^{-1/2} * dx * sum_j f[j] exp(-i x_j xi_k / h)

    with output ordered by k = -M/2 .. M/2-1.  Requires ``xi`` to be the
    h-dual of ``x``; with that pairing the transform is exactly unitary and
    ``h_fourier_inverse`` undoes it to machine precision.
    """
    if not is_dual_pair(x, xi, h):
        raise ValueError("momentum grid is not the h-dual of the position grid")
    spec = np.fft.fftshift(np.fft.fft(f, axis=-1), axes=-1)
    return spec * (_dual_signs(x.npts) * x.dx / np.sqrt(2.0 * np.pi * h))


def h_fourier_inverse(fhat: np.ndarray, x: SpaceGrid, xi: SpaceGrid, h: float) -> np.ndarray:
    """Inverse of :func:`h_fourier` (same grid conventions)."""
    if not is_dual_pair(x, xi, h):
        raise ValueError("momentum grid is not the h-dual of the position grid")
    g = np.fft.ifftshift(fhat * _dual_signs(x.npts), axes=-1)
    return np.fft.ifft(g, axis=-1) * (x.npts * xi.dx / np.sqrt(2.0 * np.pi * h))


def spectral_derivative(values: np.ndarray, spacing: float, order: int = 1,
                        axis: int = 0) -> np.ndarray:
    """FFT derivative along one axis of a periodic sample array.

    Odd-order derivatives zero the Nyquist mode (its derivative sample
    pattern is pure imaginary and non-representable), the standard choice
    that keeps derivatives of real fields real.
    """
    n = values.shape[axis]
    w = 2.0 * np.pi * np.fft.fftfreq(n, d=spacing)
    if order % 2:
        w = w.copy()
        w[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    mult = (1j * w) ** order
    out = np.fft.ifft(np.fft.fft(values, axis=axis) * mult.reshape(shape), axis=axis)
    if not np.iscomplexobj(values):
        return out.real
    return out


def field_derivative(field: SymbolField, dx_order: int = 0, dxi_order: int = 0) -> SymbolField:
    """Mixed spectral partial derivative of a phase-space field."""
    vals = field.values
    if dx_order:
        vals = spectral_derivative(vals, field.grid.x.dx, dx_order, axis=0)
    if dxi_order:
        vals = spectral_derivative(vals, field.grid.xi.dx, dxi_order, axis=1)
    return field.with_values(vals)


def fourier_upsample(values: np.ndarray, axis: int = 0,
                     nyquist: str = "split") -> np.ndarray:
    """Double the sample rate along ``axis`` by spectral zero padding.

    Exact at the original nodes; new midpoint samples carry the trigonometric
    interpolant.  ``nyquist="split"`` shares the Nyquist bin between +/- so
    real input stays conjugate-symmetric; ``nyquist="onesided"`` keeps it on
    the negative side, the convention under which the quantization transforms
    form an exact bijection.  Output is complex.
    """
    n = values.shape[axis]
    half = n // 2
    spec = np.fft.fft(values, axis=axis)
    spec = np.moveaxis(spec, axis, 0)
    out = np.zeros((2 * n,) + spec.shape[1:], dtype=complex)
    out[:half] = spec[:half]
    if nyquist == "split":
        out[half] = 0.5 * spec[half]
        out[2 * n - half] = 0.5 * spec[half]
    elif nyquist == "onesided":
        out[2 * n - half] = spec[half]
    else:
        raise ValueError("nyquist must be 'split' or 'onesided'")
    out[2 * n - half + 1:] = spec[half + 1:]
    out = np.moveaxis(out, 0, axis)
    return np.fft.ifft(out, axis=axis) * 2.0


def periodic_convolution(kernel_on_grid: np.ndarray, density: np.ndarray,
                         dx: float) -> np.ndarray:
    """Circular convolution (kernel * density)(x_m) = sum_j K(x_m - x_j) n_j dx.

    ``kernel_on_grid`` holds K sampled at signed displacements laid out like
    grid nodes (index j corresponds to displacement -L + j*dx).
    """
    m = kernel_on_grid.shape[-1]
    # reindex so slot r holds K(r*dx) with wrap for r > M/2
    kd = np.roll(kernel_on_grid, -(m // 2), axis=-1)
    out = np.fft.ifft(np.fft.fft(kd) * np.fft.fft(density)) * dx
    if not (np.iscomplexobj(kernel_on_grid) or np.iscomplexobj(density)):
        return out.real
    return out


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (log h, log err)."""

    slope: float
    intercept: float
    max_residual: float

    def __str__(self) -> str:  # convenience for reports
        return f"O(h^{self.slope:.2f})"


def fit_loglog_slope(hs, errors) -> SlopeFit:
    """Fit log(err) = slope*log(h) + b.  Needs >= 3 strictly positive pairs."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if hs.shape != errors.shape or hs.ndim != 1:
        raise ValueError("hs and errors must be 1d arrays of equal length")
    if hs.size < 3:
        raise ValueError("slope fit needs at least 3 points")
    if np.any(hs <= 0.0) or np.any(errors <= 0.0):
        raise ValueError("slope fit needs strictly positive h and error values")
    lh, le = np.log(hs), np.log(errors)
    slope, intercept = np.polyfit(lh, le, 1)
    resid = float(np.abs(le - (slope * lh + intercept)).max())
    return SlopeFit(float(slope), float(intercept), resid)
