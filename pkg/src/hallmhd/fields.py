"""Spectral vector fields: the representation of u, B, v, J, j, omega, E.

A field is three components of Fourier coefficients over one grid
(2.5D fields keep three components over a 2D lattice).  Coefficients
follow the forward-normalized DFT, u_hat(k) = N^-d sum_j u(x_j) e^{-ik.x_j},
stored in real-FFT layout.  Evolved fields are mean-free and, when
flagged, divergence-free: in 3D the full k.u_hat = 0, in 2.5D only the
first two components enter ("tilde" divergence).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.fft as sfft

from .grid import GridSpec

__all__ = [
    "SpectralField",
    "conj_reflect",
    "hermitianize_plane",
    "l2_inner",
]

_FFT_AXES = {2: (-2, -1), 3: (-3, -2, -1)}


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Three-component vector field stored as spectral coefficients."""

    grid: GridSpec
    c: np.ndarray  # complex128, shape (3, *grid.spectral_shape)
    is_divfree: bool = False

    def __post_init__(self):
        expected = (3,) + self.grid.spectral_shape
        if self.c.shape != expected:
            raise ValueError(f"coefficient shape {self.c.shape} != {expected}")

    @classmethod
    def zeros(cls, grid: GridSpec, is_divfree: bool = True) -> "SpectralField":
        return cls(grid, np.zeros((3,) + grid.spectral_shape, dtype=np.complex128), is_divfree)

    @classmethod
    def from_physical(cls, grid: GridSpec, values: np.ndarray, is_divfree: bool = False) -> "SpectralField":
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (3,) + grid.physical_shape:
            raise ValueError(f"physical shape {values.shape} != {(3,) + grid.physical_shape}")
        c = sfft.rfftn(values, axes=_FFT_AXES[grid.dim], norm="forward")
        return cls(grid, c, is_divfree)

    def to_physical(self) -> np.ndarray:
        return sfft.irfftn(self.c, s=self.grid.physical_shape, axes=_FFT_AXES[self.grid.dim], norm="forward")

    def with_coeffs(self, c: np.ndarray, is_divfree: bool | None = None) -> "SpectralField":
        return replace(self, c=c, is_divfree=self.is_divfree if is_divfree is None else is_divfree)

    def copy(self) -> "SpectralField":
        return replace(self, c=self.c.copy())

    def coeff_at(self, k: tuple[int, ...]) -> np.ndarray:
        """Coefficient vector at wavevector k, resolving conjugate storage."""
        idx, conj = self.grid.index_of(k)
        val = self.c[(slice(None),) + idx]
        return np.conj(val) if conj else val.copy()

    def mean_mode(self) -> np.ndarray:
        return self.c[(slice(None),) + (0,) * self.grid.dim].copy()

    def divergence_residual(self) -> float:
        """max_k |k.c(k)| / ||c||, using the first two components in 2.5D."""
        g = self.grid
        div = sum(1j * g.kvec[i] * self.c[i] for i in range(g.dim))
        scale = np.sqrt(float(np.sum(g.pair_weight * (self.c.real**2 + self.c.imag**2))))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(div))) / scale

    # arithmetic (fields on the same grid)
    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.c + other.c, self.is_divfree and other.is_divfree)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.grid, self.c - other.c, self.is_divfree and other.is_divfree)

    def __mul__(self, a: float) -> "SpectralField":
        return SpectralField(self.grid, self.c * a, self.is_divfree)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.c, self.is_divfree)


def conj_reflect(grid: GridSpec, plane: np.ndarray) -> np.ndarray:
    """conj(X(-k)) over the trailing grid.dim-1 full axes (index i -> -i mod n)."""
    axes = tuple(range(plane.ndim - (grid.dim - 1), plane.ndim))
    out = np.conj(plane)
    for ax in axes:
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def hermitianize_plane(grid: GridSpec, c: np.ndarray) -> np.ndarray:
    """Project the self-conjugate planes (k_last = 0 and Nyquist) of stored
    rfft coefficients onto Hermitian symmetry; other modes are untouched."""
    c = c.copy()
    for plane_idx in (0, grid.n // 2):
        sl = (..., plane_idx)
        plane = c[sl]
        c[sl] = 0.5 * (plane + conj_reflect(grid, plane))
    return c


def l2_inner(f: SpectralField, g: SpectralField) -> float:
    """Real L2 inner product under the mean-normalized measure."""
    if f.grid is not g.grid and f.grid.spectral_shape != g.grid.spectral_shape:
        raise ValueError("fields live on different grids")
    w = f.grid.pair_weight
    return float(np.sum(w * (f.c.real * g.c.real + f.c.imag * g.c.imag)))
