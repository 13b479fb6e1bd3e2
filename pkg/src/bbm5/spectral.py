"""Periodic grid, Fourier transform contract, derivatives, norms and energy.

Conventions (fixed once, tested by round-trip):

* grid points x_k = k*L/n, k = 0..n-1, on the torus [0, L);
* wavenumbers xi_j = 2*pi*j/L with j in numpy fft ordering
  (0, 1, .., n/2-1, -n/2, .., -1);
* coefficients-as-amplitudes: u(x) = sum_j c_j exp(i*xi_j*x) with
  c = fft(samples)/n, so a Fourier multiplier acts by literal pointwise
  multiplication of c.

The discrete H^s norm is sqrt(L * sum_j (1 + xi_j^2)^s |c_j|^2); for s = 0
this is the L^2 integral of u^2 by Parseval.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .coefficients import Bbm5Coefficients

__all__ = [
    "Grid",
    "Field",
    "sobolev_norm",
    "homogeneous_sobolev_norm",
    "energy",
    "low_pass",
    "spectral_derivative",
]


class RegimeError(ValueError):
    """Raised when coefficients violate the gamma1, delta1 > 0 hypotheses."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid standing in for the real line."""

    n: int
    length: float

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise ValueError(f"n must be even and >= 4, got {self.n}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.n) * (self.length / self.n)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """xi_j = 2*pi*j/L in fft ordering; the Nyquist slot carries -n/2."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.length / self.n)

    @property
    def nyquist(self) -> float:
        """Largest resolved |xi|."""
        return np.pi * self.n / self.length

    @cached_property
    def _nyquist_index(self) -> int:
        return self.n // 2


class Field:
    """Real-valued periodic grid function with cached spectral coefficients.

    Immutable after construction: operations return new Fields.
    """

    __slots__ = ("grid", "_samples", "_spectral")

    def __init__(self, grid: Grid, samples=None, spectral=None):
        if samples is None and spectral is None:
            raise ValueError("Field needs samples or spectral coefficients")
        self.grid = grid
        if samples is not None:
            samples = np.asarray(samples, dtype=np.float64)
            if samples.shape != (grid.n,):
                raise ValueError(f"expected {grid.n} samples, got {samples.shape}")
            if not np.all(np.isfinite(samples)):
                raise ValueError("non-finite samples")
            samples = samples.copy()
            samples.setflags(write=False)
        self._samples = samples
        if spectral is not None:
            spectral = np.asarray(spectral, dtype=np.complex128)
            if spectral.shape != (grid.n,):
                raise ValueError(f"expected {grid.n} coefficients, got {spectral.shape}")
            spectral = spectral.copy()
            spectral.setflags(write=False)
        self._spectral = spectral

    @classmethod
    def from_samples(cls, grid: Grid, samples) -> "Field":
        return cls(grid, samples=samples)

    @classmethod
    def from_spectral(cls, grid: Grid, coeffs) -> "Field":
        return cls(grid, spectral=coeffs)

    @classmethod
    def zero(cls, grid: Grid) -> "Field":
        return cls(grid, samples=np.zeros(grid.n))

    @property
    def samples(self) -> np.ndarray:
        if self._samples is None:
            s = np.fft.ifft(self._spectral * self.grid.n).real
            s.setflags(write=False)
            self._samples = s
        return self._samples

    @property
    def spectral(self) -> np.ndarray:
        """c_j = (1/n) sum_k u(x_k) exp(-i*xi_j*x_k)."""
        if self._spectral is None:
            c = np.fft.fft(self._samples) / self.grid.n
            c.setflags(write=False)
            self._spectral = c
        return self._spectral

    @property
    def zero_mode(self) -> float:
        return float(self.spectral[0].real)

    def max_imag_residue(self) -> float:
        """Departure from realness of the inverse transform."""
        return float(np.abs(np.fft.ifft(self.spectral * self.grid.n).imag).max())

    def __add__(self, other: "Field") -> "Field":
        self._check_grid(other)
        return Field.from_spectral(self.grid, self.spectral + other.spectral)

    def __sub__(self, other: "Field") -> "Field":
        self._check_grid(other)
        return Field.from_spectral(self.grid, self.spectral - other.spectral)

    def __mul__(self, scalar: float) -> "Field":
        return Field.from_spectral(self.grid, self.spectral * scalar)

    __rmul__ = __mul__

    def _check_grid(self, other: "Field"):
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")


def spectral_derivative(f: Field, order: int) -> Field:
    """d^order/dx^order by multiplication with (i*xi)^order.

    The Nyquist mode is zeroed for odd orders so realness is preserved
    exactly.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    if order == 0:
        return f
    xi = f.grid.wavenumbers
    c = f.spectral * (1j * xi) ** order
    if order % 2 == 1:
        c = c.copy()
        c[f.grid._nyquist_index] = 0.0
    return Field.from_spectral(f.grid, c)


def sobolev_norm(f: Field, s: float) -> float:
    """Discrete H^s norm with (1 + xi^2)^s weights."""
    if not np.isfinite(s):
        raise ValueError("Sobolev index must be finite")
    xi = f.grid.wavenumbers
    w = (1.0 + xi * xi) ** s
    return float(np.sqrt(f.grid.length * np.sum(w * np.abs(f.spectral) ** 2)))


def homogeneous_sobolev_norm(f: Field, s: float) -> float:
    """Homogeneous counterpart with |xi|^(2s) weights (zero mode dropped)."""
    xi = f.grid.wavenumbers
    w = np.abs(xi) ** (2.0 * s)
    w[0] = 0.0
    return float(np.sqrt(f.grid.length * np.sum(w * np.abs(f.spectral) ** 2)))


def energy(f: Field, c: Bbm5Coefficients) -> float:
    """The conserved quadratic functional.

    E = (1/2) * (||f||_L2^2 + gamma1*||f_x||_L2^2 + delta1*||f_xx||_L2^2),
    evaluated by spectral quadrature.
    """
    if not c.wellposed_regime:
        raise RegimeError(
            "energy requires gamma1 > 0 and delta1 > 0, got "
            f"gamma1={c.gamma1}, delta1={c.delta1}"
        )
    xi = f.grid.wavenumbers
    w = 1.0 + c.gamma1 * xi**2 + c.delta1 * xi**4
    return float(0.5 * f.grid.length * np.sum(w * np.abs(f.spectral) ** 2))


def low_pass(f: Field, cutoff: float) -> Field:
    """Sharp frequency truncation: zero all coefficients with |xi| > cutoff."""
    if not cutoff > 0:
        raise ValueError("cutoff must be positive")
    xi = f.grid.wavenumbers
    c = np.where(np.abs(xi) <= cutoff, f.spectral, 0.0)
    return Field.from_spectral(f.grid, c)


# ---------------------------------------------------------------------------
# Alias-free products via zero padding.
#
# Quadratic products are formed on a 3n/2 fine grid (the classical 2/3 rule)
# and cubic products on a 2n fine grid (1/2 rule); both leave every retained
# coefficient exact apart from the Nyquist edge mode.
# ---------------------------------------------------------------------------


def _pad(c: np.ndarray, m: int) -> np.ndarray:
    n = c.shape[0]
    out = np.zeros(m, dtype=np.complex128)
    h = n // 2
    out[:h] = c[:h]
    out[m - h :] = c[h:]
    return out


def _truncate(c: np.ndarray, n: int) -> np.ndarray:
    m = c.shape[0]
    h = n // 2
    out = np.empty(n, dtype=np.complex128)
    out[:h] = c[:h]
    out[h:] = c[m - h :]
    # fold the fine +n/2 mode into the single coarse Nyquist slot
    out[h] += c[h]
    return out


def _fine_samples(c: np.ndarray, m: int) -> np.ndarray:
    return np.fft.ifft(_pad(c, m) * m).real


def dealiased_product2(f: Field, g: Field) -> Field:
    """Alias-free pointwise product of two fields (2/3-rule padding)."""
    n = f.grid.n
    m = 3 * n // 2 if n % 4 == 0 else 2 * n
    w = _fine_samples(f.spectral, m) * _fine_samples(g.spectral, m)
    return Field.from_spectral(f.grid, _truncate(np.fft.fft(w) / m, n))


def dealiased_product3(f: Field, g: Field, h: Field) -> Field:
    """Alias-free triple product (1/2-rule padding)."""
    n = f.grid.n
    m = 2 * n
    w = (
        _fine_samples(f.spectral, m)
        * _fine_samples(g.spectral, m)
        * _fine_samples(h.spectral, m)
    )
    return Field.from_spectral(f.grid, _truncate(np.fft.fft(w) / m, n))


def integral(f: Field) -> float:
    """Integral over the torus (= L * zero mode; exact for band-limited f)."""
    return float(f.grid.length * f.spectral[0].real)


def integral_cube(f: Field) -> float:
    """Integral of f^3, computed alias-free on a padded grid."""
    m = 2 * f.grid.n
    w = _fine_samples(f.spectral, m)
    return float(f.grid.length * np.mean(w**3))


# ---------------------------------------------------------------------------
# Snapshot formats
# ---------------------------------------------------------------------------


def write_snapshot_csv(f: Field, path) -> None:
    """Physical-space snapshot: header ``x,eta``, 17 significant digits."""
    with open(path, "w") as fh:
        fh.write("x,eta\n")
        for x, v in zip(f.grid.x, f.samples):
            fh.write(f"{x:.17g},{v:.17g}\n")


def write_spectral_csv(f: Field, path) -> None:
    """Spectral dump: header ``j,xi,re,im``."""
    n = f.grid.n
    j = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    with open(path, "w") as fh:
        fh.write("j,xi,re,im\n")
        for jj, xi, c in zip(j, f.grid.wavenumbers, f.spectral):
            fh.write(f"{jj},{xi:.17g},{c.real:.17g},{c.imag:.17g}\n")


def read_snapshot_csv(grid: Grid, path) -> Field:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.shape[0] != grid.n:
        raise ValueError(f"snapshot has {data.shape[0]} rows, grid has {grid.n}")
    return Field.from_samples(grid, data[:, 1])
