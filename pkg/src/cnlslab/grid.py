"""Periodic spectral grid: transforms, derivatives, norms, quadrature.

Fields live on a uniform periodic box with axes centered on the origin,
x in [-L/2, L/2) per axis.  Derivatives are exact for the trigonometric
interpolant; quadrature is the rectangle rule, spectrally accurate for
smooth periodic integrands.  All operations here are pure functions on
immutable inputs and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray


def _as_tuple(value, dim: int, caster) -> tuple:
    if np.isscalar(value):
        return tuple(caster(value) for _ in range(dim))
    out = tuple(caster(v) for v in value)
    if len(out) != dim:
        raise ValueError(f"expected {dim} per-axis values, got {len(out)}")
    return out


@dataclass(frozen=True)
class Grid:
    """Periodic computational box.

    Attributes
    ----------
    dim : int
        Spatial dimension, 1 to 3.
    n : tuple of int
        Points per axis, each a power of two.
    length : tuple of float
        Physical extent per axis.
    spacing : tuple of float
        length/n per axis (exact).
    axes : tuple of 1D arrays
        Centered coordinates per axis, x_j in [-L/2, L/2).
    wavenumbers : tuple of 1D arrays
        k = 2*pi*m/L in FFT ordering (Nyquist carried as -n/2).
    """

    dim: int
    n: tuple[int, ...]
    length: tuple[float, ...]
    spacing: tuple[float, ...] = field(init=False, compare=False)
    axes: tuple[NDArray, ...] = field(init=False, compare=False, repr=False)
    wavenumbers: tuple[NDArray, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        spacing = tuple(L / m for L, m in zip(self.length, self.n))
        axes = tuple(
            -0.5 * L + h * np.arange(m)
            for L, h, m in zip(self.length, spacing, self.n)
        )
        waves = tuple(
            2.0 * np.pi * np.fft.fftfreq(m, d=h)
            for m, h in zip(self.n, spacing)
        )
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "wavenumbers", waves)
        # |k|^2 mesh for Laplacians and Sobolev weights
        object.__setattr__(self, "_k2", sum(k**2 for k in self._broadcast(waves)))
        # gradient tables zero the Nyquist mode (odd-derivative ambiguity)
        grad = []
        for j, k in enumerate(waves):
            kg = k.copy()
            kg[self.n[j] // 2] = 0.0
            grad.append(kg)
        object.__setattr__(self, "_kgrad", tuple(self._broadcast(grad)))
        # 2/3-rule mask for cubic dealiasing
        mask = np.ones(self.shape, dtype=bool)
        for j, k in enumerate(self._broadcast(waves)):
            kcut = (2.0 / 3.0) * np.abs(waves[j]).max()
            mask &= np.abs(k) <= kcut + 1e-12
        object.__setattr__(self, "_dealias_mask", mask)

    def _broadcast(self, tables: Sequence[NDArray]) -> list[NDArray]:
        out = []
        for j, t in enumerate(tables):
            shape = [1] * self.dim
            shape[j] = self.n[j]
            out.append(t.reshape(shape))
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def npoints(self) -> int:
        return int(np.prod(self.n))

    @property
    def volume_element(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def k2(self) -> NDArray:
        """|k|^2 mesh (full table, Nyquist included)."""
        return self._k2

    @property
    def kgrad(self) -> tuple[NDArray, ...]:
        """Broadcastable per-axis wavenumbers with Nyquist zeroed."""
        return self._kgrad

    @property
    def dealias_mask(self) -> NDArray:
        return self._dealias_mask

    def meshes(self) -> list[NDArray]:
        """Dense coordinate meshes, ij indexing."""
        if self.dim == 1:
            return [self.axes[0]]
        return list(np.meshgrid(*self.axes, indexing="ij"))

    def radius(self) -> NDArray:
        """Euclidean distance from the box center at every grid point."""
        return np.sqrt(sum(x**2 for x in self._broadcast(self.axes)))


def make_grid(dim: int, n, length) -> Grid:
    """Build a periodic grid.

    Parameters
    ----------
    dim : int in {1, 2, 3}
    n : int or sequence of int
        Points per axis; each must be a power of two >= 8.
    length : float or sequence of float
        Box extent per axis; each must be positive.
    """
    if dim not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
    nt = _as_tuple(n, dim, int)
    lt = _as_tuple(length, dim, float)
    for m in nt:
        if m < 8 or (m & (m - 1)) != 0:
            raise ValueError(f"points per axis must be a power of two >= 8, got {m}")
    for L in lt:
        if L <= 0:
            raise ValueError(f"box length must be positive, got {L}")
    return Grid(dim=dim, n=nt, length=lt)


@dataclass(frozen=True)
class ComplexField:
    """Complex samples of a wavefunction on a grid.

    Values are treated as immutable; operations return new fields.
    """

    grid: Grid
    values: NDArray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ValueError("field contains non-finite entries")
        object.__setattr__(self, "values", v)

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.values.copy())


@dataclass(frozen=True)
class FieldPair:
    """Two-component state (u1, u2) on a shared grid."""

    first: ComplexField
    second: ComplexField

    def __post_init__(self):
        if self.first.grid != self.second.grid:
            raise ValueError("pair components live on different grids")

    @property
    def grid(self) -> Grid:
        return self.first.grid


def zero_field(grid: Grid) -> ComplexField:
    return ComplexField(grid, np.zeros(grid.shape, dtype=np.complex128))


def field_from(grid: Grid, values) -> ComplexField:
    return ComplexField(grid, np.asarray(values, dtype=np.complex128))


# ---------------------------------------------------------------------------
# transforms and derivatives
# ---------------------------------------------------------------------------

def fftn(grid: Grid, values: NDArray) -> NDArray:
    return np.fft.fftn(values)


def ifftn(grid: Grid, values: NDArray) -> NDArray:
    return np.fft.ifftn(values)


def spectral_gradient(f: ComplexField) -> list[ComplexField]:
    """Exact gradient of the trigonometric interpolant, one field per axis.

    The Nyquist mode is zeroed (its odd derivative is ambiguous on the grid).
    """
    g = f.grid
    fhat = np.fft.fftn(f.values)
    return [
        ComplexField(g, np.fft.ifftn(1j * kg * fhat)) for kg in g.kgrad
    ]


def laplacian(f: ComplexField) -> ComplexField:
    g = f.grid
    return ComplexField(g, np.fft.ifftn(-g.k2 * np.fft.fftn(f.values)))


def translate(f: ComplexField, delta) -> ComplexField:
    """Translate a field by an arbitrary (non-grid) offset via Fourier shift.

    Exact for the trigonometric interpolant and automatically periodic in
    the offset.
    """
    g = f.grid
    d = _as_tuple(delta, g.dim, float)
    fhat = np.fft.fftn(f.values)
    for j, k in enumerate(g._broadcast(g.wavenumbers)):
        fhat = fhat * np.exp(-1j * k * d[j])
    return ComplexField(g, np.fft.ifftn(fhat))


# ---------------------------------------------------------------------------
# quadrature and norms
# ---------------------------------------------------------------------------

def integrate(grid: Grid, values: NDArray):
    """Rectangle-rule integral over the box."""
    return grid.volume_element * values.sum()


def inner_l2(f: ComplexField, g: ComplexField) -> complex:
    """Complex L2 inner product <f, g> = integral of f * conj(g)."""
    if f.grid != g.grid:
        raise ValueError("mismatched grids")
    return complex(integrate(f.grid, f.values * np.conj(g.values)))


def real_inner_l2(f: ComplexField, g: ComplexField) -> float:
    """Real L2 pairing Re integral of f * conj(g)."""
    return inner_l2(f, g).real


def norm_l2(f: ComplexField) -> float:
    """L2 norm via the discrete Parseval identity."""
    g = f.grid
    fhat = np.fft.fftn(f.values)
    return float(np.sqrt(g.volume_element / g.npoints * np.sum(np.abs(fhat) ** 2)))


def norm_h1(f: ComplexField) -> float:
    """H1 norm: sum of (1+|k|^2)-weighted spectral energies."""
    g = f.grid
    fhat = np.fft.fftn(f.values)
    return float(
        np.sqrt(g.volume_element / g.npoints * np.sum((1.0 + g.k2) * np.abs(fhat) ** 2))
    )


def norm_lp(f: ComplexField, p: int) -> float:
    """Lp norm by quadrature; p restricted to the exponents actually used."""
    if p not in (4, 6):
        raise ValueError(f"p must be 4 or 6, got {p}")
    g = f.grid
    return float(integrate(g, np.abs(f.values) ** p) ** (1.0 / p))


def norm_linf(f: ComplexField) -> float:
    return float(np.abs(f.values).max())


def pair_norm(p: FieldPair, kind: str = "l2") -> float:
    """Product-space norm: sqrt of the sum of squared component norms.

    kind is "l2" (L2 x L2) or "h1" (H1 x H1).
    """
    if kind == "l2":
        a, b = norm_l2(p.first), norm_l2(p.second)
    elif kind == "h1":
        a, b = norm_h1(p.first), norm_h1(p.second)
    else:
        raise ValueError(f"unknown pair norm kind {kind!r}")
    return float(np.hypot(a, b))


def pair_difference(a: FieldPair, b: FieldPair) -> FieldPair:
    if a.grid != b.grid:
        raise ValueError("mismatched grids")
    return FieldPair(
        ComplexField(a.grid, a.first.values - b.first.values),
        ComplexField(a.grid, a.second.values - b.second.values),
    )


def box_sizing_length(max_x0: float, max_v: float, t_max: float, omega_min: float) -> float:
    """Minimum box extent so soliton tails stay below 1e-12 of peak.

    Rule: length >= 2*(max|x0| + max|v|*T) + 40/sqrt(omega_min).
    """
    return 2.0 * (max_x0 + max_v * t_max) + 40.0 / np.sqrt(omega_min)
