"""Boosted, scaled, phase-shifted solitary waves and their time evolution.

A solitary wave with parameters (omega, gamma, x0, v, mu) and stationary
profile Phi is

    R(t, x) = exp(i*(omega*t - |v|^2*t/4 + v.x/2 + gamma))
              * sqrt(omega/mu) * Phi(sqrt(omega)*(x - v*t - x0))

The moving center is reduced modulo the box (the Fourier-shift translation
is automatically periodic); profiles are evaluated at scaled arguments by
trigonometric interpolation of their samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import BoxTooSmallError
from .grid import ComplexField, FieldPair, Grid, _as_tuple
from .profiles import Profile

_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class SolitonParams:
    """Parameters of one solitary wave."""

    omega: float
    gamma: float
    x0: tuple[float, ...]
    v: tuple[float, ...]
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(float(c) for c in np.atleast_1d(self.x0)))
        object.__setattr__(self, "v", tuple(float(c) for c in np.atleast_1d(self.v)))
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if len(self.x0) != len(self.v):
            raise ValueError("x0 and v must have the same dimension")

    @property
    def dim(self) -> int:
        return len(self.v)


@dataclass(frozen=True)
class SolitonFamily:
    """A pair of solitary waves with the derived separation quantities."""

    params: tuple[SolitonParams, SolitonParams]
    profiles: tuple[Profile, Profile]

    @property
    def v_star(self) -> float:
        v1, v2 = np.asarray(self.params[0].v), np.asarray(self.params[1].v)
        return float(np.linalg.norm(v1 - v2))

    @property
    def omega_star(self) -> float:
        return 0.25 * min(self.params[0].omega, self.params[1].omega)

    @property
    def decay_rate(self) -> float:
        """sqrt(omega_star) * v_star, the separation-driven decay rate."""
        return float(np.sqrt(self.omega_star) * self.v_star)

    @property
    def omega_min(self) -> float:
        return min(self.params[0].omega, self.params[1].omega)


def rescale_samples(f: ComplexField, scale: float) -> NDArray:
    """Evaluate the trigonometric interpolant of f at scale*x, axis by axis.

    Scaled points that land outside the box are set to zero (the profile
    tail there is below truncation tolerance by the box sizing rule); this
    suppresses the spurious periodic images a plain interpolant would
    produce for scale > 1.
    """
    if scale == 1.0:
        return f.values.copy()
    g = f.grid
    values = f.values
    for axis in range(g.dim):
        x = g.axes[axis]
        y = scale * x
        half = 0.5 * g.length[axis]
        inside = np.abs(y) <= half
        k = g.wavenumbers[axis]
        fhat = np.fft.fft(values, axis=axis)
        # chunked dense evaluation of the interpolant
        # f(y) = (1/n) sum_m fhat_m exp(i k_m (y + L/2)); index 0 sits at -L/2
        n = g.n[axis]
        fhat_m = np.moveaxis(fhat, axis, 0).reshape(n, -1)
        res = np.zeros_like(fhat_m)
        chunk = max(1, (1 << 22) // n)
        for lo in range(0, n, chunk):
            hi = min(n, lo + chunk)
            e = np.exp(1j * np.outer(y[lo:hi] + half, k))
            res[lo:hi] = e @ fhat_m / n
        res = np.moveaxis(res.reshape((n,) + values.shape[:axis] + values.shape[axis + 1 :]), 0, axis)
        sl = [np.newaxis] * g.dim
        sl[axis] = slice(None)
        out = res * inside[tuple(sl)]
        values = out
    return values


class SolitonWave:
    """Precomputed machinery for evaluating one solitary wave at any time.

    The scaled envelope Phi(sqrt(omega)*x) is resampled once; each
    evaluation is then a Fourier shift plus a pointwise phase.  Accepts any
    complex envelope samples (used also to boost eigenfunctions).
    """

    def __init__(self, params: SolitonParams, envelope: ComplexField | Profile, grid: Grid):
        if isinstance(envelope, Profile):
            envelope = envelope.field
        if params.dim != grid.dim:
            raise ValueError(f"params dimension {params.dim} != grid dimension {grid.dim}")
        if envelope.grid != grid:
            raise ValueError("envelope must be sampled on the target grid")
        self.params = params
        self.grid = grid
        scale = float(np.sqrt(params.omega))
        scaled = envelope.values.copy() if scale == 1.0 else rescale_samples(envelope, scale)
        # an identity transform cannot self-overlap; drifting or rescaled
        # waves wrap their boundary tail around the torus, so that tail
        # must sit below truncation tolerance
        moving = scale != 1.0 or any(c != 0.0 for c in params.v) or any(
            c != 0.0 for c in params.x0
        )
        peak = np.abs(scaled).max()
        if moving and peak > 0:
            boundary = 0.0
            for axis in range(grid.dim):
                face = np.take(scaled, 0, axis=axis)
                boundary = max(boundary, float(np.abs(face).max()))
            if boundary > _TAIL_TOL * peak:
                raise BoxTooSmallError(
                    f"envelope tail at the box boundary is {boundary:.3e} "
                    f"({boundary / peak:.1e} of peak); the wrapped wave would "
                    "overlap itself"
                )
        self._scaled = scaled
        self._scaled_hat = np.fft.fftn(scaled)
        self._amp = float(np.sqrt(params.omega / params.mu))
        # v.x/2 over the grid, computed once
        vx = np.zeros(grid.shape)
        for j, x in enumerate(grid._broadcast(grid.axes)):
            vx = vx + 0.5 * params.v[j] * x
        self._vx = vx
        self._vsq = float(np.dot(params.v, params.v))

    def center(self, t: float) -> np.ndarray:
        return np.asarray(self.params.x0) + np.asarray(self.params.v) * t

    def field_at(self, t: float) -> ComplexField:
        p = self.params
        delta = self.center(t)
        if np.any(delta != 0.0):
            fhat = self._scaled_hat
            for j, k in enumerate(self.grid._broadcast(self.grid.wavenumbers)):
                fhat = fhat * np.exp(-1j * k * delta[j])
            env = np.fft.ifftn(fhat)
        else:
            env = self._scaled
        phase = p.omega * t - 0.25 * self._vsq * t + p.gamma
        return ComplexField(
            self.grid, self._amp * np.exp(1j * (self._vx + phase)) * env
        )


def soliton_field(params: SolitonParams, profile: Profile, t: float, grid: Grid) -> ComplexField:
    """Sample the solitary wave at time t on the grid."""
    return SolitonWave(params, profile, grid).field_at(t)


def pair_solitons(family: SolitonFamily, t: float, grid: Grid) -> FieldPair:
    """Componentwise soliton fields for the family at time t."""
    return FieldPair(
        soliton_field(family.params[0], family.profiles[0], t, grid),
        soliton_field(family.params[1], family.profiles[1], t, grid),
    )


def min_image_distance(grid: Grid, a, b) -> float:
    """Euclidean distance between two points on the torus (minimum image)."""
    a = _as_tuple(a, grid.dim, float)
    b = _as_tuple(b, grid.dim, float)
    d2 = 0.0
    for j in range(grid.dim):
        L = grid.length[j]
        w = (a[j] - b[j] + 0.5 * L) % L - 0.5 * L
        d2 += w * w
    return float(np.sqrt(d2))


def check_seam_distance(family: SolitonFamily, grid: Grid, t0: float, t1: float, samples: int = 512) -> float:
    """Minimum gap between the two centers through the periodic seam.

    The direct (interior) approach of the solitons is physical; what the
    box must prevent is their unwrapped separation closing up on the box
    circumference.  Per axis the seam gap is L - |c1 - c2| (negative once
    the separation has fully wrapped).  Raises BoxTooSmallError if the gap
    dips below 20/sqrt(omega_min) anywhere on [t0, t1].
    """
    x1, v1 = np.asarray(family.params[0].x0), np.asarray(family.params[0].v)
    x2, v2 = np.asarray(family.params[1].x0), np.asarray(family.params[1].v)
    ts = np.linspace(min(t0, t1), max(t0, t1), samples)
    gap = np.inf
    for t in ts:
        sep = np.abs((x1 + v1 * t) - (x2 + v2 * t))
        gap = min(gap, min(L - s for L, s in zip(grid.length, sep)))
    floor = 20.0 / np.sqrt(family.omega_min)
    if gap < floor:
        raise BoxTooSmallError(
            f"seam gap between soliton centers shrinks to {gap:.2f} "
            f"(minimum allowed {floor:.2f}); enlarge the box"
        )
    return float(gap)
