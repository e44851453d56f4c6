"""Conserved and almost-conserved quantities.

Scalar invariants of i u_t + Lap(u) + mu|u|^2 u = 0:

    E(u, mu) = 1/2 ||grad u||^2 - mu/4 ||u||_L4^4
    M(u)     = 1/2 ||u||_L2^2
    P(u)     = 1/2 Im int u grad(conj u)

With this momentum convention a wave of velocity v built on a real profile
has P = -(v/4)||R||^2 (the sign is pinned by the quadrature oracle in the
tests).  The coupled-system invariants add the cross term
-(beta/2) int |u1|^2 |u2|^2 to the energy; the total momentum and the two
masses are componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .grid import ComplexField, FieldPair, integrate, norm_l2, norm_lp
from .solitons import SolitonFamily, SolitonParams


@dataclass(frozen=True)
class ScalarInvariants:
    energy: float
    mass: float
    momentum: NDArray


@dataclass(frozen=True)
class SystemInvariants:
    total_energy: float
    total_momentum: NDArray
    masses: tuple[float, float]
    coupling_overlap: float


def mass(u: ComplexField) -> float:
    return 0.5 * norm_l2(u) ** 2


def momentum(u: ComplexField) -> NDArray:
    """P = 1/2 Im int u grad(conj u), one component per axis."""
    g = u.grid
    uhat2 = np.abs(np.fft.fftn(u.values)) ** 2
    scale = g.volume_element / g.npoints
    # Im int u d_j(conj u) = -sum_k k_j |uhat_k|^2 (Parseval)
    return np.array([-0.5 * scale * float(np.sum(kg * uhat2)) for kg in g.kgrad])


def _dirichlet(u: ComplexField) -> float:
    """||grad u||^2 as the spectral Dirichlet form <-Lap u, u>.

    Uses the full |k|^2 table (Nyquist included), matching the Laplacian
    convention of the linearized operators and the H1 norm.
    """
    g = u.grid
    uhat2 = np.abs(np.fft.fftn(u.values)) ** 2
    return float(g.volume_element / g.npoints * np.sum(g.k2 * uhat2))


def energy(u: ComplexField, mu: float) -> float:
    return float(0.5 * _dirichlet(u) - 0.25 * mu * norm_lp(u, 4) ** 4)


def scalar_invariants(u: ComplexField, mu: float) -> ScalarInvariants:
    return ScalarInvariants(energy=energy(u, mu), mass=mass(u), momentum=momentum(u))


def coupling_overlap(p: FieldPair) -> float:
    """int |u1|^2 |u2|^2, the coupling-energy integrand."""
    return float(
        integrate(p.grid, np.abs(p.first.values) ** 2 * np.abs(p.second.values) ** 2).real
    )


def system_invariants(p: FieldPair, mu1: float, mu2: float, beta: float) -> SystemInvariants:
    overlap = coupling_overlap(p)
    total_energy = energy(p.first, mu1) + energy(p.second, mu2) - 0.5 * beta * overlap
    total_momentum = momentum(p.first) + momentum(p.second)
    return SystemInvariants(
        total_energy=float(total_energy),
        total_momentum=total_momentum,
        masses=(mass(p.first), mass(p.second)),
        coupling_overlap=overlap,
    )


def action_S(u: ComplexField, mu: float, omega: float, v) -> float:
    """S = E(u, mu) + (omega + |v|^2/4) M(u) + v . P(u)."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    return float(
        energy(u, mu)
        + (omega + 0.25 * float(v @ v)) * mass(u)
        + float(v @ momentum(u))
    )


def vector_action(p: FieldPair, family: SolitonFamily) -> float:
    """Sum of per-component actions with each component's parameters."""
    s = 0.0
    for u, prm in zip((p.first, p.second), family.params):
        s += action_S(u, prm.mu, prm.omega, prm.v)
    return float(s)


def linearized_action(
    u_base: ComplexField, eps: ComplexField, mu: float, omega: float, v
) -> float:
    """Quadratic form <S''(u_base) eps, eps>, assembled explicitly.

    H = int |grad eps|^2 + (omega + |v|^2/4) int |eps|^2
        + v . Im int eps grad(conj eps)
        - mu int (2|u|^2 |eps|^2 + Re(conj(u)^2 eps^2))

    Agrees with the second central difference of S to O(h^2); the tests
    pin that agreement to guard against sign errors.
    """
    if u_base.grid != eps.grid:
        raise ValueError("mismatched grids")
    g = eps.grid
    v = np.atleast_1d(np.asarray(v, dtype=float))
    quad = _dirichlet(eps)
    quad += (omega + 0.25 * float(v @ v)) * norm_l2(eps) ** 2
    quad += float(v @ momentum(eps)) * 2.0
    u2 = np.abs(u_base.values) ** 2
    cross = 2.0 * u2 * np.abs(eps.values) ** 2 + (
        np.conj(u_base.values) ** 2 * eps.values**2
    ).real
    quad -= mu * float(integrate(g, cross).real)
    return float(quad)


def vector_linearized_action(
    pair_base: FieldPair, pair_eps: FieldPair, family: SolitonFamily
) -> float:
    """Sum of componentwise linearized actions."""
    if pair_base.grid != pair_eps.grid:
        raise ValueError("mismatched grids")
    total = 0.0
    for ub, ue, prm in zip(
        (pair_base.first, pair_base.second),
        (pair_eps.first, pair_eps.second),
        family.params,
    ):
        total += linearized_action(ub, ue, prm.mu, prm.omega, prm.v)
    return float(total)


def linearized_action_params(
    u_base: ComplexField, eps: ComplexField, params: SolitonParams
) -> float:
    return linearized_action(u_base, eps, params.mu, params.omega, params.v)
