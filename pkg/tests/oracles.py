"""Independent oracles used to pin expected values.

These deliberately avoid the package's own spectral machinery: finite
differences for derivatives, an ODE shooting method for the 2D ground
state, plain quadrature for integrals.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp


def central_difference(values: np.ndarray, spacing: float) -> np.ndarray:
    """Second-order periodic central difference."""
    return (np.roll(values, -1) - np.roll(values, 1)) / (2.0 * spacing)


def townes_shooting(rmax: float = 25.0, bisections: int = 80) -> tuple[float, float]:
    """Radial shooting for the 2D ground state of psi'' + psi'/r - psi + psi^3 = 0.

    Returns (peak amplitude, squared L2 norm over the plane).  Overshoot
    (psi crosses zero) lowers the amplitude bracket; undershoot (psi turns
    back up while positive) raises it.
    """

    def rhs(r, y):
        psi, dpsi = y
        drag = dpsi / r if r > 0 else 0.0
        return [dpsi, psi - psi**3 - drag]

    def shoot(amp):
        r0 = 1e-6
        y0 = [amp + (amp - amp**3) * r0**2 / 4.0, (amp - amp**3) * r0 / 2.0]
        cross = lambda r, y: y[0]
        cross.terminal, cross.direction = True, -1
        turn = lambda r, y: y[1]
        turn.terminal, turn.direction = True, 1
        return solve_ivp(
            rhs, (r0, rmax), y0, events=(cross, turn),
            rtol=1e-12, atol=1e-14, dense_output=True, max_step=0.1,
        )

    lo, hi = 2.0, 2.5
    for _ in range(bisections):
        mid = 0.5 * (lo + hi)
        sol = shoot(mid)
        if sol.t_events[0].size:
            hi = mid
        else:
            lo = mid
    amp = 0.5 * (lo + hi)
    sol = shoot(amp)
    rs = np.linspace(1e-6, sol.t[-1], 20001)
    psi = sol.sol(rs)[0]
    norm_sq = 2.0 * np.pi * np.trapezoid(psi**2 * rs, rs)
    return amp, float(norm_sq)


def quadrature_momentum(values: np.ndarray, spacing: float) -> float:
    """1/2 Im int u du/dx-bar by central differences and rectangle rule (1D)."""
    du_conj = central_difference(np.conj(values), spacing)
    return float(0.5 * spacing * np.sum(values * du_conj).imag)
