"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s`.  The heavy constructions
are shared through module-scoped fixtures; expect a few minutes of wall
time in total.  Reference desk configuration: d=1, n=4096, length=256.
"""

import numpy as np
import pytest

from cnlslab.dynamics import EvolveConfig, evolve
from cnlslab.experiments import ConstructionConfig, run_construction
from cnlslab.functionals import energy, linearized_action, mass, system_invariants
from cnlslab.grid import (
    ComplexField,
    FieldPair,
    make_grid,
    norm_l2,
    norm_linf,
    pair_difference,
    pair_norm,
    real_inner_l2,
    spectral_gradient,
    translate,
    zero_field,
)
from cnlslab.linops import coercivity_estimate, compute_spectral_report
from cnlslab.profiles import ground_state_1d, mass_squared, petviashvili
from cnlslab.solitons import SolitonFamily, SolitonParams, pair_solitons, soliton_field

from oracles import townes_shooting


def announce(num: int, name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"\n[ACCEPTANCE] criterion {num} ({name}): {status} {detail}", flush=True)


@pytest.fixture(scope="module")
def desk():
    grid = make_grid(1, 4096, 256.0)
    return grid, ground_state_1d(grid)


def sym_params(v, x0=0.0, omega=1.0, mu=1.0):
    return SolitonParams(omega=omega, gamma=0.0, x0=(x0,), v=(v,), mu=mu)


def sym_family(profile, v):
    return SolitonFamily(
        params=(sym_params(+v), sym_params(-v)), profiles=(profile, profile)
    )


def construction(profile, v, dt, record_every, schedule=(4.0, 6.0, 8.0, 10.0)):
    fam = sym_family(profile, v)
    cfg = ConstructionConfig(
        family=fam,
        T0=1.0,
        Tn_schedule=schedule,
        evolve=EvolveConfig(dt=dt, mu1=1.0, mu2=1.0, beta=0.5, record_every=record_every),
    )
    return run_construction(cfg)


@pytest.fixture(scope="module")
def centerpiece(desk):
    grid, prof = desk
    return construction(prof, 4.0, dt=2e-4, record_every=50)


@pytest.fixture(scope="module")
def centerpiece_v12(desk):
    grid, prof = desk
    return construction(prof, 6.0, dt=1e-4, record_every=20)


# ---------------------------------------------------------------------------

def single_soliton_error(grid, profile, dt):
    prm = sym_params(2.0)
    cfg = EvolveConfig(dt=dt, mu1=1.0, mu2=1.0, beta=0.0, record_every=10**9)
    p0 = FieldPair(soliton_field(prm, profile, 0.0, grid), zero_field(grid))
    traj = evolve(p0, 0.0, 10.0, cfg)
    ref = FieldPair(soliton_field(prm, profile, 10.0, grid), zero_field(grid))
    return pair_norm(pair_difference(traj.final_state, ref), "h1")


def test_criterion_01_scheme_fidelity(desk):
    grid, prof = desk
    # dt chosen to meet the stated error budget; the splitting is second
    # order, so the bound fixes the step size (see README)
    err = single_soliton_error(grid, prof, 2e-4)
    err_half = single_soliton_error(grid, prof, 1e-4)
    ratio = err / err_half
    ok = err < 1e-6 and 4.0 * 0.8 <= ratio <= 4.0 * 1.2
    announce(1, "scheme fidelity", ok, f"err={err:.3e} halving ratio={ratio:.2f}")
    assert err < 1e-6
    assert 3.2 <= ratio <= 4.8


def test_criterion_02_conservation(desk):
    grid, prof = desk
    fam = SolitonFamily(
        params=(sym_params(1.0, x0=-10.0), sym_params(-1.0, x0=10.0)),
        profiles=(prof, prof),
    )
    p0 = pair_solitons(fam, 0.0, grid)
    cfg = EvolveConfig(dt=1e-3, mu1=1.0, mu2=1.0, beta=0.5, record_every=200)

    def mon(t, state):
        inv = system_invariants(state, 1.0, 1.0, 0.5)
        return {
            "E": inv.total_energy,
            "M1": inv.masses[0],
            "M2": inv.masses[1],
            "P": inv.total_momentum[0],
        }

    traj = evolve(p0, 0.0, 20.0, cfg, monitors=[mon])
    rows = traj.monitor_rows
    e = np.array([r["E"] for r in rows])
    m1 = np.array([r["M1"] for r in rows])
    m2 = np.array([r["M2"] for r in rows])
    p = np.array([r["P"] for r in rows])
    T = 20.0
    mass_rate = max(np.abs(m1 - m1[0]).max() / m1[0], np.abs(m2 - m2[0]).max() / m2[0]) / T
    e_drift = np.abs(e - e[0]).max() / abs(e[0])
    p_drift = np.abs(p - p[0]).max()
    ok = mass_rate < 1e-12 and e_drift < 1e-6 and p_drift < 1e-8
    announce(2, "conservation", ok,
             f"mass/unit-t={mass_rate:.2e} energy={e_drift:.2e} momentum={p_drift:.2e}")
    assert mass_rate < 1e-12
    assert e_drift < 1e-6
    assert p_drift < 1e-8


def test_criterion_03_reversibility(desk):
    grid, prof = desk
    fam = SolitonFamily(
        params=(sym_params(1.0, x0=-10.0), sym_params(-1.0, x0=10.0)),
        profiles=(prof, prof),
    )
    p0 = pair_solitons(fam, 0.0, grid)
    fwd = EvolveConfig(dt=1e-3, mu1=1.0, mu2=1.0, beta=0.5, record_every=10**9)
    bwd = EvolveConfig(dt=1e-3, mu1=1.0, mu2=1.0, beta=0.5,
                       direction="backward", record_every=10**9)
    mid = evolve(p0, 0.0, 5.0, fwd).final_state
    back = evolve(mid, 5.0, 0.0, bwd).final_state
    err = pair_norm(pair_difference(back, p0), "h1")
    ok = err < 1e-10
    announce(3, "reversibility", ok, f"recovery err={err:.3e}")
    assert err < 1e-10


def _bound_and_rate_checks(report, rate):
    ok_bound = report.verdicts["bootstrap_ok_floored"]
    fit = report.fits[max(report.schedule)]["l2"]
    l2_rate = fit.rate if fit is not None else float("nan")
    ok_rate = fit is not None and l2_rate >= rate * 0.9
    return ok_bound, ok_rate, l2_rate


def test_criterion_04_construction_bound(centerpiece, centerpiece_v12):
    ok_b8, ok_r8, rate8 = _bound_and_rate_checks(centerpiece, 4.0)
    ok_b12, ok_r12, rate12 = _bound_and_rate_checks(centerpiece_v12, 6.0)
    ok = ok_b8 and ok_r8 and ok_b12 and ok_r12
    announce(4, "construction decay bound", ok,
             f"v*=8: floored_bound={ok_b8} l2_rate={rate8:.2f}; "
             f"v*=12: floored_bound={ok_b12} l2_rate={rate12:.2f}")
    assert ok_b8, "floored H1 error exceeded exp(-4t) in some run"
    assert ok_r8, f"fitted L2 rate {rate8} below 3.6"
    assert ok_b12, "floored H1 error exceeded exp(-6t) in some run"
    assert ok_r12, f"fitted L2 rate {rate12} below 5.4"


def test_criterion_05_interaction_decay(centerpiece):
    slope = centerpiece.fits[10.0]["interaction_slope"]
    ok = slope is not None and slope <= -6.0
    announce(5, "solitary wave interaction", ok, f"log-slope={slope:.2f}")
    assert ok, f"interaction log-slope {slope} above -6"


def test_criterion_06_almost_conservation(centerpiece):
    fit = centerpiece.fits[10.0]["action"]
    rate = fit.rate if fit is not None else float("nan")
    ok = fit is not None and rate >= 6.8
    announce(6, "almost conservation law", ok, f"action drift rate={rate:.2f}")
    assert ok, f"action drift decay rate {rate} below 6.8"


def test_criterion_07_compactness_proxy(centerpiece):
    c = centerpiece.cauchy
    ok = c is not None and c.passed_floored
    detail = f"diffs={['%.2e' % d for d in c.differences]} ratios={['%.1f' % r for r in c.ratios]}"
    announce(7, "initial data Cauchy differences", ok, detail)
    assert ok, f"consecutive differences fail the 10x-or-floor check: {detail}"


def test_criterion_08_linearized_spectra(desk):
    grid, prof = desk
    report = compute_spectral_report(prof, k=6, tol=1e-6)
    lam_plus = report.plus_eigenvalues
    lam_minus = report.minus_eigenvalues
    (dphi,) = spectral_gradient(prof.field)
    cos_t = abs(real_inner_l2(report.plus_eigenfunctions[1], dphi)) / (
        norm_l2(report.plus_eigenfunctions[1]) * norm_l2(dphi)
    )
    cos_g = abs(real_inner_l2(report.minus_eigenfunctions[0], prof.field)) / (
        norm_l2(report.minus_eigenfunctions[0]) * norm_l2(prof.field)
    )
    co = coercivity_estimate(
        prof, sym_params(0.0), trials=200, seed=2024, report=report
    )
    ok = (
        abs(lam_plus[0] + 3.0) < 1e-3
        and abs(lam_plus[1]) < 1e-6
        and cos_t > 1 - 1e-6
        and abs(lam_minus[0]) < 1e-6
        and cos_g > 1 - 1e-6
        and report.nu0 == 3
        and co.positive
    )
    announce(8, "linearized spectra", ok,
             f"L+ [{lam_plus[0]:.6f}, {lam_plus[1]:.2e}] L- [{lam_minus[0]:.2e}] "
             f"nu0={report.nu0} c0={co.c0:.3f} trials={co.trials_used}")
    assert abs(lam_plus[0] + 3.0) < 1e-3
    assert abs(lam_plus[1]) < 1e-6
    assert cos_t > 1 - 1e-6
    assert abs(lam_minus[0]) < 1e-6
    assert cos_g > 1 - 1e-6
    assert report.nu0 == 3
    assert co.positive and co.trials_used == 200


def test_criterion_09_townes_profile():
    grid = make_grid(2, [256, 256], [40.0, 40.0])
    prof = petviashvili(grid, tol=1e-12, max_iter=500)
    amp, norm_sq_oracle = townes_shooting()
    got = mass_squared(prof)
    rel = abs(got - norm_sq_oracle) / norm_sq_oracle
    ok = rel < 1e-2 and prof.residual < 1e-8 and abs(norm_sq_oracle - 11.70) < 0.01
    announce(9, "2D critical profile", ok,
             f"norm^2={got:.4f} oracle={norm_sq_oracle:.4f} residual={prof.residual:.2e}")
    assert abs(norm_sq_oracle - 11.70) < 0.01
    assert rel < 1e-2
    assert prof.residual < 1e-8


def _recentred_modulus(u: ComplexField) -> np.ndarray:
    """Shift the field so its modulus peak sits at the origin (subgrid)."""
    g = u.grid
    x = g.axes[0]
    dens = np.abs(u.values) ** 2
    j = int(np.argmax(dens))
    ym, y0, yp = dens[j - 1], dens[j], dens[(j + 1) % g.n[0]]
    delta = 0.5 * g.spacing[0] * (ym - yp) / (ym - 2 * y0 + yp)
    return np.abs(translate(u, -(x[j] + delta)).values)


def test_criterion_10_manakov_collision(desk):
    grid, prof = desk
    fam = SolitonFamily(
        params=(sym_params(2.0, x0=-10.0), sym_params(-2.0, x0=10.0)),
        profiles=(prof, prof),
    )
    p0 = pair_solitons(fam, 0.0, grid)
    cfg = EvolveConfig(dt=1e-3, mu1=1.0, mu2=1.0, beta=1.0, record_every=10**9)
    out = evolve(p0, 0.0, 10.0, cfg).final_state
    ref = np.abs(prof.field.values)  # incoming modulus, centered
    sup1 = np.abs(_recentred_modulus(out.first) - ref).max()
    sup2 = np.abs(_recentred_modulus(out.second) - ref).max()
    ok = max(sup1, sup2) < 1e-2
    announce(10, "integrable collision elasticity", ok,
             f"sup moduli diff = {sup1:.2e}, {sup2:.2e}")
    assert sup1 < 1e-2
    assert sup2 < 1e-2
