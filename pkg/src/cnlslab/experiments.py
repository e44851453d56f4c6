"""Backward-in-time construction of two-speed solitary waves and the
quantitative monitors attached to it.

For each final time Tn in a schedule, the final data are the exact
soliton pair R(Tn); the system is integrated backward to T0 while the
deviation eps = u - R and every tracked quantity are recorded.  A
decoupled control run (beta = 0), for which the soliton pair is an exact
solution, measures the discretization floor; verdicts are reported both
raw and with twice that floor subtracted so scheme error cannot produce
spurious violations.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .dynamics import EvolveConfig, evolve
from .errors import BlowUpError, BoxTooSmallError, ConfigError
from .functionals import coupling_overlap, vector_action
from .grid import (
    ComplexField,
    FieldPair,
    Grid,
    box_sizing_length,
    integrate,
    laplacian,
    pair_difference,
    pair_norm,
    spectral_gradient,
)
from .solitons import SolitonFamily, SolitonWave, check_seam_distance, pair_solitons

CSV_COLUMNS = [
    "t",
    "err_H1",
    "bound",
    "err_L2",
    "action_drift",
    "interaction_plain",
    "interaction_grad",
    "overlap",
    "tail_mass",
    "source_norm",
    "bootstrap_flag",
    # extra columns past the documented core
    "err_floor",
    "bootstrap_flag_floored",
    "linear_norm",
    "nonlinear_norm",
]


# ---------------------------------------------------------------------------
# small fitting helper
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateFit:
    rate: float
    log_amplitude: float
    r_squared: float
    samples: int

    @property
    def flagged(self) -> bool:
        return self.r_squared < 0.9


def rate_fit(times, values) -> RateFit:
    """Least-squares exponential fit: values ~ exp(log_amplitude - rate*t).

    Requires positive values and at least 5 samples; fits with r^2 below
    0.9 are flagged.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.size < 5:
        raise ValueError(f"need at least 5 samples, got {t.size}")
    if np.any(v <= 0):
        raise ValueError("values must be positive for a log-linear fit")
    y = np.log(v)
    A = np.vstack([np.ones_like(t), -t]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return RateFit(rate=float(coef[1]), log_amplitude=float(coef[0]), r_squared=r2, samples=t.size)


# ---------------------------------------------------------------------------
# row-level monitors
# ---------------------------------------------------------------------------

def bootstrap_monitor(err: float, bound: float) -> str:
    """Classify one row against the decay envelope.

    "improved" when err <= bound/2 (the self-improving regime),
    "satisfied" when err <= bound, "violated" otherwise.
    """
    if err <= 0.5 * bound:
        return "improved"
    if err <= bound:
        return "satisfied"
    return "violated"


def smoothstep(s: np.ndarray) -> np.ndarray:
    """Cubic ramp: 0 below 0, 1 above 1, monotone, |tau'| <= 1.5."""
    s = np.clip(s, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def tail_mass(p: FieldPair, rho: float, kappa: float) -> float:
    """Half the pair mass weighted by the radial cutoff tau((|x|-rho)/kappa)."""
    if rho <= 0 or kappa <= 0:
        raise ValueError("rho and kappa must be positive")
    g = p.grid
    if rho + kappa > 0.5 * min(g.length):
        raise ValueError(
            f"cutoff support rho+kappa={rho + kappa} exceeds half the box "
            f"{0.5 * min(g.length)}; it would wrap"
        )
    w = smoothstep((g.radius() - rho) / kappa)
    dens = np.abs(p.first.values) ** 2 + np.abs(p.second.values) ** 2
    return float(0.5 * integrate(g, dens * w).real)


def interaction_monitor(family: SolitonFamily, t: float, grid: Grid) -> tuple[float, float]:
    """L2 norms of |R1||R2| and of (|R1|+|grad R1|)(|R2|+|grad R2|)."""
    pair = pair_solitons(family, t, grid)
    return _interaction_from_fields(pair.first, pair.second)


def _interaction_from_fields(r1: ComplexField, r2: ComplexField) -> tuple[float, float]:
    g = r1.grid
    a1, a2 = np.abs(r1.values), np.abs(r2.values)
    plain = float(np.sqrt(integrate(g, (a1 * a2) ** 2).real))
    g1 = a1 + sum(np.abs(d.values) for d in spectral_gradient(r1))
    g2 = a2 + sum(np.abs(d.values) for d in spectral_gradient(r2))
    grad = float(np.sqrt(integrate(g, (g1 * g2) ** 2).real))
    return plain, grad


def l2_monitor(eps_pair: FieldPair) -> float:
    return pair_norm(eps_pair, "l2")


def action_drift_monitor(pair: FieldPair, family: SolitonFamily, reference_value: float) -> float:
    return abs(vector_action(pair, family) - reference_value)


def residual_decomposition(
    eps_pair: FieldPair,
    family: SolitonFamily,
    t: float,
    mu1: float,
    mu2: float,
    beta: float,
) -> tuple[float, float, float]:
    """L2 x L2 norms of the linear, nonlinear and source parts of the
    deviation equation i eps_t + L(eps) + N(eps) + F = 0."""
    r = pair_solitons(family, t, eps_pair.grid)
    return _residual_decomposition_at(eps_pair, r.first, r.second, mu1, mu2, beta)


def _residual_decomposition_at(
    eps_pair: FieldPair,
    r1f: ComplexField,
    r2f: ComplexField,
    mu1: float,
    mu2: float,
    beta: float,
) -> tuple[float, float, float]:
    g = eps_pair.grid
    e1, e2 = eps_pair.first.values, eps_pair.second.values
    r1, r2 = r1f.values, r2f.values
    a1, a2 = np.abs(r1) ** 2, np.abs(r2) ** 2

    lap1 = laplacian(eps_pair.first).values
    lap2 = laplacian(eps_pair.second).values
    lin1 = (
        lap1
        + (2 * mu1 * a1 + beta * a2) * e1
        + mu1 * r1**2 * np.conj(e1)
        + beta * (r1 * np.conj(r2) * e2 + r1 * r2 * np.conj(e2))
    )
    lin2 = (
        lap2
        + (2 * mu2 * a2 + beta * a1) * e2
        + mu2 * r2**2 * np.conj(e2)
        + beta * (np.conj(r1) * r2 * e1 + r1 * r2 * np.conj(e1))
    )
    non1 = mu1 * (np.conj(r1) * e1**2 + 2 * r1 * np.abs(e1) ** 2 + np.abs(e1) ** 2 * e1) + beta * (
        r2 * np.conj(e2) * e1 + np.conj(r2) * e2 * e1 + r1 * np.abs(e2) ** 2 + np.abs(e2) ** 2 * e1
    )
    non2 = mu2 * (np.conj(r2) * e2**2 + 2 * r2 * np.abs(e2) ** 2 + np.abs(e2) ** 2 * e2) + beta * (
        r1 * np.conj(e1) * e2 + np.conj(r1) * e1 * e2 + r2 * np.abs(e1) ** 2 + np.abs(e1) ** 2 * e2
    )
    # the coupling sources the first component through |R2|^2 R1 and vice versa
    src1 = beta * a2 * r1
    src2 = beta * a1 * r2

    def pnorm(w1, w2):
        return float(
            np.sqrt(integrate(g, np.abs(w1) ** 2).real + integrate(g, np.abs(w2) ** 2).real)
        )

    return pnorm(lin1, lin2), pnorm(non1, non2), pnorm(src1, src2)


def default_tail_cutoff(family: SolitonFamily, grid: Grid, t0: float, delta: float = 1e-4) -> tuple[float, float]:
    """Radius enclosing all but delta/4 of the soliton mass at t0, plus a
    ramp width fitting inside the box."""
    pair = pair_solitons(family, t0, grid)
    dens = np.abs(pair.first.values) ** 2 + np.abs(pair.second.values) ** 2
    r = grid.radius().reshape(-1)
    d = dens.reshape(-1)
    order = np.argsort(r)
    cum = np.cumsum(d[order][::-1])[::-1] * grid.volume_element
    idx = np.searchsorted(-cum, -(0.25 * delta))
    rho = float(r[order][min(idx, r.size - 1)]) + min(grid.spacing)
    half = 0.5 * min(grid.length)
    kappa = min(8.0 / np.sqrt(family.omega_min), 0.5 * (half - rho))
    if kappa <= 0:
        raise BoxTooSmallError("no room for the radial cutoff ramp inside the box")
    return rho, kappa


# ---------------------------------------------------------------------------
# the construction experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonitorSettings:
    tail_rho: float | None = None
    tail_kappa: float | None = None
    interaction_window: tuple[float, float] = (1.0, 3.0)


@dataclass(frozen=True)
class ConstructionConfig:
    family: SolitonFamily
    T0: float
    Tn_schedule: tuple[float, ...]
    evolve: EvolveConfig
    monitors: MonitorSettings = MonitorSettings()
    seed: int = 0

    def __post_init__(self):
        sched = tuple(float(t) for t in self.Tn_schedule)
        object.__setattr__(self, "Tn_schedule", sched)
        if not sched:
            raise ConfigError("empty final-time schedule")
        if any(b <= a for a, b in zip(sched, sched[1:])):
            raise ConfigError("final-time schedule must be strictly increasing")
        if self.T0 > sched[0]:
            raise ConfigError("T0 must not exceed the first schedule entry")


@dataclass
class TnSeries:
    Tn: float
    times: np.ndarray
    columns: dict
    final_state: FieldPair
    control_final_state: FieldPair


@dataclass
class CauchyResult:
    pairs: list[tuple[float, float]]
    differences: list[float]
    control_differences: list[float]
    ratios: list[float]
    fitted_rate: float | None
    passed_raw: bool
    passed_floored: bool


@dataclass
class ConstructionReport:
    rate: float
    v_star: float
    omega_star: float
    T0: float
    schedule: tuple[float, ...]
    runs: list[TnSeries]
    fits: dict
    cauchy: CauchyResult | None
    verdicts: dict


def _series_run(
    family: SolitonFamily,
    Tn: float,
    T0: float,
    ecfg: EvolveConfig,
    rate: float,
    rho: float,
    kappa: float,
) -> tuple[np.ndarray, dict, FieldPair]:
    """One backward run Tn -> T0 with every monitor recorded per row."""
    grid = family.profiles[0].grid
    waves = (
        SolitonWave(family.params[0], family.profiles[0], grid),
        SolitonWave(family.params[1], family.profiles[1], grid),
    )
    final_data = FieldPair(waves[0].field_at(Tn), waves[1].field_at(Tn))
    s_ref = vector_action(final_data, family)
    mu1, mu2, beta = ecfg.mu1, ecfg.mu2, ecfg.beta

    def row(t: float, state: FieldPair) -> dict:
        r1 = waves[0].field_at(t)
        r2 = waves[1].field_at(t)
        eps = FieldPair(
            ComplexField(grid, state.first.values - r1.values),
            ComplexField(grid, state.second.values - r2.values),
        )
        inter_plain, inter_grad = _interaction_from_fields(r1, r2)
        lin_n, non_n, src_n = _residual_decomposition_at(eps, r1, r2, mu1, mu2, beta)
        return {
            "err_H1": pair_norm(eps, "h1"),
            "err_L2": pair_norm(eps, "l2"),
            "bound": float(np.exp(-rate * t)),
            "action_drift": action_drift_monitor(state, family, s_ref),
            "interaction_plain": inter_plain,
            "interaction_grad": inter_grad,
            "overlap": coupling_overlap(state),
            "tail_mass": tail_mass(state, rho, kappa),
            "source_norm": src_n,
            "linear_norm": lin_n,
            "nonlinear_norm": non_n,
        }

    back = replace(ecfg, direction="backward")
    traj = evolve(final_data, Tn, T0, back, monitors=[row])
    times = traj.times
    columns = {
        key: np.array([r[key] for r in traj.monitor_rows])
        for key in traj.monitor_rows[0]
        if key != "t"
    }
    return times, columns, traj.final_state


def run_construction(cfg: ConstructionConfig, jobs: int = 1) -> ConstructionReport:
    """Run the full schedule (with decoupled controls), assemble the report."""
    family = cfg.family
    grid = family.profiles[0].grid
    rate = family.decay_rate
    t_max = max(cfg.Tn_schedule)

    max_x0 = max(float(np.linalg.norm(p.x0)) for p in family.params)
    max_v = max(float(np.linalg.norm(p.v)) for p in family.params)
    needed = box_sizing_length(max_x0, max_v, t_max, family.omega_min)
    if min(grid.length) < needed:
        raise BoxTooSmallError(
            f"box length {min(grid.length)} below the sizing rule minimum {needed:.1f} "
            f"for final time {t_max}"
        )
    check_seam_distance(family, grid, cfg.T0, t_max)

    rho = cfg.monitors.tail_rho
    kappa = cfg.monitors.tail_kappa
    if rho is None or kappa is None:
        auto_rho, auto_kappa = default_tail_cutoff(family, grid, cfg.T0)
        rho = rho if rho is not None else auto_rho
        kappa = kappa if kappa is not None else auto_kappa

    control_cfg = replace(cfg.evolve, beta=0.0)
    tasks = []
    for tn in cfg.Tn_schedule:
        tasks.append((family, tn, cfg.T0, cfg.evolve, rate, rho, kappa))
        tasks.append((family, tn, cfg.T0, control_cfg, rate, rho, kappa))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_series_run_star, tasks))
    else:
        results = [_series_run_star(t) for t in tasks]

    runs: list[TnSeries] = []
    for i, tn in enumerate(cfg.Tn_schedule):
        times, cols, final_state = results[2 * i]
        _, ctrl_cols, ctrl_final = results[2 * i + 1]
        cols["err_floor"] = ctrl_cols["err_H1"]
        cols["err_L2_floor"] = ctrl_cols["err_L2"]
        cols["action_drift_floor"] = ctrl_cols["action_drift"]
        cols["bootstrap_flag"] = np.array(
            [bootstrap_monitor(e, b) for e, b in zip(cols["err_H1"], cols["bound"])]
        )
        floored = np.maximum(cols["err_H1"] - 2.0 * cols["err_floor"], 0.0)
        cols["bootstrap_flag_floored"] = np.array(
            [bootstrap_monitor(e, b) for e, b in zip(floored, cols["bound"])]
        )
        runs.append(
            TnSeries(
                Tn=tn,
                times=times,
                columns=cols,
                final_state=final_state,
                control_final_state=ctrl_final,
            )
        )

    fits = {run.Tn: _fit_run(run, rate, cfg.monitors.interaction_window) for run in runs}
    cauchy = cauchy_check_runs(runs) if len(runs) >= 2 else None
    verdicts = _verdicts(runs, fits, cauchy, rate)
    return ConstructionReport(
        rate=rate,
        v_star=family.v_star,
        omega_star=family.omega_star,
        T0=cfg.T0,
        schedule=cfg.Tn_schedule,
        runs=runs,
        fits=fits,
        cauchy=cauchy,
        verdicts=verdicts,
    )


def _series_run_star(args):
    family, tn, t0, ecfg, rate, rho, kappa = args
    return _series_run(family, tn, t0, ecfg, rate, rho, kappa)


def _masked_fit(times, values, floor, min_value=1e-13) -> RateFit | None:
    mask = values > np.maximum(10.0 * floor, min_value)
    if np.count_nonzero(mask) < 5:
        return None
    return rate_fit(times[mask], values[mask])


def _fit_run(run: TnSeries, rate: float, window: tuple[float, float]) -> dict:
    cols = run.columns
    out: dict = {}
    l2 = _masked_fit(run.times, cols["err_L2"], cols["err_L2_floor"])
    out["l2"] = l2
    out["l2_envelope_C"] = (
        float(np.exp(l2.log_amplitude) * rate) if l2 is not None else None
    )
    out["action"] = _masked_fit(run.times, cols["action_drift"], cols["action_drift_floor"])
    lo, hi = window
    m = (run.times >= lo) & (run.times <= hi) & (cols["interaction_plain"] > 0)
    if np.count_nonzero(m) >= 5:
        fit = rate_fit(run.times[m], cols["interaction_plain"][m])
        out["interaction_slope"] = -fit.rate
        out["interaction_r2"] = fit.r_squared
    else:
        out["interaction_slope"] = None
        out["interaction_r2"] = None
    msrc = (run.times >= lo) & (run.times <= hi) & (cols["source_norm"] > 0)
    if np.count_nonzero(msrc) >= 5:
        fit = rate_fit(run.times[msrc], cols["source_norm"][msrc])
        out["source_slope"] = -fit.rate
    else:
        out["source_slope"] = None
    return out


def cauchy_check_runs(runs: Sequence[TnSeries]) -> CauchyResult:
    """Consecutive initial-data differences at T0, with the control-run
    differences as the discretization floor.

    A consecutive pair passes floored when the later difference either
    shrinks by a factor >= 10 or sits at (twice) the floor.
    """
    if len(runs) < 2:
        raise ValueError("need at least two schedule entries")
    pairs, diffs, ctrl_diffs = [], [], []
    for a, b in zip(runs, runs[1:]):
        pairs.append((a.Tn, b.Tn))
        diffs.append(pair_norm(pair_difference(a.final_state, b.final_state), "l2"))
        ctrl_diffs.append(
            pair_norm(pair_difference(a.control_final_state, b.control_final_state), "l2")
        )
    ratios = [
        diffs[i] / diffs[i + 1] if diffs[i + 1] > 0 else float("inf")
        for i in range(len(diffs) - 1)
    ]
    passed_raw = all(r >= 10.0 for r in ratios)
    passed_floored = all(
        diffs[i + 1] <= max(diffs[i] / 10.0, 2.0 * ctrl_diffs[i + 1])
        for i in range(len(diffs) - 1)
    )
    fitted = None
    if len(diffs) >= 5 and all(d > 0 for d in diffs):
        fitted = rate_fit([p[0] for p in pairs], diffs).rate
    return CauchyResult(
        pairs=pairs,
        differences=diffs,
        control_differences=ctrl_diffs,
        ratios=ratios,
        fitted_rate=fitted,
        passed_raw=passed_raw,
        passed_floored=passed_floored,
    )


def cauchy_check(report: ConstructionReport) -> CauchyResult:
    return cauchy_check_runs(report.runs)


def _verdicts(runs, fits, cauchy, rate) -> dict:
    per_run = {}
    for run in runs:
        flags = run.columns["bootstrap_flag"]
        flags_f = run.columns["bootstrap_flag_floored"]
        per_run[run.Tn] = {
            "bootstrap_ok_raw": bool(np.all(flags != "violated")),
            "bootstrap_ok_floored": bool(np.all(flags_f != "violated")),
        }
    return {
        "per_run": per_run,
        "bootstrap_ok_raw": all(v["bootstrap_ok_raw"] for v in per_run.values()),
        "bootstrap_ok_floored": all(v["bootstrap_ok_floored"] for v in per_run.values()),
        "cauchy_ok": None if cauchy is None else cauchy.passed_floored,
        "rate": rate,
    }


# ---------------------------------------------------------------------------
# speed-threshold scan
# ---------------------------------------------------------------------------

def threshold_scan(base_cfg: ConstructionConfig, v_list: Sequence[float], jobs: int = 1) -> dict:
    """Rerun the construction over symmetric speeds v1 = -v2 = v/2.

    Returns per-speed verdicts plus the empirical onset: the smallest
    listed speed from which every larger speed passes the floored decay
    check.  Co-moving points (v=0) have a constant envelope and are
    flagged non-informative.
    """
    vs = [float(v) for v in v_list]
    if any(b <= a for a, b in zip(vs, vs[1:])):
        raise ConfigError("v_list must be strictly increasing")
    points = []
    for v in vs:
        fam = base_cfg.family
        dim = fam.params[0].dim
        e1 = np.zeros(dim)
        e1[0] = 1.0
        p1 = replace(fam.params[0], v=tuple(+0.5 * v * e1))
        p2 = replace(fam.params[1], v=tuple(-0.5 * v * e1))
        fam_v = SolitonFamily(params=(p1, p2), profiles=fam.profiles)
        cfg_v = replace(base_cfg, family=fam_v)
        entry = {"v": v, "v_star": fam_v.v_star, "rate": fam_v.decay_rate,
                 "informative": fam_v.v_star > 0}
        try:
            report = run_construction(cfg_v, jobs=jobs)
            entry["passed"] = report.verdicts["bootstrap_ok_floored"]
            entry["passed_raw"] = report.verdicts["bootstrap_ok_raw"]
            entry["blowup"] = False
        except (BlowUpError, BoxTooSmallError) as exc:
            entry["passed"] = False
            entry["passed_raw"] = False
            entry["blowup"] = isinstance(exc, BlowUpError)
            entry["error"] = str(exc)
        points.append(entry)

    onset = None
    for i in range(len(points)):
        if all(p["passed"] for p in points[i:]):
            onset = points[i]["v"]
            break
    fails = [not p["passed"] for p in points]
    monotone = fails == sorted(fails, reverse=True)
    return {"points": points, "onset": onset, "violations_at_small_end": monotone}
