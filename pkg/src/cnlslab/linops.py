"""Linearization around a stationary profile: the operators

    L+ = -Lap + 1 - 3|Phi|^2      (acts on the real part)
    L- = -Lap + 1 -   |Phi|^2     (acts on the imaginary part)

their low spectra, the count nu0 of non-positive eigenvalues, the boosted
projection family, and an empirical coercivity constant for the
linearized action.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .errors import SolverError
from .functionals import linearized_action
from .grid import ComplexField, Grid, norm_h1, norm_l2, real_inner_l2
from .profiles import Profile
from .solitons import SolitonParams, SolitonWave

__all__ = [
    "LinearizedOperator",
    "SpectralReport",
    "CoercivityReport",
    "build_operators",
    "lowest_eigs",
    "count_nonpositive",
    "boosted_eigenfunction",
    "projection_family",
    "coercivity_estimate",
    "default_zero_tol",
    "save_spectral_report",
]


@dataclass(frozen=True)
class LinearizedOperator:
    """Self-adjoint operator -Lap + potential as a field action."""

    kind: str  # "Lplus" or "Lminus"
    profile: Profile
    potential: np.ndarray

    @property
    def grid(self) -> Grid:
        return self.profile.grid

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        g = self.grid
        return np.fft.ifftn(g.k2 * np.fft.fftn(values)) + self.potential * values

    def apply(self, f: ComplexField) -> ComplexField:
        if f.grid != self.grid:
            raise ValueError("mismatched grids")
        return ComplexField(self.grid, self.apply_values(f.values))

    def dense_matrix(self) -> np.ndarray:
        """Spectral collocation matrix (1D only; n x n, symmetric)."""
        g = self.grid
        if g.dim != 1:
            raise ValueError("dense matrix assembled only in 1D")
        col = np.fft.ifft(g.k2.reshape(-1)).real
        return scipy.linalg.circulant(col) + np.diag(self.potential.real)


def build_operators(profile: Profile) -> tuple[LinearizedOperator, LinearizedOperator]:
    phi2 = np.abs(profile.field.values) ** 2
    return (
        LinearizedOperator("Lplus", profile, 1.0 - 3.0 * phi2),
        LinearizedOperator("Lminus", profile, 1.0 - phi2),
    )


def lowest_eigs(
    op: LinearizedOperator, k: int, tol: float = 1e-8
) -> tuple[np.ndarray, list[ComplexField]]:
    """The k smallest eigenpairs, eigenfunctions L2-normalized.

    1D uses a dense symmetric solve on the collocation matrix; 2D and 3D
    restrict to a low-lying block via LOBPCG preconditioned with the free
    resolvent (-Lap + 1)^{-1}.  Eigenvalue residuals are checked against
    tol.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    g = op.grid
    npts = g.npoints
    h_scale = np.sqrt(g.volume_element)

    if g.dim == 1:
        mat = op.dense_matrix()
        vals, vecs = scipy.linalg.eigh(mat, subset_by_index=[0, k - 1])
    else:
        # a few guard vectors stabilize the requested block
        m = k + 4
        rng = np.random.default_rng(7)
        x0 = rng.standard_normal((npts, m))

        def matvec(v):
            return op.apply_values(v.reshape(g.shape)).real.reshape(-1)

        def precond(v):
            vhat = np.fft.fftn(v.reshape(g.shape))
            return np.fft.ifftn(vhat / (g.k2 + 1.0)).real.reshape(-1)

        A = scipy.sparse.linalg.LinearOperator((npts, npts), matvec=matvec, dtype=float)
        M = scipy.sparse.linalg.LinearOperator((npts, npts), matvec=precond, dtype=float)
        vals, vecs = scipy.sparse.linalg.lobpcg(
            A, x0, M=M, largest=False, tol=tol * 1e-2, maxiter=2000
        )
        order = np.argsort(vals)[:k]
        vals, vecs = vals[order], vecs[:, order]

    fields = []
    for j in range(k):
        v = vecs[:, j].reshape(g.shape) / h_scale  # unit L2 quadrature norm
        f = ComplexField(g, v.astype(np.complex128))
        res = norm_l2(ComplexField(g, op.apply_values(f.values) - vals[j] * f.values))
        if res > tol:
            raise SolverError(
                f"eigenpair {j} of {op.kind} has residual {res:.2e} > {tol:.1e}"
            )
        fields.append(f)
    return np.asarray(vals, dtype=float), fields


def default_zero_tol(op: LinearizedOperator) -> float:
    """Zero-mode tolerance scaled by the operator's potential size."""
    return 1e-6 * (1.0 + float(np.abs(op.potential).max()))


def count_nonpositive(eigenvalue_lists, zero_tol: float) -> int:
    """Count eigenvalues <= zero_tol across the given spectra.

    Eigenvalues within (-zero_tol, zero_tol) are treated as zero modes and
    counted non-positive.  Each spectrum must extend past its first
    clearly positive eigenvalue, otherwise the count is not certified.
    """
    total = 0
    for vals in eigenvalue_lists:
        vals = np.asarray(vals)
        if not np.any(vals > zero_tol):
            raise SolverError(
                "spectrum window too small: first positive eigenvalue not bracketed"
            )
        total += int(np.sum(vals <= zero_tol))
    return total


@dataclass(frozen=True)
class SpectralReport:
    """Low spectra of both operators plus the coercivity bookkeeping."""

    plus_eigenvalues: np.ndarray
    minus_eigenvalues: np.ndarray
    plus_eigenfunctions: list[ComplexField]
    minus_eigenfunctions: list[ComplexField]
    nu0: int
    zero_tol: float
    tol: float
    coercivity: "CoercivityReport | None" = None

    @property
    def eigenvalues(self) -> np.ndarray:
        """Merged ascending list across both operators."""
        return np.sort(np.concatenate([self.plus_eigenvalues, self.minus_eigenvalues]))


def compute_spectral_report(profile: Profile, k: int = 6, tol: float = 1e-8) -> SpectralReport:
    lp, lm = build_operators(profile)
    pvals, pfuns = lowest_eigs(lp, k, tol)
    mvals, mfuns = lowest_eigs(lm, k, tol)
    ztol = max(default_zero_tol(lp), default_zero_tol(lm))
    nu0 = count_nonpositive([pvals, mvals], ztol)
    return SpectralReport(
        plus_eigenvalues=pvals,
        minus_eigenvalues=mvals,
        plus_eigenfunctions=pfuns,
        minus_eigenfunctions=mfuns,
        nu0=nu0,
        zero_tol=ztol,
        tol=tol,
    )


def boosted_eigenfunction(
    xi: ComplexField, params: SolitonParams, t: float, grid: Grid
) -> ComplexField:
    """Apply the solitary-wave transform (phase, boost, scaling) to xi."""
    return SolitonWave(params, xi, grid).field_at(t)


def projection_family(
    report: SpectralReport, params: SolitonParams, t: float, grid: Grid
) -> list[ComplexField]:
    """Boosted, L2-orthonormal projection directions.

    Non-positive modes of L+ constrain the (rotated) real part and enter
    as-is; non-positive modes of L- constrain the imaginary part and enter
    multiplied by i.  The family stays orthogonal under the real L2
    pairing because the unboosted modes are real and mutually orthogonal.
    """
    family = []
    for vals, funs, factor in (
        (report.plus_eigenvalues, report.plus_eigenfunctions, 1.0),
        (report.minus_eigenvalues, report.minus_eigenfunctions, 1j),
    ):
        for lam, f in zip(vals, funs):
            if lam <= report.zero_tol:
                xi = ComplexField(grid, factor * f.values)
                boosted = boosted_eigenfunction(xi, params, t, grid)
                nrm = norm_l2(boosted)
                family.append(ComplexField(grid, boosted.values / nrm))
    return family


def band_limited_noise(grid: Grid, rng: np.random.Generator) -> ComplexField:
    """Random smooth field supported on the lowest quarter of the modes."""
    coeffs = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    mask = np.ones(grid.shape, dtype=bool)
    for j, k in enumerate(grid._broadcast(grid.wavenumbers)):
        kcut = np.abs(grid.wavenumbers[j]).max() / 4.0
        mask &= np.abs(k) <= kcut
    return ComplexField(grid, np.fft.ifftn(coeffs * mask))


@dataclass(frozen=True)
class CoercivityReport:
    c0: float
    positive: bool
    verified: bool
    trials_used: int
    trials_skipped: int
    seed: int


def coercivity_estimate(
    profile: Profile,
    params: SolitonParams,
    trials: int = 200,
    seed: int = 0,
    t: float = 0.0,
    report: SpectralReport | None = None,
) -> CoercivityReport:
    """Constrained Rayleigh-quotient estimate of the coercivity constant.

    Draws `trials` band-limited random fields, removes their components
    along the boosted projection family (real L2 pairing), and returns the
    minimum of H(t, eps)/||eps||_H1^2.  A fresh batch of draws, processed
    the same way, then re-checks the bound c0 ||eps||_H1^2 <= H + proj
    with 5% slack for sampling fluctuation between batches.  The minimum
    is reported even when non-positive, with `positive` flagging the
    failure.
    """
    grid = profile.grid
    if report is None:
        report = compute_spectral_report(profile)
    family = projection_family(report, params, t, grid)
    base = SolitonWave(params, profile, grid).field_at(t)

    def rayleigh(eps: ComplexField) -> float | None:
        scale = norm_l2(eps)
        vals = eps.values.copy()
        for xi in family:
            vals = vals - real_inner_l2(ComplexField(grid, vals), xi) * xi.values
        out = ComplexField(grid, vals)
        if norm_l2(out) < 1e-8 * scale:
            return None  # degenerate draw inside the projection span
        h = linearized_action(base, out, params.mu, params.omega, params.v)
        return h / norm_h1(out) ** 2

    rng = np.random.default_rng(seed)
    quotients = []
    skipped = 0
    for _ in range(trials):
        q = rayleigh(band_limited_noise(grid, rng))
        if q is None:
            skipped += 1
        else:
            quotients.append(q)
    if not quotients:
        raise SolverError("all coercivity trials degenerate")
    c0 = float(min(quotients))

    rng2 = np.random.default_rng(seed + 1)
    verified = True
    for _ in range(trials):
        eps = band_limited_noise(grid, rng2)
        vals = eps.values.copy()
        for xi in family:
            vals = vals - real_inner_l2(ComplexField(grid, vals), xi) * xi.values
        out = ComplexField(grid, vals)
        if norm_l2(out) < 1e-8 * norm_l2(eps):
            continue
        h = linearized_action(base, out, params.mu, params.omega, params.v)
        proj = sum(real_inner_l2(out, xi) ** 2 for xi in family)
        if 0.95 * c0 * norm_h1(out) ** 2 > h + proj + 1e-12:
            verified = False
            break

    return CoercivityReport(
        c0=c0,
        positive=c0 > 0,
        verified=verified,
        trials_used=len(quotients),
        trials_skipped=skipped,
        seed=seed,
    )


def save_spectral_report(report: SpectralReport, directory, prefix: str = "spectrum") -> dict:
    """Write the JSON summary plus binary eigenfunction fields."""
    from . import fieldio

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = {}
    for tag, funs in (
        ("plus", report.plus_eigenfunctions),
        ("minus", report.minus_eigenfunctions),
    ):
        names = []
        for j, f in enumerate(funs):
            name = f"{prefix}_{tag}_{j}.field"
            fieldio.write_field(directory / name, f)
            names.append(name)
        files[tag] = names
    summary = {
        "schema": 1,
        "plus_eigenvalues": [float(v) for v in report.plus_eigenvalues],
        "minus_eigenvalues": [float(v) for v in report.minus_eigenvalues],
        "nu0": report.nu0,
        "zero_tol": report.zero_tol,
        "tol": report.tol,
        "eigenfunction_files": files,
    }
    if report.coercivity is not None:
        c = report.coercivity
        summary["coercivity"] = {
            "c0": c.c0,
            "positive": c.positive,
            "verified": c.verified,
            "trials_used": c.trials_used,
            "trials_skipped": c.trials_skipped,
            "seed": c.seed,
        }
    with open(directory / f"{prefix}.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return summary
