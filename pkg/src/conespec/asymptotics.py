"""Sweeps of cone eigenvalues over the opening parameter and their analysis.

Runs one solve per eps value with rule-based truncation and grading, fits
the leading coefficient of the collapsing-cone law against the basis
{-1/eps^2, 1/eps}, and provides truncation-insensitivity and mesh
convergence studies.  Sweep rows are independent jobs; the worker count is
capped by the CONESPEC_THREADS environment variable and the table is always
assembled in row-key order, never completion order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .assembly import (ConeMode, Mesh1D, assemble_cone, extend_mesh,
                       graded_mesh, refine_mesh)
from .eigensolve import SolveOptions, solve
from .geometry import CrossSection

__all__ = [
    "SweepRow", "SweepTable", "AsymptoticFit", "InsensitivityResult",
    "ConvergenceStudy", "DEFAULT_EPS_WINDOW", "truncation_rule",
    "default_cone_discretization", "cone_mode_for", "sweep", "fit_leading",
    "a_insensitivity", "mesh_convergence", "leading_order_prediction",
]

DEFAULT_EPS_WINDOW = (0.2, 0.15, 0.1, 0.07, 0.05)


def leading_order_prediction(n: int, n_omega: float, j: int, eps: float) -> float:
    """Leading eigenvalue law -n_omega^2 / ((2j + n - 2)^2 eps^2)."""
    return -n_omega**2 / ((2 * j + n - 2) ** 2 * eps**2)


def truncation_rule(eps: float, j: int, n_omega: float, n: int) -> float:
    """Truncation length: forty effective decay lengths, clamped below at 1.

    The low eigenfunctions decay on the axial scale eps (2j+n-2)^2 / n_omega,
    so a = max(1, 40 eps (2j+n-2)^2 / n_omega) keeps the Dirichlet cap
    exponentially irrelevant while the clamp preserves a fixed floor.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j}")
    return max(1.0, 40.0 * eps * (2 * j + n - 2) ** 2 / n_omega)


def cone_mode_for(cs: CrossSection, mode: ConeMode | str | None) -> ConeMode:
    """Normalize a mode selector ('m0', 'm1', 'full', ConeMode or None)."""
    if isinstance(mode, ConeMode):
        return mode
    if mode is None:
        return ConeMode("fourier", 0) if cs.spec.kind == "ball" else ConeMode("full_tensor")
    if mode == "full":
        return ConeMode("full_tensor")
    if mode.startswith("m") and mode[1:].isdigit():
        return ConeMode("fourier", int(mode[1:]))
    raise ValueError(f"unknown cone mode {mode!r}")


def default_cone_discretization(eps: float, a: float, s_cells: int = 360,
                                t_cells: int = 48) -> tuple[Mesh1D, int]:
    """Graded axial mesh (smallest cell ~ eps/12) plus transverse cell count."""
    return graded_mesh(0.0, a, s_cells, first_cell=eps / 12.0), t_cells


@dataclass(frozen=True)
class SweepRow:
    eps: float
    a: float
    j: int
    mode: str
    E: float
    residual: float
    dof: int
    mesh: str
    wall_ms: float
    converged: bool


@dataclass
class SweepTable:
    cross_section: str
    n: int
    n_omega: float
    rows: list = field(default_factory=list)

    def rows_for(self, j: int, converged_only: bool = True) -> list:
        out = [r for r in self.rows if r.j == j and (r.converged or not converged_only)]
        return sorted(out, key=lambda r: -r.eps)

    def eps_values(self) -> list:
        return sorted({r.eps for r in self.rows}, reverse=True)


@dataclass(frozen=True)
class AsymptoticFit:
    """Least-squares coefficients of E(eps) ~ -C/eps^2 + D/eps and the target."""

    j: int
    C: float
    D: float
    residual_norm: float
    target: float
    rel_error: float
    eps_used: tuple

    def __post_init__(self):
        if len(self.eps_used) < 3:
            raise ValueError("fit needs at least 3 eps values")


def _workers() -> int:
    env = os.environ.get("CONESPEC_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _sweep_one(cs, eps, j_max, mode, s_cells, t_cells, opts):
    a = truncation_rule(eps, j_max, cs.n_omega, cs.n)
    s_mesh, tc = default_cone_discretization(eps, a, s_cells, t_cells)
    asm = assemble_cone(cs, eps, a, s_mesh, tc, mode)
    spec = solve(asm, 1.0, opts)
    rows = []
    for j in range(1, j_max + 1):
        rows.append(SweepRow(
            eps=eps, a=a, j=j, mode=mode.label(), E=float(spec.values[j - 1]),
            residual=float(spec.residuals_rel[j - 1]), dof=asm.dim,
            mesh=asm.meta["mesh"], wall_ms=spec.stats["wall_ms"],
            converged=bool(spec.converged[j - 1])))
    return rows


def sweep(cs: CrossSection, eps_list, j_max: int = 1,
          mode: ConeMode | str | None = None, s_cells: int = 360,
          t_cells: int = 48, opts: SolveOptions | None = None) -> SweepTable:
    """One cone solve per eps; rows sorted by (eps desc, j asc)."""
    eps_list = list(eps_list)
    if len(eps_list) != len(set(eps_list)):
        raise ValueError("duplicate eps values in sweep list")
    if len(eps_list) < 3:
        raise ValueError("sweep needs at least 3 distinct eps values")
    if any(e <= 0 or e > 0.5 for e in eps_list):
        raise ValueError("sweep eps values must lie in (0, 0.5]")
    mode = cone_mode_for(cs, mode)
    opts = opts or SolveOptions(k=j_max, dense_threshold=64)
    if opts.k < j_max:
        raise ValueError(f"solver k={opts.k} below j_max={j_max}")

    table = SweepTable(cross_section=cs.label(), n=cs.n, n_omega=cs.n_omega)
    results: dict[float, list] = {}
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        futures = {pool.submit(_sweep_one, cs, e, j_max, mode, s_cells,
                               t_cells, opts): e for e in eps_list}
        for fut, e in futures.items():
            results[e] = fut.result()
    for e in sorted(eps_list, reverse=True):
        table.rows.extend(results[e])
    return table


def fit_leading(table: SweepTable, j: int) -> AsymptoticFit:
    """Least squares of E_j(eps) against {-1/eps^2, 1/eps}.

    The basis carries exactly the two orders the eigenvalue law controls; a
    constant term would soak up noise and bias C, so there is none and the
    residual norm is reported instead.
    """
    rows = table.rows_for(j)
    if len(rows) < 3:
        raise ValueError(f"need at least 3 converged rows for j={j}, have {len(rows)}")
    eps = np.array([r.eps for r in rows])
    if np.unique(eps).size < 2:
        raise ValueError("rank-deficient fit: fewer than 2 distinct eps")
    y = np.array([r.E for r in rows])
    X = np.column_stack([-1.0 / eps**2, 1.0 / eps])
    coef, res, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = float(np.sqrt(res[0])) if res.size else float(np.linalg.norm(X @ coef - y))
    target = table.n_omega**2 / (2 * j + table.n - 2) ** 2
    C, D = float(coef[0]), float(coef[1])
    return AsymptoticFit(j=j, C=C, D=D, residual_norm=resid, target=target,
                         rel_error=abs(C - target) / target,
                         eps_used=tuple(eps.tolist()))


@dataclass(frozen=True)
class InsensitivityResult:
    eps: float
    j: int
    a: float
    a_big: float
    E_a: float
    E_big: float
    rel_shift: float
    sign_ok: bool


def a_insensitivity(cs: CrossSection, eps: float, j: int, a: float,
                    factor: float, s_cells: int = 360, t_cells: int = 48,
                    mode: ConeMode | str | None = None,
                    opts: SolveOptions | None = None) -> InsensitivityResult:
    """Relative eigenvalue shift when the truncation is enlarged by `factor`.

    The enlarged mesh extends the original one node for node, so the two
    discrete spaces are nested and enlarging the domain can only lower E_j;
    sign_ok records that (up to the certified residual of the two solves).
    """
    if factor < 1.0:
        raise ValueError(f"factor must be >= 1, got {factor}")
    mode = cone_mode_for(cs, mode)
    opts = opts or SolveOptions(k=j, dense_threshold=64)
    s_mesh, tc = default_cone_discretization(eps, a, s_cells, t_cells)
    asm = assemble_cone(cs, eps, a, s_mesh, tc, mode)
    spec = solve(asm, 1.0, opts)
    E_a = float(spec.values[j - 1])
    if factor == 1.0:
        return InsensitivityResult(eps=eps, j=j, a=a, a_big=a, E_a=E_a,
                                   E_big=E_a, rel_shift=0.0, sign_ok=True)
    big_mesh = extend_mesh(s_mesh, factor * a)
    asm2 = assemble_cone(cs, eps, factor * a, big_mesh, tc, mode)
    spec2 = solve(asm2, 1.0, opts)
    E_big = float(spec2.values[j - 1])
    noise = ((spec.residuals_rel[j - 1] + spec2.residuals_rel[j - 1]
              + 2.0 * opts.tol) * max(1.0, abs(E_a)))
    return InsensitivityResult(
        eps=eps, j=j, a=a, a_big=factor * a, E_a=E_a, E_big=E_big,
        rel_shift=abs(E_a - E_big) / abs(E_a), sign_ok=bool(E_big <= E_a + noise))


@dataclass(frozen=True)
class ConvergenceStudy:
    values: tuple
    diffs: tuple
    order: float | None
    exact: bool
    monotone: bool


def mesh_convergence(cs: CrossSection, eps: float, j: int, levels: int = 3,
                     base_s_cells: int = 80, base_t_cells: int = 8,
                     a: float | None = None,
                     mode: ConeMode | str | None = None,
                     opts: SolveOptions | None = None) -> ConvergenceStudy:
    """Observed convergence order from nested dyadic refinements.

    Both mesh directions are halved together, so the eigenvalue error scales
    like h^2 for the element family and Richardson triples estimate the
    order.  Nested spaces force monotone decrease; a non-monotone sequence
    is flagged and no order is extrapolated.
    """
    if levels < 3:
        raise ValueError("need at least 3 refinement levels")
    mode = cone_mode_for(cs, mode)
    opts = opts or SolveOptions(k=j, dense_threshold=64)
    if a is None:
        a = truncation_rule(eps, j, cs.n_omega, cs.n)
    s_mesh, tc = default_cone_discretization(eps, a, base_s_cells, base_t_cells)
    vals = []
    for lvl in range(levels):
        asm = assemble_cone(cs, eps, a, s_mesh, tc, mode)
        spec = solve(asm, 1.0, opts)
        vals.append(float(spec.values[j - 1]))
        if lvl < levels - 1:
            s_mesh = refine_mesh(s_mesh, 2)
            tc *= 2
    diffs = tuple(vals[i] - vals[i + 1] for i in range(levels - 1))
    scale = max(abs(v) for v in vals)
    if all(abs(d) <= 1e-13 * scale for d in diffs):
        return ConvergenceStudy(values=tuple(vals), diffs=diffs, order=None,
                                exact=True, monotone=True)
    monotone = all(d > 0 for d in diffs)
    order = None
    if monotone and len(diffs) >= 2 and diffs[1] != 0:
        order = float(np.log2(diffs[0] / diffs[1]))
    return ConvergenceStudy(values=tuple(vals), diffs=diffs, order=order,
                            exact=False, monotone=monotone)
