"""Symmetric generalized eigensolver for the assembled pencils.

Solves (energy - coupling * boundary) x = E mass x for the k smallest (or
largest) pairs.  The workhorse is shift-invert Lanczos with full
reorthogonalization in the mass inner product, on a sparse LU factorization
of the shifted pencil; below ``dense_threshold`` a dense LAPACK solve is
used instead (and doubles as the reference path for the sparse one).

Everything is deterministic: the start vector comes from the seed, the
factorization ordering is fixed, and eigenvectors get a sign convention.
Every reported pair carries an independently recomputable residual.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as dla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import Assembly

__all__ = ["SolveOptions", "Spectrum", "SolverError", "solve", "certify"]


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolveOptions:
    k: int = 1
    which_end: str = "smallest"
    shift: float | str = "auto"
    tol: float = 1e-9
    max_iter: int = 400
    seed: int = 20240
    dense_threshold: int = 2000

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.which_end not in ("smallest", "largest"):
            raise ValueError(f"which_end must be smallest|largest, got {self.which_end!r}")


@dataclass
class Spectrum:
    """Ordered eigenvalues with residual norms and solver statistics.

    residuals[i] = ||A x - E M x|| / ||M x|| (raw); residuals_rel[i] is the
    same residual divided by the backward-stable scale, directly comparable
    to tol.  converged[i] = residuals_rel[i] <= tol.
    """

    values: np.ndarray
    residuals: np.ndarray
    residuals_rel: np.ndarray
    vectors: np.ndarray
    tol: float
    converged: list
    stats: dict = field(default_factory=dict)
    short_count: bool = False
    degenerate_pairs: list = field(default_factory=list)


def _sign_normalize(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for i in range(out.shape[1]):
        v = out[:, i]
        big = np.abs(v) > 1e-8 * (np.max(np.abs(v)) or 1.0)
        idx = np.argmax(big)
        if big[idx] and v[idx] < 0:
            out[:, i] = -v
    return out


def _residuals(A, M, values, vectors):
    """Per-pair (raw residual, convergence threshold scale).

    raw = ||A x - E M x|| / ||M x||.  A pair counts as converged when
    raw <= tol * scale with scale = (||A x|| + max(1, |E|) ||M x||) / ||M x||,
    the backward-stable normalization: the raw ratio cannot reach
    tol * max(1, |E|) in double precision once ||A|| dwarfs ||M||.
    """
    res = np.empty(len(values))
    scales = np.empty(len(values))
    for i, E in enumerate(values):
        x = vectors[:, i]
        Ax = A @ x
        Mx = M @ x
        den = np.linalg.norm(Mx)
        if den == 0:
            res[i], scales[i] = np.inf, 1.0
            continue
        res[i] = np.linalg.norm(Ax - E * Mx) / den
        scales[i] = (np.linalg.norm(Ax) + max(1.0, abs(E)) * den) / den
    return res, scales


def _auto_shift(assembly: Assembly, coupling: float) -> float:
    meta = assembly.meta
    kind = meta.get("problem")
    if kind == "cross_section":
        nw = meta["n_omega"]
        return -2.0 * nw * max(coupling, 0.0) - 0.1 * nw**2
    hint = meta.get("shift_hint")
    if hint is None:
        raise SolverError("no automatic shift available for this assembly; "
                          "pass SolveOptions(shift=<value>)")
    return float(hint)


def _dense_solve(A, M, k, which_end):
    n = A.shape[0]
    if which_end == "smallest":
        lo, hi = 0, k - 1
    else:
        lo, hi = n - k, n - 1
    vals, vecs = dla.eigh(A.toarray(), M.toarray(), subset_by_index=(lo, hi))
    return vals, vecs


def _lanczos_core(apply_op, A, M, k, max_iter, seed, tol, ritz_from_theta,
                  check_every):
    """M-orthonormal Lanczos with full reorthogonalization.

    apply_op maps v -> T v for the M-self-adjoint operator T being iterated;
    ritz_from_theta maps Ritz values of T back to pencil eigenvalues and
    selects which end to keep.
    """
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.sqrt(v @ (M @ v))
    cap = max_iter + 1
    V = np.empty((n, cap))
    MV = np.empty((n, cap))
    V[:, 0] = v
    MV[:, 0] = M @ v
    alphas, betas = [], []
    it = 0
    values = vectors = None
    converged_mask = np.zeros(k, dtype=bool)

    while it < max_iter:
        it += 1
        j = it - 1
        w = apply_op(V[:, j], MV[:, j])
        alpha = w @ MV[:, j]
        alphas.append(alpha)
        w = w - alpha * V[:, j]
        if j > 0:
            w = w - betas[-1] * V[:, j - 1]
        for _ in range(2):  # full reorthogonalization, twice for safety
            coeffs = MV[:, :it].T @ w
            w = w - V[:, :it] @ coeffs
        Mw = M @ w
        beta = np.sqrt(max(w @ Mw, 0.0))
        exhausted = beta <= 1e-14
        if len(alphas) >= k and (it % check_every == 0 or exhausted or it == max_iter):
            theta, Y = dla.eigh_tridiagonal(np.array(alphas), np.array(betas))
            cand, cols = ritz_from_theta(theta, k)
            vecs = V[:, :it] @ Y[:, cols]
            res, scales = _residuals(A, M, cand, vecs)
            converged_mask = res <= tol * scales
            values, vectors = cand, vecs
            if converged_mask.all():
                break
        if exhausted:
            w = rng.standard_normal(n)
            coeffs = MV[:, :it].T @ w
            w = w - V[:, :it] @ coeffs
            Mw = M @ w
            beta = np.sqrt(max(w @ Mw, 0.0))
            if beta <= 1e-14:
                break
        betas.append(beta)
        V[:, it] = w / beta
        MV[:, it] = Mw / beta

    if values is None:
        raise SolverError("Lanczos produced no Ritz estimates (max_iter too small?)")
    order = np.argsort(values)
    return values[order], vectors[:, order], converged_mask[order], it


def _lanczos_shift_invert(A, M, k, sigma, tol, max_iter, seed, side="above"):
    """k eigenpairs of (A, M) adjacent to sigma.

    side='above': sigma sits below the wanted eigenvalues (k smallest);
    side='below': sigma sits above the whole spectrum (k largest).
    """
    try:
        lu = spla.splu((A - sigma * M).tocsc())
    except RuntimeError as exc:
        raise SolverError(f"factorization failed at shift {sigma}: {exc}") from exc
    fill = lu.L.nnz + lu.U.nnz

    def apply_op(v, mv):
        return lu.solve(mv)

    def ritz(theta, kk):
        if side == "above":
            cols = np.argsort(theta)[::-1][:kk]  # largest theta = nearest above
        else:
            cols = np.argsort(theta)[:kk]  # most negative theta = nearest below
        with np.errstate(divide="ignore"):
            cand = sigma + 1.0 / theta[cols]
        return cand, cols

    vals, vecs, conv, it = _lanczos_core(apply_op, A, M, k, max_iter, seed, tol,
                                         ritz, check_every=5)
    return vals, vecs, conv, it, fill


def _lanczos_plain_top(A, M, k, tol, max_iter, seed):
    """k largest eigenpairs via Lanczos on M^-1 A (no spectral transform)."""
    mlu = spla.splu(M.tocsc())

    def apply_op(v, mv):
        return mlu.solve(A @ v)

    def ritz(theta, kk):
        cols = np.argsort(theta)[::-1][:kk]
        return theta[cols], cols

    vals, vecs, conv, it = _lanczos_core(apply_op, A, M, k, max_iter, seed, tol,
                                         ritz, check_every=10)
    return vals, vecs, conv, it, mlu.L.nnz + mlu.U.nnz


def solve(assembly: Assembly, coupling: float, opts: SolveOptions | None = None) -> Spectrum:
    """Eigenpairs of (energy - coupling * boundary) x = E mass x at one end."""
    opts = opts or SolveOptions()
    A = assembly.pencil(coupling)
    M = assembly.mass.tocsr()
    n = A.shape[0]
    k = min(opts.k, n)
    short = k < opts.k
    t0 = time.perf_counter()

    if n <= opts.dense_threshold:
        vals, vecs = _dense_solve(A, M, k, opts.which_end)
        conv = [True] * k
        iters, fill, method, shift = 0, 0, "dense", None
    elif opts.which_end == "smallest":
        shift = _auto_shift(assembly, coupling) if opts.shift == "auto" else float(opts.shift)
        last_err = None
        vals = None
        for attempt in range(3):
            try:
                vals, vecs, conv, iters, fill = _lanczos_shift_invert(
                    A, M, k, shift, opts.tol, opts.max_iter, opts.seed)
            except SolverError as exc:
                last_err = exc
                shift = shift - max(1.0, abs(shift))
                continue
            if vals[0] >= shift:
                break
            # a value below the shift means the shift sat inside the spectrum
            shift = shift - 2.0 * max(1.0, abs(vals[0] - shift))
            vals = None
        if vals is None:
            raise SolverError(f"shift-invert failed after retries: {last_err}")
        conv = list(conv)
        method = "lanczos-shift-invert"
    else:
        top = assembly.meta.get("top_bound")
        if opts.shift != "auto":
            top = float(opts.shift)
        if top is not None:
            vals, vecs, conv, iters, fill, shift = _largest_by_shift_ladder(
                A, M, k, top, opts)
            method = "lanczos-shift-ladder"
        else:
            vals, vecs, conv, iters, fill = _lanczos_plain_top(
                A, M, k, opts.tol, opts.max_iter, opts.seed)
            method, shift = "lanczos-top", None
        conv = list(conv)

    vecs = _sign_normalize(vecs)
    res, scales = _residuals(A, M, vals, vecs)
    conv = [bool(c) and bool(r <= opts.tol * s_)
            for c, r, s_ in zip(conv, res, scales)]
    rel = res / scales
    wall_ms = (time.perf_counter() - t0) * 1000.0

    degenerate = []
    for i in range(k - 1):
        if abs(vals[i + 1] - vals[i]) < 10.0 * opts.tol * max(1.0, abs(vals[i])):
            degenerate.append((i, i + 1))

    stats = {"iterations": iters, "fill": fill, "wall_ms": wall_ms,
             "method": method, "shift": shift, "seed": opts.seed, "dim": n}
    return Spectrum(values=np.asarray(vals, dtype=float), residuals=res,
                    residuals_rel=rel, vectors=vecs, tol=opts.tol,
                    converged=list(conv), stats=stats, short_count=short,
                    degenerate_pairs=degenerate)


def certify(assembly: Assembly, coupling: float, spectrum: Spectrum) -> dict:
    """Recompute residuals from stored eigenpairs; pass/fail per pair vs tol."""
    if spectrum.vectors.size and spectrum.vectors.shape[0] != assembly.dim:
        raise ValueError("dimension mismatch between assembly and spectrum")
    A = assembly.pencil(coupling)
    M = assembly.mass
    rows = []
    for i, E in enumerate(spectrum.values):
        x = spectrum.vectors[:, i:i + 1]
        res, scales = _residuals(A, M, [E], x)
        threshold = spectrum.tol * scales[0]
        rows.append({"value": float(E), "residual": float(res[0]),
                     "relative": float(res[0] / scales[0]),
                     "threshold": float(threshold),
                     "passed": bool(res[0] <= threshold)})
    return {"pairs": rows, "all_passed": all(r["passed"] for r in rows)}
