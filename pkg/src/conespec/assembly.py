"""Conforming discretizations of the quadratic forms on meshes.

Four problem families share one toolbox of weighted 1D element matrices
(see _elements): the cross-section Robin form on omega, the 1D effective
operator on (s0, b), the truncated-cone form in stretched coordinates, and
the boundary-trace extremal problem.

Cone volume energies use the algebraically exact sum-of-squares shape

    (d_s u - (t . grad_t u)/s)^2 + |grad_t u|^2 / (eps^2 s^2)

times the measure eps^n s^n dt ds, expanded term by term into Kronecker
products of exactly integrated 1D factors.  No quadrature shortcuts: every
assembled pencil is a true Rayleigh-Ritz restriction, so discrete
eigenvalues sit above their continuum counterparts and nested meshes or
nested truncations can only lower them.  The bracket and ordering tests
downstream depend on this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _elements as el
from .geometry import CrossSection

__all__ = [
    "Mesh1D",
    "Assembly",
    "ConeMode",
    "AssemblyError",
    "build_mesh_1d",
    "graded_mesh",
    "extend_mesh",
    "refine_mesh",
    "assemble_cross_section_robin",
    "assemble_effective",
    "assemble_cone",
    "assemble_trace_problem",
]


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class Mesh1D:
    """Strictly increasing nodes on [s0, s1]; cells grow away from s0 by ratio grading."""

    nodes: np.ndarray
    grading: float = 1.0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.size < 2 or np.any(np.diff(nodes) <= 0):
            raise AssemblyError("mesh nodes must be strictly increasing with >= 2 nodes")
        if self.grading < 1.0:
            raise AssemblyError(f"grading must be >= 1, got {self.grading}")

    @property
    def s0(self) -> float:
        return float(self.nodes[0])

    @property
    def s1(self) -> float:
        return float(self.nodes[-1])

    @property
    def cells(self) -> int:
        return self.nodes.size - 1

    def descriptor(self) -> str:
        return (f"mesh[{self.s0:g},{self.s1:g}]x{self.cells}"
                f"@g={self.grading:.6g}")


def build_mesh_1d(s0: float, s1: float, cells: int, grading: float = 1.0) -> Mesh1D:
    """Geometric mesh with the smallest cell adjacent to s0."""
    if s1 <= s0:
        raise AssemblyError(f"degenerate interval ({s0}, {s1})")
    if cells < 2:
        raise AssemblyError(f"need at least 2 cells, got {cells}")
    if grading < 1.0:
        raise AssemblyError(f"grading must be >= 1, got {grading}")
    if grading == 1.0:
        nodes = np.linspace(s0, s1, cells + 1)
    else:
        sizes = grading ** np.arange(cells)
        sizes *= (s1 - s0) / sizes.sum()
        nodes = s0 + np.concatenate(([0.0], np.cumsum(sizes)))
        nodes[-1] = s1
    return Mesh1D(nodes=nodes, grading=grading)


def graded_mesh(s0: float, s1: float, cells: int, first_cell: float) -> Mesh1D:
    """Geometric mesh with a prescribed first-cell size (grading solved by bisection)."""
    length = s1 - s0
    if length <= 0:
        raise AssemblyError(f"degenerate interval ({s0}, {s1})")
    if first_cell * cells >= length:
        return build_mesh_1d(s0, s1, cells, 1.0)

    def total(g):
        if cells * math.log(g) > 500.0:
            return math.inf
        return first_cell * (g**cells - 1.0) / (g - 1.0)

    lo, hi = 1.0 + 1e-12, 2.0
    while total(hi) < length:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if total(mid) < length:
            lo = mid
        else:
            hi = mid
    return build_mesh_1d(s0, s1, cells, 0.5 * (lo + hi))


def extend_mesh(mesh: Mesh1D, s1_new: float) -> Mesh1D:
    """Append cells beyond s1, keeping the original nodes bitwise intact.

    Appended cells continue the geometric progression; the appended block is
    rescaled to land exactly on s1_new.  Nested-truncation comparisons need
    the shared nodes to be identical.
    """
    if s1_new <= mesh.s1:
        raise AssemblyError("extension target must exceed the current end")
    h = float(mesh.nodes[-1] - mesh.nodes[-2])
    g = max(mesh.grading, 1.0)
    sizes = []
    total = 0.0
    while total < s1_new - mesh.s1:
        h *= g
        sizes.append(h)
        total += h
    sizes = np.array(sizes) * (s1_new - mesh.s1) / total
    nodes = np.concatenate([mesh.nodes, mesh.s1 + np.cumsum(sizes)])
    nodes[-1] = s1_new
    return Mesh1D(nodes=nodes, grading=mesh.grading)


def refine_mesh(mesh: Mesh1D, factor: int = 2) -> Mesh1D:
    """Split every cell into `factor` equal parts (nested refinement)."""
    if factor < 2:
        raise AssemblyError("refinement factor must be >= 2")
    pieces = [mesh.nodes[:1]]
    for a, b in zip(mesh.nodes[:-1], mesh.nodes[1:]):
        pieces.append(np.linspace(a, b, factor + 1)[1:])
    return Mesh1D(nodes=np.concatenate(pieces), grading=mesh.grading)


@dataclass(frozen=True)
class ConeMode:
    """Axisymmetric reduction selector for cone problems.

    fourier (with index m) applies only to the n = 2 ball cross-section;
    full_tensor meshes all transverse coordinates.
    """

    reduction: str = "full_tensor"
    m: int = 0

    def __post_init__(self):
        if self.reduction not in ("full_tensor", "fourier"):
            raise AssemblyError(f"unknown reduction {self.reduction!r}")
        if self.m < 0:
            raise AssemblyError("fourier index m must be >= 0")

    def label(self) -> str:
        return f"m{self.m}" if self.reduction == "fourier" else "full"


@dataclass
class Assembly:
    """A discretized symmetric pencil (energy - coupling * boundary) x = E mass x.

    blocks, when present (cone problems), carries the decoupled axial /
    transverse / flat-boundary matrices used by the two-sided form bracket.
    """

    dim: int
    energy: sp.csr_matrix
    boundary: sp.csr_matrix
    mass: sp.csr_matrix
    meta: dict = field(default_factory=dict)
    blocks: dict | None = None

    def pencil(self, coupling: float) -> sp.csr_matrix:
        return (self.energy - coupling * self.boundary).tocsr()


def _sliced(mat: sp.csr_matrix, active: np.ndarray) -> sp.csr_matrix:
    return mat[np.ix_(active, active)].tocsr()


def _kron(*mats) -> sp.csr_matrix:
    out = mats[0]
    for m in mats[1:]:
        out = sp.kron(out, m, format="csr")
    return out


# ---------------------------------------------------------------------------
# cross-section Robin problem on omega
# ---------------------------------------------------------------------------

def assemble_cross_section_robin(cs: CrossSection, cells: int = 256) -> Assembly:
    """Discretize  b_r(f) = int |grad f|^2 - r int_boundary f^2  on omega.

    The coupling r stays symbolic: downstream solves use
    (energy - r * boundary) x = E mass x.  Balls and annuli use the radial
    reduction (volume weight rho^(n-1)); rectangles a tensor-product grid;
    the interval plain 1D elements.
    """
    spec = cs.spec
    if cells < 3:
        raise AssemblyError("mesh too coarse: need at least 3 cells")
    if spec.kind == "interval":
        L = spec.params["half_length"]
        nodes = np.linspace(-L, L, cells + 1)
        energy = el.stiffness_matrix(nodes)
        mass = el.mass_matrix(nodes)
        nn = nodes.size
        boundary = el.node_indicator(nn, 0) + el.node_indicator(nn, nn - 1)
    elif spec.kind == "ball":
        n, rad = spec.n, spec.params["radius"]
        if n - 1 > 6:
            raise AssemblyError("radial reduction supports n <= 7")
        nodes = np.linspace(0.0, rad, cells + 1)
        energy = el.stiffness_matrix(nodes, power=n - 1)
        mass = el.mass_matrix(nodes, power=n - 1)
        boundary = el.node_indicator(nodes.size, nodes.size - 1, rad ** (n - 1))
    elif spec.kind == "annulus":
        ri, ro = spec.params["inner"], spec.params["outer"]
        nodes = np.linspace(ri, ro, cells + 1)
        energy = el.stiffness_matrix(nodes, power=1)
        mass = el.mass_matrix(nodes, power=1)
        boundary = (el.node_indicator(nodes.size, 0, ri)
                    + el.node_indicator(nodes.size, nodes.size - 1, ro))
    elif spec.kind == "rectangle":
        sides = [float(s) for s in spec.params["sides"]]
        Ms, Ks, Bs = [], [], []
        for s in sides:
            nodes = np.linspace(-0.5 * s, 0.5 * s, cells + 1)
            Ms.append(el.mass_matrix(nodes))
            Ks.append(el.stiffness_matrix(nodes))
            nn = nodes.size
            Bs.append(el.node_indicator(nn, 0) + el.node_indicator(nn, nn - 1))
        energy = sum(_kron(*[Ks[i] if i == ax else Ms[i] for i in range(len(sides))])
                     for ax in range(len(sides)))
        boundary = sum(_kron(*[Bs[i] if i == ax else Ms[i] for i in range(len(sides))])
                       for ax in range(len(sides)))
        mass = _kron(*Ms)
    else:
        raise AssemblyError(f"unsupported cross-section {spec.kind!r}")

    dim = mass.shape[0]
    if dim < 4:
        raise AssemblyError("discretization too small (dim < 4)")
    meta = {
        "problem": "cross_section",
        "coupling": "r",
        "cross_section": cs.label(),
        "n_omega": cs.n_omega,
        "mesh": f"cells={cells}",
        "dof": dim,
    }
    return Assembly(dim=dim, energy=energy.tocsr(), boundary=boundary.tocsr(),
                    mass=mass.tocsr(), meta=meta)


# ---------------------------------------------------------------------------
# effective 1D operator on (s0, b)
# ---------------------------------------------------------------------------

def assemble_effective(n: int, n_omega: float, lam: float,
                       interval: tuple[float, float], mesh: Mesh1D) -> Assembly:
    """Dirichlet discretization of -f'' + ((n^2-2n)/(4 s^2) - n_omega/(lam s)) f.

    Element integrals of 1/s and 1/s^2 are closed-form, so the discrete
    operator is a conforming restriction: with s0 = 0 every discrete
    eigenvalue sits above -n_omega^2/((2j+n-2)^2 lam^2); with s0 > 0 it sits
    above -n_omega/(s0 lam).
    """
    s0, b = interval
    if not (0.0 <= s0 < b):
        raise AssemblyError(f"need 0 <= s0 < b, got ({s0}, {b})")
    if n < 1:
        raise AssemblyError(f"n must be >= 1, got {n}")
    if abs(mesh.s0 - s0) > 0 or abs(mesh.s1 - b) > 0:
        raise AssemblyError("mesh does not span the requested interval")
    nodes = mesh.nodes
    nn = nodes.size
    cc = (n * n - 2.0 * n) / 4.0
    energy = el.stiffness_matrix(nodes)
    energy = energy - (n_omega / lam) * el.mass_matrix(nodes, power=-1,
                                                      zero_singular_node=True)
    if cc != 0.0:
        energy = energy + cc * el.mass_matrix(nodes, power=-2, zero_singular_node=True)
    mass = el.mass_matrix(nodes)
    active = np.arange(1, nn - 1)  # Dirichlet at both ends
    energy = _sliced(energy.tocsr(), active)
    mass = _sliced(mass, active)
    dim = active.size
    boundary = sp.csr_matrix((dim, dim))
    if s0 == 0.0:
        hint = 1.5 * (-n_omega**2 / (n**2 * lam**2))
        kind = "effective"
    else:
        hint = -1.5 * n_omega / (s0 * lam)
        kind = "exterior"
    meta = {
        "problem": kind,
        "n": n,
        "n_omega": n_omega,
        "lam": lam,
        "interval": (s0, b),
        "mesh": mesh.descriptor(),
        "dof": dim,
        "shift_hint": hint,
    }
    return Assembly(dim=dim, energy=energy, boundary=boundary, mass=mass, meta=meta)


# ---------------------------------------------------------------------------
# truncated cone in stretched coordinates
# ---------------------------------------------------------------------------

def _vertex_pool(ns_kept: int, nt: int) -> sp.csr_matrix:
    """Constraint basis pooling the s = 0 row of a tensor grid into one DOF.

    The vertex of the cone is a zero-capacity point: the conforming discrete
    space carries a single value there, shared by all transverse nodes.
    Column 0 of the result is that pooled vertex; the rest is the identity on
    the remaining (ns_kept - 1) * nt tensor DOFs.
    """
    rows = list(range(nt))
    cols = [0] * nt
    rest = np.arange((ns_kept - 1) * nt)
    rows.extend(nt + rest)
    cols.extend(1 + rest)
    vals = np.ones(len(rows))
    return sp.coo_matrix((vals, (rows, cols)),
                         shape=(ns_kept * nt, 1 + (ns_kept - 1) * nt)).tocsr()


def _cone_matrices(cs: CrossSection, eps: float, a: float, s_mesh: Mesh1D,
                   t_cells: int, mode: ConeMode, s_treatment: str):
    """Shared machinery for the cone and trace assemblies.

    s_treatment: 'pooled' (vertex DOF pooled, Dirichlet at s = a; the cone
    default), 'dirichlet' (both axial ends removed; used by fourier m >= 1
    whose eigenfunctions vanish on the axis), 'free' (no axial conditions;
    trace problems).  Returns (energy, boundary_exact, boundary_flat, axial,
    transverse, mass).
    """
    spec = cs.spec
    n = spec.n
    s = s_mesh.nodes
    ns = s.size
    if s_mesh.s0 != 0.0 or abs(s_mesh.s1 - a) > 1e-12 * max(1.0, a):
        raise AssemblyError("s-mesh must span (0, a)")
    if t_cells < 2:
        raise AssemblyError("need at least 2 transverse cells")

    if s_treatment == "pooled":
        s_act = np.arange(0, ns - 1)
    elif s_treatment == "dirichlet":
        s_act = np.arange(1, ns - 1)
    elif s_treatment == "free":
        s_act = np.arange(ns)
    else:
        raise AssemblyError(f"unknown s_treatment {s_treatment!r}")

    epsn = eps**n

    pool = s_treatment == "pooled"

    if mode.reduction == "fourier":
        if spec.kind != "ball" or n != 2:
            raise AssemblyError("fourier reduction requires the n = 2 ball cross-section")
        rb = spec.params["radius"]
        m = mode.m
        rho = np.linspace(0.0, rb, t_cells + 1)
        nt = rho.size
        t_act = np.arange(1, nt) if m >= 1 else np.arange(nt)

        Ms1 = _sliced(el.mass_matrix(s), s_act)
        Mss = _sliced(el.mass_matrix(s, power=1), s_act)
        Mss2 = _sliced(el.mass_matrix(s, power=2), s_act)
        Kss2 = _sliced(el.stiffness_matrix(s, power=2), s_act)
        Css = _sliced(el.convection_matrix(s, power=1), s_act)

        Mrr = _sliced(el.mass_matrix(rho, power=1), t_act)
        Krr = _sliced(el.stiffness_matrix(rho, power=1), t_act)
        Krr3 = _sliced(el.stiffness_matrix(rho, power=3), t_act)
        Crr2 = _sliced(el.convection_matrix(rho, power=2), t_act)
        e_b = _sliced(el.node_indicator(nt, nt - 1, rb), t_act)

        axial = epsn * _kron(Kss2, Mrr)
        cross = _kron(Css, Crr2.T)
        mixed = -epsn * (cross + cross.T) + epsn * _kron(Ms1, Krr3)
        transverse = _kron(Ms1, Krr)
        if m >= 1:
            Mrinv = _sliced(el.mass_matrix(rho, power=-1, zero_singular_node=True), t_act)
            transverse = transverse + (m * m) * _kron(Ms1, Mrinv)
        bflat = eps ** (n - 1) * _kron(Mss, e_b)
        bexact = math.sqrt(1.0 + eps**2 * rb**2) * bflat
        mass = epsn * _kron(Mss2, Mrr)

    elif spec.kind == "interval":
        L = spec.params["half_length"]
        t = np.linspace(-L, L, t_cells + 1)
        nt = t.size
        t_act = np.arange(nt)

        if s_treatment == "free":
            raise AssemblyError("n = 1 cone problems need the vertex pooled or removed "
                                "(the transverse weight 1/s is singular there)")
        Ms1 = _sliced(el.mass_matrix(s), s_act)
        Mss = _sliced(el.mass_matrix(s, power=1), s_act)
        Msinv = _sliced(el.mass_matrix(s, power=-1, zero_singular_node=True), s_act)
        Kss = _sliced(el.stiffness_matrix(s, power=1), s_act)
        Cs1 = _sliced(el.convection_matrix(s), s_act)

        Mt = el.mass_matrix(t)
        Kt = el.stiffness_matrix(t)
        Ktt2 = el.stiffness_matrix(t, power=2)
        Ctt = el.convection_matrix(t, power=1)
        ends = el.node_indicator(nt, 0) + el.node_indicator(nt, nt - 1)

        axial = epsn * _kron(Kss, Mt)
        cross = _kron(Cs1, Ctt.T)
        mixed = -epsn * (cross + cross.T) + epsn * _kron(Msinv, Ktt2)
        transverse = (1.0 / eps) * _kron(Msinv, Kt)
        bflat = _kron(Ms1, ends)
        bexact = math.sqrt(1.0 + eps**2 * L**2) * bflat
        mass = epsn * _kron(Mss, Mt)

    elif spec.kind == "rectangle" and n == 2:
        sides = [float(v) for v in spec.params["sides"]]
        ts = [np.linspace(-0.5 * v, 0.5 * v, t_cells + 1) for v in sides]
        Mt = [el.mass_matrix(t) for t in ts]
        Kt = [el.stiffness_matrix(t) for t in ts]
        Ktt2 = [el.stiffness_matrix(t, power=2) for t in ts]
        Ct = [el.convection_matrix(t, power=1) for t in ts]
        ends = [el.node_indicator(t.size, 0) + el.node_indicator(t.size, t.size - 1)
                for t in ts]

        Ms1 = _sliced(el.mass_matrix(s), s_act)
        Mss = _sliced(el.mass_matrix(s, power=1), s_act)
        Mss2 = _sliced(el.mass_matrix(s, power=2), s_act)
        Kss2 = _sliced(el.stiffness_matrix(s, power=2), s_act)
        Css = _sliced(el.convection_matrix(s, power=1), s_act)

        axial = epsn * _kron(Kss2, Mt[0], Mt[1])
        mixed = epsn * (_kron(Ms1, Ktt2[0], Mt[1]) + _kron(Ms1, Mt[0], Ktt2[1]))
        c1 = _kron(Css, Ct[0].T, Mt[1])
        c2 = _kron(Css, Mt[0], Ct[1].T)
        c12 = _kron(Ms1, Ct[0], Ct[1].T)
        mixed = mixed - epsn * (c1 + c1.T) - epsn * (c2 + c2.T) + epsn * (c12 + c12.T)
        transverse = _kron(Ms1, Kt[0], Mt[1]) + _kron(Ms1, Mt[0], Kt[1])
        bflat = eps * (_kron(Mss, ends[0], Mt[1]) + _kron(Mss, Mt[0], ends[1]))
        bexact = eps * (math.sqrt(1.0 + eps**2 * (0.5 * sides[0]) ** 2)
                        * _kron(Mss, ends[0], Mt[1])
                        + math.sqrt(1.0 + eps**2 * (0.5 * sides[1]) ** 2)
                        * _kron(Mss, Mt[0], ends[1]))
        mass = epsn * _kron(Mss2, Mt[0], Mt[1])
    else:
        raise AssemblyError(
            f"unsupported cone cross-section/mode: {spec.kind!r} with {mode.reduction}")

    if pool:
        nt_act = axial.shape[0] // s_act.size
        P = _vertex_pool(s_act.size, nt_act)
        axial, mixed, transverse, bexact, bflat, mass = (
            (P.T @ mat @ P).tocsr()
            for mat in (axial, mixed, transverse, bexact, bflat, mass))
    energy = (axial + mixed + transverse).tocsr()
    return energy, bexact.tocsr(), bflat.tocsr(), axial.tocsr(), transverse.tocsr(), mass.tocsr()


def assemble_cone(cs: CrossSection, eps: float, a: float, s_mesh: Mesh1D,
                  t_cells: int = 48, mode: ConeMode | None = None) -> Assembly:
    """Truncated-cone Robin pencil in stretched coordinates on (0, a) x omega.

    Axial degrees of freedom vanish at s = 0 and s = a (the form core), the
    lateral boundary carries the exact surface density
    eps^(n-1) s^(n-1) sqrt(1 + eps^2 rho(t)) and the coupling is 1.
    """
    if eps <= 0:
        raise AssemblyError(f"eps must be positive, got {eps}")
    if a <= 0:
        raise AssemblyError(f"a must be positive, got {a}")
    if mode is None:
        mode = (ConeMode("fourier", 0) if cs.spec.kind == "ball"
                else ConeMode("full_tensor"))
    s_treatment = "dirichlet" if (mode.reduction == "fourier" and mode.m >= 1) else "pooled"
    energy, bex, bfl, axial, transverse, mass = _cone_matrices(
        cs, eps, a, s_mesh, t_cells, mode, s_treatment)
    n = cs.n
    meta = {
        "problem": "cone",
        "cross_section": cs.label(),
        "eps": eps,
        "a": a,
        "mode": mode.label(),
        "n": n,
        "n_omega": cs.n_omega,
        "radius_R": cs.radius_R,
        "mesh": f"{s_mesh.descriptor()};t={t_cells}",
        "dof": mass.shape[0],
        "shift_hint": 1.5 * (-cs.n_omega**2 / (n**2 * eps**2)),
    }
    return Assembly(dim=mass.shape[0], energy=energy, boundary=bex, mass=mass,
                    meta=meta,
                    blocks={"axial": axial, "transverse": transverse,
                            "boundary_flat": bfl})


def _pencil_top(P: sp.spmatrix, Q: sp.spmatrix) -> float:
    """Largest eigenvalue of the small dense pencil (P, Q), Q positive definite."""
    import scipy.linalg as dla
    vals = dla.eigh(P.toarray(), Q.toarray(), eigvals_only=True)
    return float(vals[-1])


def _trace_top_bound(cs: CrossSection, eps: float, s_mesh: Mesh1D, t_cells: int) -> float:
    """Certified upper bound for the top of the trace pencil.

    The gradient part is positive semidefinite, so the top is at most the top
    of (boundary, mass); both are Kronecker products of 1D factors, and the
    top of a Kronecker pencil with positive-semidefinite numerators is the
    product of the 1D tops.  Small dense 1D solves make this exact up to
    rounding, which the largest-end solver needs for its shift.
    """
    s = s_mesh.nodes
    Mss = el.mass_matrix(s, power=1)
    Mss2 = el.mass_matrix(s, power=2)
    s_top = _pencil_top(Mss, Mss2)
    spec = cs.spec
    if spec.kind == "ball":
        rb = spec.params["radius"]
        rho = np.linspace(0.0, rb, t_cells + 1)
        t_top = _pencil_top(el.node_indicator(rho.size, rho.size - 1, rb),
                            el.mass_matrix(rho, power=1))
        bound = math.sqrt(1.0 + eps**2 * rb**2) / eps * s_top * t_top
    else:  # rectangle, n = 2
        sides = [float(v) for v in spec.params["sides"]]
        bound = 0.0
        for ax, side in enumerate(sides):
            t = np.linspace(-0.5 * side, 0.5 * side, t_cells + 1)
            ends = el.node_indicator(t.size, 0) + el.node_indicator(t.size, t.size - 1)
            t_top = _pencil_top(ends, el.mass_matrix(t))
            bound += (math.sqrt(1.0 + eps**2 * (0.5 * side) ** 2) / eps
                      * s_top * t_top)
    return 1.000001 * bound + 1e-12


def assemble_trace_problem(cs: CrossSection, eps: float, a: float, delta: float,
                           s_cells: int = 32, t_cells: int = 24) -> Assembly:
    """Extremal problem for the boundary-trace constant on the truncated cone.

    Returns the pencil (boundary - delta * gradient_energy) x = C mass x; its
    largest eigenvalue (clipped at 0) is the discrete optimal constant in
    ||u||^2_boundary <= delta ||grad u||^2 + C ||u||^2.  No Dirichlet
    conditions: the trace inequality quantifies over all of H^1.
    """
    if delta <= 0:
        raise AssemblyError(f"delta must be positive, got {delta}")
    if cs.spec.kind == "interval":
        raise AssemblyError("trace problem needs n >= 2 (vertex values of the "
                            "transverse gradient are unconstrained for n = 1)")
    mode = (ConeMode("fourier", 0) if cs.spec.kind == "ball"
            else ConeMode("full_tensor"))
    s_mesh = build_mesh_1d(0.0, a, s_cells, 1.0)
    energy, bex, _bfl, _ax, _tr, mass = _cone_matrices(
        cs, eps, a, s_mesh, t_cells, mode, s_treatment="free")
    meta = {
        "problem": "trace",
        "cross_section": cs.label(),
        "eps": eps,
        "a": a,
        "delta": delta,
        "mode": mode.label(),
        "mesh": f"{s_mesh.descriptor()};t={t_cells}",
        "dof": mass.shape[0],
        "top_bound": _trace_top_bound(cs, eps, s_mesh, t_cells),
    }
    # pencil convention: (energy_slot - coupling * boundary_slot) with
    # energy_slot = boundary mass, boundary_slot = gradient energy, coupling = delta
    return Assembly(dim=mass.shape[0], energy=bex, boundary=energy, mass=mass,
                    meta=meta)
