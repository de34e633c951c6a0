"""Closed-form and semi-analytic reference values.

These are the independent yardsticks the rest of the package is checked
against: the hydrogen-like effective spectrum, the exact round-cone ground
state, transcendental Robin roots on an interval, their rectangle sums, a
high-accuracy radial shooting solver on the unit ball, the exterior lower
bound, and the planar-sector leading law.

All root finding is bracketed bisection to a fixed absolute tolerance; no
derivative-based methods, so results are deterministic and convergence is
guaranteed once a bracket is found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

__all__ = [
    "EffectiveSpec",
    "effective_exact",
    "round_cone_exact",
    "RoundCone",
    "interval_robin_oracle",
    "interval_ground_energy",
    "IntervalRobinResult",
    "rectangle_separation",
    "ball_robin_radial_oracle",
    "exterior_lower_bound",
    "sector_law",
]

_BISECT_TOL = 1e-12


@dataclass(frozen=True)
class EffectiveSpec:
    """Parameters of the 1D effective operator -f'' + ((n^2-2n)/(4s^2) - n_omega/(lam*s)) f."""

    n: int
    n_omega: float
    lam: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.n_omega <= 0 or self.lam <= 0:
            raise ValueError("n_omega and lam must be positive")


def effective_exact(spec: EffectiveSpec, j: int) -> float:
    """j-th negative eigenvalue -n_omega^2 / ((2j + n - 2)^2 lam^2)."""
    if j < 1:
        raise ValueError(f"index j must be >= 1, got {j}")
    if spec.n < 2:
        raise ValueError("effective_exact requires n >= 2")
    return -spec.n_omega**2 / ((2 * j + spec.n - 2) ** 2 * spec.lam**2)


class RoundCone(NamedTuple):
    energy: float
    decay_rate: float


def round_cone_exact(eps: float) -> RoundCone:
    """Exact ground state of the round cone with unit-ball cross-section.

    energy = -(1 + eps^2)/eps^2 and the axial decay rate sqrt(1+eps^2)/eps of
    the exact eigenfunction, which is what truncation planning needs.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return RoundCone(energy=-(1.0 + eps**2) / eps**2,
                     decay_rate=math.sqrt(1.0 + eps**2) / eps)


def _bisect(f, lo: float, hi: float, tol: float = _BISECT_TOL) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError(f"no sign change on bracket [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


class IntervalRobinResult(NamedTuple):
    values: list
    negative_count: int


def interval_robin_oracle(r: float, half_length: float = 1.0,
                          count: int = 1) -> IntervalRobinResult:
    """Eigenvalues of -f'' on (-L, L) with f'(+-L) = +-r f(+-L), r > 0.

    Negative eigenvalues are -k^2 with k tanh(kL) = r (even mode, always one)
    and k coth(kL) = r (odd mode, present iff r L > 1).  Positive ones come
    from the trigonometric families kappa tan(kappa L) = -r (even) and
    kappa cot(kappa L) = r (odd), one root per branch.
    """
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    L = half_length
    vals: list[float] = []
    pad = 1e-9

    k_hi = r + 1.0 / L + 1.0
    vals.append(-_bisect(lambda k: k * math.tanh(k * L) - r, 1e-300, k_hi) ** 2)
    if r * L > 1.0:
        vals.append(-_bisect(lambda k: k / math.tanh(k * L) - r, 1e-12, k_hi) ** 2)
    negative_count = len(vals)
    # the odd ground mode crosses zero at r L = 1 (eigenfunction f = t) and
    # turns trigonometric below it
    if r * L == 1.0:
        vals.append(0.0)
    elif r * L < 1.0:
        vals.append(_bisect(lambda k: k / math.tan(k * L) - r,
                            pad / L, (math.pi / 2 - pad) / L) ** 2)

    # remaining trigonometric branches, one root per half-pi window
    branch = 0
    while len(vals) < count:
        branch += 1
        m = (branch + 1) // 2
        if branch % 2 == 1:  # even family: kappa tan(kappa L) = -r
            lo, hi = ((2 * m - 1) * math.pi / 2 + pad) / L, (m * math.pi - pad) / L
            f = lambda k: k * math.tan(k * L) + r
        else:  # odd family: kappa cot(kappa L) = r
            lo, hi = (m * math.pi + pad) / L, ((2 * m + 1) * math.pi / 2 - pad) / L
            f = lambda k: k / math.tan(k * L) - r
        vals.append(_bisect(f, lo, hi) ** 2)
    vals = sorted(vals)[:count]
    return IntervalRobinResult(values=vals, negative_count=negative_count)


def interval_ground_energy(r: float, half_length: float = 1.0) -> float:
    """Lowest interval Robin eigenvalue for any real r (smooth through r = 0).

    Needed by the boundary-slope checks, which difference across r = 0: the
    ground state is hyperbolic for r > 0, constant at r = 0 and trigonometric
    for r < 0.
    """
    L = half_length
    if r == 0.0:
        return 0.0
    if r > 0.0:
        k_hi = r + 1.0 / L + 1.0
        return -_bisect(lambda k: k * math.tanh(k * L) - r, 1e-300, k_hi) ** 2
    pad = 1e-12
    k = _bisect(lambda k: k * math.tan(k * L) + r, pad, (math.pi / 2 - 1e-9) / L)
    return k**2


def rectangle_separation(r: float, sides, count: int = 1) -> list:
    """Sorted sums of per-axis interval Robin eigenvalues on a box."""
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    per_axis = [interval_robin_oracle(r, 0.5 * s, count).values for s in sides]
    sums = [0.0]
    for vals in per_axis:
        sums = [a + b for a in sums for b in vals]
    return sorted(sums)[:count]


def _radial_mismatch(E: float, n: int, r: float, s0: float = 1e-6) -> float:
    """f'(1) - r f(1) for the regular radial solution of -f'' - (n-1)/rho f' = E f."""
    a1 = -E / (2.0 * n)
    a2 = E * E / (8.0 * n * (n + 2.0))
    f0 = 1.0 + a1 * s0**2 + a2 * s0**4
    fp0 = 2.0 * a1 * s0 + 4.0 * a2 * s0**3

    def rhs(rho, y):
        f, fp = y
        return [fp, -(n - 1.0) / rho * fp - E * f]

    sol = solve_ivp(rhs, (s0, 1.0), [f0, fp0], method="DOP853",
                    rtol=1e-12, atol=1e-14)
    f1, fp1 = sol.y[0, -1], sol.y[1, -1]
    scale = max(abs(f1), abs(fp1), 1.0)
    return (fp1 - r * f1) / scale


def ball_robin_radial_oracle(n: int, r: float, tol: float = 1e-12) -> float:
    """Ground Robin eigenvalue on the unit n-ball by radial shooting.

    Solves -(rho^(n-1) f')' / rho^(n-1) = E f with f'(1) = r f(1) for the
    nodeless branch; E < 0 for r > 0 and E > 0 for r < 0.  Independent of the
    finite-element path (adaptive high-order ODE integration plus bisection).
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if r == 0.0:
        return 0.0
    g = lambda E: _radial_mismatch(E, n, r)
    if r > 0.0:
        lo = -2.0 * (n * r + 3.0 * r * r + 0.25)
        while g(lo) <= 0.0:
            lo *= 2.0
        hi = 0.0
    else:
        lo, hi = 0.0, 0.5
        while g(hi) >= 0.0:
            hi += 0.5
            if hi > 50.0:
                raise RuntimeError("no bracket for the r < 0 ground state")
    return _bisect(g, lo, hi, tol)


def exterior_lower_bound(n_omega: float, lam: float, c: float) -> float:
    """Lower bound -n_omega/(c lam) for the effective operator on (c, infinity)."""
    if c <= 0 or lam <= 0:
        raise ValueError("c and lam must be positive")
    return -n_omega / (c * lam)


def sector_law(j: int, eps: float) -> float:
    """Leading planar-sector eigenvalue -1/((2j-1)^2 eps^2)."""
    if j < 1:
        raise ValueError(f"index j must be >= 1, got {j}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return -1.0 / ((2 * j - 1) ** 2 * eps**2)
