"""Cross-section geometry: supported shapes, exact measures and boundary quadrature.

A cross-section is a bounded domain omega in R^n from a small catalog
(interval, n-ball, rectangle, annulus), always centered at the origin.
Everything downstream needs only a handful of numbers -- the volume, the
surface measure, their ratio, the circumradius -- plus a boundary
quadrature whose facets carry the exact squared normal moment
rho(t) = (t . nu(t))^2.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CrossSectionSpec",
    "CrossSection",
    "BoundaryFacet",
    "make_cross_section",
    "boundary_quadrature",
    "spec_to_json",
    "spec_from_json",
]

_KINDS = ("interval", "ball", "rectangle", "annulus")


class GeometryError(ValueError):
    """Invalid cross-section specification; message names the offending field."""


@dataclass(frozen=True)
class CrossSectionSpec:
    """Shape selector plus kind-specific positive lengths.

    params keys by kind:
      interval:  half_length
      ball:      radius
      rectangle: sides (full side lengths, one per axis)
      annulus:   inner, outer  (n = 2 only)
    """

    kind: str
    n: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise GeometryError(f"kind: unknown cross-section kind {self.kind!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise GeometryError(f"n: must be a positive integer, got {self.n!r}")
        if self.kind == "interval":
            if self.n != 1:
                raise GeometryError("n: interval requires n = 1")
            self._require_positive("half_length")
        elif self.kind == "ball":
            if self.n < 2:
                raise GeometryError("n: ball requires n >= 2")
            self._require_positive("radius")
        elif self.kind == "rectangle":
            if self.n < 2:
                raise GeometryError("n: rectangle requires n >= 2")
            sides = self.params.get("sides")
            if sides is None or len(sides) != self.n:
                raise GeometryError("sides: rectangle needs one side length per axis")
            if any(s <= 0 for s in sides):
                raise GeometryError("sides: all side lengths must be positive")
        elif self.kind == "annulus":
            if self.n != 2:
                raise GeometryError("n: annulus requires n = 2")
            self._require_positive("inner")
            self._require_positive("outer")
            if self.params["inner"] >= self.params["outer"]:
                raise GeometryError("inner: annulus requires inner < outer")

    def _require_positive(self, key):
        val = self.params.get(key)
        if val is None or val <= 0:
            raise GeometryError(f"{key}: must be strictly positive, got {val!r}")

    def label(self) -> str:
        p = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}(n={self.n},{p})"


@dataclass(frozen=True)
class CrossSection:
    """Geometry record: exact measures and the two constants used everywhere.

    n_omega = surf / vol_n is the surface-to-volume ratio (units 1/length),
    radius_R = sup over omega of |t| (circumradius, units length).
    """

    spec: CrossSectionSpec
    vol_n: float
    surf: float
    n_omega: float
    radius_R: float

    @property
    def n(self) -> int:
        return self.spec.n

    def label(self) -> str:
        return self.spec.label()


@dataclass(frozen=True)
class BoundaryFacet:
    """One quadrature patch of the boundary of omega.

    weight carries the exact surface measure of the patch, so the weights sum
    to surf exactly (catalog shapes only have flat faces, circular arcs and
    sphere bands, all with closed-form patch areas).  rho = (t . nu)^2 with
    nu the outward unit normal at the patch point.
    """

    point: np.ndarray
    normal: np.ndarray
    weight: float
    rho: float


def _unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def make_cross_section(spec: CrossSectionSpec) -> CrossSection:
    """Closed-form measures for a catalog shape."""
    k, n, p = spec.kind, spec.n, spec.params
    if k == "interval":
        half = p["half_length"]
        vol, surf = 2.0 * half, 2.0
        radius = half
    elif k == "ball":
        r = p["radius"]
        wn = _unit_ball_volume(n)
        vol = wn * r**n
        surf = n * wn * r ** (n - 1)
        radius = r
    elif k == "rectangle":
        sides = [float(s) for s in p["sides"]]
        vol = math.prod(sides)
        surf = sum(2.0 * vol / s for s in sides)
        radius = 0.5 * math.hypot(*sides)
    else:  # annulus
        ri, ro = p["inner"], p["outer"]
        vol = math.pi * (ro**2 - ri**2)
        surf = 2.0 * math.pi * (ro + ri)
        radius = ro
    return CrossSection(spec=spec, vol_n=vol, surf=surf, n_omega=surf / vol, radius_R=radius)


def _sin_power_antiderivative(k: int, theta: float) -> float:
    """Antiderivative of sin^k at theta (exact recursion)."""
    if k == 0:
        return theta
    if k == 1:
        return -math.cos(theta)
    return (-math.cos(theta) * math.sin(theta) ** (k - 1)
            + (k - 1) * _sin_power_antiderivative(k - 2, theta)) / k


def _sphere_patches(dim: int, resolution: int):
    """Quadrature patches on the unit sphere S^dim in R^(dim+1).

    Yields (point, weight) with exact patch areas: polar bands stacked
    recursively down to the circle / point pair.  Patch points sit at band
    midpoints in each angle.
    """
    if dim == 0:
        yield np.array([1.0]), 1.0
        yield np.array([-1.0]), 1.0
        return
    if dim == 1:
        dphi = 2.0 * math.pi / resolution
        for i in range(resolution):
            phi = (i + 0.5) * dphi
            yield np.array([math.cos(phi), math.sin(phi)]), dphi
        return
    thetas = np.linspace(0.0, math.pi, resolution + 1)
    sub = list(_sphere_patches(dim - 1, resolution))
    for t0, t1 in zip(thetas[:-1], thetas[1:]):
        band = _sin_power_antiderivative(dim - 1, t1) - _sin_power_antiderivative(dim - 1, t0)
        tm = 0.5 * (t0 + t1)
        c, s = math.cos(tm), math.sin(tm)
        for y, wy in sub:
            yield np.concatenate(([c], s * y)), band * wy


def _rect_face_patches(sides, axis: int, sign: float, resolution: int):
    """Patches of one rectangle face t_axis = sign * sides[axis]/2."""
    n = len(sides)
    other = [i for i in range(n) if i != axis]
    grids = []
    for i in other:
        edges = np.linspace(-0.5 * sides[i], 0.5 * sides[i], resolution + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        grids.append([(m, sides[i] / resolution) for m in mids])
    normal = np.zeros(n)
    normal[axis] = sign
    for combo in itertools.product(*grids) if grids else [()]:
        point = np.zeros(n)
        point[axis] = sign * 0.5 * sides[axis]
        w = 1.0
        for i, (m, dw) in zip(other, combo):
            point[i] = m
            w *= dw
        yield point, normal.copy(), w


def boundary_quadrature(cs: CrossSection, resolution: int = 32) -> list[BoundaryFacet]:
    """Facets covering the boundary of omega with exact weights and exact rho.

    resolution controls the number of patches per face / circle / polar band;
    the interval always returns its two endpoint facets with weight 1.
    """
    if resolution < 2:
        raise GeometryError(f"resolution: must be >= 2, got {resolution}")
    spec = cs.spec
    facets: list[BoundaryFacet] = []
    if spec.kind == "interval":
        half = spec.params["half_length"]
        for sgn in (1.0, -1.0):
            facets.append(BoundaryFacet(
                point=np.array([sgn * half]), normal=np.array([sgn]),
                weight=1.0, rho=half**2))
    elif spec.kind == "ball":
        r = spec.params["radius"]
        for y, w in _sphere_patches(spec.n - 1, resolution):
            facets.append(BoundaryFacet(
                point=r * y, normal=y, weight=w * r ** (spec.n - 1), rho=r**2))
    elif spec.kind == "rectangle":
        sides = [float(s) for s in spec.params["sides"]]
        for axis in range(spec.n):
            for sgn in (1.0, -1.0):
                for point, normal, w in _rect_face_patches(sides, axis, sgn, resolution):
                    rho = (0.5 * sides[axis]) ** 2
                    facets.append(BoundaryFacet(point=point, normal=normal,
                                                weight=w, rho=rho))
    else:  # annulus
        ri, ro = spec.params["inner"], spec.params["outer"]
        for y, w in _sphere_patches(1, resolution):
            facets.append(BoundaryFacet(point=ro * y, normal=y, weight=w * ro, rho=ro**2))
        for y, w in _sphere_patches(1, resolution):
            facets.append(BoundaryFacet(point=ri * y, normal=-y, weight=w * ri, rho=ri**2))
    return facets


def spec_to_json(spec: CrossSectionSpec) -> str:
    return json.dumps({"kind": spec.kind, "n": spec.n, "params": spec.params},
                      sort_keys=True)


def spec_from_json(text: str | dict) -> CrossSectionSpec:
    obj = json.loads(text) if isinstance(text, str) else text
    extra = set(obj) - {"kind", "n", "params"}
    if extra:
        raise GeometryError(f"unknown keys in cross-section object: {sorted(extra)}")
    return CrossSectionSpec(kind=obj["kind"], n=int(obj["n"]),
                            params=dict(obj.get("params", {})))
