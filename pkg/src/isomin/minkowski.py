"""Surfaces of the degenerate product inside four-dimensional spacetime.

The map (x, y, z) -> (z, x, y, z) carries the degenerate product space
isometrically onto the null slice {x1 = x4} of Minkowski space with
metric -dx1^2 + dx2^2 + dx3^2 + dx4^2.  Under it the minimal graphs of
this package become spacelike surfaces that are intrinsically flat and
have vanishing mean curvature vector, and this module checks each piece
of that statement numerically: induced Gram matrices, mean curvature
vectors with the tangential part removed, Gaussian curvature of the
induced metric, and the locus where the second form of the original
patch dies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .expr import parse_real_expr, compile_real
from .geometry import (Rect, SurfacePatch, Vec021, brioschi_curvature,
                       default_step, fundamental_forms, _rich1, _rich2,
                       _rich_mixed)


class NonSpacelikeError(Exception):
    """Induced Gram matrix fails positive definiteness."""


class NotInSliceError(Exception):
    """The surface leaves the null slice {x1 = x4}."""


@dataclass(frozen=True, slots=True)
class Vec4M:
    x1: float
    x2: float
    x3: float
    x4: float

    def __add__(self, other: "Vec4M") -> "Vec4M":
        return Vec4M(self.x1 + other.x1, self.x2 + other.x2,
                     self.x3 + other.x3, self.x4 + other.x4)

    def __sub__(self, other: "Vec4M") -> "Vec4M":
        return Vec4M(self.x1 - other.x1, self.x2 - other.x2,
                     self.x3 - other.x3, self.x4 - other.x4)

    def __mul__(self, c: float) -> "Vec4M":
        return Vec4M(self.x1 * c, self.x2 * c, self.x3 * c, self.x4 * c)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "Vec4M":
        return Vec4M(self.x1 / c, self.x2 / c, self.x3 / c, self.x4 / c)

    def __neg__(self) -> "Vec4M":
        return Vec4M(-self.x1, -self.x2, -self.x3, -self.x4)

    @property
    def sup_norm(self) -> float:
        return max(abs(self.x1), abs(self.x2), abs(self.x3), abs(self.x4))


def lorentz_inner(v: Vec4M, w: Vec4M) -> float:
    """Scalar product of signature (-,+,+,+).

    The x4 and x1 products are grouped together so that they cancel
    exactly (not just approximately) for vectors in the null slice
    {x1 = x4}, making the slice embedding an isometry in floating
    point and not only in exact arithmetic.
    """
    return (v.x2 * w.x2 + v.x3 * w.x3) + (v.x4 * w.x4 - v.x1 * w.x1)


def iota_embed(p: Vec021) -> Vec4M:
    """(x, y, z) -> (z, x, y, z), the isometry onto the null slice."""
    return Vec4M(p.z, p.x, p.y, p.z)


@dataclass(frozen=True, slots=True)
class MinkSurface:
    """Parametrized surface in Minkowski space over a rectangle."""

    evaluator: Callable[[float, float], Vec4M]
    domain: Rect

    def __call__(self, u: float, v: float) -> Vec4M:
        return self.evaluator(u, v)


def iota_lift(s: SurfacePatch) -> MinkSurface:
    """Push a degenerate-product patch through the slice embedding."""
    return MinkSurface(lambda u, v: iota_embed(s(u, v)), s.domain)


def mink_surface_from_exprs(x1, x2, x3, x4, domain: Rect) -> MinkSurface:
    """Surface from four coordinate expressions in u and v."""
    fns = [compile_real(parse_real_expr(c) if isinstance(c, str) else c)
           for c in (x1, x2, x3, x4)]

    def evaluator(u: float, v: float) -> Vec4M:
        return Vec4M(*(fn(u, v) for fn in fns))

    return MinkSurface(evaluator, domain)


def _jets4(s: MinkSurface, u: float, v: float, h: float):
    def at(du: float, dv: float) -> Vec4M:
        return s(u + du * h, v + dv * h)

    f0 = at(0, 0)
    um, umh, uph, up = at(-1, 0), at(-0.5, 0), at(0.5, 0), at(1, 0)
    vm, vmh, vph, vp = at(0, -1), at(0, -0.5), at(0, 0.5), at(0, 1)
    corners = {k: at(*k) for k in
               [(1, 1), (1, -1), (-1, 1), (-1, -1),
                (0.5, 0.5), (0.5, -0.5), (-0.5, 0.5), (-0.5, -0.5)]}
    f_u = _rich1(um, umh, uph, up, h)
    f_v = _rich1(vm, vmh, vph, vp, h)
    f_uu = _rich2(um, umh, f0, uph, up, h)
    f_vv = _rich2(vm, vmh, f0, vph, vp, h)
    f_uv = _rich_mixed(corners, h)
    return f_u, f_v, f_uu, f_uv, f_vv


def _gram(f_u: Vec4M, f_v: Vec4M) -> tuple[float, float, float]:
    return (lorentz_inner(f_u, f_u), lorentz_inner(f_u, f_v),
            lorentz_inner(f_v, f_v))


def _require_spacelike(g11: float, g12: float, g22: float,
                       where: tuple[float, float]) -> float:
    scale = max(1.0, abs(g11), abs(g22))
    det = g11 * g22 - g12 * g12
    if g11 <= 1e-10 * scale or det <= 1e-10 * scale * scale:
        raise NonSpacelikeError(
            f"Gram matrix not positive definite at {where}: "
            f"g11 = {g11:.3e}, det = {det:.3e}")
    return det


def normal_second_form(s: MinkSurface, u: float, v: float,
                       step: float | None = None):
    """Normal components (N_uu, N_uv, N_vv) plus the Gram triple.

    The tangential part of each second partial is removed by solving
    the 2x2 Gram system with the ambient scalar product; what remains
    is normal to the surface whatever the causal type of the normal
    plane is.
    """
    h = default_step(s.domain) if step is None else step
    f_u, f_v, f_uu, f_uv, f_vv = _jets4(s, u, v, h)
    g11, g12, g22 = _gram(f_u, f_v)
    det = _require_spacelike(g11, g12, g22, (u, v))

    def reject(x: Vec4M) -> Vec4M:
        b1 = lorentz_inner(x, f_u)
        b2 = lorentz_inner(x, f_v)
        a = (g22 * b1 - g12 * b2) / det
        b = (g11 * b2 - g12 * b1) / det
        return x - a * f_u - b * f_v

    return (reject(f_uu), reject(f_uv), reject(f_vv)), (g11, g12, g22)


def mean_curvature_vector(s: MinkSurface, u: float, v: float,
                          step: float | None = None) -> Vec4M:
    """Half the metric trace of the normal-valued second form."""
    (n_uu, n_uv, n_vv), (g11, g12, g22) = normal_second_form(s, u, v, step)
    det = g11 * g22 - g12 * g12
    traced = (g22 * n_uu - 2.0 * g12 * n_uv + g11 * n_vv) / det
    return 0.5 * traced


def induced_metric_at(s: MinkSurface, u: float, v: float,
                      step: float | None = None
                      ) -> tuple[float, float, float]:
    """Gram triple (E, F, G) of the first derivatives, checked spacelike."""
    h = default_step(s.domain) if step is None else step

    def at(du, dv):
        return s(u + du * h, v + dv * h)

    f_u = _rich1(at(-1, 0), at(-0.5, 0), at(0.5, 0), at(1, 0), h)
    f_v = _rich1(at(0, -1), at(0, -0.5), at(0, 0.5), at(0, 1), h)
    g11, g12, g22 = _gram(f_u, f_v)
    _require_spacelike(g11, g12, g22, (u, v))
    return g11, g12, g22


def gaussian_curvature_induced(s: MinkSurface, u: float, v: float,
                               step: float | None = None) -> float:
    """Intrinsic curvature of the induced metric (Brioschi formula)."""
    hm = 0.01 * max(s.domain.extent, 1.0) if step is None else step

    def metric(uu: float, vv: float):
        return induced_metric_at(s, uu, vv)

    return brioschi_curvature(metric, u, v, step=hm)


@dataclass(frozen=True, slots=True)
class FlatZmcReport:
    max_mean_curvature: float
    max_abs_curvature: float
    spacelike_violations: tuple[tuple[float, float], ...]
    tol: float
    samples: int

    @property
    def passed(self) -> bool:
        return (self.max_mean_curvature <= self.tol
                and self.max_abs_curvature <= self.tol
                and not self.spacelike_violations)


def verify_flat_zmc(s: MinkSurface, grid: tuple[int, int] = (9, 9),
                    tol: float = 1e-5) -> FlatZmcReport:
    """Sample the three defining conditions over an interior grid.

    Verdict passes only when the worst sampled mean curvature vector
    norm and the worst sampled intrinsic curvature are both below tol
    and the induced metric stayed positive definite everywhere.
    """
    dom = s.domain
    margin = 0.05 * max(dom.extent, 1.0)
    nu, nv = grid
    us = np.linspace(dom.u0 + margin, dom.u1 - margin, nu)
    vs = np.linspace(dom.v0 + margin, dom.v1 - margin, nv)
    worst_h = 0.0
    worst_k = 0.0
    violations: list[tuple[float, float]] = []
    for u in us:
        for v in vs:
            try:
                hvec = mean_curvature_vector(s, float(u), float(v))
                kval = gaussian_curvature_induced(s, float(u), float(v))
            except NonSpacelikeError:
                violations.append((float(u), float(v)))
                continue
            worst_h = max(worst_h, hvec.sup_norm)
            worst_k = max(worst_k, abs(kval))
    return FlatZmcReport(worst_h, worst_k, tuple(violations), tol, nu * nv)


@dataclass(frozen=True, slots=True)
class LocusCluster:
    point: tuple[float, float]
    node_count: int
    isolated: bool


def vanishing_h_locus(s: SurfacePatch, grid: tuple[int, int] = (65, 65),
                      tol: float = 0.05) -> list[LocusCluster]:
    """Grid clusters where the second form vanishes entirely.

    Nodes with ‖h‖∞ < tol merge by 8-connectivity.  A cluster counts as
    isolated when it spans at most a couple of cells and no other
    cluster comes within five grid cells; anything larger is flagged as
    a suspected totally geodesic region rather than a singular point of
    the second form.
    """
    dom = s.domain
    nu, nv = grid
    margin = 0.02 * max(dom.extent, 1.0)
    us = np.linspace(dom.u0 + margin, dom.u1 - margin, nu)
    vs = np.linspace(dom.v0 + margin, dom.v1 - margin, nv)
    hit = np.zeros((nu, nv), dtype=bool)
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            forms = fundamental_forms(s, float(u), float(v))
            norm = max(abs(forms.h11), abs(forms.h12), abs(forms.h22))
            hit[i, j] = norm < tol

    clusters: list[list[tuple[int, int]]] = []
    seen = np.zeros_like(hit)
    for i in range(nu):
        for j in range(nv):
            if not hit[i, j] or seen[i, j]:
                continue
            stack = [(i, j)]
            seen[i, j] = True
            nodes = []
            while stack:
                a, b = stack.pop()
                nodes.append((a, b))
                for da in (-1, 0, 1):
                    for db in (-1, 0, 1):
                        na, nb = a + da, b + db
                        if 0 <= na < nu and 0 <= nb < nv \
                                and hit[na, nb] and not seen[na, nb]:
                            seen[na, nb] = True
                            stack.append((na, nb))
            clusters.append(nodes)

    out: list[LocusCluster] = []
    for nodes in clusters:
        arr = np.array(nodes)
        ci, cj = arr.mean(axis=0)
        diam = max(int(arr[:, 0].max() - arr[:, 0].min()),
                   int(arr[:, 1].max() - arr[:, 1].min()))
        near_other = False
        for other in clusters:
            if other is nodes:
                continue
            gap = min(max(abs(a - c), abs(b - d))
                      for a, b in nodes for c, d in other)
            if gap <= 5:
                near_other = True
        nearest_i = int(round(ci))
        nearest_j = int(round(cj))
        point = (float(us[nearest_i]), float(vs[nearest_j]))
        out.append(LocusCluster(point, len(nodes),
                                diam <= 2 and not near_other))
    out.sort(key=lambda c: (c.point[0] ** 2 + c.point[1] ** 2, c.point))
    return out


def slice_project(s: MinkSurface, tol: float = 1e-9,
                  grid: tuple[int, int] = (17, 17)) -> SurfacePatch:
    """Inverse of the embedding on the null slice {x1 = x4}.

    Samples the surface first and raises with the worst offender if any
    sample leaves the slice by more than tol; the returned patch then
    simply drops the first coordinate.
    """
    dom = s.domain
    nu, nv = grid
    us = np.linspace(dom.u0, dom.u1, nu)
    vs = np.linspace(dom.v0, dom.v1, nv)
    worst, where = 0.0, (dom.u0, dom.v0)
    for u in us:
        for v in vs:
            p = s(float(u), float(v))
            gap = abs(p.x1 - p.x4)
            if gap > worst:
                worst, where = gap, (float(u), float(v))
    if worst > tol:
        raise NotInSliceError(
            f"|x1 - x4| = {worst:.3e} at {where} exceeds tol {tol:.1e}")

    def evaluator(u: float, v: float) -> Vec021:
        p = s(u, v)
        return Vec021(p.x2, p.x3, p.x4)

    return SurfacePatch(evaluator, dom, kind="closed-form")
