"""Weierstrass-type generation of isotropic minimal surfaces.

A pair (F, G) of holomorphic functions on a simply connected domain, F
without zeros, produces a conformal minimal immersion

    f(u + iv) = Re integral (F, -i F, G) dw

whose pullback metric is |F|^2 (du^2 + dv^2).  Rotating the integrand by
exp(-i theta) sweeps the associated family; theta = pi/2 is the conjugate
surface, equivalently the data (-i F, -i G).  Zeros of F are exactly the
points where the immersion degenerates, which the singularities module
picks apart; here they only show up as flagged cells in validation
reports.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .expr import BinOp, Expr, EvalError, Lit, compile_expr, differentiate
from .geometry import FundamentalForms, Rect, SurfacePatch, Vec021
from .quadrature import integrate_segment


class Data2ViolationError(Exception):
    """The triple phi fails phi1^2 + phi2^2 = 0 beyond tolerance."""


@dataclass(frozen=True, slots=True)
class FamilyAngle:
    """Angle along the associated family, normalised to [0, 2*pi)."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", self.theta % (2.0 * math.pi))

    @property
    def rotor(self) -> complex:
        return cmath.exp(-1j * self.theta)


@dataclass(frozen=True, slots=True)
class WeierstrassData:
    """Holomorphic pair with its base point and parameter rectangle.

    The rectangle is convex, so every straight segment from the base
    point stays inside it and the path integrals below are well defined
    without any path bookkeeping.
    """

    F: Expr
    G: Expr
    base: complex = 0j
    domain: Rect = Rect(-1.0, 1.0, -1.0, 1.0)

    def __post_init__(self):
        if not self.domain.contains(self.base.real, self.base.imag):
            raise ValueError(
                f"base point {self.base} outside domain {self.domain}")


@dataclass(frozen=True, slots=True)
class PhiTriple:
    phi1: Expr
    phi2: Expr
    phi3: Expr


def integrate_holomorphic(ast: Expr, w0: complex, w1: complex,
                          tol: float = 1e-10, max_depth: int = 30) -> complex:
    """Integral of the expression along the straight segment [w0, w1]."""
    return integrate_segment(compile_expr(ast), w0, w1, tol, max_depth)


def _angle(theta: float | FamilyAngle) -> FamilyAngle:
    return theta if isinstance(theta, FamilyAngle) else FamilyAngle(theta)


def surface_from_data(data: WeierstrassData,
                      theta: float | FamilyAngle = 0.0,
                      quad_tol: float = 1e-10) -> SurfacePatch:
    """Member of the associated family as an evaluatable patch.

    The rotation by exp(-i theta) commutes with integration, so it is
    applied to the cached integral values instead of the integrands.
    """
    rot = _angle(theta).rotor
    f_fn = compile_expr(data.F)
    g_fn = compile_expr(data.G)
    base, dom = data.base, data.domain
    slack = 1e-9 * max(dom.extent, 1.0)

    @lru_cache(maxsize=65536)
    def integrals(u: float, v: float) -> tuple[complex, complex]:
        w = complex(u, v)
        return (integrate_segment(f_fn, base, w, quad_tol),
                integrate_segment(g_fn, base, w, quad_tol))

    def ev(u: float, v: float) -> Vec021:
        if not dom.contains(u, v, slack):
            raise ValueError(f"({u}, {v}) outside parameter domain {dom}")
        int_f, int_g = integrals(u, v)
        zf = rot * int_f
        return Vec021(zf.real, zf.imag, (rot * int_g).real)

    return SurfacePatch(ev, dom, kind="weierstrass")


def grid_eval(data: WeierstrassData, theta: float | FamilyAngle = 0.0,
              nu: int = 64, nv: int = 64, quad_tol: float = 1e-10):
    """Evaluate the surface on a full grid.

    Integrates once to the start of each row and then incrementally along
    it, so the work is one short segment per vertex instead of one long
    path.  Returns (us, vs, X, Y, Z) with X[i, j] at (us[i], vs[j]).
    """
    rot = _angle(theta).rotor
    f_fn = compile_expr(data.F)
    g_fn = compile_expr(data.G)
    dom = data.domain
    us = np.linspace(dom.u0, dom.u1, nu)
    vs = np.linspace(dom.v0, dom.v1, nv)
    X = np.empty((nu, nv))
    Y = np.empty((nu, nv))
    Z = np.empty((nu, nv))
    for j, v in enumerate(vs):
        w = complex(us[0], v)
        int_f = integrate_segment(f_fn, data.base, w, quad_tol)
        int_g = integrate_segment(g_fn, data.base, w, quad_tol)
        for i, u in enumerate(us):
            if i > 0:
                w_prev, w = w, complex(u, v)
                int_f += integrate_segment(f_fn, w_prev, w, quad_tol)
                int_g += integrate_segment(g_fn, w_prev, w, quad_tol)
            zf = rot * int_f
            zg = rot * int_g
            X[i, j] = zf.real
            Y[i, j] = zf.imag
            Z[i, j] = zg.real
    return us, vs, X, Y, Z


def surface_from_phi(phi: PhiTriple, base: complex, domain: Rect,
                     grid: tuple[int, int] = (16, 16),
                     tol: float = 1e-8,
                     quad_tol: float = 1e-10) -> SurfacePatch:
    """Surface from a raw holomorphic triple.

    Checks the isotropy condition phi1^2 + phi2^2 = 0 on a grid before
    integrating; the immersion condition |phi1|^2 + |phi2|^2 > 0 is only
    enforced in the aggregate (isolated zeros are legitimate singular
    data and are the singularities module's business).
    """
    fns = [compile_expr(p) for p in (phi.phi1, phi.phi2, phi.phi3)]
    worst = 0.0
    worst_at = complex(domain.u0, domain.v0)
    max_energy = 0.0
    nu, nv = grid
    for i in range(nu):
        for j in range(nv):
            u = domain.u0 + (domain.u1 - domain.u0) * i / (nu - 1)
            v = domain.v0 + (domain.v1 - domain.v0) * j / (nv - 1)
            w = complex(u, v)
            p1, p2 = fns[0](w), fns[1](w)
            energy = abs(p1) ** 2 + abs(p2) ** 2
            max_energy = max(max_energy, energy)
            bad = abs(p1 * p1 + p2 * p2)
            if bad > worst:
                worst, worst_at = bad, w
    if worst > tol * max(1.0, max_energy):
        raise Data2ViolationError(
            f"phi1^2 + phi2^2 = {worst:.3e} at {worst_at} "
            f"(tolerance {tol:.1e})")
    if max_energy <= tol:
        raise Data2ViolationError(
            "|phi1|^2 + |phi2|^2 vanishes on the whole grid")

    slack = 1e-9 * max(domain.extent, 1.0)

    @lru_cache(maxsize=65536)
    def integrals(u: float, v: float) -> tuple[complex, complex, complex]:
        w = complex(u, v)
        return tuple(integrate_segment(fn, base, w, quad_tol) for fn in fns)

    def ev(u: float, v: float) -> Vec021:
        if not domain.contains(u, v, slack):
            raise ValueError(f"({u}, {v}) outside parameter domain {domain}")
        i1, i2, i3 = integrals(u, v)
        return Vec021(i1.real, i2.real, i3.real)

    return SurfacePatch(ev, domain, kind="weierstrass")


@dataclass(frozen=True, slots=True)
class ValidationReport:
    min_abs_f: float
    min_at: complex
    singular_regions: tuple[complex, ...]
    flagged_cells: int
    phi_identity_exact: bool
    eval_failures: tuple[str, ...]
    cell_tol: float

    @property
    def immersion_ok(self) -> bool:
        return self.flagged_cells == 0 and not self.eval_failures


def validate_data(data: WeierstrassData, grid: tuple[int, int] = (33, 33),
                  tol: float | None = None) -> ValidationReport:
    """Scan |F| over the domain and flag candidate singular cells.

    Cells whose sampled |F| dips below a resolution-matched threshold are
    clustered (8-neighbour adjacency) and each cluster reported once.
    The triple (F, -i F, G) satisfies phi1^2 + phi2^2 = 0 by algebra, not
    numerics, so that identity is reported as exact.  Segment hulls from
    the base point are sampled so branch-cut crossings surface here
    rather than as mysterious integration failures later.
    """
    f_fn = compile_expr(data.F)
    g_fn = compile_expr(data.G)
    fp_fn = compile_expr(differentiate(data.F))
    dom = data.domain
    nu, nv = grid
    du = (dom.u1 - dom.u0) / (nu - 1)
    dv = (dom.v1 - dom.v0) / (nv - 1)
    failures: list[str] = []

    absf = [[math.inf] * nv for _ in range(nu)]
    slopes = []
    min_val, min_at = math.inf, complex(dom.u0, dom.v0)
    for i in range(nu):
        for j in range(nv):
            w = complex(dom.u0 + i * du, dom.v0 + j * dv)
            try:
                val = abs(f_fn(w))
            except EvalError as exc:
                failures.append(f"F at {w}: {exc}")
                continue
            absf[i][j] = val
            if val < min_val:
                min_val, min_at = val, w
            try:
                slopes.append(abs(fp_fn(w)))
            except EvalError:
                pass

    if tol is None:
        slopes.sort()
        slope = slopes[len(slopes) // 2] if slopes else 1.0
        tol = 2.0 * math.hypot(du, dv) * max(slope, 1e-12)

    flagged = set()
    for i in range(nu - 1):
        for j in range(nv - 1):
            cell_min = min(absf[i][j], absf[i + 1][j], absf[i][j + 1],
                           absf[i + 1][j + 1])
            if cell_min < tol:
                flagged.add((i, j))

    regions: list[complex] = []
    seen: set[tuple[int, int]] = set()
    for cell in sorted(flagged):
        if cell in seen:
            continue
        stack, cluster = [cell], []
        seen.add(cell)
        while stack:
            ci, cj = stack.pop()
            cluster.append((ci, cj))
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    nb = (ci + di, cj + dj)
                    if nb in flagged and nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
        best = min(cluster,
                   key=lambda c: min(absf[c[0]][c[1]], absf[c[0] + 1][c[1]],
                                     absf[c[0]][c[1] + 1],
                                     absf[c[0] + 1][c[1] + 1]))
        corners = [(best[0], best[1]), (best[0] + 1, best[1]),
                   (best[0], best[1] + 1), (best[0] + 1, best[1] + 1)]
        bi, bj = min(corners, key=lambda c: absf[c[0]][c[1]])
        regions.append(complex(dom.u0 + bi * du, dom.v0 + bj * dv))

    # sample the hull of integration segments for evaluation failures
    for i in range(0, nu, 4):
        for j in range(0, nv, 4):
            w_end = complex(dom.u0 + i * du, dom.v0 + j * dv)
            for t in (0.25, 0.5, 0.75):
                w = data.base + t * (w_end - data.base)
                for name, fn in (("F", f_fn), ("G", g_fn)):
                    try:
                        fn(w)
                    except EvalError as exc:
                        failures.append(f"{name} at {w}: {exc}")

    return ValidationReport(
        min_abs_f=min_val,
        min_at=min_at,
        singular_regions=tuple(regions),
        flagged_cells=len(flagged),
        phi_identity_exact=True,
        eval_failures=tuple(failures),
        cell_tol=tol,
    )


def metric_at(data: WeierstrassData, w: complex) -> float:
    """Conformal factor of the pullback metric, |F(w)|^2."""
    return abs(compile_expr(data.F)(w)) ** 2


def second_form_from_data(data: WeierstrassData, w: complex,
                          tol: float = 1e-9) -> FundamentalForms:
    """Both fundamental forms of the theta = 0 surface, in closed form.

    Holomorphy turns the parameter derivatives of Re G and |F| into
    algebraic combinations of F, G and their complex derivatives:

        (Re G)_u = Re G',             (Re G)_v = -Im G'
        |F|_u = Re(F' conj F) / |F|,  |F|_v = -Im(F' conj F) / |F|

    from which h11 = -h22 and h12 follow without any finite differences.
    """
    f_val = compile_expr(data.F)(w)
    g_val = compile_expr(data.G)(w)
    fp = compile_expr(differentiate(data.F))(w)
    gp = compile_expr(differentiate(data.G))(w)
    abs_f = abs(f_val)
    if abs_f <= tol:
        raise ZeroDivisionError(
            f"|F({w})| = {abs_f:.3e}: singular point, forms undefined")
    re_g_u = gp.real
    re_g_v = -gp.imag
    cross = fp * f_val.conjugate()
    abs_f_u = cross.real / abs_f
    abs_f_v = -cross.imag / abs_f
    h11 = (re_g_u - (abs_f_u / abs_f) * g_val.real
           - (abs_f_v / abs_f) * g_val.imag)
    h12 = (re_g_v - (abs_f_v / abs_f) * g_val.real
           + (abs_f_u / abs_f) * g_val.imag)
    g11 = abs_f * abs_f
    return FundamentalForms(g11, 0.0, g11, h11, h12, -h11)


def det_h_from_data(data: WeierstrassData, w: complex) -> float:
    """Determinant of h straight from the data.

    det h = -(|G|_u^2 + |G|_v^2) - |G/F|^2 (|F|_u^2 + |F|_v^2)
            + 2 |G/F| (|F|_u |G|_u + |F|_v |G|_v)

    |G| is not differentiable at zeros of G, but there the whole
    expression has the limit -|G'(w)|^2 (the first bracket tends to
    |G'|^2 and both G/F terms vanish with |G|), which also covers
    G identically zero.
    """
    f_val = compile_expr(data.F)(w)
    g_val = compile_expr(data.G)(w)
    fp = compile_expr(differentiate(data.F))(w)
    gp = compile_expr(differentiate(data.G))(w)
    abs_f, abs_g = abs(f_val), abs(g_val)
    if abs_f == 0.0:
        raise ZeroDivisionError(f"|F({w})| = 0: singular point")
    if abs_g < 1e-300:
        return -abs(gp) ** 2
    cross_f = fp * f_val.conjugate()
    cross_g = gp * g_val.conjugate()
    abs_f_u, abs_f_v = cross_f.real / abs_f, -cross_f.imag / abs_f
    abs_g_u, abs_g_v = cross_g.real / abs_g, -cross_g.imag / abs_g
    ratio = abs_g / abs_f
    return (-(abs_g_u ** 2 + abs_g_v ** 2)
            - ratio ** 2 * (abs_f_u ** 2 + abs_f_v ** 2)
            + 2.0 * ratio * (abs_f_u * abs_g_u + abs_f_v * abs_g_v))


def conjugate(data: WeierstrassData) -> WeierstrassData:
    """Data of the conjugate surface: both functions times -i.

    Applying it twice multiplies the data by -1, which is the theta = pi
    member of the associated family.
    """
    minus_i = Lit(-1j)
    return WeierstrassData(BinOp("*", minus_i, data.F),
                           BinOp("*", minus_i, data.G),
                           data.base, data.domain)
