"""Named reference surfaces with their expected invariants.

Each entry records what the analysis modules should find (minimality,
umbilicity, the sign of the relative Gaussian curvature), so the test
suite can sweep the whole table through the geometry kernel and catch
regressions in either side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

from .geometry import Rect, SurfacePatch, Vec021, graph_patch


class UnknownSurfaceError(KeyError):
    pass


@dataclass(frozen=True, slots=True)
class CatalogEntry:
    name: str
    patch: SurfacePatch
    is_minimal: bool
    is_umbilical: bool
    k_sign: int  # -1: K <= 0 on the patch, 0: K == 0, +1: K > 0
    note: str = ""


def _plane() -> CatalogEntry:
    return CatalogEntry(
        "plane",
        graph_patch(lambda u, v: 0.0, Rect(-2.0, 2.0, -2.0, 2.0)),
        is_minimal=True, is_umbilical=True, k_sign=0,
        note="totally geodesic graph z = 0",
    )


def _paraboloid() -> CatalogEntry:
    return CatalogEntry(
        "paraboloid",
        graph_patch(lambda u, v: u * u + v * v, Rect(-1.5, 1.5, -1.5, 1.5)),
        is_minimal=False, is_umbilical=True, k_sign=1,
        note="h = 2 g everywhere, the non-planar umbilical model",
    )


def _helicoid2() -> CatalogEntry:
    def ev(u: float, v: float) -> Vec021:
        return Vec021(v * math.cos(u), v * math.sin(u), u)

    return CatalogEntry(
        "helicoid2",
        SurfacePatch(ev, Rect(-math.pi, math.pi, 0.5, 2.5)),
        is_minimal=True, is_umbilical=False, k_sign=-1,
        note="helicoid over the punctured plane; K = -1/v^4",
    )


def _hyp_paraboloid_uv() -> CatalogEntry:
    return CatalogEntry(
        "hyp_paraboloid_uv",
        graph_patch(lambda u, v: u * v, Rect(-2.0, 2.0, -2.0, 2.0)),
        is_minimal=True, is_umbilical=False, k_sign=-1,
        note="graph z = uv, K = -1",
    )


def _hyp_paraboloid_diff() -> CatalogEntry:
    return CatalogEntry(
        "hyp_paraboloid_diff",
        graph_patch(lambda u, v: 0.5 * (u * u - v * v),
                    Rect(-2.0, 2.0, -2.0, 2.0)),
        is_minimal=True, is_umbilical=False, k_sign=-1,
        note="graph z = (u^2 - v^2)/2, conjugate in shape to z = uv",
    )


def _rotational_log() -> CatalogEntry:
    def ev(u: float, v: float) -> Vec021:
        r = math.exp(u)
        return Vec021(r * math.cos(v), r * math.sin(v), u)

    return CatalogEntry(
        "rotational_log",
        SurfacePatch(ev, Rect(-1.0, 1.0, -math.pi, math.pi)),
        is_minimal=True, is_umbilical=False, k_sign=-1,
        note="rotational surface with logarithmic profile, K = -exp(-4u)",
    )


def _dlambda_geodesic(lam: float) -> CatalogEntry:
    if lam == 0.0:
        raise ValueError("lam must be nonzero; lam = 0 is the flat case")
    if lam > 0:
        dom = Rect(-1.0 / lam + 0.1, 3.0, -1.0, 1.0)
    else:
        dom = Rect(-3.0, -1.0 / lam - 0.1, -1.0, 1.0)

    def height(u: float, v: float) -> float:
        return math.log(abs(lam * u + 1.0)) / lam - u - v

    return CatalogEntry(
        "dlambda_geodesic",
        graph_patch(height, dom),
        is_minimal=False, is_umbilical=False, k_sign=0,
        note=(f"graph whose lambda-deformed second form vanishes "
              f"(lam = {lam}); plain h is nonzero"),
    )


def _cubic_harmonic() -> CatalogEntry:
    return CatalogEntry(
        "cubic_harmonic",
        graph_patch(lambda u, v: u ** 3 - 3.0 * u * v * v,
                    Rect(-1.0, 1.0, -1.0, 1.0)),
        is_minimal=True, is_umbilical=False, k_sign=-1,
        note="harmonic cubic graph; h vanishes only at the origin",
    )


_BUILDERS: dict[str, Callable[..., CatalogEntry]] = {
    "plane": _plane,
    "paraboloid": _paraboloid,
    "helicoid2": _helicoid2,
    "hyp_paraboloid_uv": _hyp_paraboloid_uv,
    "hyp_paraboloid_diff": _hyp_paraboloid_diff,
    "rotational_log": _rotational_log,
    "dlambda_geodesic": _dlambda_geodesic,
    "cubic_harmonic": _cubic_harmonic,
}


def names() -> tuple[str, ...]:
    return tuple(_BUILDERS)


def get(name: str, lam: float = 1.0) -> CatalogEntry:
    """Look up an entry; dlambda_geodesic takes the deformation parameter."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise UnknownSurfaceError(
            f"no surface named {name!r}; known: {', '.join(names())}"
        ) from None
    if name == "dlambda_geodesic":
        return builder(lam)
    return builder()


def entries(lam: float = 1.0) -> Iterator[CatalogEntry]:
    for name in names():
        yield get(name, lam)


def minimal_entries() -> Iterator[CatalogEntry]:
    for entry in entries():
        if entry.is_minimal:
            yield entry


def rotational_profile_check(c1: float, c2: float,
                             x_range: tuple[float, float] = (1.0, math.e),
                             steps: int = 1000) -> float:
    """Integrate the rotational-minimality profile equation y'' = -y'/x
    with classic RK4 and return the largest deviation from the closed
    form y = c1 log x + c2 over the range.

    The equation degenerates at x = 0, so the range must avoid it.
    """
    x0, x1 = x_range
    if x0 <= 0.0 or x1 <= x0:
        raise ValueError("x_range must satisfy 0 < x0 < x1")

    def rhs(x: float, y: float, p: float) -> tuple[float, float]:
        return p, -p / x

    h = (x1 - x0) / steps
    x, y, p = x0, c1 * math.log(x0) + c2, c1 / x0
    worst = 0.0
    for _ in range(steps):
        k1y, k1p = rhs(x, y, p)
        k2y, k2p = rhs(x + h / 2, y + h / 2 * k1y, p + h / 2 * k1p)
        k3y, k3p = rhs(x + h / 2, y + h / 2 * k2y, p + h / 2 * k2p)
        k4y, k4p = rhs(x + h, y + h * k3y, p + h * k3p)
        y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        x += h
        worst = max(worst, abs(y - (c1 * math.log(x) + c2)))
    return worst
