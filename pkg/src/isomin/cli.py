"""Command line front end.

Subcommands:
    gen          mesh a member of a holomorphic-pair family
    analyze      per-sample forms, curvatures and a summary verdict
    singular     locate and classify zeros of the conformal factor
    reconstruct  integrate a prescribed second form into a graph
    embed        check the flat zero-mean-curvature conditions in R^4_1
    list         show the built-in reference surfaces

Exit codes: 0 success (including honest "fail"/"not d-minimal" verdicts),
2 bad input or parse error, 3 integration failure, 4 degenerate or
non-spacelike samples beyond the allowed budget, 5 incompatible
prescribed forms.

Numbers in CSV/OBJ output are printed with a fixed 12-digit format and
JSON floats are rounded the same way, so identical configurations
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .catalog import UnknownSurfaceError, entries, get
from .expr import ParseError, parse_expr, parse_real_expr
from .geometry import (DegenerateMetricError, Rect, SurfacePatch,
                       fundamental_forms, graph_patch, mean_curvature,
                       relative_gauss_curvature)
from .minkowski import (MinkSurface, iota_lift, mink_surface_from_exprs,
                        vanishing_h_locus, verify_flat_zmc)
from .quadrature import IntegrationError
from .reconstruct import (CodazziViolationError, PrescribedForms,
                          codazzi_check, surface_from_forms)
from .singularities import (ContourError, MultiplicityError,
                            RankDisagreementError, singular_report)
from .weierstrass import (WeierstrassData, grid_eval, metric_at,
                          second_form_from_data, surface_from_data)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTEGRATION = 3
EXIT_DEGENERATE = 4
EXIT_CODAZZI = 5


class CliError(Exception):
    """Failure with a process exit code; the message goes to stderr."""

    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return format(float(x), ".12e")


def _jround(x: float) -> float:
    # floats pass through the same 12-digit format as the text outputs,
    # so JSON reports are reproducible byte for byte as well
    if math.isnan(x):
        return float("nan")
    return float(_fmt(x))


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Checked bundle of everything a subcommand needs."""

    command: str
    f_src: str | None = None
    g_src: str | None = None
    h_srcs: tuple[str, str, str] | None = None
    forms_csv: str | None = None
    x_srcs: tuple[str, str, str, str] | None = None
    graph_src: str | None = None
    catalog: str | None = None
    lam: float = 1.0
    domain: Rect = Rect(-1.0, 1.0, -1.0, 1.0)
    grid: tuple[int, int] | None = None
    theta: float = 0.0
    base: tuple[float, float] | None = None
    tol: float | None = None
    out: str | None = None
    fmt: str = ""
    threads: int = 0

    def __post_init__(self):
        if self.grid is not None and min(self.grid) < 2:
            raise CliError(EXIT_INPUT, f"grid must be at least 2x2, got {self.grid}")
        if self.domain.u1 <= self.domain.u0 or self.domain.v1 <= self.domain.v0:
            raise CliError(EXIT_INPUT, f"degenerate domain {self.domain}")
        if self.tol is not None and self.tol <= 0:
            raise CliError(EXIT_INPUT, f"tol must be positive, got {self.tol}")


def _parse_floats(text: str, count: int, flag: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != count:
        raise CliError(EXIT_INPUT,
                       f"{flag} expects {count} comma-separated values, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise CliError(EXIT_INPUT, f"{flag}: could not parse {text!r}") from None


def _parse_domain(text: str) -> Rect:
    u0, u1, v0, v1 = _parse_floats(text, 4, "--domain")
    try:
        return Rect(u0, u1, v0, v1)
    except ValueError as err:
        raise CliError(EXIT_INPUT, f"--domain: {err}") from None


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise CliError(EXIT_INPUT, f"--grid expects N,M, got {text!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise CliError(EXIT_INPUT, f"--grid: could not parse {text!r}") from None
    return n, m


def _threads_from_env() -> int:
    raw = os.environ.get("DMIN_THREADS")
    if raw is None:
        return 0
    try:
        n = int(raw)
    except ValueError:
        raise CliError(EXIT_INPUT, f"DMIN_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise CliError(EXIT_INPUT, f"DMIN_THREADS must be >= 1, got {n}")
    # every computation here runs one grid point at a time, so any
    # positive cap is already respected; the variable is validated so
    # misconfigured pipelines fail loudly instead of silently
    return n


def _parse_complex_pair(ast_src: str, flag: str):
    try:
        return parse_expr(ast_src, variables=("z",))
    except ParseError as err:
        raise CliError(EXIT_INPUT, f"{flag}: {err}") from None


def _parse_real(ast_src: str, flag: str):
    try:
        return parse_real_expr(ast_src, variables=("u", "v"))
    except ParseError as err:
        raise CliError(EXIT_INPUT, f"{flag}: {err}") from None


def _weier_data(cfg: RunConfig) -> WeierstrassData:
    f_ast = _parse_complex_pair(cfg.f_src, "--F")
    g_ast = _parse_complex_pair(cfg.g_src, "--G")
    base = complex(*cfg.base) if cfg.base is not None else 0j
    try:
        return WeierstrassData(f_ast, g_ast, base=base, domain=cfg.domain)
    except ValueError as err:
        raise CliError(EXIT_INPUT, str(err)) from None


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _obj_mesh(verts: list[tuple[float, float, float]], nu: int, nv: int) -> str:
    lines = [f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}" for x, y, z in verts]

    def idx(i: int, j: int) -> int:
        return j * nu + i + 1

    for j in range(nv - 1):
        for i in range(nu - 1):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            lines.append(f"f {a} {b} {c}")
            lines.append(f"f {a} {c} {d}")
    return "\n".join(lines) + "\n"


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def cmd_gen(cfg: RunConfig) -> int:
    if not cfg.f_src or not cfg.g_src:
        raise CliError(EXIT_INPUT, "gen needs --F and --G")
    data = _weier_data(cfg)
    nu, nv = cfg.grid or (64, 64)
    quad_tol = cfg.tol if cfg.tol is not None else 1e-10
    try:
        us, vs, X, Y, Z = grid_eval(data, theta=cfg.theta, nu=nu, nv=nv,
                                    quad_tol=quad_tol)
    except IntegrationError as err:
        raise CliError(EXIT_INTEGRATION, f"integration failed: {err}") from None

    verts = [(float(X[i, j]), float(Y[i, j]), float(Z[i, j]))
             for j in range(nv) for i in range(nu)]
    fmt = cfg.fmt or "obj"
    if fmt == "obj":
        _emit(cfg, _obj_mesh(verts, nu, nv))
    elif fmt == "csv":
        rows = ["u,v,x,y,z"]
        for j in range(nv):
            for i in range(nu):
                x, y, z = verts[j * nu + i]
                rows.append(",".join((_fmt(us[i]), _fmt(vs[j]),
                                      _fmt(x), _fmt(y), _fmt(z))))
        _emit(cfg, "\n".join(rows) + "\n")
    else:
        payload = {
            "schema": 1,
            "command": "gen",
            "grid": [nu, nv],
            "domain": [cfg.domain.u0, cfg.domain.u1, cfg.domain.v0, cfg.domain.v1],
            "theta": _jround(cfg.theta),
            "vertices": [[_jround(x), _jround(y), _jround(z)] for x, y, z in verts],
        }
        _emit(cfg, _json_text(payload))
    return EXIT_OK


def _single_source(cfg: RunConfig, allow_x: bool = False) -> str:
    picked = [name for name, val in (
        ("catalog", cfg.catalog),
        ("graph", cfg.graph_src),
        ("weierstrass", cfg.f_src or cfg.g_src),
        ("minkowski", cfg.x_srcs if allow_x else None),
    ) if val]
    if len(picked) != 1:
        extra = ", or --x1..--x4" if allow_x else ""
        raise CliError(EXIT_INPUT,
                       "need exactly one source: --catalog, --graph, "
                       f"or --F with --G{extra}")
    if picked[0] == "weierstrass" and not (cfg.f_src and cfg.g_src):
        raise CliError(EXIT_INPUT, "--F and --G must be given together")
    return picked[0]


def _catalog_patch(cfg: RunConfig) -> SurfacePatch:
    try:
        return get(cfg.catalog, lam=cfg.lam).patch
    except UnknownSurfaceError as err:
        raise CliError(EXIT_INPUT, str(err)) from None
    except ValueError as err:
        raise CliError(EXIT_INPUT, str(err)) from None


def _inset_axis(lo: float, hi: float, n: int) -> list[float]:
    # finite-difference jets need breathing room near the boundary
    m = 0.02 * (hi - lo)
    a, b = lo + m, hi - m
    return [a + (b - a) * k / (n - 1) for k in range(n)]


def cmd_analyze(cfg: RunConfig) -> int:
    source = _single_source(cfg)
    nu, nv = cfg.grid or (33, 33)
    tol = cfg.tol if cfg.tol is not None else 1e-6
    fmt = cfg.fmt or "csv"
    if fmt == "obj":
        raise CliError(EXIT_INPUT, "analyze writes csv or json, not obj")

    if source == "catalog":
        patch = _catalog_patch(cfg)
        label = f"catalog:{cfg.catalog}"
    elif source == "graph":
        patch = graph_patch(_parse_real(cfg.graph_src, "--graph"), cfg.domain)
        label = f"graph:{cfg.graph_src}"
    else:
        patch = None
        data = _weier_data(cfg)
        label = f"weierstrass:F={cfg.f_src},G={cfg.g_src}"

    dom = patch.domain if patch is not None else cfg.domain
    us = _inset_axis(dom.u0, dom.u1, nu)
    vs = _inset_axis(dom.v0, dom.v1, nv)

    nan = float("nan")
    rows = []           # (u, v, g11, g12, g22, h11, h12, h22, H, K, cls)
    h_grid = {}         # (i, j) -> (h11, h12, h22) for the Codazzi sweep
    degenerate = 0
    for j, v in enumerate(vs):
        for i, u in enumerate(us):
            cls = None
            if patch is None:
                w = complex(u, v)
                g11 = g22 = metric_at(data, w)
                g12 = 0.0
                try:
                    forms = second_form_from_data(data, w, tol=max(tol, 1e-12))
                except ZeroDivisionError:
                    cls = "degenerate"
                    h11 = h12 = h22 = hmean = kval = nan
            else:
                try:
                    forms = fundamental_forms(patch, u, v)
                except DegenerateMetricError:
                    cls = "degenerate"
                    g11 = g12 = g22 = nan
                    h11 = h12 = h22 = hmean = kval = nan
                else:
                    g11, g12, g22 = forms.g11, forms.g12, forms.g22
            if cls is None:
                h11, h12, h22 = forms.h11, forms.h12, forms.h22
                hmean = mean_curvature(forms)
                kval = relative_gauss_curvature(forms)
                det_h = h11 * h22 - h12 * h12
                if det_h > tol:
                    cls = "elliptic"
                elif det_h < -tol:
                    cls = "hyperbolic"
                else:
                    cls = "parabolic"
                h_grid[(i, j)] = (h11, h12, h22)
            else:
                degenerate += 1
            rows.append((u, v, g11, g12, g22, h11, h12, h22, hmean, kval, cls))

    budget = max(4, (nu * nv) // 100)
    if degenerate > budget:
        raise CliError(EXIT_DEGENERATE,
                       f"{degenerate} degenerate samples exceed the allowed "
                       f"budget of {budget}")

    # The flat-coordinate Codazzi identity (h11)_v = (h12)_u,
    # (h12)_v = (h22)_u only makes sense when the parameter lines are
    # flat coordinates: graphs and conformal holomorphic-pair charts.
    # General parametrizations get null rather than a misleading number.
    # The residual is normalized by the local gradient scale of h, so a
    # second form that blows up toward a singular point reports how well
    # the identity holds, not how large h got.
    flat_coords = patch is None or patch.kind == "graph"
    codazzi_max = None
    if flat_coords:
        if patch is None:
            def h_at(uu: float, vv: float):
                f = second_form_from_data(data, complex(uu, vv),
                                          tol=max(tol, 1e-12))
                return f.h11, f.h12, f.h22
        else:
            def h_at(uu: float, vv: float):
                f = fundamental_forms(patch, uu, vv)
                return f.h11, f.h12, f.h22

        step = 1e-3 * max(dom.extent, 1.0)
        bad = [(i, j) for j in range(nv) for i in range(nu)
               if (i, j) not in h_grid]
        codazzi_max = 0.0
        for (i, j) in h_grid:
            if any(max(abs(i - bi), abs(j - bj)) <= 2 for bi, bj in bad):
                continue
            u, v = us[i], vs[j]
            try:
                left, right = h_at(u - step, v), h_at(u + step, v)
                down, up = h_at(u, v - step), h_at(u, v + step)
            except (ZeroDivisionError, DegenerateMetricError):
                continue
            d_u = [(r - l) / (2 * step) for l, r in zip(left, right)]
            d_v = [(t - b) / (2 * step) for b, t in zip(down, up)]
            resid = abs(d_v[0] - d_u[1]) + abs(d_v[1] - d_u[2])
            scale = max(1.0, *(abs(x) for x in d_u + d_v))
            codazzi_max = max(codazzi_max, resid / scale)

    live = [r for r in rows if r[10] != "degenerate"]
    h_abs = [abs(r[8]) for r in live]
    ks = [r[9] for r in live]
    counts: dict[str, int] = {}
    for r in rows:
        counts[r[10]] = counts.get(r[10], 0) + 1
    verdict = "d-minimal" if live and max(h_abs) <= tol else "not d-minimal"

    summary = {
        "schema": 1,
        "command": "analyze",
        "source": label,
        "samples": nu * nv,
        "degenerate_samples": degenerate,
        "tol": _jround(tol),
        "max_abs_mean_curvature": _jround(max(h_abs)) if h_abs else None,
        "k_min": _jround(min(ks)) if ks else None,
        "k_max": _jround(max(ks)) if ks else None,
        "codazzi_residual_max":
            _jround(codazzi_max) if codazzi_max is not None else None,
        "class_counts": dict(sorted(counts.items())),
        "verdict": verdict,
    }

    if cfg.out:
        if fmt == "csv":
            lines = ["u,v,g11,g12,g22,h11,h12,h22,H,K,class"]
            for r in rows:
                lines.append(",".join([_fmt(x) for x in r[:10]] + [r[10]]))
            _emit(cfg, "\n".join(lines) + "\n")
        else:
            payload = dict(summary)
            payload["rows"] = [
                [_jround(x) for x in r[:10]] + [r[10]] for r in rows]
            _emit(cfg, _json_text(payload))
    sys.stdout.write(_json_text(summary))
    return EXIT_OK


def cmd_singular(cfg: RunConfig) -> int:
    if not cfg.f_src or not cfg.g_src:
        raise CliError(EXIT_INPUT, "singular needs --F and --G")
    data = _weier_data(cfg)
    grid = cfg.grid or (64, 64)
    tol = cfg.tol if cfg.tol is not None else 1e-10
    try:
        points = singular_report(data, grid=grid, tol=tol)
    except (ContourError, MultiplicityError, RankDisagreementError) as err:
        raise CliError(EXIT_DEGENERATE, f"singular analysis failed: {err}") from None

    payload = {
        "schema": 1,
        "command": "singular",
        "source": f"F={cfg.f_src},G={cfg.g_src}",
        "points": [
            {
                "w": [_jround(p.w.real), _jround(p.w.imag)],
                "multiplicity": p.multiplicity,
                "rank": p.rank,
                "refined": p.refined,
                "g_vanishes": p.g_vanishes,
            }
            for p in points
        ],
    }
    _emit(cfg, _json_text(payload))
    return EXIT_OK


def _forms_from_csv(path: str) -> tuple[PrescribedForms, tuple[int, int]]:
    """Prescription from a node table with header u,v,h11,h12,h22.

    The rows must cover a complete, uniformly spaced rectangular
    lattice; order does not matter.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as err:
        raise CliError(EXIT_INPUT, f"--forms-csv: {err}") from None
    needed = ("u", "v", "h11", "h12", "h22")
    if not rows or any(k not in rows[0] for k in needed):
        raise CliError(EXIT_INPUT,
                       "--forms-csv: header must contain u,v,h11,h12,h22")
    try:
        table = {(float(r["u"]), float(r["v"])):
                 (float(r["h11"]), float(r["h12"]), float(r["h22"]))
                 for r in rows}
    except (TypeError, ValueError):
        raise CliError(EXIT_INPUT, "--forms-csv: non-numeric entry") from None
    us = sorted({u for u, _ in table})
    vs = sorted({v for _, v in table})
    nu, nv = len(us), len(vs)
    if nu < 2 or nv < 2 or len(table) != nu * nv:
        raise CliError(EXIT_INPUT,
                       f"--forms-csv: {len(table)} nodes do not fill a "
                       f"{nu}x{nv} lattice")
    for axis in (us, vs):
        gaps = [b - a for a, b in zip(axis, axis[1:])]
        if max(gaps) - min(gaps) > 1e-9 * (axis[-1] - axis[0]):
            raise CliError(EXIT_INPUT, "--forms-csv: spacing is not uniform")
    h11 = np.empty((nu, nv))
    h12 = np.empty((nu, nv))
    h22 = np.empty((nu, nv))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            try:
                h11[i, j], h12[i, j], h22[i, j] = table[(u, v)]
            except KeyError:
                raise CliError(EXIT_INPUT,
                               f"--forms-csv: missing node ({u}, {v})"
                               ) from None
    domain = Rect(us[0], us[-1], vs[0], vs[-1])
    return PrescribedForms.from_grid(h11, h12, h22, domain), (nu, nv)


def cmd_reconstruct(cfg: RunConfig) -> int:
    given = [s for s in (cfg.h_srcs or ()) if s]
    if cfg.forms_csv:
        if given:
            raise CliError(EXIT_INPUT, "--forms-csv excludes --h11/--h12/--h22")
        forms, grid = _forms_from_csv(cfg.forms_csv)
        dom = forms.domain
        du = (dom.u1 - dom.u0) / (grid[0] - 1)
        dv = (dom.v1 - dom.v0) / (grid[1] - 1)
        # sampled data carries the trapezoid's own discretization error
        tol = cfg.tol if cfg.tol is not None else max(du, dv) ** 2
    else:
        if len(given) != 3:
            raise CliError(EXIT_INPUT,
                           "reconstruct needs --h11/--h12/--h22 or --forms-csv")
        asts = tuple(_parse_real(src, flag) for src, flag in
                     zip(cfg.h_srcs, ("--h11", "--h12", "--h22")))
        forms = PrescribedForms.from_expressions(*asts, cfg.domain)
        dom = cfg.domain
        grid = cfg.grid or (33, 33)
        tol = cfg.tol if cfg.tol is not None else 1e-8

    report = codazzi_check(forms, tol=tol, grid=grid)
    sys.stdout.write(f"codazzi_residual_max: {_fmt(report.max_residual)}\n")
    sys.stdout.write(
        f"verdict: {'compatible' if report.passed else 'incompatible'}\n")
    if not report.passed:
        return EXIT_CODAZZI

    try:
        patch = surface_from_forms(forms, grid=grid, base=cfg.base, tol=tol)
    except CodazziViolationError as err:
        sys.stderr.write(f"{err}\n")
        return EXIT_CODAZZI
    except ValueError as err:
        raise CliError(EXIT_INPUT, str(err)) from None

    nu, nv = grid
    us = [dom.u0 + (dom.u1 - dom.u0) * k / (nu - 1) for k in range(nu)]
    vs = [dom.v0 + (dom.v1 - dom.v0) * k / (nv - 1) for k in range(nv)]
    samples = [(u, v, patch(u, v).z) for v in vs for u in us]

    fmt = cfg.fmt or "csv"
    if fmt == "csv":
        lines = ["u,v,F"]
        lines += [",".join((_fmt(u), _fmt(v), _fmt(z))) for u, v, z in samples]
        _emit(cfg, "\n".join(lines) + "\n")
    elif fmt == "obj":
        _emit(cfg, _obj_mesh(samples, nu, nv))
    else:
        payload = {
            "schema": 1,
            "command": "reconstruct",
            "domain": [dom.u0, dom.u1, dom.v0, dom.v1],
            "grid": [nu, nv],
            "codazzi_residual_max": _jround(report.max_residual),
            "rows": [[_jround(u), _jround(v), _jround(z)] for u, v, z in samples],
        }
        _emit(cfg, _json_text(payload))
    return EXIT_OK


def cmd_embed(cfg: RunConfig) -> int:
    source = _single_source(cfg, allow_x=True)
    grid = cfg.grid or (9, 9)
    tol = cfg.tol if cfg.tol is not None else 1e-5

    patch = None
    if source == "catalog":
        patch = _catalog_patch(cfg)
        label = f"catalog:{cfg.catalog}"
    elif source == "graph":
        patch = graph_patch(_parse_real(cfg.graph_src, "--graph"), cfg.domain)
        label = f"graph:{cfg.graph_src}"
    elif source == "weierstrass":
        data = _weier_data(cfg)
        patch = surface_from_data(data, theta=cfg.theta)
        label = f"weierstrass:F={cfg.f_src},G={cfg.g_src}"
    else:
        label = "minkowski:" + ",".join(cfg.x_srcs)

    if patch is not None:
        surface = iota_lift(patch)
        loci = vanishing_h_locus(patch)
    else:
        asts = [_parse_real(src, flag)
                for src, flag in zip(cfg.x_srcs, ("--x1", "--x2", "--x3", "--x4"))]
        surface = mink_surface_from_exprs(*asts, domain=cfg.domain)
        loci = None

    report = verify_flat_zmc(surface, grid=grid, tol=tol)
    if report.spacelike_violations:
        first = report.spacelike_violations[0]
        raise CliError(EXIT_DEGENERATE,
                       f"{len(report.spacelike_violations)} non-spacelike "
                       f"samples, first at ({first[0]:.6g}, {first[1]:.6g})")

    payload = {
        "schema": 1,
        "command": "embed",
        "source": label,
        "samples": report.samples,
        "tol": _jround(report.tol),
        "max_mean_curvature": _jround(report.max_mean_curvature),
        "max_abs_curvature": _jround(report.max_abs_curvature),
        "verdict": "pass" if report.passed else "fail",
    }
    if loci is not None:
        payload["e_locus"] = [
            {
                "point": [_jround(c.point[0]), _jround(c.point[1])],
                "node_count": c.node_count,
                "isolated": c.isolated,
            }
            for c in loci
        ]
    _emit(cfg, _json_text(payload))
    return EXIT_OK


def cmd_list(cfg: RunConfig) -> int:
    payload = {
        "schema": 1,
        "command": "list",
        "surfaces": [
            {
                "name": e.name,
                "minimal": e.is_minimal,
                "umbilical": e.is_umbilical,
                "k_sign": e.k_sign,
                "domain": [e.patch.domain.u0, e.patch.domain.u1,
                           e.patch.domain.v0, e.patch.domain.v1],
                "note": e.note,
            }
            for e in entries()
        ],
    }
    _emit(cfg, _json_text(payload))
    return EXIT_OK


_COMMANDS = {
    "gen": cmd_gen,
    "analyze": cmd_analyze,
    "singular": cmd_singular,
    "reconstruct": cmd_reconstruct,
    "embed": cmd_embed,
    "list": cmd_list,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isomin",
        description="Surfaces with a degenerate product: generation, "
                    "analysis, reconstruction and embedding checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--domain", default="-1,1,-1,1",
                       help="parameter rectangle u0,u1,v0,v1")
        p.add_argument("--grid", default=None, help="sample counts N,M")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", dest="fmt", default="",
                       choices=("", "obj", "csv", "json"))

    p = sub.add_parser("gen", help="mesh a family member from --F/--G")
    p.add_argument("--F", dest="f_src", required=True)
    p.add_argument("--G", dest="g_src", required=True)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--base", default=None, help="base point re,im")
    common(p)

    p = sub.add_parser("analyze", help="forms, curvatures and verdict")
    p.add_argument("--F", dest="f_src", default=None)
    p.add_argument("--G", dest="g_src", default=None)
    p.add_argument("--graph", dest="graph_src", default=None,
                   help="height expression in u, v")
    p.add_argument("--catalog", default=None, help="reference surface name")
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--base", default=None)
    common(p)

    p = sub.add_parser("singular", help="zeros of the conformal factor")
    p.add_argument("--F", dest="f_src", required=True)
    p.add_argument("--G", dest="g_src", required=True)
    p.add_argument("--base", default=None)
    common(p)

    p = sub.add_parser("reconstruct", help="graph from a prescribed form")
    p.add_argument("--h11", default=None)
    p.add_argument("--h12", default=None)
    p.add_argument("--h22", default=None)
    p.add_argument("--forms-csv", dest="forms_csv", default=None,
                   help="node table u,v,h11,h12,h22 instead of expressions")
    p.add_argument("--base", default=None, help="integration base u0,v0")
    common(p)

    p = sub.add_parser("embed", help="flat zero-mean-curvature check")
    p.add_argument("--F", dest="f_src", default=None)
    p.add_argument("--G", dest="g_src", default=None)
    p.add_argument("--graph", dest="graph_src", default=None)
    p.add_argument("--catalog", default=None)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--x1", default=None)
    p.add_argument("--x2", default=None)
    p.add_argument("--x3", default=None)
    p.add_argument("--x4", default=None)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--base", default=None)
    common(p)

    p = sub.add_parser("list", help="built-in reference surfaces")
    common(p)

    return parser


def _config_from_args(ns: argparse.Namespace) -> RunConfig:
    base = None
    if getattr(ns, "base", None):
        base = _parse_floats(ns.base, 2, "--base")
    h_srcs = None
    if ns.command == "reconstruct":
        h_srcs = (ns.h11, ns.h12, ns.h22)
    x_srcs = None
    if ns.command == "embed":
        xs = (ns.x1, ns.x2, ns.x3, ns.x4)
        if any(x is not None for x in xs):
            if not all(x is not None for x in xs):
                raise CliError(EXIT_INPUT, "--x1..--x4 must be given together")
            x_srcs = xs
    return RunConfig(
        command=ns.command,
        f_src=getattr(ns, "f_src", None),
        g_src=getattr(ns, "g_src", None),
        h_srcs=h_srcs,
        forms_csv=getattr(ns, "forms_csv", None),
        x_srcs=x_srcs,
        graph_src=getattr(ns, "graph_src", None),
        catalog=getattr(ns, "catalog", None),
        lam=getattr(ns, "lam", 1.0),
        domain=_parse_domain(ns.domain),
        grid=_parse_grid(ns.grid) if ns.grid else None,
        theta=getattr(ns, "theta", 0.0),
        base=base,
        tol=ns.tol,
        out=ns.out,
        fmt=ns.fmt,
        threads=_threads_from_env(),
    )


# flags whose values may start with '-' (negative bounds, expressions
# like -u*v); joined with '=' so argparse does not read them as options
_VALUE_FLAGS = frozenset((
    "--domain", "--base", "--grid", "--tol", "--theta", "--lam",
    "--F", "--G", "--h11", "--h12", "--h22",
    "--x1", "--x2", "--x3", "--x4", "--graph",
))


def _join_value_flags(argv: list[str]) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(argv):
        if argv[i] in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    ns = parser.parse_args(_join_value_flags(list(argv)))
    try:
        cfg = _config_from_args(ns)
        return _COMMANDS[cfg.command](cfg)
    except CliError as err:
        sys.stderr.write(f"isomin {ns.command}: {err}\n")
        return err.code


if __name__ == "__main__":
    sys.exit(main())
