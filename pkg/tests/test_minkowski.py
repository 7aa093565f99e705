"""Embedding into Minkowski 4-space and the flat-ZMC correspondence."""

import math
import random

import pytest

from isomin.catalog import entries as catalog_entries
from isomin.expr import parse_expr
from isomin.geometry import Rect, Vec021, deg_inner, graph_patch
from isomin.minkowski import (FlatZmcReport, MinkSurface, NonSpacelikeError,
                              NotInSliceError, Vec4M, gaussian_curvature_induced,
                              iota_embed, iota_lift, lorentz_inner,
                              mean_curvature_vector, mink_surface_from_exprs,
                              normal_second_form, slice_project,
                              vanishing_h_locus, verify_flat_zmc)

SQUARE = Rect(-1.0, 1.0, -1.0, 1.0)


def graph(src: str, domain: Rect = SQUARE):
    return graph_patch(parse_expr(src, variables=("u", "v"),
                                  allow_imaginary=False), domain)


class TestLorentzInner:
    def test_timelike_axis(self):
        assert lorentz_inner(Vec4M(1, 0, 0, 0), Vec4M(1, 0, 0, 0)) == -1.0

    def test_lightlike_direction(self):
        assert lorentz_inner(Vec4M(1, 0, 0, 1), Vec4M(1, 0, 0, 1)) == 0.0

    def test_spatial_vector(self):
        assert lorentz_inner(Vec4M(0, 1, 2, 3), Vec4M(0, 1, 2, 3)) == 14.0

    def test_vector_arithmetic(self):
        a = Vec4M(1, 2, 3, 4)
        b = Vec4M(0.5, 0.5, 0.5, 0.5)
        assert (a - b).x4 == 3.5
        assert (2.0 * b).x1 == 1.0
        assert (a / 2).x2 == 1.0
        assert (-a).x3 == -3.0
        assert a.sup_norm == 4.0


class TestIotaEmbed:
    def test_reference_point(self):
        assert iota_embed(Vec021(1, 2, 3)) == Vec4M(3, 1, 2, 3)

    def test_origin(self):
        assert iota_embed(Vec021(0, 0, 0)) == Vec4M(0, 0, 0, 0)

    def test_isometry_on_random_differences(self):
        """deg inner of differences transfers exactly: z terms cancel."""
        rng = random.Random(42)
        for _ in range(1000):
            p = Vec021(rng.uniform(-5, 5), rng.uniform(-5, 5),
                       rng.uniform(-5, 5))
            q = Vec021(rng.uniform(-5, 5), rng.uniform(-5, 5),
                       rng.uniform(-5, 5))
            d3 = p - q
            d4 = iota_embed(p) - iota_embed(q)
            assert deg_inner(d3, d3) == lorentz_inner(d4, d4)

    def test_lift_carries_domain(self):
        patch = graph("u*v")
        lifted = iota_lift(patch)
        assert lifted.domain == patch.domain
        p = lifted(0.5, 0.25)
        assert p == Vec4M(0.125, 0.5, 0.25, 0.125)


class TestMeanCurvatureVector:
    def test_harmonic_cubic_graph_is_zmc(self):
        lifted = iota_lift(graph("u^3 - 3*u*v^2"))
        for u, v in [(0.0, 0.0), (0.5, 0.3), (-0.7, -0.2)]:
            assert mean_curvature_vector(lifted, u, v).sup_norm < 1e-6

    def test_product_graph_is_zmc(self):
        lifted = iota_lift(graph("u*v"))
        for u, v in [(0.4, 0.4), (-0.5, 0.8)]:
            assert mean_curvature_vector(lifted, u, v).sup_norm < 1e-6

    def test_spacelike_slice_paraboloid(self):
        s = mink_surface_from_exprs("0", "u", "v", "u^2 + v^2", SQUARE)
        h = mean_curvature_vector(s, 0.0, 0.0)
        assert abs(h.x1) < 1e-9
        assert abs(h.x2) < 1e-9
        assert abs(h.x3) < 1e-9
        assert abs(h.x4 - 2.0) < 1e-9

    def test_lifted_paraboloid_has_null_mean_vector(self):
        lifted = iota_lift(graph("u^2 + v^2"))
        h = mean_curvature_vector(lifted, 0.0, 0.0)
        assert abs(h.x1 - 2.0) < 1e-8
        assert abs(h.x2) < 1e-8
        assert abs(h.x3) < 1e-8
        assert abs(h.x4 - 2.0) < 1e-8
        # nonzero as a vector, but of zero causal length
        assert abs(lorentz_inner(h, h)) < 1e-12

    def test_timelike_surface_rejected(self):
        s = mink_surface_from_exprs("u", "v", "0", "0", SQUARE)
        with pytest.raises(NonSpacelikeError):
            mean_curvature_vector(s, 0.0, 0.0)

    def test_normal_part_parallel_to_null_direction(self):
        """The whole normal second form lives on the line of (1,0,0,1)."""
        for src in ("u^3 - 3*u*v^2", "u*v", "u^2 + v^2"):
            lifted = iota_lift(graph(src))
            for u, v in [(0.3, -0.4), (-0.5, 0.5)]:
                (n_uu, n_uv, n_vv), _ = normal_second_form(lifted, u, v)
                for n in (n_uu, n_uv, n_vv):
                    assert abs(n.x2) < 1e-6
                    assert abs(n.x3) < 1e-6
                    assert abs(n.x1 - n.x4) < 1e-6


class TestInducedCurvature:
    def test_lifted_graphs_are_flat(self):
        for src in ("u^3 - 3*u*v^2", "u^2 + v^2", "u*v"):
            lifted = iota_lift(graph(src))
            for u, v in [(0.2, 0.3), (-0.4, -0.6)]:
                assert abs(gaussian_curvature_induced(lifted, u, v)) < 1e-5

    def test_flat_plane_in_slice(self):
        s = mink_surface_from_exprs("0", "u", "v", "0", SQUARE)
        assert abs(gaussian_curvature_induced(s, 0.1, 0.2)) < 1e-10

    def test_sphere_patch_curvature(self):
        r = 1.3
        s = mink_surface_from_exprs(
            "0", f"{r}*cos(u)*cos(v)", f"{r}*cos(u)*sin(v)", f"{r}*sin(u)",
            Rect(-0.5, 0.5, -0.5, 0.5))
        k = gaussian_curvature_induced(s, 0.0, 0.0)
        assert abs(k - 1.0 / r ** 2) < 0.02 / r ** 2


class TestVerifyFlatZmc:
    def test_all_minimal_catalog_surfaces_pass(self):
        for entry in catalog_entries():
            if not entry.is_minimal:
                continue
            report = verify_flat_zmc(iota_lift(entry.patch), grid=(5, 5))
            assert report.passed, \
                f"{entry.name}: H={report.max_mean_curvature:.2e}, " \
                f"K={report.max_abs_curvature:.2e}"

    def test_non_minimal_catalog_surfaces_fail_on_mean_vector(self):
        for entry in catalog_entries():
            if entry.is_minimal:
                continue
            report = verify_flat_zmc(iota_lift(entry.patch), grid=(5, 5))
            assert not report.passed, entry.name
            assert report.max_mean_curvature > report.tol, entry.name

    def test_slice_paraboloid_fails(self):
        s = mink_surface_from_exprs("0", "u", "v", "u^2 + v^2", SQUARE)
        report = verify_flat_zmc(s, grid=(5, 5))
        assert not report.passed
        assert report.max_mean_curvature > 1.0

    def test_timelike_region_reported_not_raised(self):
        s = mink_surface_from_exprs("u", "v", "0", "0", SQUARE)
        report = verify_flat_zmc(s, grid=(3, 3))
        assert not report.passed
        assert len(report.spacelike_violations) == 9


class TestVanishingHLocus:
    def test_cubic_isolated_origin(self):
        clusters = vanishing_h_locus(graph("u^3 - 3*u*v^2"))
        assert len(clusters) == 1
        (cluster,) = clusters
        assert abs(cluster.point[0]) < 1e-12
        assert abs(cluster.point[1]) < 1e-12
        assert cluster.isolated

    def test_constant_form_empty(self):
        assert vanishing_h_locus(graph("u*v"), grid=(17, 17)) == []

    def test_plane_flagged_as_region(self):
        clusters = vanishing_h_locus(graph("0"), grid=(17, 17))
        assert len(clusters) == 1
        assert clusters[0].node_count == 17 * 17
        assert not clusters[0].isolated


class TestSliceProject:
    def test_roundtrip_through_embedding(self):
        patch = graph("u^3 - 3*u*v^2")
        back = slice_project(iota_lift(patch))
        for u, v in [(0.5, 0.5), (-0.8, 0.1), (0.0, 0.0)]:
            p, q = patch(u, v), back(u, v)
            assert abs(p.x - q.x) < 1e-15
            assert abs(p.y - q.y) < 1e-15
            assert abs(p.z - q.z) < 1e-15

    def test_quartic_surface_projects_to_graph(self):
        s = mink_surface_from_exprs("u^3 - 3*u*v^2", "u", "v",
                                    "u^3 - 3*u*v^2", SQUARE)
        patch = slice_project(s)
        p = patch(0.4, 0.3)
        assert abs(p.x - 0.4) < 1e-15
        assert abs(p.y - 0.3) < 1e-15
        assert abs(p.z - (0.4 ** 3 - 3 * 0.4 * 0.3 ** 2)) < 1e-15

    def test_off_slice_surface_rejected(self):
        s = mink_surface_from_exprs("0", "u", "v", "u", SQUARE)
        with pytest.raises(NotInSliceError):
            slice_project(s)
