"""Classifier decision tree, exponent fitting, curvature estimation (2D)."""

import math

import numpy as np
import pytest

from shearedge import classify, regions
from shearedge.generators import build_wedge_table, default_generator_2d
from shearedge.transform2d import DecayProfile, ProfileEntry

GEN = default_generator_2d()
TABLE = build_wedge_table(GEN)


def _synthetic_profile(slope, const=1e-5, scales=None, noise=0.0, seed=0):
    scales = scales or [2.0 ** -j for j in range(4, 12)]
    rng = np.random.default_rng(seed)
    prof = DecayProfile(p=(0.0, 0.0))
    for a in scales:
        c = const * a ** slope * (1.0 + noise * rng.uniform(-1, 1))
        prof.entries.append(ProfileEntry(a, 0.0, c, True, 64))
    return prof


class TestFitExponent:
    def test_clean_power_law(self):
        fit = classify.fit_exponent(_synthetic_profile(0.75), 1e-30,
                                    nominal=0.75, prefactor_exp=0.75)
        assert abs(fit.slope - 0.75) < 1e-9
        assert fit.r2 > 0.999999
        assert fit.flat_dev < 1e-9
        assert abs(fit.limit - 1e-5) < 1e-12
        assert not fit.rapid

    def test_zero_floor_censoring(self):
        prof = _synthetic_profile(3.0, const=1e-9)
        fit = classify.fit_exponent(prof, 1e-7, nominal=0.75,
                                    prefactor_exp=0.75)
        assert fit.rapid
        assert fit.max_abs > 0.0

    def test_oct_slopes_finest_first(self):
        fit = classify.fit_exponent(_synthetic_profile(1.25), 1e-30,
                                    nominal=0.75, prefactor_exp=0.75)
        assert len(fit.oct_slopes) >= 3
        assert all(abs(s - 1.25) < 1e-9 for s in fit.oct_slopes)
        assert abs(fit.flat_dev - 0.5) < 1e-9   # |1.25 - 0.75|


class TestBands:
    def test_band_of(self):
        cfg = classify.default_config2d(GEN)
        assert cfg.band_of(0.78) == "regular"
        assert cfg.band_of(1.30) == "corner1"
        assert cfg.band_of(1.80) == "corner2"
        assert cfg.band_of(None) == "rapid"
        assert cfg.band_of(7.0) == "rapid"
        assert cfg.band_of(1.02) is None

    def test_bands_must_be_disjoint(self):
        with pytest.raises(ValueError):
            classify.default_config2d(
                GEN, bands={"a": (0.75, 0.3), "b": (1.0, 0.3)})


class TestClassify2D:
    def test_disk_axis_point(self):
        disk = regions.Disk((0.0, 0.0), 1.0)
        res = classify.classify2d(disk, GEN, (1.0, 0.0), wedge_table=TABLE)
        assert res.verdict == "RegularAligned"
        assert abs(res.s_star) < 5e-3
        assert abs(res.exponent - 0.75) < 0.05

    def test_disk_off_axis_recovers_orientation(self):
        disk = regions.Disk((0.0, 0.0), 1.0)
        t = 0.2
        p = (math.cos(t), math.sin(t))
        res = classify.classify2d(disk, GEN, p, wedge_table=TABLE)
        assert res.verdict == "RegularAligned"
        # aligned shear = -tan(t) under the (1, -s) normal convention
        assert abs(res.s_star - (-math.tan(t))) < 5e-3

    def test_square_corner_first_type(self):
        sq = regions.ConvexPolygon(((-1, -1), (1, -1), (1, 1), (-1, 1)))
        res = classify.classify2d(sq, GEN, (1.0, 1.0), wedge_table=TABLE)
        assert res.verdict == "CornerFirstAligned"

    def test_square_edge_midpoint_regular(self):
        sq = regions.ConvexPolygon(((-1, -1), (1, -1), (1, 1), (-1, 1)))
        res = classify.classify2d(sq, GEN, (1.0, 0.3), wedge_table=TABLE)
        assert res.verdict == "RegularAligned"

    def test_second_type_corner(self):
        g = regions.GraphRegion((0.0, 0.0, -1.0), (0.0, 0.0, 1.0))
        res = classify.classify2d(g, GEN, (0.0, 0.0), wedge_table=TABLE)
        assert res.verdict == "CornerSecond"

    def test_off_boundary_points(self):
        disk = regions.Disk((0.0, 0.0), 1.0)
        for p in ((0.0, 0.0), (3.0, 3.0)):
            res = classify.classify2d(disk, GEN, p, wedge_table=TABLE)
            assert res.verdict == "OffBoundary"


class TestCurvature2D:
    def test_disk_curvatures(self):
        for R in (1.0, 2.0):
            disk = regions.Disk((0.0, 0.0), R)
            kappa = classify.estimate_curvature2d(disk, GEN, (R, 0.0), 0.0,
                                                  table=TABLE)
            assert abs(kappa - 1.0 / R) < 0.01 / R

    def test_off_axis_curvature(self):
        disk = regions.Disk((0.0, 0.0), 1.0)
        t = 0.2
        p = (math.cos(t), math.sin(t))
        kappa = classify.estimate_curvature2d(disk, GEN, p, -math.tan(t),
                                              table=TABLE)
        assert abs(kappa - 1.0) < 0.02

    def test_flat_boundary_curvature_is_zero(self):
        hp = regions.HalfPlane((1.0, 0.0), 0.0)
        kappa = classify.estimate_curvature2d(hp, GEN, (0.0, 0.0), 0.0,
                                              table=TABLE)
        assert abs(kappa) < 1e-3

    def test_seam_guard(self):
        disk = regions.Disk((0.0, 0.0), 1.0)
        with pytest.raises(classify.IllConditionedShearError):
            classify.estimate_curvature2d(disk, GEN, (0.0, 1.0), 0.96,
                                          table=TABLE)

    def test_out_of_table_range(self):
        # radius 0.2 disk: wedge curvature far beyond the tabulated range
        disk = regions.Disk((0.0, 0.0), 0.2)
        with pytest.raises(classify.CurvatureRangeError):
            classify.estimate_curvature2d(disk, GEN, (0.2, 0.0), 0.0,
                                          table=TABLE)


class TestNeedleHelpers:
    def test_needle_rho(self):
        assert np.isclose(classify.needle_rho((0.0, 0.0), 0.3), 1.0)
        assert classify.needle_rho((0.5, -0.2), 1.0) > 0.0
