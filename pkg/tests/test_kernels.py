"""Backend parity: compiled line-scan kernel vs the numpy reference."""

import numpy as np
import pytest

from shearedge import kernels, regions
from shearedge.generators import default_generator_2d, default_generator_3d
from shearedge.quadrature import DEFAULT_2D, DEFAULT_3D, indicator_integral
from shearedge.transform2d import cone_matrix
from shearedge.transform3d import pyramid_matrix

compiled = pytest.mark.skipif(kernels.BACKEND != "compiled",
                              reason="compiled extension not built")


def _wavelet_pieces(gen):
    return gen.wavelet.kernel_arrays()


def _compare_line_integrals(region, gen, A, b, rest, lo, hi, m):
    breaks, coeffs, total = _wavelet_pieces(gen)
    ops, params = region.program()
    ref = kernels.line_integrals_numpy(ops, params, A, b, rest, lo, hi, m,
                                       breaks, coeffs, total)
    fast = kernels.line_integrals(ops, params, A, b, rest, lo, hi, m,
                                  breaks, coeffs, total)
    np.testing.assert_allclose(fast, ref, rtol=0, atol=1e-18 + 1e-12 *
                               np.max(np.abs(ref)))


@compiled
def test_membership_parity_random_points():
    rng = np.random.default_rng(11)
    shapes = [regions.Disk((0.1, -0.2), 0.7),
              regions.ConvexPolygon(((-1, -1), (1, -1), (0.5, 1))),
              regions.GraphRegion((0.0, 0.5, -1.0), (0.0, -0.25, 2.0)),
              regions.Ball((0, 0, 0), 1.0),
              regions.CutBall((0, 0, 0), 1.0, (0, 0, 1.0), 0.1)]
    for region in shapes:
        ops, params = region.program()
        pts = rng.uniform(-1.5, 1.5, size=(500, region.dim))
        ref = kernels.membership_numpy(ops, params, pts)
        fast = kernels.membership(ops, params, pts)
        assert np.array_equal(ref, fast)


@compiled
def test_line_integral_parity_2d():
    gen = default_generator_2d()
    rng = np.random.default_rng(5)
    disk = regions.Disk((0.0, 0.0), 1.0)
    for a, s in ((2.0 ** -6, 0.0), (2.0 ** -9, 0.3), (2.0 ** -4, -0.8)):
        M = cone_matrix(a, s)
        rest = rng.uniform(-0.22, 0.22, size=(40, 1))
        lo, hi = gen.wavelet.support
        _compare_line_integrals(disk, gen, M, np.array([1.0, 0.0]),
                                rest, lo, hi, 65)


@compiled
def test_line_integral_parity_3d():
    gen = default_generator_3d()
    rng = np.random.default_rng(6)
    cb = regions.CutBall((0, 0, 0), 1.0, (0, 0, 1.0), 0.0)
    M = pyramid_matrix(2.0 ** -5, (0.2, -0.1))
    rest = rng.uniform(-0.21, 0.21, size=(30, 2))
    lo, hi = gen.wavelet.support
    _compare_line_integrals(cb, gen, M, np.array([1.0, 0.0, 0.0]),
                            rest, lo, hi, 65)


@compiled
def test_full_coefficient_parity():
    # end to end through the adaptive quadrature, both backends
    gen = default_generator_2d()
    disk = regions.Disk((0.0, 0.0), 1.0)
    M = cone_matrix(2.0 ** -8, 0.1)
    p = np.array([1.0, 0.0])
    fast, _, _ = indicator_integral(disk, gen, M, p, DEFAULT_2D)
    saved = kernels.line_integrals
    try:
        kernels.line_integrals = kernels.line_integrals_numpy
        ref, _, _ = indicator_integral(disk, gen, M, p, DEFAULT_2D)
    finally:
        kernels.line_integrals = saved
    assert abs(fast - ref) < 1e-15
