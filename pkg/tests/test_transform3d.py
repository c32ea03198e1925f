"""3D plate and needle coefficients: identities, symmetry, bounds."""

import numpy as np
import pytest

from shearedge import regions, transform3d
from shearedge.generators import default_generator_3d

GEN = default_generator_3d()


def test_pyramid_matrix_layout():
    a, s = 0.04, (0.3, -0.2)
    r = np.sqrt(a)
    M = transform3d.pyramid_matrix(a, s, 1)
    assert np.allclose(M, [[a, r * 0.3, r * -0.2], [0, r, 0], [0, 0, r]])
    # pyramids 2 and 3 are cyclic relabelings of the coordinate axes
    P = np.array([[0, 1.0, 0], [0, 0, 1.0], [1.0, 0, 0]])  # x -> (x2,x3,x1)
    M2 = transform3d.pyramid_matrix(a, s, 2)
    assert np.allclose(P @ M2, M)


def test_pyramid_coefficients_cyclic_symmetry():
    # coefficient of the permuted region in pyramid 2 equals the
    # pyramid-1 coefficient of the original
    a, s = 2.0 ** -5, (0.2, 0.1)
    ball = regions.Ball((0.3, 0.0, 0.0), 1.0)     # boundary pt on x1 axis
    ball2 = regions.Ball((0.0, 0.3, 0.0), 1.0)    # same scene, axes rolled
    c1 = transform3d.coeff3d(ball, GEN, transform3d.ShearletIndex3D(
        a, s, (1.3, 0.0, 0.0), pyramid=1))
    c2 = transform3d.coeff3d(ball2, GEN, transform3d.ShearletIndex3D(
        a, s, (0.0, 1.3, 0.0), pyramid=2))
    assert np.isclose(c1, c2, rtol=1e-9)


def test_half_space_exact_identity():
    hs = regions.HalfSpace((1.0, 0.0, 0.0), 0.0)
    G0 = (GEN.wavelet.antiderivative(0.0)
          * GEN.bumps[0].integral * GEN.bumps[1].integral)
    for j in (3, 5, 7):
        a = 2.0 ** -j
        c = transform3d.coeff3d(hs, GEN, transform3d.ShearletIndex3D(
            a, (0.0, 0.0), (0.0, 0.0, 0.0)))
        assert abs(c - a * G0) <= 1e-5 * a * GEN.l1


def test_interior_coefficients_vanish():
    ball = regions.Ball((0, 0, 0), 1.0)
    for a in (2.0 ** -3, 2.0 ** -6):
        c = transform3d.coeff3d(ball, GEN, transform3d.ShearletIndex3D(
            a, (0.0, 0.0), (0.0, 0.0, 0.0)))
        assert c == 0.0
        n = transform3d.needle_coeff(ball, GEN, transform3d.NeedleIndex(
            a, (0.0, 0.0), 0.7, (0.0, 0.0, 0.0)))
        assert n == 0.0


def test_coefficient_upper_bounds():
    ball = regions.Ball((0, 0, 0), 1.0)
    for a in (2.0 ** -3, 2.0 ** -5):
        c = transform3d.coeff3d(ball, GEN, transform3d.ShearletIndex3D(
            a, (0.4, -0.3), (1.0, 0.0, 0.0)))
        assert abs(c) <= a * GEN.l1 * (1 + 1e-9)
        n = transform3d.needle_coeff(ball, GEN, transform3d.NeedleIndex(
            a, (0.0, 0.0), 0.3, (1.0, 0.0, 0.0)))
        assert abs(n) <= a ** 1.25 * GEN.l1 * (1 + 1e-9)


def test_needle_matrix_inverse_consistency():
    # first column of the spatial needle matrix is the fine axis a*e1
    a, s = 0.03, (0.2, -0.1)
    M = np.linalg.inv(transform3d.needle_matrix(a, s, 0.0))
    assert np.allclose(M[:, 0], [a, 0.0, 0.0], atol=1e-14)
    assert np.isclose(abs(np.linalg.det(M)), a ** 2.5, rtol=1e-10)
    # the needle at beta and beta + 2pi agree
    ball = regions.Ball((0, 0, 0), 1.0)
    idx1 = transform3d.NeedleIndex(0.05, s, 0.4, (1.0, 0.0, 0.0))
    idx2 = transform3d.NeedleIndex(0.05, s, 0.4 + 2 * np.pi, (1.0, 0.0, 0.0))
    c1 = transform3d.needle_coeff(ball, GEN, idx1)
    c2 = transform3d.needle_coeff(ball, GEN, idx2)
    assert np.isclose(c1, c2, rtol=1e-9)


def test_profile_and_csv_3d():
    ball = regions.Ball((0, 0, 0), 1.0)
    scales = [2.0 ** -j for j in range(3, 6)]
    prof = transform3d.decay_profile3d(ball, GEN, (1.0, 0.0, 0.0), scales)
    nprof = transform3d.needle_profile(ball, GEN, (1.0, 0.0, 0.0), scales,
                                       beta=0.5)
    csv = transform3d.profile_csv_3d([prof, nprof])
    assert csv == transform3d.profile_csv_3d([prof, nprof])
    lines = csv.strip().split("\n")
    assert lines[0].startswith("px,py,pz,system,policy")
    assert len(lines) == 1 + 2 * len(scales)
    assert any(",needle," in ln for ln in lines[1:])


def test_index_validation_3d():
    with pytest.raises(ValueError):
        transform3d.ShearletIndex3D(0.1, (0, 0), (0, 0, 0), pyramid=4)
    with pytest.raises(ValueError):
        transform3d.NeedleIndex(-0.1, (0, 0), 0.0, (0, 0, 0))
