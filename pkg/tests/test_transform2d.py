"""2D coefficients: exact identities, bounds, oracles, profiles."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shearedge import quadrature, regions, transform2d
from shearedge.generators import default_generator_2d

GEN = default_generator_2d()


def test_cone_matrix_columns():
    a, s = 0.04, 0.3
    M = transform2d.cone_matrix(a, s, "h")
    assert np.allclose(M, [[a, s * np.sqrt(a)], [0.0, np.sqrt(a)]])
    Mv = transform2d.cone_matrix(a, s, "v")
    # vertical cone swaps coordinate roles
    assert np.allclose(Mv[::-1], M)


def test_index_validation():
    with pytest.raises(ValueError):
        transform2d.ShearletIndex2D(-0.1, 0.0, (0.0, 0.0))
    with pytest.raises(ValueError):
        transform2d.ShearletIndex2D(0.1, 0.0, (0.0, 0.0), cone="x")


def test_half_plane_exact_identity():
    # coeff = a^{3/4} * Psi(0) * int phi for the flat aligned boundary
    hp = regions.HalfPlane((1.0, 0.0), 0.0)
    G0 = GEN.wavelet.antiderivative(0.0) * GEN.bumps[0].integral
    for j in (4, 6, 9):
        a = 2.0 ** -j
        c = transform2d.coeff2d(hp, GEN,
                                transform2d.ShearletIndex2D(a, 0.0, (0.0, 0.0)))
        assert abs(c - a ** 0.75 * G0) <= 1e-5 * a ** 0.75 * GEN.l1


def test_coeff_matches_midpoint_oracle():
    disk = regions.Disk((0.0, 0.0), 1.0)
    a, s = 2.0 ** -5, 0.2
    M = transform2d.cone_matrix(a, s)
    p = np.array([1.0, 0.0])
    oracle = quadrature.midpoint_indicator_integral(disk, GEN, M, p, 2048)
    c = transform2d.coeff2d(disk, GEN,
                            transform2d.ShearletIndex2D(a, s, (1.0, 0.0)))
    assert abs(c - a ** 0.75 * oracle) < 5e-3 * max(abs(c), a ** 0.75 * GEN.l1)


def test_interior_point_coefficients_vanish():
    disk = regions.Disk((0.0, 0.0), 1.0)
    for a in (2.0 ** -4, 2.0 ** -7):
        for p in ((0.0, 0.0), (5.0, 5.0)):  # deep inside / far outside
            c = transform2d.coeff2d(disk, GEN,
                                    transform2d.ShearletIndex2D(a, 0.0, p))
            assert c == 0.0


@settings(max_examples=20, deadline=None)
@given(st.floats(2.0 ** -10, 2.0 ** -3), st.floats(-1.0, 1.0),
       st.floats(0.8, 1.2), st.floats(0.0, 2 * np.pi))
def test_coefficient_upper_bound(a, s, radius, angle):
    # |coeff| <= a^{3/4} |psi|_1 for any indicator
    disk = regions.Disk((0.0, 0.0), radius)
    p = (radius * np.cos(angle), radius * np.sin(angle))
    c = transform2d.coeff2d(disk, GEN, transform2d.ShearletIndex2D(a, s, p))
    assert abs(c) <= a ** 0.75 * GEN.l1 * (1.0 + 1e-9)


def test_cone_symmetry_on_rotated_halfplane():
    # vertical-cone response to the 90-degree rotated scene matches the
    # horizontal-cone response to the original
    hp_h = regions.HalfPlane((1.0, 0.0), 0.0)
    hp_v = regions.HalfPlane((0.0, 1.0), 0.0)
    a, s = 2.0 ** -6, 0.15
    ch = transform2d.coeff2d(hp_h, GEN,
                             transform2d.ShearletIndex2D(a, s, (0.0, 0.0), "h"))
    cv = transform2d.coeff2d(hp_v, GEN,
                             transform2d.ShearletIndex2D(a, s, (0.0, 0.0), "v"))
    assert np.isclose(ch, cv, rtol=1e-12)


def test_decay_profile_policies_and_csv():
    disk = regions.Disk((0.0, 0.0), 1.0)
    scales = [2.0 ** -j for j in range(4, 8)]
    fixed = transform2d.decay_profile2d(disk, GEN, (1.0, 0.0), scales)
    assert len(fixed.valid()) == len(scales)
    aa, cc = fixed.arrays()
    assert np.all(np.diff(aa) < 0) or np.all(np.diff(aa) > 0) or len(aa) > 0
    tracked = transform2d.decay_profile2d(disk, GEN, (1.0, 0.0), scales,
                                          policy="track", track_points=3)
    assert len(tracked.entries) == len(scales)
    csv1 = transform2d.profile_csv([fixed, tracked])
    csv2 = transform2d.profile_csv([fixed, tracked])
    assert csv1 == csv2
    assert csv1.startswith("px,py,policy,cone,a,s,coeff,converged,grid_n")
    assert len(csv1.strip().split("\n")) == 1 + 2 * len(scales)


def test_profile_policy_validation():
    disk = regions.Disk((0.0, 0.0), 1.0)
    with pytest.raises(ValueError):
        transform2d.decay_profile2d(disk, GEN, (1, 0), [0.1], policy="hop")
