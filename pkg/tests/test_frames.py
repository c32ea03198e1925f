"""Frequency-domain frame diagnostics: admissibility, Delta, window."""

import numpy as np
import numpy.polynomial.polynomial as P
import pytest

from shearedge import frames
from shearedge.generators import (
    Bump1D, PiecewisePoly, SeparableGenerator, Wavelet1D, fourier_factor,
    default_generator_2d, default_generator_3d,
)

GEN2 = default_generator_2d()
GEN3 = default_generator_3d()


def _poly_pow(c, n):
    out = np.array([1.0])
    for _ in range(n):
        out = P.polymul(out, c)
    return out


def _low_moment_gen3d():
    # psi1 = theta' has a single vanishing moment: psi_hat ~ xi near 0,
    # so the |omega|^-3 admissibility weight diverges
    theta = _poly_pow([1.0, 0.0, -1.0], 6)
    base = PiecewisePoly([-1.0, 1.0], [P.polyder(theta, 1)])
    wav = Wavelet1D(base, shift=0.16, moments=1)
    bump = GEN3.bumps[0]
    return SeparableGenerator(wav, [bump, bump])


class TestSpectralIntegrals:
    def test_plancherel_oracle(self):
        # int_R |phi_hat|^2 = |phi|_2^2 (Parseval)
        for factor in (GEN2.bumps[0], GEN3.bumps[0], GEN2.wavelet,
                       GEN3.wavelet):
            val = 2.0 * frames.spectral_integral(factor, weight_pow=0)
            assert np.isclose(val, factor.l2 ** 2, rtol=1e-6)

    def test_divergence_detected(self):
        with pytest.raises(frames.AdmissibilityError):
            frames.spectral_integral(_low_moment_gen3d().wavelet,
                                     weight_pow=3)

    def test_admissibility_values(self):
        # frozen regression values for the default generators
        assert np.isclose(frames.admissibility_3d(GEN3),
                          1.3322625760031147e-14, rtol=1e-9)
        assert frames.admissibility_2d(GEN2) > 0.0

    def test_low_moment_3d_generator_rejected(self):
        with pytest.raises(frames.AdmissibilityError):
            frames.admissibility_3d(_low_moment_gen3d())

    def test_dimension_checks(self):
        with pytest.raises(ValueError):
            frames.admissibility_3d(GEN2)
        with pytest.raises(ValueError):
            frames.admissibility_2d(GEN3)
        with pytest.raises(ValueError):
            frames.admissibility_3d_group(GEN2)

    def test_scaling_homogeneity(self):
        # doubling the wavelet amplitude quadruples every quadratic form
        theta = _poly_pow([1.0, 0.0, -1.0], 7)
        base2 = PiecewisePoly([-1.0, 1.0], [2.0 * P.polyder(theta, 3)])
        wav2 = Wavelet1D(base2, shift=0.16, moments=3)
        gen2x = SeparableGenerator(wav2, list(GEN3.bumps))
        assert np.isclose(frames.admissibility_3d(gen2x),
                          4.0 * frames.admissibility_3d(GEN3), rtol=1e-9)


class TestGroupForm:
    def test_group_matches_direct(self):
        direct = frames.admissibility_3d(GEN3)
        for ref in ((1.0, 0.3, -0.2), (2.5, -0.7, 0.4)):
            grp = frames.admissibility_3d_group(GEN3, ref_xi=ref)
            assert abs(grp - direct) <= 0.02 * direct

    def test_group_requires_nonzero_xi1(self):
        with pytest.raises(ValueError):
            frames.admissibility_3d_group(GEN3, ref_xi=(0.0, 1.0, 1.0))


class TestDeltaMultiplier:
    CFG = frames.FrameConfig()

    def test_zero_outside_pyramid(self):
        for xi in ((0.3, 0.0, 0.0),      # |xi1| < u
                    (2.0, 1.5, 0.0),      # |xi2/xi1| > v
                    (2.0, 0.0, -1.5)):    # |xi3/xi1| > w
            assert not frames.in_pyramid(xi, self.CFG)
            assert frames.delta_multiplier(GEN3, xi, self.CFG) == 0.0

    def test_nonnegative_on_random_rays(self):
        rng = np.random.default_rng(31)
        for _ in range(40):
            t = rng.uniform(self.CFG.u, 64.0)
            xi = (t, rng.uniform(-1, 1) * self.CFG.v * t,
                  rng.uniform(-1, 1) * self.CFG.w * t)
            assert frames.delta_multiplier(GEN3, xi, self.CFG) >= 0.0

    def test_frozen_reference_value(self):
        val = frames.delta_multiplier(GEN3, (8.0, 1.0, 1.0), self.CFG)
        assert np.isclose(val, 4.813394617710609e-15, rtol=1e-6)

    def test_monte_carlo_oracle(self):
        # uniform MC over (0, gamma] x [-xi, xi]^2 against the panel value
        cfg = self.CFG
        xi = (8.0, 1.0, 1.0)
        rng = np.random.default_rng(7)
        n = 200_000
        a = rng.uniform(0.0, cfg.gamma, n)
        s1 = rng.uniform(-cfg.xi, cfg.xi, n)
        s2 = rng.uniform(-cfg.xi, cfg.xi, n)
        r = np.sqrt(a)
        dens = (np.abs(fourier_factor(GEN3.wavelet, a * xi[0])) ** 2
                * np.abs(fourier_factor(GEN3.bumps[0],
                                        r * (xi[1] + s1 * xi[0]))) ** 2
                * np.abs(fourier_factor(GEN3.bumps[1],
                                        r * (xi[2] + s2 * xi[0]))) ** 2)
        mc = cfg.gamma * (2 * cfg.xi) ** 2 * float(np.mean(dens * a ** -2.0))
        val = frames.delta_multiplier(GEN3, xi, cfg)
        assert abs(mc - val) <= 0.03 * val

    def test_monotone_in_scale_and_shear_ceilings(self):
        xi = (4.0, 0.5, -0.5)
        small_gamma = frames.FrameConfig(gamma=0.25)
        big_xi = frames.FrameConfig(xi=2.0)
        base = frames.delta_multiplier(GEN3, xi, self.CFG)
        assert frames.delta_multiplier(GEN3, xi, small_gamma) <= base + 1e-30
        assert frames.delta_multiplier(GEN3, xi, big_xi) >= base - 1e-30

    def test_delta_bounded_by_admissibility(self):
        cpsi = frames.admissibility_3d(GEN3)
        for t in (0.6, 2.0, 16.0, 64.0):
            val = frames.delta_multiplier(GEN3, (t, 0.2 * t, -0.3 * t),
                                          self.CFG)
            assert val <= cpsi * (1.0 + 1e-6)


class TestFrameBounds:
    def test_positive_lower_bound(self):
        lower, upper, fld = frames.frame_bounds(GEN3)
        assert 0.0 < lower <= upper
        assert fld.values.shape[0] == fld.points.shape[0]
        assert np.isclose(fld.lower, lower) and np.isclose(fld.upper, upper)

    def test_positivity_floor_raises(self):
        with pytest.raises(frames.FrameError):
            frames.frame_bounds(GEN3, positivity_floor=1.0)

    def test_window_spectrum_range(self):
        cpsi = frames.admissibility_3d(GEN3)
        cfg = frames.FrameConfig()
        assert frames.window_spectrum(GEN3, (0.1, 0.0, 0.0), cfg, cpsi) == 0.0
        for xi in ((0.6, 0.1, 0.0), (4.0, 1.0, -1.0), (64.0, 0.0, 0.0)):
            w = frames.window_spectrum(GEN3, xi, cfg, cpsi)
            assert -0.01 * cpsi <= w <= 1.01 * cpsi


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            frames.FrameConfig(gamma=0.0)
        with pytest.raises(ValueError):
            frames.FrameConfig(u=1.5)          # u >= xi
        with pytest.raises(ValueError):
            frames.FrameConfig(xi=0.4)         # default u above ceiling

    def test_pyramid_grid_inside(self):
        cfg = frames.FrameConfig()
        grid = frames.pyramid_grid(cfg)
        assert all(frames.in_pyramid(xi, cfg) for xi in grid)
