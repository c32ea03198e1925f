"""Frame diagnostics for the continuous shearlet systems.

All quantities live in the frequency domain and use the exact piecewise
polynomial Fourier transforms of the separable generator factors:

* ``admissibility_2d``: C_psi = int |psi_hat(xi)|^2 / xi_1^2 dxi, the
  constant whose finiteness makes the 2D transform invertible.
* ``admissibility_3d``: C_psi = int_{omega_1 > 0} |psi_hat|^2 /
  omega_1^3 domega, and ``admissibility_3d_group`` the same constant
  re-expressed as an (a, s)-integral over the full parameter group at a
  reference frequency; agreement of the two is a correctness check of
  the whole frequency pipeline.
* ``delta_multiplier``: the Fourier symbol of the pyramid-restricted
  frame operator,

      Delta(xi) = chi_P(xi) int_0^Gamma int_{|s|_inf <= Xi}
                  |psi_hat(a xi1, sqrt(a)(xi2 + s1 xi1),
                           sqrt(a)(xi3 + s2 xi1))|^2 a^{-2} da ds.

  Its essential bounds over the pyramid P = {|xi1| >= u,
  |xi2/xi1| <= v, |xi3/xi1| <= w} are the frame constants.
* ``window_spectrum``: C_psi chi_P(xi) - Delta(xi), the squared Fourier
  modulus of the low-frequency window that tightens the frame.

For a separable generator the s-integrals collapse to 1D windowed
integrals of |phi1_hat|^2, which are served from a cached cumulative
spectrum table; the a-integral runs over dyadic panels with
Gauss-Legendre nodes, doubled until self-agreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .generators import fourier_factor

__all__ = [
    "FrameConfig", "MultiplierField", "FrameError", "AdmissibilityError",
    "admissibility_2d", "admissibility_3d", "admissibility_3d_group",
    "delta_multiplier", "in_pyramid", "frame_bounds", "window_spectrum",
    "pyramid_grid",
]


class FrameError(RuntimeError):
    pass


class AdmissibilityError(FrameError):
    """The admissibility integral diverges (insufficient moments)."""


@dataclass(frozen=True)
class FrameConfig:
    """Parameter box and pyramid thresholds of one pyramid system.

    gamma is the scale ceiling (a in (0, gamma]), xi the shear ceiling
    (|s1|, |s2| <= xi), and (u, v, w) cut the frequency pyramid
    {|xi1| >= u, |xi2/xi1| <= v, |xi3/xi1| <= w}; the tight-frame
    window lemma needs 0 < u, v, w < xi.
    """
    gamma: float = 1.0
    xi: float = 1.0
    u: float = 0.5
    v: float = 0.5
    w: float = 0.5
    a_panel_nodes: int = 12
    rel_tol: float = 5e-3

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("scale ceiling gamma must be positive")
        if not (0 < self.u < self.xi and 0 < self.v < self.xi
                and 0 < self.w < self.xi):
            raise ValueError("pyramid thresholds must satisfy 0 < u,v,w < xi")


@dataclass
class MultiplierField:
    """Delta sampled on a frequency grid, with its min/max over it."""
    points: np.ndarray
    values: np.ndarray
    lower: float = field(init=False)
    upper: float = field(init=False)

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, float))
        self.values = np.asarray(self.values, float)
        self.lower = float(self.values.min()) if self.values.size else math.nan
        self.upper = float(self.values.max()) if self.values.size else math.nan


# ---------------------------------------------------------------------------
# 1D spectral integrals
# ---------------------------------------------------------------------------

_GL_N = 24
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_N)


def _panel_integral(factor, lo, hi, weight_pow):
    """int_lo^hi |factor_hat(t)|^2 t^{-weight_pow} dt (0 < lo < hi)."""
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    t = mid + half * _GL_X
    vals = np.abs(fourier_factor(factor, t)) ** 2 * t ** -float(weight_pow)
    return half * float(vals @ _GL_W)


def spectral_integral(factor, weight_pow=0, rel_tol=1e-4):
    """int_0^infty |factor_hat(t)|^2 t^{-weight_pow} dt on dyadic panels.

    Divergence at t -> 0 (too few vanishing moments for the weight) is
    detected from non-decaying low-frequency panel contributions and
    raised as AdmissibilityError.
    """
    panels = {}

    def panel(k):
        if k not in panels:
            panels[k] = _panel_integral(factor, 2.0 ** k, 2.0 ** (k + 1),
                                        weight_pow)
        return panels[k]

    total = sum(panel(k) for k in range(-8, 8))
    # extend upward until the high-frequency tail is negligible
    k = 8
    while panel(k) > rel_tol * 1e-3 * total and k < 60:
        total += panel(k)
        k += 1
    # extend downward; contributions must decay geometrically
    k = -9
    while panel(k) > rel_tol * 1e-3 * total:
        if panel(k) > 0.8 * panel(k + 1) and k < -20:
            raise AdmissibilityError(
                "spectral integral with weight t^-%g diverges at 0: "
                "panel ratio %.3f at 2^%d"
                % (weight_pow, panel(k) / panel(k + 1), k))
        total += panel(k)
        k -= 1
        if k < -200:
            raise AdmissibilityError(
                "spectral integral did not converge at low frequency")
    return total


class _CumulativeSpectrum:
    """Cached x -> int_{-inf}^{x} |factor_hat(t)|^2 dt lookup."""

    def __init__(self, factor, cutoff=4096.0, n=1 << 17):
        grid = np.linspace(-cutoff, cutoff, n + 1)
        dens = np.abs(fourier_factor(factor, grid)) ** 2
        h = grid[1] - grid[0]
        cum = np.concatenate(
            [[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * h)])
        self.grid = grid
        self.cum = cum
        self.total = float(cum[-1])

    def window(self, lo, hi):
        if hi <= lo:
            return 0.0
        clo = float(np.interp(lo, self.grid, self.cum))
        chi = float(np.interp(hi, self.grid, self.cum))
        return max(chi - clo, 0.0)


_SPECTRUM_CACHE = {}


def _cumulative_spectrum(factor):
    key = id(factor)
    if key not in _SPECTRUM_CACHE:
        _SPECTRUM_CACHE[key] = _CumulativeSpectrum(factor)
    return _SPECTRUM_CACHE[key]


# ---------------------------------------------------------------------------
# Admissibility constants
# ---------------------------------------------------------------------------

def admissibility_2d(gen) -> float:
    """C_psi = int_{R^2} |psi_hat(xi)|^2 / xi_1^2 dxi (separable split)."""
    if gen.dim != 2:
        raise ValueError("2D generator required")
    wav = 2.0 * spectral_integral(gen.wavelet, weight_pow=2)
    bump = 2.0 * spectral_integral(gen.bumps[0], weight_pow=0)
    return wav * bump


def admissibility_3d(gen) -> float:
    """C_psi = int_{omega_1 in R+} |psi_hat(omega)|^2/omega_1^3 domega."""
    if gen.dim != 3:
        raise ValueError("3D generator required")
    wav = spectral_integral(gen.wavelet, weight_pow=3)
    bumps = [2.0 * spectral_integral(b, weight_pow=0) for b in gen.bumps]
    return wav * bumps[0] * bumps[1]


def admissibility_3d_group(gen, ref_xi: Sequence[float] = (1.0, 0.3, -0.2),
                           rel_tol: float = 1e-3) -> float:
    """Same constant as an (a, s)-integral over the full parameter group.

    C_psi = int_{R^2} int_{R+} |psi_hat(M_{a,s}^T xi)|^2 a^{-2} da ds at
    any reference xi with xi_1 != 0.  The two unbounded s-integrals
    collapse exactly to int |phi1_hat|^2 / (sqrt(a) |xi_1|) each; the
    remaining a-integral is evaluated on dyadic panels, so the nodes
    probe psi1_hat at a xi_1 rather than at the direct form's abscissae.
    """
    if gen.dim != 3:
        raise ValueError("3D generator required")
    xi1 = float(ref_xi[0])
    if xi1 == 0.0:
        raise ValueError("reference frequency must have xi_1 != 0")
    bump_tot = [2.0 * spectral_integral(b, weight_pow=0) for b in gen.bumps]

    def panel(k):
        lo, hi = 2.0 ** k, 2.0 ** (k + 1)
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        a = mid + half * _GL_X
        dens = np.abs(fourier_factor(gen.wavelet, a * abs(xi1))) ** 2
        # a^{-2} group weight times (sqrt(a)|xi1|)^{-1} per s-integral
        vals = dens * a ** -3.0 / xi1 ** 2
        return half * float(vals @ _GL_W)

    total = sum(panel(k) for k in range(-8, 8))
    k = 8
    while (p := panel(k)) > rel_tol * 1e-3 * total and k < 60:
        total += p
        k += 1
    k = -9
    while (p := panel(k)) > rel_tol * 1e-3 * total and k > -200:
        total += p
        k -= 1
    return total * bump_tot[0] * bump_tot[1]


# ---------------------------------------------------------------------------
# Frame multiplier Delta and derived diagnostics
# ---------------------------------------------------------------------------

def in_pyramid(xi, cfg: FrameConfig) -> bool:
    """Membership in P = {|xi1| >= u, |xi2/xi1| <= v, |xi3/xi1| <= w}."""
    x1, x2, x3 = (float(c) for c in xi)
    return (abs(x1) >= cfg.u and abs(x2) <= cfg.v * abs(x1)
            and abs(x3) <= cfg.w * abs(x1))


def _delta_a_integrand(gen, a, xi, cfg):
    """Vectorized over a: s-box-integrated squared spectrum at scale a."""
    x1, x2, x3 = (float(c) for c in xi)
    r = np.sqrt(a)
    dens = np.abs(fourier_factor(gen.wavelet, a * x1)) ** 2
    out = dens * a ** -2.0
    for bump, xj in zip(gen.bumps, (x2, x3)):
        spec = _cumulative_spectrum(bump)
        # int_{-Xi}^{Xi} |phi_hat(sqrt(a)(xj + s x1))|^2 ds
        lo = r * (xj - cfg.xi * abs(x1))
        hi = r * (xj + cfg.xi * abs(x1))
        win = np.array([spec.window(l, h) for l, h in zip(lo, hi)])
        out = out * win / (r * abs(x1))
    return out


def delta_multiplier(gen, xi, cfg: Optional[FrameConfig] = None) -> float:
    """Frame-operator symbol Delta(xi); exact 0 outside the pyramid."""
    if gen.dim != 3:
        raise ValueError("3D generator required")
    cfg = cfg or FrameConfig()
    if not in_pyramid(xi, cfg):
        return 0.0
    total = 0.0
    k_hi = math.ceil(math.log2(cfg.gamma)) - 1
    top = None
    # dyadic a-panels descending from gamma; stop once panels are dust
    k = k_hi
    while True:
        lo, hi = 2.0 ** k, min(2.0 ** (k + 1), cfg.gamma)
        if hi <= lo:
            k -= 1
            continue
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        a = mid + half * _GL_X
        vals = _delta_a_integrand(gen, a, xi, cfg)
        p = half * float(vals @ _GL_W)
        total += p
        if top is None:
            top = max(p, 1e-300)
        if k < k_hi - 4 and p < cfg.rel_tol * 1e-3 * max(total, top):
            break
        if k < k_hi - 400:
            break
        k -= 1
    return total


def pyramid_grid(cfg: FrameConfig, n_radial: int = 12, n_angular: int = 5,
                 t_max: float = 64.0) -> np.ndarray:
    """Deterministic pyramid sample including near-threshold rays."""
    eps = 1e-9
    tt = np.geomspace(cfg.u * (1 + eps), t_max, n_radial)
    ratios = np.linspace(-1 + eps, 1 - eps, n_angular)
    pts = []
    for t in tt:
        for rv in ratios:
            for rw in ratios:
                pts.append((t, rv * cfg.v * t, rw * cfg.w * t))
    return np.array(pts)


def frame_bounds(gen, cfg: Optional[FrameConfig] = None,
                 grid: Optional[np.ndarray] = None,
                 positivity_floor: float = 0.0
                 ) -> Tuple[float, float, MultiplierField]:
    """(min, max) of Delta over a pyramid grid; estimates, not proofs."""
    cfg = cfg or FrameConfig()
    grid = pyramid_grid(cfg) if grid is None else np.atleast_2d(grid)
    vals = np.array([delta_multiplier(gen, xi, cfg) for xi in grid])
    fld = MultiplierField(grid, vals)
    if fld.lower <= positivity_floor:
        raise FrameError("frame lower bound estimate %.3e is not positive"
                         % fld.lower)
    return fld.lower, fld.upper, fld


def window_spectrum(gen, xi, cfg: Optional[FrameConfig] = None,
                    cpsi: Optional[float] = None) -> float:
    """|W_hat(xi)|^2 of the tight-frame window: C_psi chi_P - Delta."""
    cfg = cfg or FrameConfig()
    if cpsi is None:
        cpsi = admissibility_3d(gen)
    if not in_pyramid(xi, cfg):
        return 0.0
    val = cpsi - delta_multiplier(gen, xi, cfg)
    if val < -0.02 * cpsi:
        raise FrameError(
            "window spectrum %.3e below -2%% of C_psi: Delta or C_psi "
            "quadrature inconsistent" % val)
    return val
