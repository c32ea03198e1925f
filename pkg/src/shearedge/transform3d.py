"""Continuous 3D shearlet and needle coefficients of region indicators.

Plate-like coefficients at scale ``a``, shear ``s = (s1, s2)``, position
``p``, pyramid ``d`` in {1, 2, 3}:

    coeff = a * integral of chi_region(M_d z + p) psi(z) dz

where ``M_d`` maps the wavelet axis z1 to the pyramid's long frequency
axis x_d at scale ``a`` (with shears s1, s2 mixing in the bump axes) and
the two bump axes to the remaining coordinates at scale ``sqrt(a)``.  The
three pyramids are cyclic relabelings of each other: coefficients of a
region in pyramid d equal pyramid-1 coefficients of the cyclically
permuted region.

Needle-like coefficients add a rotation angle ``beta`` inside the plate
and scale as ``a^{5/4}``; they isolate curvature along a chosen tangent
direction at a surface point.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import quadrature
from .quadrature import QuadratureError, QuadratureSettings
from .transform2d import DecayProfile, ProfileEntry


@dataclass(frozen=True)
class ShearletIndex3D:
    """One plate-system index: scale, two shears, position, pyramid."""
    a: float
    s: Tuple[float, float]
    p: Tuple[float, float, float]
    pyramid: int = 1

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("scale a must be positive")
        if self.pyramid not in (1, 2, 3):
            raise ValueError("pyramid must be 1, 2 or 3")


@dataclass(frozen=True)
class NeedleIndex:
    """Needle-system index: scale, shears, in-plate rotation, position."""
    a: float
    s: Tuple[float, float]
    beta: float
    p: Tuple[float, float, float]

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("scale a must be positive")


def pyramid_matrix(a: float, s, pyramid: int = 1) -> np.ndarray:
    """Affine matrix M_d with coeff = a * int chi(M_d z + p) psi(z) dz.

    Column 0 (wavelet axis) feeds coordinate x_d at scale a; columns 1-2
    (bump axes) feed the other two coordinates cyclically at sqrt(a),
    with shear contributions s1, s2 into x_d.
    """
    r = np.sqrt(a)
    s1, s2 = float(s[0]), float(s[1])
    M = np.zeros((3, 3))
    d = pyramid - 1
    # x_d row: a z1 + sqrt(a) s1 z2 + sqrt(a) s2 z3
    M[d, 0] = a
    M[d, 1] = r * s1
    M[d, 2] = r * s2
    M[(d + 1) % 3, 1] = r
    M[(d + 2) % 3, 2] = r
    return M


def needle_matrix(a: float, s, beta: float) -> np.ndarray:
    """Inverse frequency-domain needle matrix; coeff uses its inverse."""
    r = np.sqrt(a)
    s1, s2 = float(s[0]), float(s[1])
    cb, sb = np.cos(beta), np.sin(beta)
    return np.array([
        [1.0 / a, -s1 / a, -s2 / a],
        [0.0, cb / a, -sb / a],
        [0.0, sb / r, cb / r],
    ])


def coeff3d(region, gen, idx: ShearletIndex3D,
            settings: Optional[QuadratureSettings] = None) -> float:
    """Single plate-system coefficient of the region indicator."""
    if gen.dim != 3:
        raise ValueError("3D generator required")
    settings = settings or quadrature.DEFAULT_3D
    M = pyramid_matrix(idx.a, idx.s, idx.pyramid)
    I, _, _ = quadrature.indicator_integral(region, gen, M,
                                            np.asarray(idx.p, float), settings)
    return idx.a * I


def needle_coeff(region, gen, idx: NeedleIndex,
                 settings: Optional[QuadratureSettings] = None) -> float:
    """Single needle-system coefficient of the region indicator."""
    if gen.dim != 3:
        raise ValueError("3D generator required")
    settings = settings or quadrature.DEFAULT_3D
    M = np.linalg.inv(needle_matrix(idx.a, idx.s, idx.beta))
    I, _, _ = quadrature.indicator_integral(region, gen, M,
                                            np.asarray(idx.p, float), settings)
    return idx.a ** 1.25 * I


@dataclass
class ProfileEntry3D:
    a: float
    s: Tuple[float, float]
    coeff: float
    converged: bool
    grid_n: int
    pyramid: int = 1
    beta: Optional[float] = None


@dataclass
class DecayProfile3D:
    p: Tuple[float, float, float]
    entries: List[ProfileEntry3D] = field(default_factory=list)
    policy: str = "fixed"
    system: str = "plate"

    def valid(self) -> List[ProfileEntry3D]:
        return [e for e in self.entries if e.converged and np.isfinite(e.coeff)]

    def arrays(self):
        ent = self.valid()
        return (np.array([e.a for e in ent]),
                np.array([abs(e.coeff) for e in ent]))


def _plate_entry(region, gen, a, s, p, pyramid, settings):
    M = pyramid_matrix(a, s, pyramid)
    try:
        I, n, conv = quadrature.indicator_integral(region, gen, M, p, settings)
    except QuadratureError as exc:
        I = exc.estimates[-1] if exc.estimates else np.nan
        return ProfileEntry3D(a, tuple(s), a * I, False, settings.n_cap,
                              pyramid)
    return ProfileEntry3D(a, tuple(s), a * I, conv, n, pyramid)


def decay_profile3d(region, gen, p: Sequence[float], scales: Sequence[float],
                    shear=(0.0, 0.0), pyramid: int = 1,
                    policy: str = "fixed", track_points: int = 3,
                    settings: Optional[QuadratureSettings] = None
                    ) -> DecayProfile3D:
    """Plate coefficients across a scale ladder at position p.

    policy "track" re-centres (s1, s2) on the |coeff| maximiser over a
    track_points x track_points grid within +-a of the previous shear.
    """
    if policy not in ("fixed", "track"):
        raise ValueError("policy must be 'fixed' or 'track'")
    settings = settings or quadrature.DEFAULT_3D
    p = np.asarray(p, float)
    prof = DecayProfile3D(p=tuple(p), policy=policy)
    s_cur = np.asarray(shear, float)
    for a in sorted(scales, reverse=True):
        if policy == "track":
            c1 = np.linspace(s_cur[0] - a, s_cur[0] + a, track_points)
            c2 = np.linspace(s_cur[1] - a, s_cur[1] + a, track_points)
            best = max((_plate_entry(region, gen, a, (u, v), p, pyramid,
                                     settings)
                        for u in c1 for v in c2),
                       key=lambda e: abs(e.coeff))
            s_cur = np.asarray(best.s)
            prof.entries.append(best)
        else:
            prof.entries.append(_plate_entry(region, gen, a, tuple(s_cur), p,
                                             pyramid, settings))
    return prof


def needle_profile(region, gen, p: Sequence[float], scales: Sequence[float],
                   shear=(0.0, 0.0), beta: float = 0.0,
                   settings: Optional[QuadratureSettings] = None
                   ) -> DecayProfile3D:
    """Needle coefficients across a scale ladder at fixed (s, beta)."""
    settings = settings or quadrature.DEFAULT_3D
    p = np.asarray(p, float)
    prof = DecayProfile3D(p=tuple(p), policy="fixed", system="needle")
    for a in sorted(scales, reverse=True):
        idx = NeedleIndex(a, tuple(np.asarray(shear, float)), beta, tuple(p))
        M = np.linalg.inv(needle_matrix(idx.a, idx.s, idx.beta))
        try:
            I, n, conv = quadrature.indicator_integral(region, gen, M, p,
                                                       settings)
        except QuadratureError as exc:
            I = exc.estimates[-1] if exc.estimates else np.nan
            prof.entries.append(ProfileEntry3D(a, idx.s, a ** 1.25 * I, False,
                                               settings.n_cap, 0, beta))
            continue
        prof.entries.append(ProfileEntry3D(a, idx.s, a ** 1.25 * I, conv, n,
                                           0, beta))
    return prof


def profile_csv_3d(profiles: Sequence[DecayProfile3D]) -> str:
    """Deterministic CSV dump of 3D decay profiles."""
    buf = io.StringIO()
    buf.write("px,py,pz,system,policy,pyramid,a,s1,s2,beta,coeff,"
              "converged,grid_n\n")
    for prof in profiles:
        for e in prof.entries:
            beta = "" if e.beta is None else "%.10g" % e.beta
            buf.write("%.10g,%.10g,%.10g,%s,%s,%d,%.10g,%.10g,%.10g,%s,"
                      "%.12e,%d,%d\n"
                      % (prof.p[0], prof.p[1], prof.p[2], prof.system,
                         prof.policy, e.pyramid, e.a, e.s[0], e.s[1], beta,
                         e.coeff, int(e.converged), e.grid_n))
    return buf.getvalue()
