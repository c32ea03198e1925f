"""Compactly supported separable generators and their certification.

A generator is psi(x) = psi1(x1) * phi1(x2) [* phi1(x3)] built from
piecewise-polynomial factors:

* ``Wavelet1D``   -- psi1, at least one vanishing moment, with a shift
  offset t that places the detector moment conditions
  (integrals of psi1(x-t) x^j over (-inf, 0], j = 0, 2, 3) away from zero.
* ``Bump1D``      -- phi1 with phi1(0)=0, phi1'(0) != 0, integral > 0.

The wedge integral G(kappa) = integral of psi over {x1 <= kappa x2^2}
is the curvature detector: it is tabulated over a certified interval K
and inverted (when strictly monotone) to recover boundary curvature from
coefficient limits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

__all__ = [
    "PiecewisePoly", "Wavelet1D", "Bump1D", "SeparableGenerator",
    "WedgeIntegralTable", "eval_element_2d", "partial_moments",
    "moment_derivative_diagnostic", "find_detector_shift", "wedge_integral",
    "build_wedge_table", "fourier_factor", "default_generator_2d",
    "default_generator_3d", "load_generator", "DetectorShiftError",
    "WedgeRangeError",
]


class DetectorShiftError(RuntimeError):
    pass


class WedgeRangeError(ValueError):
    pass


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _gl_integrate(f, a, b, panels=1):
    """Composite 24-node Gauss-Legendre integral of callable f on [a, b]."""
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * np.sum(_GL_WEIGHTS * f(mid + half * _GL_NODES))
    return total


class PiecewisePoly:
    """Piecewise polynomial on consecutive intervals, zero outside."""

    def __init__(self, breaks, coeff_list):
        self.breaks = np.asarray(breaks, float)
        if np.any(np.diff(self.breaks) <= 0):
            raise ValueError("breaks must be strictly increasing")
        maxlen = max(len(c) for c in coeff_list)
        self.coeffs = np.zeros((len(coeff_list), maxlen))
        for i, c in enumerate(coeff_list):
            self.coeffs[i, :len(c)] = c

    def __call__(self, x):
        x = np.asarray(x, float)
        out = np.zeros(x.shape)
        idx = np.searchsorted(self.breaks, x, side="right") - 1
        inside = (idx >= 0) & (idx < len(self.coeffs)) & (x <= self.breaks[-1])
        idx = np.clip(idx, 0, len(self.coeffs) - 1)
        for i in range(len(self.coeffs)):
            m = inside & (idx == i)
            if np.any(m):
                out[m] = P.polyval(x[m], self.coeffs[i])
        return out

    def derivative(self):
        return PiecewisePoly(self.breaks,
                             [P.polyder(c) for c in self.coeffs])

    def cumulative(self):
        """Antiderivative F with F(breaks[0]) = 0, clamped constant outside."""
        coeffs, consts = [], []
        acc = 0.0
        for i, c in enumerate(self.coeffs):
            ci = P.polyint(c)
            shift = acc - P.polyval(self.breaks[i], ci)
            ci = ci.copy()
            ci[0] += shift
            coeffs.append(ci)
            acc = P.polyval(self.breaks[i + 1], ci)
            consts.append(acc)
        return _CumulativePoly(PiecewisePoly(self.breaks, coeffs), acc)


class _CumulativePoly:
    def __init__(self, pp, total):
        self.pp = pp
        self.total = total

    def __call__(self, x):
        x = np.asarray(x, float)
        out = self.pp(np.clip(x, self.pp.breaks[0], self.pp.breaks[-1]))
        out = np.where(x >= self.pp.breaks[-1], self.total, out)
        return np.where(x <= self.pp.breaks[0], 0.0, out)


def _dense_norms(fn, lo, hi, n=200001):
    xs = np.linspace(lo, hi, n)
    v = fn(xs)
    l1 = np.trapezoid(np.abs(v), xs)
    l2 = math.sqrt(np.trapezoid(v * v, xs))
    return l1, l2


class Wavelet1D:
    """Shifted piecewise-polynomial wavelet psi1(x) = base(x - t)."""

    def __init__(self, base: PiecewisePoly, shift=0.0, moments=1):
        self.base = base
        self.shift = float(shift)
        self.moments = int(moments)
        self.support = (base.breaks[0] + self.shift, base.breaks[-1] + self.shift)
        self._cum = base.cumulative()
        if abs(self._cum.total) > 1e-10:
            raise ValueError("wavelet must integrate to zero")
        self.l1, self.l2 = _dense_norms(self, *self.support)

    def __call__(self, x):
        return self.base(np.asarray(x, float) - self.shift)

    def antiderivative(self, x):
        """Integral of psi1 over (-inf, x]."""
        return self._cum(np.asarray(x, float) - self.shift)

    def shifted(self, t):
        return Wavelet1D(self.base, self.shift + t, self.moments)

    def kernel_arrays(self):
        """(breaks, coeffs) of the antiderivative in shifted coordinates,
        for the compiled kernel."""
        pp = self._cum.pp
        # rewrite each antiderivative piece in global (shifted) coordinates
        coeffs = [_shift_poly(c, self.shift) for c in pp.coeffs]
        maxlen = max(len(c) for c in coeffs)
        mat = np.zeros((len(coeffs), maxlen))
        for i, c in enumerate(coeffs):
            mat[i, :len(c)] = c
        return pp.breaks + self.shift, mat, self._cum.total


def _shift_poly(c, t):
    """Coefficients of p(x - t) given those of p(x), by Horner expansion."""
    out = np.zeros(1)
    for ck in c[::-1]:
        out = P.polyadd(P.polymul(out, [-t, 1.0]), [ck])
    return out


class Bump1D:
    """Polynomial bump phi1 on [-r, r] with phi1(0)=0, phi1'(0) != 0."""

    def __init__(self, coeffs, radius):
        self.coeffs = np.asarray(coeffs, float)
        self.radius = float(radius)
        self.support = (-self.radius, self.radius)
        self.value0 = float(P.polyval(0.0, self.coeffs))
        self.dvalue0 = float(P.polyval(0.0, P.polyder(self.coeffs)))
        anti = P.polyint(self.coeffs)
        self.integral = float(P.polyval(self.radius, anti)
                              - P.polyval(-self.radius, anti))
        if abs(self.value0) > 1e-12:
            raise ValueError("bump must vanish at 0")
        if abs(self.dvalue0) < 1e-12:
            raise ValueError("bump must have nonzero derivative at 0")
        if self.integral <= 0:
            raise ValueError("bump must have positive integral")
        self.l1, self.l2 = _dense_norms(self, -self.radius, self.radius)

    def __call__(self, x):
        x = np.asarray(x, float)
        out = P.polyval(x, self.coeffs)
        return np.where(np.abs(x) <= self.radius, out, 0.0)

    def half_integral(self, sign):
        """Integral over [0, r] (sign=+1) or [-r, 0] (sign=-1)."""
        anti = P.polyint(self.coeffs)
        if sign > 0:
            return float(P.polyval(self.radius, anti) - P.polyval(0.0, anti))
        return float(P.polyval(0.0, anti) - P.polyval(-self.radius, anti))


class SeparableGenerator:
    """psi = psi1 (x) phi1 [(x) phi1]; dimension 2 or 3."""

    def __init__(self, wavelet: Wavelet1D, bumps):
        self.wavelet = wavelet
        self.bumps = tuple(bumps)
        self.dim = 1 + len(self.bumps)
        if self.dim not in (2, 3):
            raise ValueError("generator dimension must be 2 or 3")
        self.support = [wavelet.support] + [b.support for b in self.bumps]
        self.l1 = wavelet.l1 * math.prod(b.l1 for b in self.bumps)
        self.l2 = wavelet.l2 * math.prod(b.l2 for b in self.bumps)

    def __call__(self, *coords):
        out = self.wavelet(coords[0])
        for b, c in zip(self.bumps, coords[1:]):
            out = out * b(c)
        return out

    def factors(self):
        return (self.wavelet,) + self.bumps


def eval_element_2d(gen, a, s, p, x):
    """a^{-3/4} psi(A_a^{-1} S_s^{-1} (x - p)), A_a = diag(a, sqrt(a))."""
    if a <= 0:
        raise ValueError("scale must be positive")
    p = np.asarray(p, float)
    x = np.asarray(x, float)
    d = x - p
    y1 = (d[..., 0] - s * d[..., 1]) / a
    y2 = d[..., 1] / math.sqrt(a)
    return a ** -0.75 * gen.wavelet(y1) * gen.bumps[0](y2)


# ---------------------------------------------------------------------------
# Detector moments
# ---------------------------------------------------------------------------

def partial_moments(wavelet: Wavelet1D, t):
    """(S0, S1, S2, S3) with S_j(t) = int_{(-inf,0]} psi1(x - t) x^j dx.

    ``wavelet.shift`` is applied on top of ``t``.  Computed by
    Gauss-Legendre quadrature over the shifted support pieces.
    """
    shifted_breaks = wavelet.base.breaks + wavelet.shift + t
    out = np.zeros(4)
    for i in range(len(shifted_breaks) - 1):
        lo = shifted_breaks[i]
        hi = min(shifted_breaks[i + 1], 0.0)
        if hi <= lo:
            continue
        base_c = wavelet.base.coeffs[i]
        for j in range(4):
            out[j] += _gl_integrate(
                lambda x, c=base_c, j=j: P.polyval(
                    x - wavelet.shift - t, c) * x ** j, lo, hi)
    return tuple(out)


def moment_derivative_diagnostic(wavelet, t, h=1e-4):
    """Measured d/dt S_j by central differences, with the identity targets.

    The S2/S3 identities (dS2 = 2 S1, dS3 = 3 S2) are asserted elsewhere;
    the S1 relation is only recorded here (measured slope vs S0) because
    the two candidate closed forms disagree and we take no side.
    """
    sm = np.array(partial_moments(wavelet, t - h))
    sp = np.array(partial_moments(wavelet, t + h))
    s0, s1, s2, s3 = partial_moments(wavelet, t)
    d = (sp - sm) / (2 * h)
    return {
        "dS1_measured": d[1], "S0": s0,
        "dS2_measured": d[2], "dS2_expected": 2 * s1,
        "dS3_measured": d[3], "dS3_expected": 3 * s2,
    }


def find_detector_shift(wavelet, eps_mom=None, grid_step=0.02):
    """Shift t making |S0|, |S2|, |S3| all exceed eps_mom.

    Scans a grid over support (+/- margin), then refines around the best
    grid point by golden-section on min(|S0|, |S2|, |S3|).
    """
    if eps_mom is None:
        eps_mom = 1e-3 * wavelet.l1
    lo, hi = wavelet.support
    ts = np.arange(-hi - 0.25, -lo + 0.25 + grid_step, grid_step)

    def score(t):
        s = partial_moments(wavelet, t)
        return min(abs(s[0]), abs(s[2]), abs(s[3]))

    scores = np.array([score(t) for t in ts])
    k = int(np.argmax(scores))
    a = ts[max(k - 1, 0)]
    b = ts[min(k + 1, len(ts) - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = score(c), score(d)
    for _ in range(40):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = score(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = score(d)
    best = 0.5 * (a + b)
    if score(best) < scores[k]:
        best = ts[k]
    if score(best) <= eps_mom:
        raise DetectorShiftError(
            "no shift satisfies the moment conditions above %g" % eps_mom)
    return float(best)


# ---------------------------------------------------------------------------
# Wedge integrals
# ---------------------------------------------------------------------------

def wedge_integral_pair(wavelet, bump, kappa, half=None, panels=96):
    """Integral of psi1(x1) phi1(x2) over {x1 <= kappa x2^2} (optionally the
    half with x2 >= 0 ('up') or x2 < 0 ('down'))."""
    lo, hi = (-bump.radius, bump.radius)
    if half == "up":
        lo = 0.0
    elif half == "down":
        hi = 0.0
    elif half is not None:
        raise ValueError("half must be None, 'up' or 'down'")
    f = lambda x2: bump(x2) * wavelet.antiderivative(kappa * x2 * x2)
    return _gl_integrate(f, lo, hi, panels=panels)


def wedge_integral(gen, kappa, half=None):
    """G(kappa) = integral of the 2D generator over {x1 <= kappa x2^2}."""
    return wedge_integral_pair(gen.wavelet, gen.bumps[0], kappa, half=half)


@dataclass
class WedgeIntegralTable:
    kappas: np.ndarray
    values: np.ndarray
    monotone: bool
    lower_bound: float
    half_up: np.ndarray = None
    half_down: np.ndarray = None

    @property
    def interval(self):
        return float(self.kappas[0]), float(self.kappas[-1])

    def __call__(self, kappa):
        lo, hi = self.interval
        if not lo <= kappa <= hi:
            raise WedgeRangeError("kappa=%g outside certified interval [%g, %g]"
                                  % (kappa, lo, hi))
        return float(np.interp(kappa, self.kappas, self.values))

    def invert(self, value):
        if not self.monotone:
            raise WedgeRangeError("wedge table is not strictly monotone")
        v = self.values
        increasing = v[-1] > v[0]
        vv = v if increasing else v[::-1]
        kk = self.kappas if increasing else self.kappas[::-1]
        if not vv[0] <= value <= vv[-1]:
            raise WedgeRangeError("limit %g outside table value range [%g, %g]"
                                  % (value, vv[0], vv[-1]))
        return float(np.interp(value, vv, kk))

    def invert_abs(self, magnitude):
        """Invert from |G|; valid because the values are single-signed."""
        if self.lower_bound <= 0:
            raise WedgeRangeError("wedge values are not single-signed")
        sign = 1.0 if self.values[0] > 0 else -1.0
        return self.invert(sign * abs(magnitude))


def build_wedge_table(gen_or_pair, kappa_range=(-2.0, 2.0), grid=201):
    if isinstance(gen_or_pair, SeparableGenerator):
        wav, bump = gen_or_pair.wavelet, gen_or_pair.bumps[0]
    else:
        wav, bump = gen_or_pair
    kk = np.linspace(kappa_range[0], kappa_range[1], grid)
    vals = np.array([wedge_integral_pair(wav, bump, k) for k in kk])
    up = np.array([wedge_integral_pair(wav, bump, k, "up") for k in kk])
    dn = np.array([wedge_integral_pair(wav, bump, k, "down") for k in kk])
    diffs = np.diff(vals)
    monotone = bool(np.all(diffs > 0) or np.all(diffs < 0))
    return WedgeIntegralTable(kappas=kk, values=vals, monotone=monotone,
                              lower_bound=float(np.min(np.abs(vals))),
                              half_up=up, half_down=dn)


def plate_integral(gen3d, H, split=None, panels=48):
    """Integral of the 3D generator over {x1 <= 0.5 x' H x'}, x' = (x2, x3).

    ``split`` restricts to a half-plane {split . x' >= 0} (for
    separating-curve limits).
    """
    b2, b3 = gen3d.bumps
    n = panels
    x2, h2 = np.linspace(-b2.radius, b2.radius, 2 * n, endpoint=False) \
        + b2.radius / (2 * n), b2.radius / n
    x3, h3 = np.linspace(-b3.radius, b3.radius, 2 * n, endpoint=False) \
        + b3.radius / (2 * n), b3.radius / n
    X2, X3 = np.meshgrid(x2, x3, indexing="ij")
    q = 0.5 * (H[0, 0] * X2**2 + 2 * H[0, 1] * X2 * X3 + H[1, 1] * X3**2)
    w = np.outer(b2(x2), b3(x3)) * gen3d.wavelet.antiderivative(q)
    if split is not None:
        w = w * (split[0] * X2 + split[1] * X3 >= 0)
    return float(np.sum(w) * h2 * h3)


# ---------------------------------------------------------------------------
# Fourier factors
# ---------------------------------------------------------------------------

def _piece_fourier(coeffs, lo, hi, xi):
    """int_lo^hi p(x) exp(-2 pi i xi x) dx for polynomial p, vectorized in xi."""
    xi = np.asarray(xi, float)
    out = np.zeros(xi.shape, complex)
    w = 2.0 * math.pi * xi
    small = np.abs(w) * (hi - lo) < 4.0
    if np.any(small):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        xs = mid + half * _GL_NODES
        vals = P.polyval(xs, coeffs)
        ph = np.exp(-1j * np.outer(w[small], xs))
        out[small] = half * (ph * (vals * _GL_WEIGHTS)).sum(axis=1)
    big = ~small
    if np.any(big):
        c = -1j * w[big]
        # int p e^{cx} = [e^{cx} sum_k (-1)^k p^(k)(x) / c^{k+1}]
        acc_hi = np.zeros(c.shape, complex)
        acc_lo = np.zeros(c.shape, complex)
        deriv = np.asarray(coeffs, float)
        sign = 1.0
        k = 0
        while len(deriv) > 0 and np.any(np.abs(deriv) > 0):
            ck1 = c ** (k + 1)
            acc_hi += sign * P.polyval(hi, deriv) / ck1
            acc_lo += sign * P.polyval(lo, deriv) / ck1
            deriv = P.polyder(deriv)
            sign = -sign
            k += 1
        out[big] = np.exp(c * hi) * acc_hi - np.exp(c * lo) * acc_lo
    return out


def fourier_factor(factor, xi):
    """1D Fourier transform f_hat(xi) = int f(x) exp(-2 pi i xi x) dx."""
    xi = np.asarray(xi, float)
    scalar = xi.ndim == 0
    xi = np.atleast_1d(xi)
    if isinstance(factor, Bump1D):
        out = _piece_fourier(factor.coeffs, -factor.radius, factor.radius, xi)
    elif isinstance(factor, Wavelet1D):
        pp = factor.base
        out = np.zeros(xi.shape, complex)
        for i in range(len(pp.coeffs)):
            out += _piece_fourier(pp.coeffs[i], pp.breaks[i], pp.breaks[i + 1], xi)
        out *= np.exp(-2j * math.pi * xi * factor.shift)
    else:
        raise TypeError("unsupported factor type %r" % type(factor))
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# Default generators and config I/O
# ---------------------------------------------------------------------------

def _poly_pow(c, n):
    out = np.array([1.0])
    for _ in range(n):
        out = P.polymul(out, c)
    return out


def _bump_coeffs(r, beta):
    # (x + beta x^2)(r^2 - x^2)^2
    return P.polymul([0.0, 1.0, beta], _poly_pow([r * r, 0.0, -1.0], 2))


def default_generator_2d(r=0.22, beta=1.0, shift=0.15):
    """psi1 = theta'' shifted by t = 0.15, theta = (1-x^2)^6; phi1 =
    (x + beta x^2)(r^2 - x^2)^2 with r = 0.22.

    Exactly two vanishing moments: the third moment int x^2 psi1 != 0
    powers the a^{7/4} response at transversal (non-normal) boundary
    crossings that the second-kind-corner band relies on; more moments
    would push that response to a slower-decaying order.  The shift
    places the wedge arguments kappa x2^2 - t, kappa in [-2, 2],
    |x2| <= r, inside (-0.30, 0) where theta' is strictly positive and
    theta'' strictly negative, so the wedge function G is positive,
    bounded below, and strictly monotone on the certified interval.
    phi1(0) = 0 with phi1'(0) != 0 enables the first-kind-corner lower
    bound; the beta asymmetry keeps int phi1 > 0.
    """
    theta = _poly_pow([1.0, 0.0, -1.0], 6)
    base = PiecewisePoly([-1.0, 1.0], [P.polyder(theta, 2)])
    wav = Wavelet1D(base, shift=shift, moments=2)
    bump = Bump1D(_bump_coeffs(r, beta), r)
    return SeparableGenerator(wav, [bump])


def default_generator_3d(r=0.21, beta=1.0, shift=0.16):
    """psi1 = theta''' shifted by t = 0.16, theta = (1-x^2)^7; phi1 as in
    2D with r = 0.21, used for both transverse axes.

    Three vanishing moments keep the admissibility integral (weight
    |omega1|^{-3}) finite and push the non-aligned smooth-surface decay
    to ~a^{5/2}, clear of the corner band at a^2.  The shift pins the
    wedge arguments onto (-0.28, 0) where theta'' and theta''' are both
    strictly negative, making the curvature wedge function single-signed
    and strictly monotone.
    """
    theta7 = _poly_pow([1.0, 0.0, -1.0], 7)
    base = PiecewisePoly([-1.0, 1.0], [P.polyder(theta7, 3)])
    wav = Wavelet1D(base, shift=shift, moments=3)
    bump = Bump1D(_bump_coeffs(r, beta), r)
    return SeparableGenerator(wav, [bump, bump])


class GeneratorConfigError(ValueError):
    pass


def load_generator(path_or_dict):
    """Generator config JSON.

    Either {"preset": "default2d"|"default3d", ...overrides} or explicit
    {"dimension": d, "wavelet": {"coeffs", "support", "shift", "moments"},
     "bump": {"r", "beta"} | {"coeffs", "radius"}}.
    """
    if isinstance(path_or_dict, dict):
        doc = path_or_dict
    else:
        with open(path_or_dict) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise GeneratorConfigError("malformed generator JSON: %s" % exc)
    try:
        if "preset" in doc:
            preset = doc["preset"]
            kwargs = {k: doc[k] for k in ("r", "beta", "shift") if k in doc}
            if preset == "default2d":
                return default_generator_2d(**kwargs)
            if preset == "default3d":
                return default_generator_3d(**kwargs)
            raise GeneratorConfigError("unknown preset %r" % preset)
        dim = doc["dimension"]
        w = doc["wavelet"]
        base = PiecewisePoly(w.get("breaks", w["support"]), [w["coeffs"]]
                             if "breaks" not in w else w["coeffs"])
        wav = Wavelet1D(base, shift=w.get("shift", 0.0),
                        moments=w.get("moments", 1))
        b = doc["bump"]
        if "coeffs" in b:
            bump = Bump1D(b["coeffs"], b["radius"])
        else:
            bump = Bump1D(_bump_coeffs(b["r"], b.get("beta", 1.0)), b["r"])
        return SeparableGenerator(wav, [bump] * (dim - 1))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GeneratorConfigError):
            raise
        raise GeneratorConfigError("bad generator config: %s" % exc)
