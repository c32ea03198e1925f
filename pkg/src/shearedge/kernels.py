"""Quadrature kernels: line-scan membership integration with backend dispatch.

Every shearlet coefficient reduces (after the change of variables onto the
generator support) to

    I = sum over outer nodes  w_outer * integral over y1 of chi(A y + b) psi1(y1)

where the outer nodes run over the bump-factor supports and the inner
integral is taken along the wavelet axis.  The inner integral is computed
exactly between membership crossings using the closed-form antiderivative
of psi1: the line is sampled at ``m`` points, each sign change is refined
by bisection on the membership oracle, and the crossings are accumulated
with +/- Psi(t).

Two interchangeable implementations exist:

* ``_speedup`` -- Cython, point-at-a-time RPN evaluation in C;
* the numpy fallback below -- vectorized over lines.

The active backend is chosen at import; set ``SHEAREDGE_FORCE_PYTHON=1``
to force the fallback.  Both produce identical results up to floating
point noise; ``scripts/benchmark_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np
from numpy.polynomial import polynomial as P

from .program import eval_program

_BISECT_ITERS = 45


def _psi_antideriv(breaks, coeffs, total, x):
    """Evaluate the piecewise-polynomial antiderivative, clamped outside."""
    x = np.asarray(x, float)
    xc = np.clip(x, breaks[0], breaks[-1])
    idx = np.clip(np.searchsorted(breaks, xc, side="right") - 1,
                  0, len(coeffs) - 1)
    out = np.empty(x.shape)
    for i in range(len(coeffs)):
        m = idx == i
        if np.any(m):
            out[m] = P.polyval(xc[m], coeffs[i])
    out = np.where(x >= breaks[-1], total, out)
    return np.where(x <= breaks[0], 0.0, out)


def line_integrals_numpy(ops, params, A, b, rest, y1lo, y1hi, m,
                         psi_breaks, psi_coeffs, psi_total):
    """Inner integrals of chi(A y + b) psi1(y1) along y1 for many lines.

    ``rest`` has shape (L, d-1): the fixed outer coordinates per line.
    """
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    rest = np.asarray(rest, float)
    L, dm1 = rest.shape
    d = dm1 + 1
    t = np.linspace(y1lo, y1hi, m)
    y = np.empty((L, m, d))
    y[:, :, 0] = t[None, :]
    y[:, :, 1:] = rest[:, None, :]
    x = y.reshape(-1, d) @ A.T + b
    mem = eval_program(ops, params, x).reshape(L, m)

    inner = np.where(mem[:, -1], psi_total, 0.0)

    flip_line, flip_seg = np.nonzero(mem[:, 1:] != mem[:, :-1])
    if len(flip_line):
        lo = t[flip_seg].copy()
        hi = t[flip_seg + 1].copy()
        state_lo = mem[flip_line, flip_seg]
        rr = rest[flip_line]
        pt = np.empty((len(flip_line), d))
        pt[:, 1:] = rr
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            pt[:, 0] = mid
            mm = eval_program(ops, params, pt @ A.T + b)
            same = mm == state_lo
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        tc = 0.5 * (lo + hi)
        contrib = np.where(state_lo, 1.0, -1.0) * _psi_antideriv(
            psi_breaks, psi_coeffs, psi_total, tc)
        np.add.at(inner, flip_line, contrib)
    return inner


def membership_numpy(ops, params, pts):
    return eval_program(ops, params, pts)


if os.environ.get("SHEAREDGE_FORCE_PYTHON"):
    _speedup = None
else:
    try:
        from . import _speedup
    except ImportError:
        _speedup = None

if _speedup is not None:
    BACKEND = "compiled"

    def line_integrals(ops, params, A, b, rest, y1lo, y1hi, m,
                       psi_breaks, psi_coeffs, psi_total):
        return _speedup.line_integrals(
            np.ascontiguousarray(ops, np.int32),
            np.ascontiguousarray(params, float),
            np.ascontiguousarray(A, float),
            np.ascontiguousarray(b, float),
            np.ascontiguousarray(rest, float),
            float(y1lo), float(y1hi), int(m),
            np.ascontiguousarray(psi_breaks, float),
            np.ascontiguousarray(psi_coeffs, float),
            float(psi_total), _BISECT_ITERS)

    def membership(ops, params, pts):
        return _speedup.membership(
            np.ascontiguousarray(ops, np.int32),
            np.ascontiguousarray(params, float),
            np.ascontiguousarray(pts, float)).astype(bool)
else:
    BACKEND = "python"
    line_integrals = line_integrals_numpy
    membership = membership_numpy
