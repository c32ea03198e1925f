"""Adaptive quadrature of chi_region * generator over the support frame.

The main path integrates exactly along the wavelet axis between membership
crossings (see ``kernels``) and applies an adaptively refined midpoint rule
over the bump axes, doubling the outer grid until successive estimates
agree to rtol/atol.  ``midpoint_indicator_integral`` is the plain dense
midpoint rule on the full support box; it is slower and less accurate and
is kept as the independent cross-check oracle for tests and benchmarks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import kernels


class QuadratureError(RuntimeError):
    def __init__(self, msg, estimates=None):
        super().__init__(msg)
        self.estimates = estimates


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances and grid limits for coefficient quadrature.

    ``atol`` defaults to 1e-6 * |psi|_1, ``floor`` to atol/rtol; the outer
    grid starts at ``n0`` nodes per bump axis and doubles up to ``n_cap``.
    ``m0``/``m_cap`` control line sampling along the wavelet axis.
    """
    atol: Optional[float] = None
    rtol: float = 1e-4
    n0: int = 128
    n_cap: int = 4096
    m0: int = 33
    m_cap: int = 513
    floor: Optional[float] = None
    strict: bool = True

    def resolved(self, gen):
        atol = self.atol if self.atol is not None else 1e-6 * gen.l1
        floor = self.floor if self.floor is not None else atol / self.rtol
        return atol, floor


DEFAULT_2D = QuadratureSettings()
DEFAULT_3D = QuadratureSettings(n0=64, n_cap=512, m0=33, m_cap=257)


def _outer_nodes(radius, n):
    h = 2.0 * radius / n
    return -radius + h * (np.arange(n) + 0.5), h


def _evaluate(region, gen, A, b, n, m):
    ops, params = region.program()
    wav = gen.wavelet
    breaks, coeffs, total = wav.kernel_arrays()
    y1lo, y1hi = wav.support
    if gen.dim == 2:
        bump = gen.bumps[0]
        y2, h = _outer_nodes(bump.radius, n)
        inner = kernels.line_integrals(ops, params, A, b, y2[:, None],
                                       y1lo, y1hi, m, breaks, coeffs, total)
        return h * float(np.dot(bump(y2), inner))
    b2, b3 = gen.bumps
    y2, h2 = _outer_nodes(b2.radius, n)
    y3, h3 = _outer_nodes(b3.radius, n)
    Y2, Y3 = np.meshgrid(y2, y3, indexing="ij")
    rest = np.column_stack([Y2.ravel(), Y3.ravel()])
    inner = kernels.line_integrals(ops, params, A, b, rest,
                                   y1lo, y1hi, m, breaks, coeffs, total)
    w = np.outer(b2(y2), b3(y3)).ravel()
    return h2 * h3 * float(np.dot(w, inner))


def indicator_integral(region, gen, A, b, settings):
    """Adaptive integral of chi(A y + b) psi(y) over the support frame.

    Returns (value, outer_n, converged); raises QuadratureError on
    non-convergence when settings.strict.
    """
    atol, floor = settings.resolved(gen)
    n, m = settings.n0, settings.m0
    prev = _evaluate(region, gen, A, b, n, m)
    while True:
        n2 = 2 * n
        m2 = min(2 * (m - 1) + 1, settings.m_cap)
        cur = _evaluate(region, gen, A, b, n2, m2)
        tol = max(atol, settings.rtol * max(abs(cur), floor))
        if abs(cur - prev) < tol:
            if abs(cur) > gen.l1 * (1.0 + 1e-9):
                raise QuadratureError("integral exceeds |psi|_1 bound",
                                      (prev, cur))
            return cur, n2, True
        if n2 >= settings.n_cap:
            if settings.strict:
                raise QuadratureError(
                    "no convergence at outer grid %d (last estimates %g, %g)"
                    % (n2, prev, cur), (prev, cur))
            return cur, n2, False
        prev, n, m = cur, n2, m2


def midpoint_indicator_integral(region, gen, A, b, n):
    """Dense n^dim midpoint-rule oracle over the full support box."""
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    ops, params = region.program()
    wav = gen.wavelet
    axes, weights = [], []
    (lo, hi) = wav.support
    h1 = (hi - lo) / n
    y1 = lo + h1 * (np.arange(n) + 0.5)
    axes.append(y1)
    weights.append(wav(y1) * h1)
    for bump in gen.bumps:
        y, h = _outer_nodes(bump.radius, n)
        axes.append(y)
        weights.append(bump(y) * h)
    if gen.dim == 2:
        Y1, Y2 = np.meshgrid(axes[0], axes[1], indexing="ij")
        pts = np.column_stack([Y1.ravel(), Y2.ravel()]) @ A.T + b
        mem = kernels.membership(ops, params, pts).reshape(n, n)
        return float(np.einsum("i,j,ij->", weights[0], weights[1], mem))
    total = 0.0
    Y2, Y3 = np.meshgrid(axes[1], axes[2], indexing="ij")
    w23 = np.outer(weights[1], weights[2])
    for i in range(n):   # slab loop keeps memory flat
        pts = np.column_stack([np.full(n * n, axes[0][i]),
                               Y2.ravel(), Y3.ravel()]) @ A.T + b
        mem = kernels.membership(ops, params, pts).reshape(n, n)
        total += weights[0][i] * float(np.sum(w23 * mem))
    return total
