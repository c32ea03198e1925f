# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled membership/line-scan kernels; mirrors kernels.line_integrals_numpy."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF MAX_STACK = 32
DEF MAX_DIM = 3

cdef int PRIM_HALFSPACE = 1
cdef int PRIM_QUADRIC = 2
cdef int PRIM_POLYGRAPH = 3
cdef int OP_AND = 10
cdef int OP_OR = 11
cdef int OP_NOT = 12


cdef inline bint _eval_point(const int[:, ::1] ops, const double[::1] params,
                             const double* x, int d) nogil:
    cdef bint stack[MAX_STACK]
    cdef int sp = 0
    cdef int k, i, j, code, off, plen
    cdef double acc, val, row, x1, x2
    cdef int dep, ind1, ind2, n1, n2
    cdef double sign
    for k in range(ops.shape[0]):
        code = ops[k, 0]
        off = ops[k, 1]
        plen = ops[k, 2]
        if code == PRIM_HALFSPACE:
            acc = 0.0
            for i in range(d):
                acc += params[off + i] * x[i]
            stack[sp] = acc <= params[off + d]
            sp += 1
        elif code == PRIM_QUADRIC:
            acc = params[off + d * d + d]
            for i in range(d):
                acc += params[off + d * d + i] * x[i]
                for j in range(d):
                    acc += params[off + i * d + j] * x[i] * x[j]
            stack[sp] = acc <= 0.0
            sp += 1
        elif code == PRIM_POLYGRAPH:
            dep = <int>params[off]
            sign = params[off + 1]
            ind1 = <int>params[off + 2]
            n1 = <int>params[off + 3]
            ind2 = <int>params[off + 4]
            n2 = <int>params[off + 5]
            x1 = x[ind1]
            x2 = x[ind2] if ind2 >= 0 else 0.0
            val = 0.0
            for i in range(n1 - 1, -1, -1):
                row = 0.0
                for j in range(n2 - 1, -1, -1):
                    row = row * x2 + params[off + 6 + i * n2 + j]
                val = val * x1 + row
            stack[sp] = sign * (x[dep] - val) <= 0.0
            sp += 1
        elif code == OP_AND:
            stack[sp - 2] = stack[sp - 2] and stack[sp - 1]
            sp -= 1
        elif code == OP_OR:
            stack[sp - 2] = stack[sp - 2] or stack[sp - 1]
            sp -= 1
        elif code == OP_NOT:
            stack[sp - 1] = not stack[sp - 1]
    return stack[0]


cdef inline double _psi_anti(const double[::1] breaks,
                             const double[:, ::1] coeffs,
                             double total, double x) nogil:
    cdef int n = breaks.shape[0]
    cdef int nc = coeffs.shape[1]
    cdef int lo, hi, mid, i
    cdef double val
    if x <= breaks[0]:
        return 0.0
    if x >= breaks[n - 1]:
        return total
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if breaks[mid] <= x:
            lo = mid
        else:
            hi = mid
    val = 0.0
    for i in range(nc - 1, -1, -1):
        val = val * x + coeffs[lo, i]
    return val


def membership(const int[:, ::1] ops, const double[::1] params,
               const double[:, ::1] pts):
    cdef Py_ssize_t n = pts.shape[0]
    cdef int d = <int>pts.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.empty(n, np.uint8)
    cdef double x[MAX_DIM]
    cdef Py_ssize_t i
    cdef int j
    for i in range(n):
        for j in range(d):
            x[j] = pts[i, j]
        out[i] = _eval_point(ops, params, x, d)
    return out


def line_integrals(const int[:, ::1] ops, const double[::1] params,
                   const double[:, ::1] A, const double[::1] b,
                   const double[:, ::1] rest, double y1lo, double y1hi,
                   int m, const double[::1] psi_breaks,
                   const double[:, ::1] psi_coeffs, double psi_total,
                   int iters):
    cdef Py_ssize_t L = rest.shape[0]
    cdef int dm1 = <int>rest.shape[1]
    cdef int d = dm1 + 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(L, np.float64)
    cdef double dt = (y1hi - y1lo) / (m - 1)
    cdef double x[MAX_DIM]
    cdef double base[MAX_DIM]      # A[:,1:] @ rest + b  (y1-independent part)
    cdef double col1[MAX_DIM]      # first column of A
    cdef double t, lo, hi, mid, tc, acc
    cdef bint prev, cur, state_lo, mm
    cdef Py_ssize_t li
    cdef int i, j, k, it
    for j in range(d):
        col1[j] = A[j, 0]
    with nogil:
        for li in range(L):
            for j in range(d):
                base[j] = b[j]
                for k in range(dm1):
                    base[j] += A[j, k + 1] * rest[li, k]
            acc = 0.0
            t = y1lo
            for j in range(d):
                x[j] = base[j] + col1[j] * t
            prev = _eval_point(ops, params, x, d)
            for i in range(1, m):
                t = y1lo + dt * i
                for j in range(d):
                    x[j] = base[j] + col1[j] * t
                cur = _eval_point(ops, params, x, d)
                if cur != prev:
                    lo = t - dt
                    hi = t
                    state_lo = prev
                    for it in range(iters):
                        mid = 0.5 * (lo + hi)
                        for j in range(d):
                            x[j] = base[j] + col1[j] * mid
                        mm = _eval_point(ops, params, x, d)
                        if mm == state_lo:
                            lo = mid
                        else:
                            hi = mid
                    tc = 0.5 * (lo + hi)
                    if state_lo:
                        acc += _psi_anti(psi_breaks, psi_coeffs, psi_total, tc)
                    else:
                        acc -= _psi_anti(psi_breaks, psi_coeffs, psi_total, tc)
                prev = cur
            if prev:
                acc += psi_total
            out[li] = acc
    return out
