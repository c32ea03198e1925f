"""Membership programs: a tiny stack language for set indicator functions.

Every region compiles to a short RPN program over three geometric
primitives.  The same encoding is consumed by the pure-numpy interpreter
below and by the compiled kernel in ``_speedup.pyx``, so a region only has
to describe itself once.

Program encoding
----------------
``ops``    int32 array, 3 entries per token: ``(code, param_offset, param_len)``
``params`` float64 array holding all primitive parameters back to back

Primitives push a boolean onto the stack, operators combine the top
entries.  A program for a point dimension ``d`` interprets parameter
blocks as follows:

* ``PRIM_HALFSPACE``: ``n[0..d-1], b`` -- true iff ``n . x <= b``
* ``PRIM_QUADRIC``:   ``A (d*d row-major), b[0..d-1], c`` -- true iff
  ``x^T A x + b . x + c <= 0``
* ``PRIM_POLYGRAPH``: ``dep, sign, ind1, n1, ind2, n2, coeffs`` -- true iff
  ``sign * (x[dep] - sum_{i,j} coeffs[i,j] x[ind1]^i x[ind2]^j) <= 0``.
  For a univariate graph ``ind2 = -1`` and ``n2 = 1``.
* ``OP_AND``, ``OP_OR``: pop two, push combination
* ``OP_NOT``: pop one, push negation
"""

from __future__ import annotations

import numpy as np

PRIM_HALFSPACE = 1
PRIM_QUADRIC = 2
PRIM_POLYGRAPH = 3
OP_AND = 10
OP_OR = 11
OP_NOT = 12

MAX_STACK = 32


class ProgramBuilder:
    """Accumulates tokens; ``build()`` returns the packed arrays."""

    def __init__(self):
        self._ops = []
        self._params = []

    def _push(self, code, params):
        self._ops.extend((code, len(self._params), len(params)))
        self._params.extend(params)

    def halfspace(self, normal, offset):
        self._push(PRIM_HALFSPACE, list(np.asarray(normal, float)) + [float(offset)])

    def quadric(self, A, b, c):
        A = np.asarray(A, float)
        b = np.asarray(b, float)
        self._push(PRIM_QUADRIC, list(A.ravel()) + list(b) + [float(c)])

    def polygraph(self, dep_axis, sign, ind1, coeffs, ind2=-1):
        """Graph predicate ``sign * (x[dep] - poly(x[ind1][, x[ind2]])) <= 0``.

        ``coeffs`` is 1-d (univariate, power basis, ascending) or 2-d with
        ``coeffs[i, j]`` multiplying ``x[ind1]^i * x[ind2]^j``.
        """
        coeffs = np.asarray(coeffs, float)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None]
            if ind2 != -1:
                raise ValueError("univariate coefficients with ind2 set")
        n1, n2 = coeffs.shape
        head = [float(dep_axis), float(sign), float(ind1), float(n1),
                float(ind2), float(n2)]
        self._push(PRIM_POLYGRAPH, head + list(coeffs.ravel()))

    def op_and(self):
        self._push(OP_AND, [])

    def op_or(self):
        self._push(OP_OR, [])

    def op_not(self):
        self._push(OP_NOT, [])

    def build(self):
        ops = np.asarray(self._ops, np.int32).reshape(-1, 3)
        depth = 0
        for code, _, _ in ops:
            depth += {OP_AND: -1, OP_OR: -1, OP_NOT: 0}.get(int(code), 1)
            if depth < 1 or depth > MAX_STACK:
                raise ValueError("malformed membership program")
        if depth != 1:
            raise ValueError("membership program must leave one value on the stack")
        return ops, np.asarray(self._params, float)


def eval_program(ops, params, pts):
    """Evaluate a membership program on points ``pts`` of shape (n, d).

    Returns a boolean array of shape (n,).  This is the reference
    interpreter; the compiled kernel must agree with it exactly.
    """
    pts = np.asarray(pts, float)
    n, d = pts.shape
    stack = []
    for code, off, plen in ops:
        p = params[off:off + plen]
        if code == PRIM_HALFSPACE:
            stack.append(pts @ p[:d] <= p[d])
        elif code == PRIM_QUADRIC:
            A = p[:d * d].reshape(d, d)
            b = p[d * d:d * d + d]
            c = p[d * d + d]
            stack.append(np.einsum("ni,ij,nj->n", pts, A, pts) + pts @ b + c <= 0.0)
        elif code == PRIM_POLYGRAPH:
            dep, sign, ind1, n1, ind2, n2 = p[:6]
            coeffs = p[6:].reshape(int(n1), int(n2))
            x1 = pts[:, int(ind1)]
            val = np.zeros(n)
            if int(ind2) >= 0:
                x2 = pts[:, int(ind2)]
                for i in range(int(n1) - 1, -1, -1):
                    row = np.zeros(n)
                    for j in range(int(n2) - 1, -1, -1):
                        row = row * x2 + coeffs[i, j]
                    val = val * x1 + row
            else:
                for i in range(int(n1) - 1, -1, -1):
                    val = val * x1 + coeffs[i, 0]
            stack.append(sign * (pts[:, int(dep)] - val) <= 0.0)
        elif code == OP_AND:
            b2, b1 = stack.pop(), stack.pop()
            stack.append(b1 & b2)
        elif code == OP_OR:
            b2, b1 = stack.pop(), stack.pop()
            stack.append(b1 | b2)
        elif code == OP_NOT:
            stack.append(~stack.pop())
        else:
            raise ValueError("unknown opcode %d" % code)
    if len(stack) != 1:
        raise ValueError("malformed membership program")
    return stack[0]
