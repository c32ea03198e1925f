"""Analytic 2D/3D regions with exact membership oracles and labeled boundary points.

Regions are immutable; each compiles once to a membership program (see
``program.py``) which both the numpy and the compiled quadrature kernels
consume.  ``boundary_point`` returns ground truth (outer normals, point
kind, curvature data) for classifier tests.

Curvature sign convention: kappa > 0 when the region is locally convex
toward the outer normal (the unit disk has kappa = 1).  In 3D the stored
``hessian`` is the Hessian of the height of the surface over its tangent
plane, measured along the outer normal (the unit ball has -Id).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .program import ProgramBuilder, eval_program

KIND_REGULAR = "regular"
KIND_CORNER_FIRST = "corner-first"
KIND_CORNER_SECOND = "corner-second"
KIND_SEPARATING_CURVE = "separating-curve"
KIND_CORNER_3D = "corner-3d"


class OutOfConeError(ValueError):
    """Normal direction has no finite shear in this cone."""


class LocatorError(ValueError):
    """Boundary locator outside its valid parameter domain."""


@dataclass(frozen=True)
class BoundaryPoint:
    position: np.ndarray
    normals: tuple          # one per smooth piece meeting at the point
    kind: str
    curvature: Optional[float] = None          # 2D regular points
    side_curvatures: Optional[tuple] = None    # 2D corner points (kappa-, kappa+)
    hessian: Optional[np.ndarray] = None       # 3D regular points (2x2, tangent frame)
    tangent: Optional[np.ndarray] = None       # separating-curve tangent (3D)


class Region:
    """Base class; subclasses fill ``dim`` and ``_build_program``."""

    dim = None

    def __init__(self):
        self._prog = None

    def program(self):
        if self._prog is None:
            b = ProgramBuilder()
            self._build_program(b)
            self._prog = b.build()
        return self._prog

    def contains(self, x):
        pts = np.atleast_2d(np.asarray(x, float))
        ops, params = self.program()
        res = eval_program(ops, params, pts)
        return bool(res[0]) if np.asarray(x).ndim == 1 else res

    def boundary_point(self, locator) -> BoundaryPoint:
        raise LocatorError("region %s has no labeled boundary points"
                           % type(self).__name__)


def contains(region, x):
    return region.contains(x)


def boundary_point(region, locator):
    return region.boundary_point(locator)


# ---------------------------------------------------------------------------
# 2D regions
# ---------------------------------------------------------------------------

class Disk(Region):
    dim = 2

    def __init__(self, center, radius):
        super().__init__()
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.center = np.asarray(center, float)
        self.radius = float(radius)

    def _build_program(self, b):
        c, r = self.center, self.radius
        b.quadric(np.eye(2), -2.0 * c, c @ c - r * r)

    def boundary_point(self, angle):
        n = np.array([math.cos(angle), math.sin(angle)])
        return BoundaryPoint(position=self.center + self.radius * n,
                             normals=(n,), kind=KIND_REGULAR,
                             curvature=1.0 / self.radius)


class Ellipse(Region):
    """Axis lengths ``semi=(a1, a2)`` rotated by ``angle`` about ``center``."""

    dim = 2

    def __init__(self, center, semi, angle=0.0):
        super().__init__()
        self.center = np.asarray(center, float)
        self.semi = np.asarray(semi, float)
        self.angle = float(angle)
        if np.any(self.semi <= 0):
            raise ValueError("semi-axes must be positive")

    def _rot(self):
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([[c, -s], [s, c]])

    def _build_program(self, b):
        R = self._rot()
        A = R @ np.diag(1.0 / self.semi**2) @ R.T
        c = self.center
        b.quadric(A, -2.0 * A @ c, c @ A @ c - 1.0)

    def boundary_point(self, param):
        """``param`` is the parametric angle t: x = c + R.(a1 cos t, a2 sin t)."""
        t = float(param)
        R = self._rot()
        local = np.array([self.semi[0] * math.cos(t), self.semi[1] * math.sin(t)])
        pos = self.center + R @ local
        A = R @ np.diag(1.0 / self.semi**2) @ R.T
        grad = 2.0 * A @ (pos - self.center)
        n = grad / np.linalg.norm(grad)
        tan = np.array([-n[1], n[0]])
        kappa = (tan @ (2.0 * A) @ tan) / np.linalg.norm(grad)
        return BoundaryPoint(position=pos, normals=(n,), kind=KIND_REGULAR,
                             curvature=kappa)


class HalfPlane(Region):
    """{x : n . x <= offset} with unit outward normal n."""

    dim = 2

    def __init__(self, normal, offset):
        super().__init__()
        n = np.asarray(normal, float)
        self.normal = n / np.linalg.norm(n)
        self.offset = float(offset) / np.linalg.norm(n)

    def _build_program(self, b):
        b.halfspace(self.normal, self.offset)

    def boundary_point(self, param):
        """``param``: signed distance along the boundary from its closest
        point to the origin."""
        base = self.offset * self.normal
        tan = np.array([-self.normal[1], self.normal[0]])
        return BoundaryPoint(position=base + float(param) * tan,
                             normals=(self.normal,), kind=KIND_REGULAR,
                             curvature=0.0)


class ConvexPolygon(Region):
    dim = 2

    def __init__(self, vertices):
        super().__init__()
        v = np.asarray(vertices, float)
        if v.shape[0] < 3:
            raise ValueError("need at least 3 vertices")
        area2 = 0.0
        for i in range(len(v)):
            j = (i + 1) % len(v)
            area2 += v[i, 0] * v[j, 1] - v[j, 0] * v[i, 1]
        if area2 <= 0:
            raise ValueError("vertices must be counterclockwise")
        # strict convexity: every cross product of consecutive edges positive
        for i in range(len(v)):
            e1 = v[(i + 1) % len(v)] - v[i]
            e2 = v[(i + 2) % len(v)] - v[(i + 1) % len(v)]
            if e1[0] * e2[1] - e1[1] * e2[0] <= 0:
                raise ValueError("polygon is not strictly convex")
        self.vertices = v

    def _edge_normal(self, i):
        v = self.vertices
        e = v[(i + 1) % len(v)] - v[i]
        n = np.array([e[1], -e[0]])
        return n / np.linalg.norm(n)

    def _build_program(self, b):
        v = self.vertices
        for i in range(len(v)):
            n = self._edge_normal(i)
            b.halfspace(n, n @ v[i])
            if i:
                b.op_and()

    def boundary_point(self, locator):
        """int i -> vertex i (corner); ("edge", i, t) -> point on edge i."""
        v = self.vertices
        if isinstance(locator, (int, np.integer)):
            i = int(locator) % len(v)
            n_prev = self._edge_normal((i - 1) % len(v))
            n_next = self._edge_normal(i)
            return BoundaryPoint(position=v[i], normals=(n_prev, n_next),
                                 kind=KIND_CORNER_FIRST,
                                 side_curvatures=(0.0, 0.0))
        tag, i, t = locator
        if tag != "edge" or not 0.0 < t < 1.0:
            raise LocatorError("bad polygon locator %r" % (locator,))
        pos = (1 - t) * v[i] + t * v[(i + 1) % len(v)]
        return BoundaryPoint(position=pos, normals=(self._edge_normal(i),),
                             kind=KIND_REGULAR, curvature=0.0)


class GraphRegion(Region):
    """Region above a two-piece polynomial graph meeting at the origin.

    {(x1, x2) in bbox : x2 >= g(x1)} with g = g_minus on x1 <= 0 and
    g = g_plus on x1 >= 0.  Coefficients ascending, g(0) = 0 required.
    ``rho`` is the declared bound on |g'''|.
    """

    dim = 2

    def __init__(self, g_minus, g_plus, bbox=((-1.0, 1.0), (-1.0, 1.0)), rho=None):
        super().__init__()
        self.g_minus = np.asarray(g_minus, float)
        self.g_plus = np.asarray(g_plus, float)
        if self.g_minus[0] != 0.0 or self.g_plus[0] != 0.0:
            raise ValueError("graph pieces must meet at the origin")
        self.bbox = tuple((float(lo), float(hi)) for lo, hi in bbox)
        if rho is None:
            rho = max(self._third_deriv_bound(self.g_minus),
                      self._third_deriv_bound(self.g_plus))
        self.rho = float(rho)

    def _third_deriv_bound(self, coeffs):
        p3 = np.polynomial.Polynomial(coeffs).deriv(3)
        lo, hi = self.bbox[0]
        xs = np.linspace(lo, hi, 257)
        return float(np.max(np.abs(p3(xs)))) if len(coeffs) > 3 else 0.0

    def _build_program(self, b):
        # (x1 <= 0 AND x2 >= g-(x1)) OR (x1 >= 0 AND x2 >= g+(x1)), then bbox
        b.halfspace([1.0, 0.0], 0.0)
        b.polygraph(dep_axis=1, sign=-1.0, ind1=0, coeffs=self.g_minus)
        b.op_and()
        b.halfspace([-1.0, 0.0], 0.0)
        b.polygraph(dep_axis=1, sign=-1.0, ind1=0, coeffs=self.g_plus)
        b.op_and()
        b.op_or()
        (x_lo, x_hi), (y_lo, y_hi) = self.bbox
        b.halfspace([1.0, 0.0], x_hi); b.op_and()
        b.halfspace([-1.0, 0.0], -x_lo); b.op_and()
        b.halfspace([0.0, 1.0], y_hi); b.op_and()
        b.halfspace([0.0, -1.0], -y_lo); b.op_and()

    def _side_data(self, coeffs, x1):
        p = np.polynomial.Polynomial(coeffs)
        g1, g2 = p.deriv(1)(x1), p.deriv(2)(x1)
        # region above the graph: outer normal points below the tangent
        n = np.array([g1, -1.0]) / math.hypot(g1, 1.0)
        kappa = -g2 / (1.0 + g1 * g1) ** 1.5   # convex-toward-n positive
        return n, kappa

    def boundary_point(self, x1):
        x1 = float(x1)
        lo, hi = self.bbox[0]
        if not lo <= x1 <= hi:
            raise LocatorError("graph locator %g outside bbox" % x1)
        if x1 == 0.0:
            nm, km = self._side_data(self.g_minus, 0.0)
            np_, kp = self._side_data(self.g_plus, 0.0)
            if np.allclose(nm, np_, atol=1e-12):
                return BoundaryPoint(position=np.zeros(2), normals=(nm,),
                                     kind=KIND_CORNER_SECOND,
                                     side_curvatures=(km, kp))
            return BoundaryPoint(position=np.zeros(2), normals=(nm, np_),
                                 kind=KIND_CORNER_FIRST,
                                 side_curvatures=(km, kp))
        coeffs = self.g_minus if x1 < 0 else self.g_plus
        n, kappa = self._side_data(coeffs, x1)
        pos = np.array([x1, np.polynomial.Polynomial(coeffs)(x1)])
        return BoundaryPoint(position=pos, normals=(n,), kind=KIND_REGULAR,
                             curvature=kappa)


class BooleanDifference(Region):
    """Set difference a \\ b (closed a minus open interior of b)."""

    def __init__(self, a, b):
        super().__init__()
        if a.dim != b.dim:
            raise ValueError("dimension mismatch")
        self.a, self.b = a, b
        self.dim = a.dim

    def _build_program(self, b):
        self.a._build_program(b)
        self.b._build_program(b)
        b.op_not()
        b.op_and()


# ---------------------------------------------------------------------------
# 3D regions
# ---------------------------------------------------------------------------

def _implicit_surface_data(A, center, pos):
    """Normal and tangent-frame height Hessian for the quadric
    (x-c)^T A (x-c) = const at a surface point."""
    grad = 2.0 * A @ (pos - center)
    gn = np.linalg.norm(grad)
    n = grad / gn
    # orthonormal tangent basis
    t1 = np.cross(n, [0.0, 0.0, 1.0])
    if np.linalg.norm(t1) < 1e-8:
        t1 = np.cross(n, [0.0, 1.0, 0.0])
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(n, t1)
    T = np.stack([t1, t2], axis=1)           # 3x2
    hess = -(T.T @ (2.0 * A) @ T) / gn       # height along +n
    return n, T, hess


class Ball(Region):
    dim = 3

    def __init__(self, center, radius):
        super().__init__()
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.center = np.asarray(center, float)
        self.radius = float(radius)

    def _build_program(self, b):
        c, r = self.center, self.radius
        b.quadric(np.eye(3), -2.0 * c, c @ c - r * r)

    def boundary_point(self, angles):
        theta, eta = angles
        n = np.array([math.cos(theta) * math.sin(eta),
                      math.sin(theta) * math.sin(eta),
                      math.cos(eta)])
        pos = self.center + self.radius * n
        _, _, hess = _implicit_surface_data(np.eye(3), self.center, pos)
        return BoundaryPoint(position=pos, normals=(n,), kind=KIND_REGULAR,
                             hessian=hess)


class Ellipsoid(Region):
    dim = 3

    def __init__(self, center, semi):
        super().__init__()
        self.center = np.asarray(center, float)
        self.semi = np.asarray(semi, float)
        if np.any(self.semi <= 0):
            raise ValueError("semi-axes must be positive")

    def _A(self):
        return np.diag(1.0 / self.semi**2)

    def _build_program(self, b):
        A, c = self._A(), self.center
        b.quadric(A, -2.0 * A @ c, c @ A @ c - 1.0)

    def boundary_point(self, params):
        """Parametric angles (t, u): local = semi * (cos t sin u, sin t sin u, cos u)."""
        t, u = params
        local = self.semi * np.array([math.cos(t) * math.sin(u),
                                      math.sin(t) * math.sin(u),
                                      math.cos(u)])
        pos = self.center + local
        n, _, hess = _implicit_surface_data(self._A(), self.center, pos)
        return BoundaryPoint(position=pos, normals=(n,), kind=KIND_REGULAR,
                             hessian=hess)


class HalfSpace(Region):
    dim = 3

    def __init__(self, normal, offset):
        super().__init__()
        n = np.asarray(normal, float)
        self.normal = n / np.linalg.norm(n)
        self.offset = float(offset) / np.linalg.norm(n)

    def _build_program(self, b):
        b.halfspace(self.normal, self.offset)

    def boundary_point(self, point=None):
        pos = self.offset * self.normal if point is None else np.asarray(point, float)
        return BoundaryPoint(position=pos, normals=(self.normal,),
                             kind=KIND_REGULAR, hessian=np.zeros((2, 2)))


class Pyramid(Region):
    """Convex hull of an apex and a planar convex base polygon.

    ``base`` vertices must be coplanar and ordered so consecutive cross
    products point away from the apex side (checked at construction).
    """

    dim = 3

    def __init__(self, apex, base):
        super().__init__()
        self.apex = np.asarray(apex, float)
        self.base = np.asarray(base, float)
        if self.base.shape[0] < 3:
            raise ValueError("base needs at least 3 vertices")
        self._faces = self._compute_faces()

    def _compute_faces(self):
        interior = (self.apex + self.base.mean(axis=0)) / 2.0
        faces = []
        v = self.base
        # base plane
        nb = np.cross(v[1] - v[0], v[2] - v[0])
        nb /= np.linalg.norm(nb)
        if nb @ (interior - v[0]) > 0:
            nb = -nb
        faces.append((nb, nb @ v[0]))
        # side planes through the apex
        for i in range(len(v)):
            p, q = v[i], v[(i + 1) % len(v)]
            n = np.cross(q - p, self.apex - p)
            nn = np.linalg.norm(n)
            if nn < 1e-12:
                raise ValueError("degenerate pyramid face")
            n /= nn
            if n @ (interior - p) > 0:
                n = -n
            faces.append((n, n @ p))
        for n, off in faces:
            if n @ interior >= off:
                raise ValueError("pyramid faces do not enclose the interior")
        return faces

    def _build_program(self, b):
        for i, (n, off) in enumerate(self._faces):
            b.halfspace(n, off)
            if i:
                b.op_and()

    def boundary_point(self, locator):
        if locator != "apex":
            raise LocatorError("only the 'apex' locator is labeled")
        normals = tuple(n for n, _ in self._faces[1:])
        return BoundaryPoint(position=self.apex, normals=normals,
                             kind=KIND_CORNER_3D)


class CutBall(Region):
    """Ball intersected with a half-space, producing a separating circle."""

    dim = 3

    def __init__(self, center, radius, plane_normal, plane_offset):
        super().__init__()
        self.ball = Ball(center, radius)
        self.halfspace = HalfSpace(plane_normal, plane_offset)
        c_dist = self.halfspace.offset - self.halfspace.normal @ self.ball.center
        if not -radius < c_dist < radius:
            raise ValueError("plane does not cut the ball")
        self._c_dist = c_dist

    def _build_program(self, b):
        self.ball._build_program(b)
        self.halfspace._build_program(b)
        b.op_and()

    def boundary_point(self, angle):
        """Point on the separating circle at the given polar angle."""
        nh = self.halfspace.normal
        t1 = np.cross(nh, [0.0, 0.0, 1.0])
        if np.linalg.norm(t1) < 1e-8:
            t1 = np.cross(nh, [0.0, 1.0, 0.0])
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(nh, t1)
        rc = math.sqrt(self.ball.radius**2 - self._c_dist**2)
        circle_center = self.ball.center + self._c_dist * nh
        pos = circle_center + rc * (math.cos(angle) * t1 + math.sin(angle) * t2)
        n_sphere = (pos - self.ball.center) / self.ball.radius
        tangent = -math.sin(angle) * t1 + math.cos(angle) * t2
        return BoundaryPoint(position=pos, normals=(n_sphere, nh),
                             kind=KIND_SEPARATING_CURVE, tangent=tangent)


class GraphRegion3D(Region):
    """{x : x1 <= h(x2, x3)} inside a bounding box; h a bivariate polynomial.

    ``coeffs[i, j]`` multiplies x2^i x3^j.
    """

    dim = 3

    def __init__(self, coeffs, bbox=((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))):
        super().__init__()
        self.coeffs = np.atleast_2d(np.asarray(coeffs, float))
        self.bbox = tuple((float(lo), float(hi)) for lo, hi in bbox)

    def height(self, x2, x3):
        return np.polynomial.polynomial.polyval2d(x2, x3, self.coeffs)

    def _build_program(self, b):
        b.polygraph(dep_axis=0, sign=1.0, ind1=1, ind2=2, coeffs=self.coeffs)
        for axis in range(3):
            lo, hi = self.bbox[axis]
            e = np.zeros(3)
            e[axis] = 1.0
            b.halfspace(e, hi); b.op_and()
            b.halfspace(-e, -lo); b.op_and()

    def boundary_point(self, yz):
        x2, x3 = float(yz[0]), float(yz[1])
        c = self.coeffs
        h = self.height(x2, x3)
        hx = np.polynomial.polynomial.polyval2d(
            x2, x3, np.polynomial.polynomial.polyder(c, axis=0))
        hy = np.polynomial.polynomial.polyval2d(
            x2, x3, np.polynomial.polynomial.polyder(c, axis=1))
        grad = np.array([1.0, -hx, -hy])      # gradient of x1 - h(x2,x3)
        n = grad / np.linalg.norm(grad)
        pos = np.array([h, x2, x3])
        if x2 == 0.0 and x3 == 0.0 and abs(hx) < 1e-14 and abs(hy) < 1e-14:
            hxx = np.polynomial.polynomial.polyval2d(
                x2, x3, np.polynomial.polynomial.polyder(c, 2, axis=0))
            hyy = np.polynomial.polynomial.polyval2d(
                x2, x3, np.polynomial.polynomial.polyder(c, 2, axis=1))
            hxy = np.polynomial.polynomial.polyval2d(
                x2, x3, np.polynomial.polynomial.polyder(
                    np.polynomial.polynomial.polyder(c, axis=0), axis=1))
            hess = np.array([[hxx, hxy], [hxy, hyy]])
        else:
            hess = None
        return BoundaryPoint(position=pos, normals=(n,), kind=KIND_REGULAR,
                             hessian=hess)


# ---------------------------------------------------------------------------
# Shear <-> normal correspondence
# ---------------------------------------------------------------------------

def shear_to_normal(s):
    """2D: scalar s -> unit normal with positive first component.
    3D: pair (s1, s2) -> unit normal.  Inverse of normal_to_shear."""
    if np.isscalar(s):
        n = np.array([1.0, -s])
        return n / np.linalg.norm(n)
    s1, s2 = s
    n = np.array([1.0, -s1, -s2])
    return n / np.linalg.norm(n)


def normal_to_shear(n):
    """Shear aligned with boundary normal n (first cone / pyramid).

    The transform's element at shear s oscillates across lines with
    tangent (s, 1) (2D) or tangent span {(s1, 1, 0), (s2, 0, 1)} (3D),
    i.e. normal proportional to (1, -s) resp. (1, -s1, -s2).
    """
    n = np.asarray(n, float)
    if abs(n[0]) < 1e-12:
        raise OutOfConeError("normal %s lies outside the horizontal cone" % n)
    if n.shape == (2,):
        return -n[1] / n[0]
    return np.array([-n[1] / n[0], -n[2] / n[0]])


# ---------------------------------------------------------------------------
# Scene files
# ---------------------------------------------------------------------------

_VARIANTS = {
    "disk": lambda d: Disk(d["center"], d["radius"]),
    "ellipse": lambda d: Ellipse(d["center"], d["semi"], d.get("angle", 0.0)),
    "half_plane": lambda d: HalfPlane(d["normal"], d["offset"]),
    "polygon": lambda d: ConvexPolygon(d["vertices"]),
    "graph": lambda d: GraphRegion(d["g_minus"], d["g_plus"],
                                   d.get("bbox", ((-1, 1), (-1, 1))),
                                   d.get("rho")),
    "ball": lambda d: Ball(d["center"], d["radius"]),
    "ellipsoid": lambda d: Ellipsoid(d["center"], d["semi"]),
    "half_space": lambda d: HalfSpace(d["normal"], d["offset"]),
    "pyramid": lambda d: Pyramid(d["apex"], d["base"]),
    "cut_ball": lambda d: CutBall(d["center"], d["radius"],
                                  d["plane_normal"], d["plane_offset"]),
    "graph3d": lambda d: GraphRegion3D(d["coeffs"],
                                       d.get("bbox", ((-1, 1), (-1, 1), (-1, 1)))),
}


class SceneError(ValueError):
    pass


def region_from_dict(d):
    kind = d.get("type")
    if kind == "difference":
        return BooleanDifference(region_from_dict(d["a"]), region_from_dict(d["b"]))
    if kind not in _VARIANTS:
        raise SceneError("unknown region variant %r" % kind)
    try:
        return _VARIANTS[kind](d)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SceneError):
            raise
        raise SceneError("bad parameters for region %r: %s" % (kind, exc))


def load_scene(path):
    """Scene file: {"regions": {name: {"type": ..., ...}, ...}}."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneError("malformed scene JSON: %s" % exc)
    if not isinstance(doc, dict) or "regions" not in doc:
        raise SceneError("scene file must contain a 'regions' object")
    return {name: region_from_dict(spec) for name, spec in doc["regions"].items()}
