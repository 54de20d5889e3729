"""Bounded planar domains and the geometric certificates used by the bound constants.

Domains are disks, axis-aligned ellipses (semi-axes a >= b) and simple,
positively oriented polygons.  Every quantity entering the inequality
constants is computed here: diameter, area, interior sphere radius, and
the cone / local-John certificates, each validated by a sampling oracle
before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError

# Default sampling densities for certificate validation.
DEFAULT_BOUNDARY_SAMPLES = 48
DEFAULT_CONE_POINTS = 1000
DEFAULT_JOHN_RADII = 4
DEFAULT_JOHN_ARC_SAMPLES = 24
DEFAULT_JOHN_PATH_SAMPLES = 32

_REL_TOL = 1e-12


# ---------------------------------------------------------------------------
# domains


class Domain:
    """Base class: a bounded planar region with a queryable boundary."""

    kind = "abstract"

    # subclasses set these in __init__
    diameter: float
    area: float
    perimeter: float

    def contains(self, points, tol=0.0):
        """Boolean mask: point lies in the closed domain, fattened by tol."""
        raise NotImplementedError

    def boundary_distance(self, points):
        """Unsigned Euclidean distance from each point to the boundary."""
        raise NotImplementedError

    def boundary_point(self, s):
        """Point on the boundary at arc length s (vectorized)."""
        raise NotImplementedError

    def centroid(self):
        raise NotImplementedError

    def config_block(self):
        """Serialize to the plaintext harness form (kind plus parameters)."""
        raise NotImplementedError


class Disk(Domain):
    kind = "disk"

    def __init__(self, center=(0.0, 0.0), radius=1.0):
        if radius <= 0:
            raise GeometryError(f"disk radius must be positive, got {radius}")
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.diameter = 2.0 * self.radius
        self.area = math.pi * self.radius**2
        self.perimeter = 2.0 * math.pi * self.radius

    def contains(self, points, tol=0.0):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return np.hypot(p[:, 0] - self.center[0], p[:, 1] - self.center[1]) <= self.radius + tol

    def boundary_distance(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return np.abs(self.radius - np.hypot(p[:, 0] - self.center[0], p[:, 1] - self.center[1]))

    def boundary_point(self, s):
        t = np.asarray(s, dtype=float) / self.radius
        return np.stack([self.center[0] + self.radius * np.cos(t),
                         self.center[1] + self.radius * np.sin(t)], axis=-1)

    def outward_normal(self, point):
        v = np.asarray(point, dtype=float) - self.center
        n = np.linalg.norm(v)
        if n == 0:
            raise GeometryError("normal undefined at the disk center")
        return v / n

    def centroid(self):
        return self.center.copy()

    def config_block(self):
        return f"kind = disk\ncenter = {self.center[0]:.17g} {self.center[1]:.17g}\nradius = {self.radius:.17g}"


class Ellipse(Domain):
    kind = "ellipse"

    def __init__(self, center=(0.0, 0.0), a=1.0, b=1.0):
        if not (a >= b > 0):
            raise GeometryError(f"ellipse semi-axes must satisfy a >= b > 0, got a={a}, b={b}")
        self.center = np.asarray(center, dtype=float)
        self.a = float(a)
        self.b = float(b)
        self.diameter = 2.0 * self.a
        self.area = math.pi * self.a * self.b
        self._arc_table = self._build_arc_table()
        self.perimeter = float(self._arc_table[1][-1])

    def _build_arc_table(self, n=8192):
        t = np.linspace(0.0, 2.0 * math.pi, n + 1)
        dx = -self.a * np.sin(t)
        dy = self.b * np.cos(t)
        speed = np.hypot(dx, dy)
        # cumulative arc length by the trapezoid rule on a fine parameter grid
        seg = 0.5 * (speed[1:] + speed[:-1]) * np.diff(t)
        arc = np.concatenate([[0.0], np.cumsum(seg)])
        return t, arc

    def param_at_arc(self, s):
        t, arc = self._arc_table
        return np.interp(np.mod(np.asarray(s, dtype=float), arc[-1]), arc, t)

    def point_at_param(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([self.center[0] + self.a * np.cos(t),
                         self.center[1] + self.b * np.sin(t)], axis=-1)

    def contains(self, points, tol=0.0):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        u = (p[:, 0] - self.center[0]) / self.a
        v = (p[:, 1] - self.center[1]) / self.b
        # fatten the level set via the coarsest axis scaling
        return u * u + v * v <= (1.0 + tol / self.b) ** 2

    def boundary_distance(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        q = p - self.center
        # coarse scan picks the branch, Newton refines the foot point
        tgrid = np.linspace(0.0, 2.0 * math.pi, 32, endpoint=False)
        d2 = ((self.a * np.cos(tgrid)[None, :] - q[:, 0:1]) ** 2
              + (self.b * np.sin(tgrid)[None, :] - q[:, 1:2]) ** 2)
        t = tgrid[np.argmin(d2, axis=1)]
        for _ in range(24):
            ct, st = np.cos(t), np.sin(t)
            ex = self.a * ct - q[:, 0]
            ey = self.b * st - q[:, 1]
            dxt = -self.a * st
            dyt = self.b * ct
            f = ex * dxt + ey * dyt
            df = ex * (-self.a * ct) + ey * (-self.b * st) + dxt * dxt + dyt * dyt
            step = f / np.where(df == 0, 1.0, df)
            step = np.clip(step, -0.2, 0.2)
            t = t - step
            if np.max(np.abs(step)) < 1e-15:
                break
        ct, st = np.cos(t), np.sin(t)
        return np.hypot(self.a * ct - q[:, 0], self.b * st - q[:, 1])

    def boundary_point(self, s):
        return self.point_at_param(self.param_at_arc(s))

    def outward_normal(self, point):
        q = np.asarray(point, dtype=float) - self.center
        t = math.atan2(self.a * q[1], self.b * q[0])
        n = np.array([self.b * math.cos(t), self.a * math.sin(t)])
        return n / np.linalg.norm(n)

    def centroid(self):
        return self.center.copy()

    def config_block(self):
        return (f"kind = ellipse\ncenter = {self.center[0]:.17g} {self.center[1]:.17g}\n"
                f"a = {self.a:.17g}\nb = {self.b:.17g}")


class Polygon(Domain):
    kind = "polygon"

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
            raise GeometryError("polygon needs at least 3 planar vertices")
        area2 = _signed_area2(v)
        if area2 == 0.0:
            raise GeometryError("degenerate polygon with zero area")
        if area2 < 0:
            raise GeometryError("polygon must be counterclockwise (positively oriented)")
        if not _is_simple(v):
            raise GeometryError("polygon must be simple (no self-intersections)")
        self.vertices = v
        self.area = 0.5 * area2
        d = v[:, None, :] - v[None, :, :]
        self.diameter = float(np.sqrt((d * d).sum(-1).max()))
        self._edges = np.roll(v, -1, axis=0) - v
        self._edge_len = np.hypot(self._edges[:, 0], self._edges[:, 1])
        if np.any(self._edge_len == 0):
            raise GeometryError("polygon has a repeated vertex")
        self.perimeter = float(self._edge_len.sum())
        self._cum_arc = np.concatenate([[0.0], np.cumsum(self._edge_len)])

    def contains(self, points, tol=0.0):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        inside = _crossing_parity(p, self.vertices)
        if tol >= 0:
            near = self.boundary_distance(p) <= max(tol, _REL_TOL * self.diameter)
            return inside | near
        return inside

    def boundary_distance(self, points):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        a = self.vertices[None, :, :]
        e = self._edges[None, :, :]
        w = p[:, None, :] - a
        t = np.clip((w * e).sum(-1) / (self._edge_len**2)[None, :], 0.0, 1.0)
        proj = a + t[:, :, None] * e
        d = np.hypot(p[:, None, 0] - proj[:, :, 0], p[:, None, 1] - proj[:, :, 1])
        return d.min(axis=1)

    def boundary_point(self, s):
        s = np.mod(np.atleast_1d(np.asarray(s, dtype=float)), self.perimeter)
        idx = np.clip(np.searchsorted(self._cum_arc, s, side="right") - 1, 0, len(self.vertices) - 1)
        local = (s - self._cum_arc[idx]) / self._edge_len[idx]
        return self.vertices[idx] + local[:, None] * self._edges[idx]

    def edge_outward_normal(self, edge_index):
        e = self._edges[edge_index] / self._edge_len[edge_index]
        return np.array([e[1], -e[0]])  # outward for a CCW polygon

    def interior_angles(self):
        v = self.vertices
        prev = v - np.roll(v, 1, axis=0)
        nxt = np.roll(v, -1, axis=0) - v
        turn = np.arctan2(_cross(prev, nxt), (prev * nxt).sum(-1))
        return math.pi - turn

    def centroid(self):
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cr = _cross(v, w)
        c = ((v + w) * cr[:, None]).sum(axis=0) / (3.0 * cr.sum())
        return c

    def is_convex(self):
        return bool(np.all(self.interior_angles() <= math.pi + 1e-12))

    def config_block(self):
        coords = " ".join(f"{x:.17g} {y:.17g}" for x, y in self.vertices)
        return f"kind = polygon\nvertices = {coords}"


def _cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _signed_area2(v):
    w = np.roll(v, -1, axis=0)
    return float(_cross(v, w).sum())


def _is_simple(v):
    n = len(v)
    segs = [(v[i], v[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # shared endpoint with neighbors is fine
            if _segments_intersect(*segs[i], *segs[j]):
                return False
    return True


def _segments_intersect(p1, p2, q1, q2):
    d1 = _cross(q2 - q1, p1 - q1)
    d2 = _cross(q2 - q1, p2 - q1)
    d3 = _cross(p2 - p1, q1 - p1)
    d4 = _cross(p2 - p1, q2 - p1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True

    def on_seg(a, b, c):
        return (_cross(b - a, c - a) == 0 and min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    return any((on_seg(p1, p2, q1), on_seg(p1, p2, q2), on_seg(q1, q2, p1), on_seg(q1, q2, p2)))


def _crossing_parity(p, vertices):
    x, y = p[:, 0], p[:, 1]
    inside = np.zeros(len(p), dtype=bool)
    v = vertices
    n = len(v)
    for i in range(n):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % n]
        cond = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xcut = (x2 - x1) * (y - y1) / (y2 - y1) + x1
        inside ^= cond & (x < xcut)
    return inside


def unit_square():
    return Polygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


# ---------------------------------------------------------------------------
# basic measurements


def diameter_and_measure(domain: Domain) -> tuple[float, float]:
    """Diameter and area of the domain; exact for all three kinds."""
    d, area = domain.diameter, domain.area
    if area <= 0:
        raise GeometryError("degenerate domain with nonpositive area")
    if area > math.pi * (d / 2.0) ** 2 * (1.0 + _REL_TOL):
        raise GeometryError("isodiametric bound violated; inconsistent domain")
    return d, area


def interior_sphere_radius(domain: Domain, n_check: int = 64) -> float:
    """Largest uniform interior touching-ball radius (disk and ellipse only)."""
    if isinstance(domain, Disk):
        return domain.radius
    if isinstance(domain, Ellipse):
        ri = domain.b**2 / domain.a  # minimal curvature radius, at (+-a, 0)
        _check_interior_ball(domain, ri, n_check)
        return ri
    raise GeometryError("no uniform interior sphere at corners")


def _check_interior_ball(domain, ri, n_check):
    pts, normals, _ = boundary_sample(domain, n_check)
    ang = np.linspace(0.0, 2.0 * math.pi, 32, endpoint=False)
    circ = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    for x, nu in zip(pts, normals):
        center = x - ri * nu
        ball = center + (ri * (1.0 - 1e-9)) * circ
        if not domain.contains(ball, tol=1e-9 * domain.diameter).all():
            raise GeometryError(f"interior ball of radius {ri} escapes the domain at {tuple(x)}")


def boundary_sample(domain: Domain, n: int):
    """n boundary points, equispaced in arc length, with outward normals.

    Returns (points, normals, mask); normals are NaN where undefined
    (polygon vertices) and mask flags the defined ones.
    """
    if n < 3:
        raise GeometryError(f"need at least 3 boundary samples, got {n}")
    s = np.arange(n) * (domain.perimeter / n)
    pts = np.atleast_2d(domain.boundary_point(s))
    normals = np.full((n, 2), np.nan)
    defined = np.ones(n, dtype=bool)
    if isinstance(domain, (Disk, Ellipse)):
        for i in range(n):
            normals[i] = domain.outward_normal(pts[i])
    else:
        vtx_arcs = domain._cum_arc[:-1]
        for i in range(n):
            at_vertex = np.any(np.abs(vtx_arcs - s[i]) <= _REL_TOL * domain.perimeter)
            if at_vertex:
                defined[i] = False
            else:
                edge = int(np.clip(np.searchsorted(domain._cum_arc, s[i], side="right") - 1,
                                   0, len(domain.vertices) - 1))
                normals[i] = domain.edge_outward_normal(edge)
    return pts, normals, defined


# ---------------------------------------------------------------------------
# cone certificate


@dataclass(frozen=True)
class ConeCertificate:
    """Uniform interior cone certificate: half-aperture theta, height h.

    The axis rule is deterministic: inward radial for disks; for polygons,
    at a vertex the interior-angle bisector, and at an edge point the
    direction tilted off the edge (away from the nearest vertex) by half
    that vertex's interior angle, capped at the normal.  This keeps the
    certificate valid at any sampling density near sharp corners.
    """

    domain: Domain
    theta: float
    h: float

    def axis_at_arc(self, s: float) -> np.ndarray:
        d = self.domain
        if isinstance(d, Disk):
            x = d.boundary_point(np.array([s]))[0]
            return -d.outward_normal(x)
        if isinstance(d, Ellipse):
            x = d.boundary_point(np.array([s]))[0]
            return -d.outward_normal(x)
        return _polygon_cone_axis(d, s)

    def cone_points(self, x, axis, n_points: int):
        return _cone_points(x, axis, self.theta, self.h, n_points)


def _polygon_cone_axis(poly: Polygon, s: float) -> np.ndarray:
    per = poly.perimeter
    s = float(np.mod(s, per))
    cum = poly._cum_arc
    angles = poly.interior_angles()
    vtx_gap = np.abs(np.concatenate([cum[:-1], [per]]) - s)
    k = int(np.argmin(vtx_gap))
    if vtx_gap[k] <= _REL_TOL * per:  # vertex: interior bisector
        k = k % len(poly.vertices)
        e_out = poly._edges[k] / poly._edge_len[k]
        return _rotate(e_out, 0.5 * angles[k])
    edge = int(np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(poly.vertices) - 1))
    t_local = (s - cum[edge]) / poly._edge_len[edge]
    e = poly._edges[edge] / poly._edge_len[edge]
    if t_local <= 0.5:  # nearest vertex is the edge start; tilt away from it
        beta = min(angles[edge], math.pi)
        return _rotate(e, min(0.5 * beta, 0.5 * math.pi))
    beta = min(angles[(edge + 1) % len(poly.vertices)], math.pi)
    return _rotate(-e, -min(0.5 * beta, 0.5 * math.pi))


def _rotate(v, angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _cone_points(x, axis, theta, h, n_points):
    # radius-angle grid covering the spherical cone sector, rim included
    n_ang = max(5, int(round(math.sqrt(n_points * 2))) | 1)
    n_rad = max(3, n_points // n_ang)
    ang = np.linspace(-theta, theta, n_ang)
    rad = np.linspace(h / n_rad, h, n_rad)
    base = math.atan2(axis[1], axis[0])
    a = base + ang
    pts = np.stack([np.outer(rad, np.cos(a)).ravel(), np.outer(rad, np.sin(a)).ravel()], axis=1)
    return np.asarray(x, dtype=float) + pts


def validate_cone(cert: ConeCertificate, n_boundary: int = DEFAULT_BOUNDARY_SAMPLES,
                  n_cone: int = DEFAULT_CONE_POINTS):
    """Sampled containment test; returns None or the first violating point."""
    d = cert.domain
    arcs = _validation_arcs(d, n_boundary)
    tol = _REL_TOL * d.diameter
    for s in arcs:
        x = np.atleast_2d(d.boundary_point(np.array([s])))[0]
        axis = cert.axis_at_arc(s)
        pts = cert.cone_points(x, axis, n_cone)
        if not d.contains(pts, tol=tol).all():
            return x
        rr = np.hypot(pts[:, 0] - x[0], pts[:, 1] - x[1])
        interior = pts[rr > 0]
        if not (d.boundary_distance(interior) > 0).all():
            return x
    return None


def _validation_arcs(domain, n_boundary):
    if isinstance(domain, Polygon):
        # vertices always sampled, plus equispaced edge-interior points
        arcs = list(domain._cum_arc[:-1])
        per_edge = max(2, n_boundary // len(domain.vertices))
        for k, L in enumerate(domain._edge_len):
            for j in range(1, per_edge + 1):
                arcs.append(domain._cum_arc[k] + L * j / (per_edge + 1))
        return np.array(sorted(arcs))
    return np.arange(n_boundary) * (domain.perimeter / n_boundary)


def cone_parameters(domain: Domain, n_boundary: int = DEFAULT_BOUNDARY_SAMPLES,
                    n_cone: int = DEFAULT_CONE_POINTS, max_shrinks: int = 12) -> ConeCertificate:
    """Feasible (theta, h) interior cone certificate, validated by sampling."""
    if isinstance(domain, Disk):
        theta, h0 = math.pi / 4.0, domain.radius / 2.0
    elif isinstance(domain, Polygon):
        beta_min = float(np.min(domain.interior_angles()))
        theta = min(beta_min / 4.0, math.pi / 2.0)
        h0 = float(np.min(domain._edge_len)) / 4.0
    else:
        raise GeometryError("cone certificate supports disks and simple polygons")
    h = h0
    first_violation = None
    for _ in range(max_shrinks + 1):
        cert = ConeCertificate(domain, theta, h)
        bad = validate_cone(cert, n_boundary, n_cone)
        if bad is None:
            return cert
        if first_violation is None:
            first_violation = bad
        h *= 0.5
    raise GeometryError(
        f"cone validation failed after {max_shrinks} shrinks; first violation at {tuple(first_violation)}")


# ---------------------------------------------------------------------------
# local John certificate


@dataclass(frozen=True)
class JohnCertificate:
    """Local John certificate (b0, R) with straight-segment paths.

    John center of the boundary patch at x with radius r sits at depth r/2
    from x along an inward direction (radial for disks, toward the centroid
    otherwise); paths from z in the patch run straight to that center.
    """

    domain: Domain
    b0: float
    R: float

    def john_center(self, x, r: float) -> np.ndarray:
        d = self.domain
        x = np.asarray(x, dtype=float)
        if isinstance(d, Disk):
            u = -d.outward_normal(x)
        else:
            c = d.centroid()
            v = c - x
            nv = np.linalg.norm(v)
            if nv == 0:
                raise GeometryError("boundary point coincides with the centroid")
            u = v / nv
        return x + 0.5 * r * u

    def path(self, z, x_r, n: int = DEFAULT_JOHN_PATH_SAMPLES) -> np.ndarray:
        t = np.linspace(0.0, 1.0, n + 1)[:, None]
        return np.asarray(z, dtype=float)[None, :] * (1 - t) + np.asarray(x_r, dtype=float)[None, :] * t


def validate_john(cert: JohnCertificate, n_boundary: int = DEFAULT_BOUNDARY_SAMPLES,
                  n_radii: int = DEFAULT_JOHN_RADII, n_arc: int = DEFAULT_JOHN_ARC_SAMPLES,
                  n_path: int = DEFAULT_JOHN_PATH_SAMPLES):
    """Sampled test of the John properties; None or the violating (x, r, z)."""
    d = cert.domain
    b0, R = cert.b0, cert.R
    xs = np.atleast_2d(d.boundary_point(np.arange(n_boundary) * (d.perimeter / n_boundary)))
    # dense boundary pool from which patch points z are drawn
    pool = np.atleast_2d(d.boundary_point(np.arange(8 * n_boundary) * (d.perimeter / (8 * n_boundary))))
    radii = R / (2.0 ** np.arange(n_radii))
    ang = np.linspace(0.0, 2.0 * math.pi, 16, endpoint=False)
    circ = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    for x in xs:
        for r in radii:
            try:
                x_r = cert.john_center(x, r)
            except GeometryError:
                return (x, r, x)
            if np.linalg.norm(x_r - x) >= r or not d.contains(x_r[None, :]).all():
                return (x, r, x)
            ball = x_r + (r / b0) * circ
            if not (d.boundary_distance(ball) > 0).all() or not d.contains(ball).all():
                return (x, r, x)
            near = pool[np.hypot(pool[:, 0] - x[0], pool[:, 1] - x[1]) <= r]
            idx = np.linspace(0, len(near) - 1, min(n_arc, len(near))).astype(int)
            for z in near[idx]:
                if np.linalg.norm(z - x_r) > b0 * r:
                    return (x, r, z)
                p = cert.path(z, x_r, n_path)[1:]
                gain = d.boundary_distance(p)
                need = np.hypot(p[:, 0] - z[0], p[:, 1] - z[1]) / b0
                if not (gain > need).all():
                    return (x, r, z)
    return None


def john_parameters(domain: Domain, n_boundary: int = DEFAULT_BOUNDARY_SAMPLES) -> JohnCertificate:
    """Feasible (b0, R) local John certificate, validated by sampling."""
    if isinstance(domain, Disk):
        b0, R = 3.0, domain.radius
    else:
        b0 = 4.0
        R = float(domain.boundary_distance(domain.centroid()[None, :])[0])
    cert = JohnCertificate(domain, b0, R)
    bad = validate_john(cert, n_boundary)
    if bad is not None:
        x, r, z = bad
        raise GeometryError(
            f"John validation failed at x={tuple(x)}, r={r:.6g}, z={tuple(z)}")
    return cert


# ---------------------------------------------------------------------------
# serialization helpers (plaintext harness blocks)


def domain_from_params(params: dict) -> Domain:
    """Build a domain from parsed `key = value` pairs (see harness config)."""
    kind = params.get("kind")
    if kind == "disk":
        cx, cy = (float(v) for v in params.get("center", "0 0").split())
        return Disk((cx, cy), float(params["radius"]))
    if kind == "ellipse":
        cx, cy = (float(v) for v in params.get("center", "0 0").split())
        return Ellipse((cx, cy), float(params["a"]), float(params["b"]))
    if kind == "polygon":
        coords = [float(v) for v in params["vertices"].split()]
        if len(coords) % 2 != 0:
            raise GeometryError("polygon vertices need an even number of coordinates")
        verts = list(zip(coords[0::2], coords[1::2]))
        return Polygon(verts)
    raise GeometryError(f"unknown domain kind {kind!r}")
