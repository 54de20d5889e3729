"""Deterministic triangular meshing of disks, ellipses and simple polygons.

Axis-aligned rectangles get a structured grid with a consistent diagonal
split (all right triangles, hence no obtuse angles and an exact discrete
maximum principle for isotropic coefficients).  Everything else is meshed
as boundary nodes on the exact boundary plus a hexagonal interior lattice,
Delaunay-triangulated and Laplacian-smoothed; Delaunay keeps the discrete
maximum principle for scalar coefficient fields.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import Delaunay, cKDTree

from .errors import MeshError
from .geometry import Disk, Domain, Ellipse, Polygon

MIN_ANGLE_DEG = 15.0
_SMOOTH_ROUNDS = 4
_GAP_FACTOR = 0.7
_MAX_POINTS = 5_000_000


class Mesh:
    """Triangle mesh with node coordinates, connectivity and boundary flags."""

    def __init__(self, nodes, triangles, boundary, h, domain: Domain | None = None,
                 domain_diameter=None, domain_area=None):
        self.nodes = np.asarray(nodes, dtype=float)
        self.triangles = np.asarray(triangles, dtype=np.int64)
        self.boundary = np.asarray(boundary, dtype=bool)
        self.h = float(h)
        self.domain = domain
        self.domain_diameter = float(domain_diameter if domain_diameter is not None
                                     else domain.diameter)
        self.domain_area = float(domain_area if domain_area is not None else domain.area)
        self._cache = {}

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def corners(self):
        """Vertex coordinates per triangle, shape (m, 3, 2)."""
        if "corners" not in self._cache:
            self._cache["corners"] = self.nodes[self.triangles]
        return self._cache["corners"]

    def areas(self):
        if "areas" not in self._cache:
            c = self.corners()
            self._cache["areas"] = 0.5 * np.abs(
                (c[:, 1, 0] - c[:, 0, 0]) * (c[:, 2, 1] - c[:, 0, 1])
                - (c[:, 1, 1] - c[:, 0, 1]) * (c[:, 2, 0] - c[:, 0, 0]))
        return self._cache["areas"]

    def area(self):
        return float(self.areas().sum())

    def centroids(self):
        if "centroids" not in self._cache:
            self._cache["centroids"] = self.corners().mean(axis=1)
        return self._cache["centroids"]

    def hat_gradients(self):
        """P1 basis gradients per triangle, shape (m, 3, 2)."""
        if "grads" not in self._cache:
            c = self.corners()
            e0 = c[:, 2] - c[:, 1]
            e1 = c[:, 0] - c[:, 2]
            e2 = c[:, 1] - c[:, 0]
            twoA = 2.0 * self.areas()
            # grad of hat_i is the rotated opposite edge / (2 area)
            g = np.stack([_rot90(e0), _rot90(e1), _rot90(e2)], axis=1)
            self._cache["grads"] = g / twoA[:, None, None]
        return self._cache["grads"]

    def edges(self):
        """Unique undirected edges as an (e, 2) index array."""
        if "edges" not in self._cache:
            t = self.triangles
            raw = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
            raw.sort(axis=1)
            self._cache["edges"] = np.unique(raw, axis=0)
        return self._cache["edges"]

    def min_angle_deg(self):
        c = self.corners()
        angs = []
        for i in range(3):
            u = c[:, (i + 1) % 3] - c[:, i]
            v = c[:, (i + 2) % 3] - c[:, i]
            cosang = (u * v).sum(-1) / (np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1))
            angs.append(np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0))))
        return float(np.min(angs))


def _rot90(e):
    return np.stack([-e[:, 1], e[:, 0]], axis=1)


# ---------------------------------------------------------------------------
# mesh generation


def mesh_domain(domain: Domain, h: float) -> Mesh:
    """Deterministic mesh with target edge length h (h well below d assumed)."""
    if not (0 < h < domain.diameter / 2.0):
        raise MeshError(f"target edge length must lie in (0, d/2), got h={h}")
    rect = _as_rectangle(domain)
    if rect is not None:
        mesh = _mesh_rectangle(domain, rect, h)
    else:
        mesh = _mesh_unstructured(domain, h)
    _validate_mesh(mesh, domain, h)
    return mesh


def _as_rectangle(domain):
    if not isinstance(domain, Polygon) or len(domain.vertices) != 4:
        return None
    v = domain.vertices
    e = np.roll(v, -1, axis=0) - v
    axis_aligned = np.all((np.abs(e[:, 0]) < 1e-15) | (np.abs(e[:, 1]) < 1e-15))
    if not axis_aligned:
        return None
    return v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max()


def _mesh_rectangle(domain, rect, h):
    x0, x1, y0, y1 = rect
    w, ht = x1 - x0, y1 - y0
    nx = max(2, int(math.ceil(w / h - 1e-12)))
    ny = max(2, int(math.ceil(ht / h - 1e-12)))
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    idx = np.arange((nx + 1) * (ny + 1)).reshape(nx + 1, ny + 1)
    tris = []
    for i in range(nx):
        for j in range(ny):
            a, b = idx[i, j], idx[i + 1, j]
            c, d = idx[i + 1, j + 1], idx[i, j + 1]
            tris.append((a, b, c))
            tris.append((a, c, d))
    boundary = ((np.abs(nodes[:, 0] - x0) < 1e-15) | (np.abs(nodes[:, 0] - x1) < 1e-15)
                | (np.abs(nodes[:, 1] - y0) < 1e-15) | (np.abs(nodes[:, 1] - y1) < 1e-15))
    return Mesh(nodes, np.array(tris), boundary, h, domain)


def _boundary_nodes(domain, h):
    if isinstance(domain, (Disk, Ellipse)):
        n = 4 * max(2, int(math.ceil(domain.perimeter / (4.0 * h))))
        s = np.arange(n) * (domain.perimeter / n)
        return np.atleast_2d(domain.boundary_point(s))
    pts = []
    v = domain.vertices
    for k in range(len(v)):
        a, b = v[k], v[(k + 1) % len(v)]
        nseg = max(1, int(math.ceil(np.linalg.norm(b - a) / h - 1e-12)))
        for j in range(nseg):
            pts.append(a + (b - a) * (j / nseg))
    return np.array(pts)


def _hex_lattice(domain, h, gap):
    xs0, ys0 = np.min(_bbox(domain), axis=0)
    xs1, ys1 = np.max(_bbox(domain), axis=0)
    dy = h * math.sqrt(3.0) / 2.0
    ny = int((ys1 - ys0) / dy) + 2
    nx = int((xs1 - xs0) / h) + 2
    if nx * ny > _MAX_POINTS:
        raise MeshError(f"mesh would need ~{nx * ny} lattice points; raise h")
    rows = []
    for k in range(ny + 1):
        y = ys0 + k * dy
        off = 0.5 * h if k % 2 else 0.0
        x = xs0 + off + np.arange(nx + 1) * h
        rows.append(np.column_stack([x, np.full_like(x, y)]))
    pts = np.concatenate(rows)
    keep = domain.contains(pts, tol=0.0)
    pts = pts[keep]
    keep = domain.boundary_distance(pts) >= gap * h
    return pts[keep]


def _bbox(domain):
    if isinstance(domain, Disk):
        c, r = domain.center, domain.radius
        return np.array([c - r, c + r])
    if isinstance(domain, Ellipse):
        c = domain.center
        return np.array([c - [domain.a, domain.b], c + [domain.a, domain.b]])
    return np.array([domain.vertices.min(axis=0), domain.vertices.max(axis=0)])


def _mesh_unstructured(domain, h):
    bnd = _boundary_nodes(domain, h)
    interior = _hex_lattice(domain, h, _GAP_FACTOR)
    nodes = np.concatenate([bnd, interior])
    n_bnd = len(bnd)
    if len(nodes) < 4:
        raise MeshError("too few mesh points; lower h")
    for _ in range(_SMOOTH_ROUNDS):
        tri = Delaunay(nodes)
        simplices = _filter_triangles(domain, nodes, tri.simplices)
        nodes = _smooth_once(domain, nodes, simplices, n_bnd, h)
    tri = Delaunay(nodes)
    simplices = _filter_triangles(domain, nodes, tri.simplices)
    nodes, simplices, boundary = _compact(nodes, simplices, n_bnd)
    simplices = _orient_ccw(nodes, simplices)
    return Mesh(nodes, simplices, boundary, h, domain)


def _filter_triangles(domain, nodes, simplices):
    cent = nodes[simplices].mean(axis=1)
    keep = domain.contains(cent, tol=0.0)
    c = nodes[simplices]
    area2 = np.abs((c[:, 1, 0] - c[:, 0, 0]) * (c[:, 2, 1] - c[:, 0, 1])
                   - (c[:, 1, 1] - c[:, 0, 1]) * (c[:, 2, 0] - c[:, 0, 0]))
    keep &= area2 > 1e-14 * np.max(area2)
    return simplices[keep]


def _smooth_once(domain, nodes, simplices, n_bnd, h):
    import scipy.sparse as sp

    n = len(nodes)
    e = np.concatenate([simplices[:, [0, 1]], simplices[:, [1, 2]], simplices[:, [2, 0]]])
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    A = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    A.data[:] = 1.0  # duplicate edges collapse to simple adjacency
    deg = np.asarray(A.sum(axis=1)).ravel()
    deg[deg == 0] = 1.0
    avg = (A @ nodes) / deg[:, None]
    new = nodes.copy()
    mov = slice(n_bnd, n)
    cand = avg[mov]
    ok = domain.contains(cand, tol=0.0)
    ok &= domain.boundary_distance(cand) >= 0.3 * _GAP_FACTOR * h
    moved = new[mov]
    moved[ok] = cand[ok]
    new[mov] = moved
    return new


def _compact(nodes, simplices, n_bnd):
    used = np.unique(simplices)
    remap = -np.ones(len(nodes), dtype=np.int64)
    remap[used] = np.arange(len(used))
    boundary = used < n_bnd
    return nodes[used], remap[simplices], boundary


def _orient_ccw(nodes, simplices):
    c = nodes[simplices]
    s = ((c[:, 1, 0] - c[:, 0, 0]) * (c[:, 2, 1] - c[:, 0, 1])
         - (c[:, 1, 1] - c[:, 0, 1]) * (c[:, 2, 0] - c[:, 0, 0]))
    flip = s < 0
    out = simplices.copy()
    out[flip] = out[flip][:, [0, 2, 1]]
    return out


def _validate_mesh(mesh, domain, h):
    if mesh.n_triangles == 0:
        raise MeshError("empty triangulation")
    ang = mesh.min_angle_deg()
    if ang < MIN_ANGLE_DEG:
        raise MeshError(f"mesh quality failure: min angle {ang:.2f} deg < {MIN_ANGLE_DEG}")
    bpts = mesh.nodes[mesh.boundary]
    if len(bpts) < 3:
        raise MeshError("mesh has fewer than 3 boundary nodes")
    if float(domain.boundary_distance(bpts).max()) > 1e-10 * domain.diameter:
        raise MeshError("boundary nodes drifted off the boundary")
    rel = abs(mesh.area() - domain.area) / domain.area
    if isinstance(domain, Polygon):
        if rel > 1e-9:
            raise MeshError(f"polygon not covered exactly: relative area error {rel:.3e}")
    else:
        # inscribed-polygon deficit is ~ perimeter * h^2 * max curvature / 12
        kappa = 1.0 / domain.radius if isinstance(domain, Disk) else domain.a / domain.b**2
        bound = max(domain.perimeter * h * h * kappa / (6.0 * domain.area), 1e-12)
        if rel > bound:
            raise MeshError(f"curved domain coverage off: relative area error {rel:.3e}")


# ---------------------------------------------------------------------------
# point location and interpolation


class TriLocator:
    """Uniform-grid point location for piecewise-linear interpolation."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        nodes, tris = mesh.nodes, mesh.triangles
        lo = nodes.min(axis=0)
        hi = nodes.max(axis=0)
        self.lo = lo
        cell = max(2.0 * mesh.h, 1e-12)
        self.cell = cell
        self.ncell = np.maximum(((hi - lo) / cell).astype(int) + 1, 1)
        c = mesh.corners()
        tmin = ((c.min(axis=1) - lo) / cell).astype(int)
        tmax = ((c.max(axis=1) - lo) / cell).astype(int)
        buckets: dict[tuple[int, int], list[int]] = {}
        for t in range(len(tris)):
            for ix in range(tmin[t, 0], tmax[t, 0] + 1):
                for iy in range(tmin[t, 1], tmax[t, 1] + 1):
                    buckets.setdefault((ix, iy), []).append(t)
        self.buckets = {k: np.array(v, dtype=np.int64) for k, v in buckets.items()}
        self.kdtree = cKDTree(nodes)
        # one incident triangle per node, for nearest-node fallback
        incident = np.zeros(mesh.n_nodes, dtype=np.int64)
        incident[tris[:, 0]] = np.arange(len(tris))
        incident[tris[:, 1]] = np.arange(len(tris))
        incident[tris[:, 2]] = np.arange(len(tris))
        self.incident = incident

    def locate(self, points):
        """Containing triangle per point (-1 if outside) and barycentric coords."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        n = len(p)
        tri_idx = np.full(n, -1, dtype=np.int64)
        bary = np.zeros((n, 3))
        cells = ((p - self.lo) / self.cell).astype(int)
        order = np.lexsort((cells[:, 1], cells[:, 0]))
        sorted_cells = cells[order]
        start = 0
        while start < n:
            stop = start
            key = (sorted_cells[start, 0], sorted_cells[start, 1])
            while stop < n and (sorted_cells[stop, 0], sorted_cells[stop, 1]) == key:
                stop += 1
            idx = order[start:stop]
            cand = self.buckets.get(key)
            if cand is not None:
                self._match(p[idx], cand, idx, tri_idx, bary)
            start = stop
        return tri_idx, bary

    def _match(self, pts, cand, idx, tri_idx, bary):
        c = self.mesh.corners()[cand]
        # barycentric coordinates of every point w.r.t. every candidate
        d = c[:, :, :]
        det = ((d[:, 1, 1] - d[:, 2, 1]) * (d[:, 0, 0] - d[:, 2, 0])
               + (d[:, 2, 0] - d[:, 1, 0]) * (d[:, 0, 1] - d[:, 2, 1]))
        px = pts[:, None, 0] - d[None, :, 2, 0]
        py = pts[:, None, 1] - d[None, :, 2, 1]
        l0 = ((d[:, 1, 1] - d[:, 2, 1])[None] * px + (d[:, 2, 0] - d[:, 1, 0])[None] * py) / det[None]
        l1 = ((d[:, 2, 1] - d[:, 0, 1])[None] * px + (d[:, 0, 0] - d[:, 2, 0])[None] * py) / det[None]
        l2 = 1.0 - l0 - l1
        minbary = np.minimum(np.minimum(l0, l1), l2)
        best = np.argmax(minbary, axis=1)
        rows = np.arange(len(pts))
        ok = minbary[rows, best] >= -1e-12
        tri_idx[idx[ok]] = cand[best[ok]]
        bary[idx[ok], 0] = l0[rows, best][ok]
        bary[idx[ok], 1] = l1[rows, best][ok]
        bary[idx[ok], 2] = l2[rows, best][ok]

    def interpolate(self, points, values):
        """PWL interpolation; points off the mesh take the nearest node value."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        values = np.asarray(values, dtype=float)
        tri_idx, bary = self.locate(p)
        out = np.empty(len(p))
        hit = tri_idx >= 0
        tv = values[self.mesh.triangles[tri_idx[hit]]]
        out[hit] = (tv * bary[hit]).sum(axis=1)
        if not hit.all():
            _, nearest = self.kdtree.query(p[~hit])
            out[~hit] = values[nearest]
        return out


# ---------------------------------------------------------------------------
# plaintext dump format


def write_mesh(mesh: Mesh, path, values=None):
    """Dump: header `nodes E elements F`, node lines `x y flag`, element
    lines `i j k`, then optional node-indexed `value` lines."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"nodes {mesh.n_nodes} elements {mesh.n_triangles}\n")
        for (x, y), flag in zip(mesh.nodes, mesh.boundary):
            f.write(f"{x:.17g} {y:.17g} {int(flag)}\n")
        for i, j, k in mesh.triangles:
            f.write(f"{i} {j} {k}\n")
        if values is not None:
            for v in values:
                f.write(f"{v:.17g}\n")


def read_mesh(path, h=None, domain_diameter=None, domain_area=None):
    """Read a mesh dump; returns (mesh, values-or-None)."""
    with open(path, encoding="utf-8") as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    head = lines[0].split()
    if len(head) != 4 or head[0] != "nodes" or head[2] != "elements":
        raise MeshError(f"bad mesh header: {lines[0]!r}")
    nn, ne = int(head[1]), int(head[3])
    nodes = np.empty((nn, 2))
    flags = np.empty(nn, dtype=bool)
    for i in range(nn):
        x, y, fl = lines[1 + i].split()
        nodes[i] = (float(x), float(y))
        flags[i] = bool(int(fl))
    tris = np.empty((ne, 3), dtype=np.int64)
    for j in range(ne):
        tris[j] = [int(v) for v in lines[1 + nn + j].split()]
    rest = lines[1 + nn + ne:]
    values = np.array([float(v) for v in rest]) if rest else None
    if domain_diameter is not None:
        diam = domain_diameter
    else:
        # the diameter is attained on the boundary for our domains
        bp = nodes[flags] if flags.any() else nodes
        d = bp[:, None, :] - bp[None, :, :]
        diam = float(np.sqrt((d * d).sum(-1).max()))
    mesh = Mesh(nodes, tris, flags, h if h is not None else 0.0,
                domain=None, domain_diameter=diam,
                domain_area=domain_area if domain_area is not None else 0.0)
    if mesh.domain_area == 0.0:
        mesh.domain_area = mesh.area()
    return mesh, values
