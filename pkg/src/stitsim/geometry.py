"""Convex polytope kernel for dimensions 2 and 3.

Polygons are stored as counterclockwise vertex tuples.  Polyhedra carry an
explicit face list (outward-oriented vertex-index cycles) that is updated
incrementally on every cut, so clipping never recomputes a convex hull.

Predicates use an absolute tolerance ``eps``; callers that simulate inside a
window pass ``REL_EPS * diameter(window)``.  A vertex within ``eps`` of a cut
plane is treated as lying on it and is shared by both pieces.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

REL_EPS = 1e-9
REL_EPS_VOL = 1e-12

_TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Malformed polytope or invalid geometric argument."""


class NoSplitError(GeometryError):
    """The hyperplane does not cut the interior of the polytope."""


# ---------------------------------------------------------------------------
# small vector helpers (tuples are faster than tiny numpy arrays here)

def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def _norm(a):
    return math.hypot(*a)


def unit_vector(v: Sequence[float]) -> tuple:
    """Normalize ``v`` to a unit direction; raises on the zero vector."""
    v = tuple(float(x) for x in v)
    if len(v) not in (2, 3):
        raise GeometryError(f"directions must have 2 or 3 components, got {len(v)}")
    n = _norm(v)
    if not n > 0.0 or not math.isfinite(n):
        raise GeometryError("cannot normalize a zero or non-finite vector")
    return tuple(x / n for x in v)


def plane_basis(normal):
    """Orthonormal basis of the hyperplane orthogonal to ``normal``.

    In 3D the returned pair (e1, e2) satisfies e1 x e2 = normal.
    """
    if len(normal) == 2:
        return ((-normal[1], normal[0]),)
    nx, ny, nz = normal
    if abs(nx) < 0.9:
        a = (1.0, 0.0, 0.0)
    else:
        a = (0.0, 1.0, 0.0)
    e1 = _cross(a, normal)
    m = _norm(e1)
    e1 = (e1[0] / m, e1[1] / m, e1[2] / m)
    e2 = _cross(normal, e1)
    return (e1, e2)


# ---------------------------------------------------------------------------
# hyperplanes

@dataclass(frozen=True)
class Hyperplane:
    """The set ``{x : <x, normal> = offset}`` in canonical form.

    Canonical means ``offset > 0``, or ``offset == 0`` with a lexicographically
    positive normal.  Use :meth:`make` to canonicalize arbitrary input.
    """

    normal: tuple
    offset: float

    def __post_init__(self):
        if abs(_norm(self.normal) - 1.0) > 1e-12:
            raise GeometryError("hyperplane normal must be a unit vector")
        if self.offset < 0.0 or (self.offset == 0.0 and not _lex_positive(self.normal)):
            raise GeometryError("hyperplane is not in canonical form; use Hyperplane.make")

    @classmethod
    def make(cls, normal, offset) -> "Hyperplane":
        n = unit_vector(normal)
        scale = _norm(tuple(float(x) for x in normal))
        r = float(offset) / scale
        if r < 0.0 or (r == 0.0 and not _lex_positive(n)):
            n = tuple(-x for x in n)
            r = -r
        return cls(tuple(x + 0.0 for x in n), r + 0.0)

    @classmethod
    def from_unit(cls, u, r) -> "Hyperplane":
        """Canonical hyperplane from an already normalized direction (no re-check)."""
        if r < 0.0 or (r == 0.0 and not _lex_positive(u)):
            u = tuple(-x + 0.0 for x in u)
            r = -r
        self = object.__new__(cls)
        object.__setattr__(self, "normal", u)
        object.__setattr__(self, "offset", r + 0.0)
        return self

    @property
    def dim(self) -> int:
        return len(self.normal)

    def signed_distance(self, x) -> float:
        return _dot(x, self.normal) - self.offset

    def scaled(self, m: float) -> "Hyperplane":
        return Hyperplane(self.normal, self.offset * m)

    def to_json(self) -> dict:
        return {"u": list(self.normal), "r": self.offset}

    @classmethod
    def from_json(cls, obj) -> "Hyperplane":
        u = tuple(float(x) for x in obj["u"])
        if abs(_norm(u) - 1.0) <= 1e-12:
            # keep stored normals bit for bit
            return cls.from_unit(u, float(obj["r"]))
        return cls.make(u, obj["r"])


def _lex_positive(v):
    for x in v:
        if x > 0.0:
            return True
        if x < 0.0:
            return False
    return False


# ---------------------------------------------------------------------------
# polytopes

@dataclass(frozen=True, eq=False)
class ConvexPolytope:
    """A bounded full-dimensional convex polytope in the plane or in space.

    Attributes
    ----------
    vertices : tuple of tuple of float
        2D: counterclockwise boundary cycle.  3D: vertex coordinates.
    faces : tuple of tuple of int, optional
        3D only: outward-oriented vertex-index cycles.
    id : int, optional
        Opaque identifier assigned by the simulators.
    """

    vertices: tuple
    faces: Optional[tuple] = None
    id: Optional[int] = None
    degenerate: bool = False

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @property
    def volume(self) -> float:
        if self.dim == 2:
            return _polygon_area(self.vertices)
        return _polyhedron_volume(self.vertices, self.faces)

    @property
    def bbox(self):
        arr = np.asarray(self.vertices)
        return arr.min(axis=0), arr.max(axis=0)

    @property
    def diameter(self) -> float:
        return diameter(self.vertices)

    def scale_hint(self) -> float:
        lo, hi = self.bbox
        return float(np.linalg.norm(hi - lo))

    def edges(self):
        """Vertex-index pairs of all edges, each listed once."""
        if self.dim == 2:
            n = len(self.vertices)
            return [(i, (i + 1) % n) for i in range(n)]
        seen = {}
        for f in self.faces:
            k = len(f)
            for i in range(k):
                a, b = f[i], f[(i + 1) % k]
                key = (a, b) if a < b else (b, a)
                seen.setdefault(key, None)
        return list(seen)

    def halfspaces(self):
        """Facet halfspaces as (outward unit normal, offset) pairs."""
        if self.dim == 2:
            return _polygon_halfspaces(self.vertices)
        out = []
        for f in self.faces:
            pts = [self.vertices[i] for i in f]
            n = _newell(pts)
            m = _norm(n)
            n = (n[0] / m, n[1] / m, n[2] / m)
            out.append((n, _dot(n, pts[0])))
        return out

    def translated(self, shift) -> "ConvexPolytope":
        verts = tuple(tuple(x + s for x, s in zip(v, shift)) for v in self.vertices)
        return ConvexPolytope(verts, self.faces, self.id, self.degenerate)

    def scaled(self, m: float) -> "ConvexPolytope":
        verts = tuple(tuple(x * m for x in v) for v in self.vertices)
        return ConvexPolytope(verts, self.faces, self.id, self.degenerate)

    def with_id(self, ident) -> "ConvexPolytope":
        return ConvexPolytope(self.vertices, self.faces, ident, self.degenerate)

    def contains(self, x, eps: float = 0.0) -> bool:
        return all(_dot(n, x) - h <= eps for n, h in self.halfspaces())

    def check(self, eps: Optional[float] = None) -> None:
        """Raise :class:`GeometryError` unless the polytope is structurally valid."""
        check_polytope(self, eps)

    def to_json(self) -> dict:
        out = {"dim": self.dim, "vertices": [list(v) for v in self.vertices]}
        if self.dim == 3:
            out["faces"] = [list(f) for f in self.faces]
        return out

    @classmethod
    def from_json(cls, obj) -> "ConvexPolytope":
        verts = tuple(tuple(float(x) for x in v) for v in obj["vertices"])
        if obj["dim"] == 3:
            faces = tuple(tuple(int(i) for i in f) for f in obj["faces"])
            poly = cls(verts, faces)
        else:
            poly = cls(verts)
        poly.check()
        return poly

    def __repr__(self):
        return (f"ConvexPolytope(dim={self.dim}, n_vertices={len(self.vertices)}, "
                f"volume={self.volume:.6g}, id={self.id})")


def box(lo, hi, ident=None) -> ConvexPolytope:
    """Axis-aligned box with corners ``lo`` and ``hi``."""
    lo = tuple(float(x) for x in lo)
    hi = tuple(float(x) for x in hi)
    if len(lo) != len(hi) or len(lo) not in (2, 3):
        raise GeometryError("box corners must both have 2 or 3 coordinates")
    if any(h <= l for l, h in zip(lo, hi)):
        raise GeometryError("box must have positive extent in every coordinate")
    if len(lo) == 2:
        (x0, y0), (x1, y1) = lo, hi
        return ConvexPolytope(((x0, y0), (x1, y0), (x1, y1), (x0, y1)), id=ident)
    (x0, y0, z0), (x1, y1, z1) = lo, hi
    verts = ((x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0),
             (x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1))
    faces = ((0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4),
             (2, 3, 7, 6), (1, 2, 6, 5), (0, 4, 7, 3))
    return ConvexPolytope(verts, faces, ident)


def polygon(points, ident=None) -> ConvexPolytope:
    """Convex polygon from its vertices in boundary order (either orientation)."""
    pts = tuple(tuple(float(x) for x in p) for p in points)
    if _signed_area(pts) < 0:
        pts = pts[::-1]
    poly = ConvexPolytope(pts, id=ident)
    poly.check()
    return poly


def convex_hull(points, ident=None) -> ConvexPolytope:
    """Convex hull of a point cloud via qhull, with coplanar facets merged."""
    from scipy.spatial import ConvexHull

    pts = np.asarray(points, dtype=float)
    hull = ConvexHull(pts)
    if pts.shape[1] == 2:
        return ConvexPolytope(tuple(tuple(map(float, pts[i])) for i in hull.vertices), id=ident)
    used = sorted(set(hull.vertices.tolist()))
    remap = {old: new for new, old in enumerate(used)}
    verts = tuple(tuple(map(float, pts[i])) for i in used)
    groups = {}
    scale = float(np.ptp(pts, axis=0).max())
    for simplex, eq in zip(hull.simplices, hull.equations):
        key = None
        for k, (eq0, _) in groups.items():
            if np.allclose(eq[:3], eq0[:3], atol=1e-9) and abs(eq[3] - eq0[3]) <= 1e-9 * scale:
                key = k
                break
        if key is None:
            key = len(groups)
            groups[key] = (eq, set())
        groups[key][1].update(int(i) for i in simplex)
    faces = []
    for eq, idx in groups.values():
        n = tuple(float(x) for x in eq[:3])
        faces.append(tuple(remap[i] for i in _order_on_plane([pts[i] for i in idx], list(idx), n)))
    poly = ConvexPolytope(verts, tuple(faces), ident)
    poly.check()
    return poly


def _order_on_plane(points, labels, normal):
    """Sort coplanar points counterclockwise about ``normal``."""
    e1, e2 = plane_basis(tuple(normal))
    c = np.mean(np.asarray(points, dtype=float), axis=0)
    ang = [math.atan2(_dot(_sub(p, c), e2), _dot(_sub(p, c), e1)) for p in points]
    order = sorted(range(len(points)), key=ang.__getitem__)
    return [labels[i] for i in order]


@dataclass(frozen=True, eq=False)
class EmbeddedFacet:
    """A (d-1)-dimensional convex polytope lying in ``carrier``.

    ``vertices`` are ambient coordinates: the two endpoints of a segment in
    the plane, or a boundary cycle of a polygon in space.
    """

    carrier: Hyperplane
    vertices: tuple

    @property
    def dim(self) -> int:
        return len(self.vertices[0]) - 1

    @property
    def local_vertices(self):
        basis = plane_basis(self.carrier.normal)
        return tuple(tuple(_dot(v, e) for e in basis) for v in self.vertices)

    @property
    def measure(self) -> float:
        """Length (planar case) or area (spatial case)."""
        if len(self.vertices[0]) == 2:
            return math.dist(self.vertices[0], self.vertices[1])
        return 0.5 * _norm(_newell(self.vertices))

    def scaled(self, m: float) -> "EmbeddedFacet":
        return EmbeddedFacet(self.carrier.scaled(m),
                             tuple(tuple(x * m for x in v) for v in self.vertices))


# ---------------------------------------------------------------------------
# measures

def _signed_area(pts):
    x0, y0 = pts[0]
    s = 0.0
    for i in range(1, len(pts) - 1):
        x1, y1 = pts[i]
        x2, y2 = pts[i + 1]
        s += (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    return 0.5 * s


def _polygon_area(pts):
    return abs(_signed_area(pts))


def _perimeter(pts):
    n = len(pts)
    return sum(math.dist(pts[i], pts[(i + 1) % n]) for i in range(n))


def _newell(pts):
    nx = ny = nz = 0.0
    k = len(pts)
    for i in range(k):
        x1, y1, z1 = pts[i]
        x2, y2, z2 = pts[(i + 1) % k]
        nx += (y1 - y2) * (z1 + z2)
        ny += (z1 - z2) * (x1 + x2)
        nz += (x1 - x2) * (y1 + y2)
    return (nx, ny, nz)


def _polyhedron_volume(verts, faces):
    # divergence theorem with Newell face normals
    vol = 0.0
    for f in faces:
        pts = [verts[i] for i in f]
        nx, ny, nz = _newell(pts)
        x, y, z = pts[0]
        vol += nx * x + ny * y + nz * z
    return vol / 6.0


def _polygon_halfspaces(pts):
    out = []
    n = len(pts)
    for i in range(n):
        (x1, y1), (x2, y2) = pts[i], pts[(i + 1) % n]
        nx, ny = y2 - y1, x1 - x2
        m = math.hypot(nx, ny)
        nx, ny = nx / m, ny / m
        out.append(((nx, ny), nx * x1 + ny * y1))
    return out


def diameter(vertices) -> float:
    pts = np.asarray(vertices, dtype=float)
    if len(pts) > 24:
        from scipy.spatial.distance import pdist
        return float(pdist(pts).max())
    best = 0.0
    for i in range(len(vertices)):
        vi = vertices[i]
        for j in range(i + 1, len(vertices)):
            d = math.dist(vi, vertices[j])
            if d > best:
                best = d
    return best


def support_interval(c, u) -> tuple:
    """Range of ``<x, u>`` over the polytope: ``(hmin, hmax)``."""
    verts = c.vertices if hasattr(c, "vertices") else c
    vals = [_dot(v, u) for v in verts]
    return min(vals), max(vals)


def width(c, u) -> float:
    lo, hi = support_interval(c, u)
    return hi - lo


def mean_width(c) -> float:
    """Mean width of a full-dimensional polytope."""
    if c.dim == 2:
        return _perimeter(c.vertices) / math.pi
    return 0.5 * _v1_polyhedron(c.vertices, c.faces)


def _v1_polyhedron(verts, faces):
    normals = []
    owner = {}
    for fi, f in enumerate(faces):
        nx, ny, nz = _newell([verts[i] for i in f])
        m = math.sqrt(nx * nx + ny * ny + nz * nz)
        normals.append((nx / m, ny / m, nz / m))
        k = len(f)
        for i in range(k):
            owner[(f[i], f[(i + 1) % k])] = fi
    total = 0.0
    for (a, b), fi in owner.items():
        if a > b:
            continue
        fj = owner.get((b, a))
        if fj is None:
            raise GeometryError("face lattice is not a closed 2-manifold")
        n1, n2 = normals[fi], normals[fj]
        c = n1[0] * n2[0] + n1[1] * n2[1] + n1[2] * n2[2]
        c = 1.0 if c > 1.0 else (-1.0 if c < -1.0 else c)
        total += math.dist(verts[a], verts[b]) * math.acos(c)
    return total / _TWO_PI


def intrinsic_volumes(c) -> tuple:
    """Intrinsic volumes ``(V_0, ..., V_d)`` with ``d`` the ambient dimension.

    Accepts a :class:`ConvexPolytope`, an :class:`EmbeddedFacet`, or a raw
    vertex tuple (a point, a segment's two endpoints, or a polygon cycle in
    space).  Lower-dimensional objects are evaluated on their affine hull, so
    entries above their own dimension are zero.
    """
    if isinstance(c, ConvexPolytope):
        if c.dim == 2:
            area = _polygon_area(c.vertices)
            if area <= 0.0:
                return _flat_intrinsic_volumes(c.vertices, 2)
            return (1.0, 0.5 * _perimeter(c.vertices), area)
        vol = _polyhedron_volume(c.vertices, c.faces)
        if vol <= 0.0:
            return _flat_intrinsic_volumes(c.vertices, 3)
        surface = sum(0.5 * _norm(_newell([c.vertices[i] for i in f])) for f in c.faces)
        return (1.0, _v1_polyhedron(c.vertices, c.faces), 0.5 * surface, vol)
    verts = c.vertices if isinstance(c, EmbeddedFacet) else tuple(c)
    return _flat_intrinsic_volumes(verts, len(verts[0]))


def _flat_intrinsic_volumes(verts, d):
    out = [0.0] * (d + 1)
    out[0] = 1.0
    pts = np.asarray(verts, dtype=float)
    centred = pts - pts.mean(axis=0)
    sv = np.linalg.svd(centred, compute_uv=False) if len(pts) > 1 else np.zeros(1)
    tol = 1e-12 * max(1.0, float(np.abs(pts).max()))
    rank = int(np.sum(sv > tol))
    if rank == 0:
        return tuple(out)
    if rank == 1:
        proj = centred @ np.linalg.svd(centred)[2][0]
        out[1] = float(proj.max() - proj.min())
        return tuple(out)
    # planar polygon in space (or a flat polygon in the plane)
    if d == 3:
        vt = np.linalg.svd(centred)[2]
        flat = centred @ vt[:2].T
    else:
        flat = centred
    from scipy.spatial import ConvexHull

    hull = ConvexHull(flat)
    ring = [tuple(flat[i]) for i in hull.vertices]
    out[1] = 0.5 * _perimeter(ring)
    out[2] = _polygon_area(ring)
    return tuple(out)


# ---------------------------------------------------------------------------
# validation

def check_polytope(c: ConvexPolytope, eps: Optional[float] = None) -> None:
    if not c.vertices:
        raise GeometryError("polytope has no vertices")
    d = len(c.vertices[0])
    if d not in (2, 3) or any(len(v) != d for v in c.vertices):
        raise GeometryError("vertices must all have 2 or all have 3 coordinates")
    if not all(math.isfinite(x) for v in c.vertices for x in v):
        raise GeometryError("non-finite vertex coordinate")
    if eps is None:
        eps = REL_EPS * max(c.scale_hint(), 1e-300)
    if d == 2:
        if c.faces is not None:
            raise GeometryError("polygons do not carry a face list")
        if len(c.vertices) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        if _signed_area(c.vertices) <= 0 and not c.degenerate:
            raise GeometryError("polygon vertices must be counterclockwise with positive area")
    else:
        if not c.faces:
            raise GeometryError("polyhedron needs a face list")
        counts = {}
        for f in c.faces:
            if len(f) < 3:
                raise GeometryError("face with fewer than 3 vertices")
            for i in range(len(f)):
                a, b = f[i], f[(i + 1) % len(f)]
                if not (0 <= a < len(c.vertices)):
                    raise GeometryError("face index out of range")
                counts[(a, b)] = counts.get((a, b), 0) + 1
        for (a, b), n in counts.items():
            if n != 1 or counts.get((b, a)) != 1:
                raise GeometryError("faces are not consistently oriented")
        if _polyhedron_volume(c.vertices, c.faces) <= 0 and not c.degenerate:
            raise GeometryError("polyhedron must have positive volume with outward faces")
    for n, h in c.halfspaces():
        for v in c.vertices:
            if _dot(n, v) - h > eps:
                raise GeometryError("polytope is not convex within tolerance")


# ---------------------------------------------------------------------------
# clipping

def _split_polygon(verts, normal, offset, eps):
    """One pass over a CCW polygon; returns (below, above, on-plane points)."""
    nx, ny = normal
    sd = []
    for x, y in verts:
        s = nx * x + ny * y - offset
        if -eps <= s <= eps:
            s = 0.0
        sd.append(s)
    below, above, on = [], [], []
    m = len(verts)
    for i in range(m):
        p = verts[i]
        sp = sd[i]
        j = i + 1 if i + 1 < m else 0
        sq = sd[j]
        if sp <= 0.0:
            below.append(p)
        if sp >= 0.0:
            above.append(p)
        if sp == 0.0:
            on.append(p)
        elif (sp < 0.0 < sq) or (sq < 0.0 < sp):
            q = verts[j]
            w = sp / (sp - sq)
            x = (p[0] + w * (q[0] - p[0]), p[1] + w * (q[1] - p[1]))
            below.append(x)
            above.append(x)
            on.append(x)
    return below, above, on


def _split_polyhedron(verts, faces, normal, offset, eps):
    """Split a face-lattice polyhedron.

    Returns ``(below, above, cap)`` where ``below``/``above`` are
    ``(vertices, faces)`` pairs or None and ``cap`` the cross-section cycle
    (counterclockwise about ``normal``).
    """
    nx, ny, nz = normal
    sd = []
    neg = pos = False
    for x, y, z in verts:
        s = nx * x + ny * y + nz * z - offset
        if -eps <= s <= eps:
            s = 0.0
        elif s < 0.0:
            neg = True
        else:
            pos = True
        sd.append(s)
    if not neg:
        return None, (verts, faces), []
    if not pos:
        return (verts, faces), None, []

    cut_points = {}
    lo_faces, hi_faces = [], []
    for f in faces:
        lo, hi = [], []
        lo_strict = hi_strict = False
        k = len(f)
        for i in range(k):
            a = f[i]
            b = f[i + 1] if i + 1 < k else f[0]
            sa = sd[a]
            sb = sd[b]
            if sa <= 0.0:
                lo.append(a)
                if sa < 0.0:
                    lo_strict = True
            if sa >= 0.0:
                hi.append(a)
                if sa > 0.0:
                    hi_strict = True
            if (sa < 0.0 < sb) or (sb < 0.0 < sa):
                key = (a, b) if a < b else (b, a)
                if key not in cut_points:
                    p, q = verts[a], verts[b]
                    w = sa / (sa - sb)
                    cut_points[key] = (p[0] + w * (q[0] - p[0]),
                                       p[1] + w * (q[1] - p[1]),
                                       p[2] + w * (q[2] - p[2]))
                lo.append(key)
                hi.append(key)
        if lo_strict and len(lo) >= 3:
            lo_faces.append(lo)
        if hi_strict and len(hi) >= 3:
            hi_faces.append(hi)

    cap_labels = [i for i, s in enumerate(sd) if s == 0.0] + list(cut_points)
    if len(cap_labels) < 3:
        raise NoSplitError("cross-section is degenerate")

    def point(label):
        return verts[label] if isinstance(label, int) else cut_points[label]

    cap_pts = [point(lab) for lab in cap_labels]
    e1, e2 = plane_basis(normal)
    cx = sum(p[0] for p in cap_pts) / len(cap_pts)
    cy = sum(p[1] for p in cap_pts) / len(cap_pts)
    cz = sum(p[2] for p in cap_pts) / len(cap_pts)
    ang = []
    for p in cap_pts:
        dx, dy, dz = p[0] - cx, p[1] - cy, p[2] - cz
        ang.append(math.atan2(dx * e2[0] + dy * e2[1] + dz * e2[2],
                              dx * e1[0] + dy * e1[1] + dz * e1[2]))
    order = sorted(range(len(cap_labels)), key=ang.__getitem__)
    cap_ccw = [cap_labels[i] for i in order]

    def assemble(face_list, cap_cycle):
        index = {}
        out_verts = []
        out_faces = []
        for f in face_list + [cap_cycle]:
            cyc = []
            for lab in f:
                j = index.get(lab)
                if j is None:
                    j = index[lab] = len(out_verts)
                    out_verts.append(point(lab))
                cyc.append(j)
            out_faces.append(tuple(cyc))
        return tuple(out_verts), tuple(out_faces)

    # below keeps <x,n> <= r, so its cap faces outward along +n
    below = assemble(lo_faces, cap_ccw)
    above = assemble(hi_faces, cap_ccw[::-1])
    return below, above, [point(lab) for lab in cap_ccw]


def _default_eps(c):
    return REL_EPS * c.scale_hint()


def clip_halfspace(c: ConvexPolytope, H: Hyperplane, side: int, eps: Optional[float] = None,
                   min_volume: Optional[float] = None) -> Optional[ConvexPolytope]:
    """Intersect ``c`` with one closed side of ``H``.

    ``side=-1`` keeps ``<x,u> <= r``, ``side=+1`` keeps ``<x,u> >= r``.
    Returns None (the empty marker) when the kept part has volume below
    ``min_volume``.
    """
    if side not in (-1, 1):
        raise GeometryError("side must be -1 or +1")
    if not isinstance(c, ConvexPolytope) or not c.vertices:
        raise GeometryError("clip_halfspace expects a ConvexPolytope")
    if len(H.normal) != c.dim:
        raise GeometryError("hyperplane and polytope dimensions differ")
    if eps is None:
        eps = _default_eps(c)
    if min_volume is None:
        min_volume = REL_EPS_VOL * c.volume
    if c.dim == 2:
        below, above, _ = _split_polygon(c.vertices, H.normal, H.offset, eps)
        kept = below if side < 0 else above
        if len(kept) == len(c.vertices) and all(a is b for a, b in zip(kept, c.vertices)):
            return c
        if len(kept) < 3:
            return None
        out = ConvexPolytope(tuple(kept), id=c.id)
    else:
        below, above, _ = _split_polyhedron(c.vertices, c.faces, H.normal, H.offset, eps)
        kept = below if side < 0 else above
        if kept is None:
            return None
        if kept[0] is c.vertices:
            return c
        out = ConvexPolytope(kept[0], kept[1], c.id)
    if out.volume < min_volume:
        return None
    return out


def cut_by_hyperplane(c: ConvexPolytope, H: Hyperplane, eps: Optional[float] = None,
                      min_volume: Optional[float] = None):
    """Split ``c`` by ``H`` into ``(c_plus, c_minus, facet)``.

    ``c_plus`` lies on ``<x,u> >= r``.  Raises :class:`NoSplitError` when
    either piece would have volume below ``min_volume``.
    """
    if len(H.normal) != c.dim:
        raise GeometryError("hyperplane and polytope dimensions differ")
    if eps is None:
        eps = _default_eps(c)
    if min_volume is None:
        min_volume = REL_EPS_VOL * c.volume
    if c.dim == 2:
        below, above, on = _split_polygon(c.vertices, H.normal, H.offset, eps)
        if len(below) < 3 or len(above) < 3 or len(on) != 2:
            raise NoSplitError("hyperplane does not cut the polygon interior")
        minus = ConvexPolytope(tuple(below))
        plus = ConvexPolytope(tuple(above))
        facet = EmbeddedFacet(H, tuple(on))
    else:
        below, above, cap = _split_polyhedron(c.vertices, c.faces, H.normal, H.offset, eps)
        if below is None or above is None:
            raise NoSplitError("hyperplane does not cut the polyhedron interior")
        minus = ConvexPolytope(*below)
        plus = ConvexPolytope(*above)
        facet = EmbeddedFacet(H, tuple(cap))
    if minus.volume < min_volume or plus.volume < min_volume:
        raise NoSplitError("cut produces a sliver below the minimum cell volume")
    return plus, minus, facet


def intersect_polytopes(a: ConvexPolytope, b: ConvexPolytope, eps: float,
                        min_volume: float) -> Optional[ConvexPolytope]:
    """``a ∩ b`` by successive clipping of ``a`` with the facet halfspaces of ``b``."""
    verts, faces = a.vertices, a.faces
    for n, h in b.halfspaces():
        if a.dim == 2:
            below, _, _ = _split_polygon(verts, n, h, eps)
            if len(below) < 3:
                return None
            verts = tuple(below)
        else:
            below, _, _ = _split_polyhedron(verts, faces, n, h, eps)
            if below is None:
                return None
            verts, faces = below
    out = ConvexPolytope(verts, faces, a.id)
    return out if out.volume >= min_volume else None


def clip_to_polytope(obj_vertices, window: ConvexPolytope, eps: float):
    """Clip a segment (2 points) or a planar polygon cycle to ``window``.

    Returns the clipped vertex tuple, or None when nothing of positive
    length/area survives.
    """
    pts = list(obj_vertices)
    for n, h in window.halfspaces():
        if len(pts) == 2:
            sa = _dot(n, pts[0]) - h
            sb = _dot(n, pts[1]) - h
            if sa > eps and sb > eps:
                return None
            if sa > eps or sb > eps:
                w = sa / (sa - sb)
                x = tuple(p + w * (q - p) for p, q in zip(pts[0], pts[1]))
                pts = [x, pts[1]] if sa > eps else [pts[0], x]
            if math.dist(pts[0], pts[1]) <= eps:
                return None
            continue
        out = []
        k = len(pts)
        sd = [_dot(n, p) - h for p in pts]
        sd = [0.0 if abs(s) <= eps else s for s in sd]
        for i in range(k):
            p, sp = pts[i], sd[i]
            q, sq = pts[(i + 1) % k], sd[(i + 1) % k]
            if sp <= 0.0:
                out.append(p)
            if (sp < 0.0 < sq) or (sq < 0.0 < sp):
                w = sp / (sp - sq)
                out.append(tuple(a + w * (b - a) for a, b in zip(p, q)))
        if len(out) < 3:
            return None
        pts = out
    if len(pts) >= 3 and 0.5 * _norm(_newell(pts)) <= eps * eps:
        return None
    return tuple(pts)


# ---------------------------------------------------------------------------
# faces

def k_faces(f, k: int) -> list:
    """All ``k``-faces of a polytope, facet, or raw vertex tuple.

    Faces are returned as vertex-coordinate tuples: ``(p,)`` for a vertex,
    ``(a, b)`` for an edge, a boundary cycle for a polygon.  ``k`` equal to
    the object's own dimension returns the object's vertex tuple.
    """
    if isinstance(f, ConvexPolytope):
        dim = f.dim
        verts = f.vertices
    else:
        verts = f.vertices if isinstance(f, EmbeddedFacet) else tuple(f)
        dim = {1: 0, 2: 1}.get(len(verts), 2)
    if not isinstance(k, (int, np.integer)) or k < 0 or k > dim:
        raise GeometryError(f"k must be an integer in [0, {dim}], got {k!r}")
    if k == dim:
        return [tuple(verts)]
    if k == 0:
        return [(v,) for v in verts]
    if isinstance(f, ConvexPolytope) and dim == 3:
        if k == 1:
            return [(verts[a], verts[b]) for a, b in f.edges()]
        return [tuple(verts[i] for i in face) for face in f.faces]
    # polygon (in the plane or in space) and k == 1
    n = len(verts)
    return [(verts[i], verts[(i + 1) % n]) for i in range(n)]


# ---------------------------------------------------------------------------
# serialization

def polytopes_to_json(polys) -> str:
    return json.dumps([p.to_json() for p in polys])


def polytopes_from_json(text: str):
    return [ConvexPolytope.from_json(obj) for obj in json.loads(text)]
