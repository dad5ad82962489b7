"""Poisson hyperplane tessellations restricted to a convex window.

Cells are built by inserting the hyperplanes one at a time and splitting
every cell they cross.  Lower-dimensional faces are extracted directly from
the hyperplane arrangement: per-line subdivision in the plane, per-plane
line arrangements and subdivided plane-pair lines in space.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import (
    REL_EPS,
    REL_EPS_VOL,
    ConvexPolytope,
    GeometryError,
    NoSplitError,
    _polygon_area,
    _split_polygon,
    cut_by_hyperplane,
    diameter,
    plane_basis,
)
from .measure import HyperplaneMeasure, hitting_mass, sample_hitting_counted


@dataclass(frozen=True, eq=False)
class Face:
    """A k-face of the arrangement inside the window.

    ``carriers`` are indices into the generating hyperplane list; the face
    lies in the intersection of exactly ``d - k`` of them.  ``boundary`` is
    True when the face's closure meets the window boundary.
    """

    vertices: tuple
    carriers: tuple
    boundary: bool

    @property
    def k(self) -> int:
        return 1 if len(self.vertices) == 2 else 2

    @property
    def measure(self) -> float:
        if len(self.vertices) == 2:
            return math.dist(*self.vertices)
        v = np.asarray(self.vertices)
        n = np.zeros(3)
        for a, b in zip(v, np.roll(v, -1, axis=0)):
            n += np.cross(a, b)
        return 0.5 * float(np.linalg.norm(n))

    def to_json(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices],
                "carriers": list(self.carriers), "boundary": self.boundary}


@dataclass
class PhtTessellation:
    window: ConvexPolytope
    t: float
    measure: Optional[HyperplaneMeasure]
    hyperplanes: list
    cells: list
    faces_by_dim: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.window.dim

    def faces(self, k: int) -> list:
        if k not in self.faces_by_dim:
            self.faces_by_dim[k] = extract_faces(self, k)
        return self.faces_by_dim[k]

    def to_json(self) -> dict:
        return {
            "window": self.window.to_json(),
            "t": self.t,
            "hyperplanes": [H.to_json() for H in self.hyperplanes],
            "cells": [c.to_json() for c in self.cells],
            "faces_by_dim": {str(k): [f.to_json() for f in v]
                             for k, v in sorted(self.faces_by_dim.items())},
        }

    def faces_csv(self, k: int) -> str:
        lines = ["measure,dimension,boundary"]
        for f in self.faces(k):
            lines.append(f"{f.measure!r},{k},{int(f.boundary)}")
        return "\n".join(lines) + "\n"


def draw_hyperplanes(window: ConvexPolytope, measure: HyperplaneMeasure, t: float, rng) -> list:
    """Poisson number of i.i.d. hyperplanes hitting ``window`` with intensity ``t * measure``."""
    if not t >= 0.0:
        raise ValueError("t must be non-negative")
    if t == 0.0:
        return []
    n = rng.poisson(t * hitting_mass(measure, window))
    env = diameter(window.vertices)
    return [sample_hitting_counted(measure, window, rng, env)[0] for _ in range(n)]


def build_pht(window: ConvexPolytope, measure: HyperplaneMeasure, t: float, rng,
              cells: bool = True) -> PhtTessellation:
    """Simulate the Poisson hyperplane tessellation with intensity measure ``t * measure``.

    Parameters
    ----------
    cells : bool
        When False only the hyperplanes are drawn (faces can still be
        extracted); this skips the comparatively costly cell splitting.
    """
    if window.volume <= 0.0:
        raise GeometryError("window must have positive volume")
    hyperplanes = draw_hyperplanes(window, measure, t, rng)
    out = [window]
    if cells:
        out = split_cells(window, hyperplanes)
    return PhtTessellation(window, t, measure, hyperplanes,
                           [c.with_id(i) for i, c in enumerate(out)])


def split_cells(window: ConvexPolytope, hyperplanes) -> list:
    eps = REL_EPS * window.diameter
    min_volume = REL_EPS_VOL * window.volume
    cells = [window]
    for H in hyperplanes:
        u, r = H.normal, H.offset
        nxt = []
        for c in cells:
            vals = [sum(a * b for a, b in zip(v, u)) for v in c.vertices]
            if min(vals) < r - eps and max(vals) > r + eps:
                try:
                    plus, minus, _ = cut_by_hyperplane(c, H, eps, min_volume)
                except NoSplitError:
                    nxt.append(c)
                    continue
                nxt.append(minus)
                nxt.append(plus)
            else:
                nxt.append(c)
        cells = nxt
    return cells


# ---------------------------------------------------------------------------
# face extraction

def _window_arrays(window):
    hs = window.halfspaces()
    A = np.array([n for n, _ in hs], dtype=float)
    b = np.array([h for _, h in hs], dtype=float)
    return A, b


def _line_chord(p0, v, A, b, eps):
    """Parameter range of ``p0 + s v`` inside ``{A x <= b}``; None if (nearly) empty."""
    den = A @ v
    num = b - A @ p0
    lo, hi = -math.inf, math.inf
    for dn, nm in zip(den, num):
        if abs(dn) < 1e-15:
            if nm < 0.0:
                return None
            continue
        s = nm / dn
        if dn > 0.0:
            hi = min(hi, s)
        else:
            lo = max(lo, s)
    if not hi - lo > eps:
        return None
    return lo, hi


def _subdivide(p0, v, lo, hi, cuts, eps):
    """Split the chord ``[lo, hi]`` at the sorted interior cut parameters."""
    cuts = np.sort(cuts[(cuts > lo + eps) & (cuts < hi - eps)])
    knots = np.concatenate(([lo], cuts, [hi]))
    pts = p0[None, :] + knots[:, None] * v[None, :]
    return pts, len(knots) - 1


def _edges_2d(window, hyperplanes, eps, only=None):
    A, b = _window_arrays(window)
    N = np.array([H.normal for H in hyperplanes], dtype=float).reshape(-1, 2)
    R = np.array([H.offset for H in hyperplanes], dtype=float)
    faces = []
    for i in range(len(hyperplanes)) if only is None else sorted(only):
        n = N[i]
        v = np.array([-n[1], n[0]])
        p0 = R[i] * n
        chord = _line_chord(p0, v, A, b, eps)
        if chord is None:
            continue
        lo, hi = chord
        den = N @ v
        ok = np.abs(den) > 1e-12
        ok[i] = False
        cuts = (R[ok] - N[ok] @ p0) / den[ok]
        pts, m = _subdivide(p0, v, lo, hi, cuts, eps)
        for e in range(m):
            a = tuple(map(float, pts[e]))
            c = tuple(map(float, pts[e + 1]))
            faces.append(Face((a, c), (i,), e == 0 or e == m - 1))
    return faces


def _edges_3d(window, hyperplanes, eps, only=None):
    A, b = _window_arrays(window)
    N = np.array([H.normal for H in hyperplanes], dtype=float).reshape(-1, 3)
    R = np.array([H.offset for H in hyperplanes], dtype=float)
    faces = []
    n_planes = len(hyperplanes)
    carriers = range(n_planes) if only is None else sorted(only)
    for i in carriers:
        for j in carriers:
            if j <= i:
                continue
            v = np.cross(N[i], N[j])
            m = np.linalg.norm(v)
            if m < 1e-12:
                continue
            v /= m
            M = np.vstack([N[i], N[j], v])
            p0 = np.linalg.solve(M, np.array([R[i], R[j], 0.0]))
            chord = _line_chord(p0, v, A, b, eps)
            if chord is None:
                continue
            lo, hi = chord
            den = N @ v
            ok = np.abs(den) > 1e-12
            ok[i] = ok[j] = False
            cuts = (R[ok] - N[ok] @ p0) / den[ok]
            pts, cnt = _subdivide(p0, v, lo, hi, cuts, eps)
            for e in range(cnt):
                a = tuple(map(float, pts[e]))
                c = tuple(map(float, pts[e + 1]))
                faces.append(Face((a, c), (i, j), e == 0 or e == cnt - 1))
    return faces


def _section_polygon(window, normal, offset, basis, eps):
    """Window ∩ plane as a CCW polygon in plane coordinates (origin at offset*normal)."""
    from .geometry import _split_polyhedron

    _, _, cap = _split_polyhedron(window.vertices, window.faces, normal, offset, eps)
    if not cap or len(cap) < 3:
        return None
    e1, e2 = basis
    o = np.asarray(normal) * offset
    pts = [(float(np.dot(np.subtract(p, o), e1)), float(np.dot(np.subtract(p, o), e2)))
           for p in cap]
    area = 0.0
    for k in range(len(pts)):
        (x1, y1), (x2, y2) = pts[k], pts[(k + 1) % len(pts)]
        area += x1 * y2 - x2 * y1
    if area < 0.0:
        pts = pts[::-1]
    if abs(area) <= eps * eps:
        return None
    return pts


def _plates_3d(window, hyperplanes, eps, only=None):
    N = np.array([H.normal for H in hyperplanes], dtype=float).reshape(-1, 3)
    R = np.array([H.offset for H in hyperplanes], dtype=float)
    A, b = _window_arrays(window)
    faces = []
    for i, H in enumerate(hyperplanes):
        if only is not None and i not in only:
            continue
        e1, e2 = plane_basis(H.normal)
        sec = _section_polygon(window, H.normal, H.offset, (e1, e2), eps)
        if sec is None:
            continue
        o = N[i] * R[i]
        E = np.array([e1, e2])
        pieces = [(sec, ())]
        for j in range(len(hyperplanes)):
            if j == i:
                continue
            # trace of plane j: <N_j, o + a e1 + b e2> = R_j
            g = E @ N[j]
            m = float(np.hypot(g[0], g[1]))
            if m < 1e-12:
                continue
            nrm = (float(g[0] / m), float(g[1] / m))
            off = float((R[j] - N[j] @ o) / m)
            nxt = []
            for poly, tag in pieces:
                vals = [nrm[0] * x + nrm[1] * y for x, y in poly]
                if min(vals) < off - eps and max(vals) > off + eps:
                    below, above, on = _split_polygon(poly, nrm, off, eps)
                    if len(below) >= 3 and len(above) >= 3:
                        nxt.append((below, tag + (j,)))
                        nxt.append((above, tag + (j,)))
                        continue
                nxt.append((poly, tag))
            pieces = nxt
        for poly, _ in pieces:
            P = o[None, :] + np.asarray(poly) @ E
            gap = (P @ A.T - b[None, :]).max(axis=1)
            boundary = bool((gap > -eps).any())
            faces.append(Face(tuple(tuple(map(float, p)) for p in P), (i,), boundary))
    return faces


def extract_faces(Y: PhtTessellation, k: int, only=None) -> list:
    """The k-faces of the arrangement inside the window, for ``1 <= k <= d-1``.

    Each face carries a ``boundary`` flag; interior selection is left to
    :func:`stitsim.stats.minus_sample`.

    Parameters
    ----------
    only : iterable of int, optional
        Restrict to faces all of whose carrying hyperplanes have these
        indices.  Cuts by the remaining hyperplanes are still applied.
    """
    d = Y.dim
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= d - 1:
        raise ValueError(f"k must lie in [1, {d - 1}] (vertices are not supported)")
    eps = REL_EPS * Y.window.diameter
    if not Y.hyperplanes:
        return []
    if only is not None:
        only = set(int(i) for i in only)
    if d == 2:
        return _edges_2d(Y.window, Y.hyperplanes, eps, only)
    if k == 1:
        return _edges_3d(Y.window, Y.hyperplanes, eps, only)
    return _plates_3d(Y.window, Y.hyperplanes, eps, only)


def interior_crossings_2d(window: ConvexPolytope, hyperplanes) -> int:
    """Number of pairs of lines crossing strictly inside the window (brute force)."""
    eps = REL_EPS * window.diameter
    A, b = _window_arrays(window)
    count = 0
    for i in range(len(hyperplanes)):
        for j in range(i + 1, len(hyperplanes)):
            M = np.array([hyperplanes[i].normal, hyperplanes[j].normal])
            if abs(np.linalg.det(M)) < 1e-12:
                continue
            x = np.linalg.solve(M, [hyperplanes[i].offset, hyperplanes[j].offset])
            if (A @ x - b < -eps).all():
                count += 1
    return count


def flat_sections(window: ConvexPolytope, hyperplanes, k: int):
    """k-measure of the window section of every flat cut out by ``d - k`` hyperplanes.

    The k-faces on such a flat tile its section, so summing these values
    gives the total k-measure of the arrangement's k-faces in the window.

    Returns
    -------
    idx : ndarray of shape (m, d - k)
        Indices of the hyperplanes spanning each flat.
    measure : ndarray of shape (m,)
    """
    d = window.dim
    if not 1 <= k <= d - 1:
        raise ValueError(f"k must lie in [1, {d - 1}]")
    eps = REL_EPS * window.diameter
    A, b = _window_arrays(window)
    idx, out = [], []
    for combo in itertools.combinations(range(len(hyperplanes)), d - k):
        Hs = [hyperplanes[i] for i in combo]
        if k == d - 1:
            H = Hs[0]
            if d == 2:
                n = np.asarray(H.normal, dtype=float)
                chord = _line_chord(H.offset * n, np.array([-n[1], n[0]]), A, b, eps)
                m = chord[1] - chord[0] if chord else 0.0
            else:
                sec = _section_polygon(window, H.normal, H.offset, plane_basis(H.normal), eps)
                m = 0.0 if sec is None else abs(_polygon_area(sec))
        else:
            N1, N2 = (np.asarray(H.normal, dtype=float) for H in Hs)
            v = np.cross(N1, N2)
            nv = np.linalg.norm(v)
            if nv < 1e-12:
                continue
            v /= nv
            p0 = np.linalg.solve(np.vstack([N1, N2, v]), np.array([Hs[0].offset, Hs[1].offset, 0.0]))
            chord = _line_chord(p0, v, A, b, eps)
            m = chord[1] - chord[0] if chord else 0.0
        if m > 0.0:
            idx.append(combo)
            out.append(float(m))
    return np.array(idx, dtype=int).reshape(-1, d - k), np.array(out, dtype=float)


def pht_json(Y: PhtTessellation) -> str:
    return json.dumps(Y.to_json())
