"""Continuous-time recursive cell division (MNW construction), iteration and rescaling."""
from __future__ import annotations

import csv
import heapq
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import (
    REL_EPS,
    REL_EPS_VOL,
    ConvexPolytope,
    EmbeddedFacet,
    GeometryError,
    Hyperplane,
    NoSplitError,
    clip_to_polytope,
    cut_by_hyperplane,
    intersect_polytopes,
    _newell,
    k_faces,
)
from .measure import HyperplaneMeasure, sample_hitting

MAX_REDRAWS = 10_000


@dataclass
class MaximalFacetRecord:
    facet: EmbeddedFacet
    birth_time: float
    parent_cell_id: Optional[int] = None
    child_plus_id: Optional[int] = None
    child_minus_id: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "vertices": [list(v) for v in self.facet.vertices],
            "carrier": self.facet.carrier.to_json(),
            "birth_time": self.birth_time,
            "parent": self.parent_cell_id,
            "children": [self.child_plus_id, self.child_minus_id],
        }


@dataclass(frozen=True)
class MaximalPolytope:
    """A k-face of a maximal facet, marked with the facet's birth time."""

    vertices: tuple
    birth_time: float

    @property
    def measure(self) -> float:
        if len(self.vertices) == 1:
            return 0.0
        if len(self.vertices) == 2:
            return math.dist(*self.vertices)
        return 0.5 * math.hypot(*_newell(self.vertices))


@dataclass
class StitTessellation:
    """Birth-time-marked tessellation of ``window`` produced up to time ``t``.

    ``split_tree`` maps a split cell id to its ``(plus, minus)`` children;
    ``cell_birth`` holds the birth time of every cell id ever created.
    """

    window: ConvexPolytope
    t: float
    measure: Optional[HyperplaneMeasure]
    cells: list
    facets: list
    split_tree: dict = field(default_factory=dict)
    cell_birth: dict = field(default_factory=dict)
    snapshots: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.window.dim

    def birth_times(self) -> np.ndarray:
        return np.array([f.birth_time for f in self.facets], dtype=float)

    def facet_measures(self) -> np.ndarray:
        return np.array([f.facet.measure for f in self.facets], dtype=float)

    def maximal_polytopes(self, k: int):
        """The k-dimensional maximal polytopes as :class:`MaximalPolytope` records.

        They are the k-faces of the facets; each inherits its facet's birth time.
        """
        d = self.dim
        if not 0 <= k <= d - 1:
            raise ValueError(f"k must lie in [0, {d - 1}]")
        out = []
        for rec in self.facets:
            for face in k_faces(rec.facet, k):
                out.append(MaximalPolytope(face, rec.birth_time))
        return out

    def to_json(self) -> dict:
        return {
            "window": self.window.to_json(),
            "t": self.t,
            "cells": [c.to_json() for c in self.cells],
            "facets": [f.to_json() for f in self.facets],
        }

    def facets_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["birth_time", "measure", "dimension"])
        for rec in self.facets:
            w.writerow([repr(rec.birth_time), repr(rec.facet.measure), self.dim - 1])
        return buf.getvalue()


def tessellation_from_json(obj) -> StitTessellation:
    window = ConvexPolytope.from_json(obj["window"])
    cells = [ConvexPolytope.from_json(c) for c in obj["cells"]]
    facets = []
    for f in obj["facets"]:
        facet = EmbeddedFacet(Hyperplane.from_json(f["carrier"]),
                              tuple(tuple(v) for v in f["vertices"]))
        plus, minus = f.get("children", [None, None])
        facets.append(MaximalFacetRecord(facet, f["birth_time"], f.get("parent"), plus, minus))
    return StitTessellation(window, obj["t"], None, cells, facets)


def build_stit(window: ConvexPolytope, measure: HyperplaneMeasure, t: float, rng,
               snapshot_times=None) -> StitTessellation:
    """Run the recursive cell division in ``window`` until time ``t``.

    Every cell lives an exponential time with rate equal to its hitting mass,
    then splits along a hyperplane drawn from the hitting law restricted to
    it.  Events are processed from a priority queue keyed by absolute death
    time.

    Parameters
    ----------
    snapshot_times : sequence of float, optional
        Increasing times in ``[0, t]`` at which the number of cells and the
        total hitting mass of all cells are recorded into ``snapshots``.
    """
    if not t >= 0.0:
        raise ValueError("t must be non-negative")
    if window.volume <= 0.0:
        raise GeometryError("window must have positive volume")
    eps = REL_EPS * window.diameter
    min_volume = REL_EPS_VOL * window.volume
    directional = measure.directional
    rate_scale = measure.time_scale

    times = list(snapshot_times) if snapshot_times is not None else []
    snapshots = []
    k_snap = 0

    alive = {}
    heap = []
    split_tree = {}
    cell_birth = {}
    facets = []
    next_id = 0
    total_mass = 0.0

    def born(poly, birth):
        nonlocal next_id, total_mass
        cid = next_id
        next_id += 1
        m = rate_scale * directional.mean_width(poly)
        alive[cid] = (poly, m)
        cell_birth[cid] = birth
        total_mass += m
        if m > 0.0:
            death = birth + rng.exponential(1.0 / m)
            if death <= t:
                heapq.heappush(heap, (death, cid))
        return cid

    born(window, 0.0)
    while heap:
        death, cid = heapq.heappop(heap)
        while k_snap < len(times) and times[k_snap] < death:
            snapshots.append((times[k_snap], len(alive), total_mass))
            k_snap += 1
        poly, m = alive.pop(cid)
        total_mass -= m
        for _ in range(MAX_REDRAWS):
            H = sample_hitting(measure, poly, rng)
            try:
                plus, minus, facet = cut_by_hyperplane(poly, H, eps, min_volume)
            except NoSplitError:
                continue
            break
        else:
            raise GeometryError(f"cell {cid} could not be split after {MAX_REDRAWS} draws")
        pid = born(plus, death)
        mid = born(minus, death)
        split_tree[cid] = (pid, mid)
        facets.append(MaximalFacetRecord(facet, death, cid, pid, mid))
    while k_snap < len(times):
        snapshots.append((times[k_snap], len(alive), total_mass))
        k_snap += 1

    cells = [poly.with_id(cid) for cid, (poly, _) in sorted(alive.items())]
    return StitTessellation(window, t, measure, cells, facets, split_tree, cell_birth, snapshots)


def trivial_tessellation(window: ConvexPolytope) -> StitTessellation:
    return StitTessellation(window, 0.0, None, [window.with_id(0)], [], {}, {0: 0.0})


def iterate(frame, component_generator: Callable, rng, time_offset: Optional[float] = None):
    """Nest independent component tessellations inside the cells of ``frame``.

    ``component_generator(cell, rng)`` must return a tessellation whose window
    covers ``cell``; its cells (and facets) are intersected with the cell.
    Component facets get their birth times shifted by ``time_offset``
    (default: ``frame.t``), so nesting two runs of durations s and u yields a
    marked tessellation comparable with a single run of duration s + u.
    """
    window = frame.window
    eps = REL_EPS * window.diameter
    min_volume = REL_EPS_VOL * window.volume
    offset = frame.t if time_offset is None else time_offset
    cells = []
    facets = list(getattr(frame, "facets", []))
    comp_t = 0.0
    for c in frame.cells:
        comp = component_generator(c, rng)
        comp_t = max(comp_t, comp.t)
        inside = comp.window is c
        for piece in comp.cells:
            if not inside:
                piece = intersect_polytopes(piece, c, eps, min_volume)
                if piece is None:
                    continue
            cells.append(piece.with_id(len(cells)))
        for rec in getattr(comp, "facets", []):
            facet = rec.facet
            if not inside:
                verts = clip_to_polytope(facet.vertices, c, eps)
                if verts is None:
                    continue
                facet = EmbeddedFacet(facet.carrier, verts)
            facets.append(MaximalFacetRecord(facet, rec.birth_time + offset))
    return StitTessellation(window, offset + comp_t, getattr(frame, "measure", None),
                            cells, facets)


def rescale(Y, m: float):
    """Multiply all coordinates by ``m``; marks and time parameters are kept."""
    if not m > 0.0:
        raise ValueError("scale factor must be positive")
    if isinstance(Y, StitTessellation):
        facets = [MaximalFacetRecord(r.facet.scaled(m), r.birth_time, r.parent_cell_id,
                                     r.child_plus_id, r.child_minus_id) for r in Y.facets]
        return StitTessellation(Y.window.scaled(m), Y.t, Y.measure,
                                [c.scaled(m) for c in Y.cells], facets,
                                dict(Y.split_tree), dict(Y.cell_birth), list(Y.snapshots))
    from .pht import PhtTessellation

    if isinstance(Y, PhtTessellation):
        return PhtTessellation(Y.window.scaled(m), Y.t, Y.measure,
                               [H.scaled(m) for H in Y.hyperplanes],
                               [c.scaled(m) for c in Y.cells])
    raise TypeError(f"cannot rescale {type(Y).__name__}")


def tessellation_json(Y) -> str:
    return json.dumps(Y.to_json())
