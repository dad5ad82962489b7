"""Estimators and tests for typical objects of simulated tessellations.

Objects are anything exposing ``vertices`` (polytopes, facets, faces,
maximal polytopes) or a bare vertex tuple.  Edge effects are handled by
minus-sampling; :func:`ht_weights` supplies the matching Horvitz-Thompson
correction so that weighted minus-sampled statistics estimate typical
(number-weighted) laws without the size bias of plain minus-sampling.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.stats import kstwobign

from .geometry import REL_EPS, ConvexPolytope, _split_polygon, _split_polyhedron

# fixed generic direction for reference points; no simulated edge is parallel to it
_REF_DIR = {2: (0.8090169943749475, 0.5877852522924731),
            3: (0.6350852961085884, 0.4850712500726659, 0.6011599240398157)}


# ---------------------------------------------------------------------------
# exact mergeable accumulators

def _grow(partials, x):
    # Shewchuk: keep a list of non-overlapping partials whose sum is exact
    out = []
    for y in partials:
        if abs(x) < abs(y):
            x, y = y, x
        hi = x + y
        lo = y - (hi - x)
        if lo:
            out.append(lo)
        x = hi
    out.append(x)
    return out


class _ExactSum:
    __slots__ = ("partials",)

    def __init__(self, partials=None):
        self.partials = list(partials or [])

    def add(self, x: float):
        self.partials = _grow(self.partials, float(x))

    def merge(self, other: "_ExactSum") -> "_ExactSum":
        out = _ExactSum(self.partials)
        for p in other.partials:
            out.add(p)
        return out

    def exact(self) -> Fraction:
        return sum((Fraction(p) for p in self.partials), Fraction(0))

    def value(self) -> float:
        return math.fsum(self.partials)


class EmpiricalSummary:
    """Count, exact power sums, a fixed-bin histogram and a bounded raw reservoir.

    Merging is exact: counts, histogram bins and power sums do not depend on
    how the inputs were split or in which order the parts are combined.  The
    reservoir keeps the first ``reservoir`` values in merge order.
    """

    def __init__(self, bin_edges: Optional[Sequence[float]] = None, reservoir: int = 0):
        self.bin_edges = None if bin_edges is None else np.asarray(bin_edges, dtype=float)
        nb = 0 if self.bin_edges is None else len(self.bin_edges) - 1
        self.hist = np.zeros(nb, dtype=np.int64)
        self.underflow = 0
        self.overflow = 0
        self.count = 0
        self._s1 = _ExactSum()
        self._s2 = _ExactSum()
        self.reservoir_size = int(reservoir)
        self.reservoir: list = []

    def add(self, x: float) -> None:
        self.extend([x])

    def extend(self, values) -> None:
        vals = np.asarray(values, dtype=float).ravel()
        if vals.size == 0:
            return
        self.count += int(vals.size)
        for v in vals.tolist():
            self._s1.add(v)
            self._s2.add(v * v)
        if self.bin_edges is not None:
            e = self.bin_edges
            self.underflow += int((vals < e[0]).sum())
            self.overflow += int((vals >= e[-1]).sum())
            inside = vals[(vals >= e[0]) & (vals < e[-1])]
            self.hist += np.histogram(inside, bins=e)[0].astype(np.int64)
        room = self.reservoir_size - len(self.reservoir)
        if room > 0:
            self.reservoir.extend(vals[:room].tolist())

    def merge(self, other: "EmpiricalSummary") -> "EmpiricalSummary":
        if (self.bin_edges is None) != (other.bin_edges is None) or (
                self.bin_edges is not None and not np.array_equal(self.bin_edges, other.bin_edges)):
            raise ValueError("cannot merge summaries with different bin edges")
        out = EmpiricalSummary(self.bin_edges, self.reservoir_size)
        out.count = self.count + other.count
        out._s1 = self._s1.merge(other._s1)
        out._s2 = self._s2.merge(other._s2)
        out.hist = self.hist + other.hist
        out.underflow = self.underflow + other.underflow
        out.overflow = self.overflow + other.overflow
        out.reservoir = (self.reservoir + other.reservoir)[:self.reservoir_size]
        return out

    @property
    def total(self) -> float:
        return self._s1.value()

    @property
    def mean(self) -> float:
        if self.count == 0:
            return math.nan
        return float(self._s1.exact() / self.count)

    @property
    def variance(self) -> float:
        """Unbiased sample variance from the exact power sums."""
        n = self.count
        if n < 2:
            return math.nan
        s1 = self._s1.exact()
        s2 = self._s2.exact()
        return float((s2 - s1 * s1 / n) / (n - 1))

    def histogram_csv(self, theory: Optional[Callable[[float], float]] = None) -> str:
        """``bin_left,bin_right,count,theory_value`` rows; theory is the bin probability."""
        if self.bin_edges is None:
            raise ValueError("summary has no histogram")
        rows = ["bin_left,bin_right,count,theory_value"]
        for lo, hi, c in zip(self.bin_edges[:-1], self.bin_edges[1:], self.hist):
            th = "" if theory is None else repr(float(theory(float(lo), float(hi))))
            rows.append(f"{float(lo)!r},{float(hi)!r},{int(c)},{th}")
        return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# verdicts

@dataclass
class Verdict:
    """Outcome of one check.

    ``kind`` says how ``tolerance`` is read: ``"abs"`` and ``"rel"`` bound
    the deviation of ``observed`` from ``expected``, ``"sigma"`` bounds the
    z-score stored in ``observed`` (``expected`` is 0), ``"pvalue"`` requires
    ``observed`` (a p-value) to exceed ``tolerance``, and ``"max"`` requires
    ``observed`` to stay below ``tolerance``; ``"min"`` requires at least ``tolerance``.
    """

    name: str
    observed: float
    expected: float
    tolerance: float
    kind: str = "abs"
    n: int = 0
    seed: Optional[int] = None
    detail: dict = field(default_factory=dict)
    parts: list = field(default_factory=list)
    passed: bool = field(init=False)

    def __post_init__(self):
        obs, exp, tol = self.observed, self.expected, self.tolerance
        if self.kind == "abs":
            ok = abs(obs - exp) <= tol
        elif self.kind == "rel":
            ok = abs(obs - exp) <= tol * abs(exp)
        elif self.kind == "sigma":
            ok = abs(obs) <= tol
        elif self.kind == "pvalue":
            ok = obs > tol
        elif self.kind == "max":
            ok = obs < tol
        elif self.kind == "min":
            ok = obs >= tol
        elif self.kind == "all":
            ok = True
        else:
            raise ValueError(f"unknown verdict kind {self.kind!r}")
        ok = bool(ok) and math.isfinite(obs)
        self.passed = ok and all(p.passed for p in self.parts)

    @classmethod
    def combine(cls, name: str, parts, seed=None, detail=None) -> "Verdict":
        return cls(name, float(sum(p.passed for p in parts)), float(len(parts)), 0.0, "all",
                   n=sum(p.n for p in parts), seed=seed, detail=detail or {}, parts=list(parts))

    def row(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        if self.kind == "all":
            return f"{flag}  {self.name}: {int(self.observed)}/{int(self.expected)} parts pass"
        if self.kind == "pvalue":
            cond = f"p={self.observed:.4g} > {self.tolerance:g}"
        elif self.kind == "max":
            cond = f"{self.observed:.4g} < {self.tolerance:g}"
        elif self.kind == "min":
            cond = f"{self.observed:.6g} >= {self.tolerance:g}"
        elif self.kind == "sigma":
            cond = f"|z|={abs(self.observed):.3g} <= {self.tolerance:g}"
        elif self.kind == "rel":
            dev = (self.observed - self.expected) / self.expected if self.expected else math.inf
            cond = (f"observed={self.observed:.6g} expected={self.expected:.6g} "
                    f"rel.dev={dev:+.3%} (tol {self.tolerance:.3g})")
        else:
            cond = (f"observed={self.observed:.6g} expected={self.expected:.6g} "
                    f"(tol {self.tolerance:.3g})")
        return f"{flag}  {self.name}: {cond} n={self.n}"

    def report(self, indent: str = "") -> str:
        lines = [indent + self.row()]
        for p in self.parts:
            lines.append(p.report(indent + "    "))
        return "\n".join(lines)

    def to_json(self) -> dict:
        out = asdict(self)
        out["parts"] = [p.to_json() for p in self.parts]
        return out


# ---------------------------------------------------------------------------
# edge correction

def object_vertices(obj):
    if hasattr(obj, "vertices"):
        return obj.vertices
    if hasattr(obj, "facet"):
        return obj.facet.vertices
    return tuple(obj)


def bounding_boxes(objects):
    """Per-object coordinate minima and maxima as two ``(n, d)`` arrays."""
    if not objects:
        return np.zeros((0, 0)), np.zeros((0, 0))
    lo, hi = [], []
    for o in objects:
        v = object_vertices(o)
        cols = list(zip(*v))
        lo.append([min(c) for c in cols])
        hi.append([max(c) for c in cols])
    return np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)


def box_extent(window: ConvexPolytope):
    """``(lo, hi)`` if ``window`` is an axis-parallel box, else None."""
    lo, hi = window.bbox
    for v in window.vertices:
        if not all(abs(x - a) <= 1e-12 * (1 + abs(a)) or abs(x - b) <= 1e-12 * (1 + abs(b))
                   for x, a, b in zip(v, lo, hi)):
            return None
    if window.dim == 2 and len(window.vertices) != 4:
        return None
    if window.dim == 3 and len(window.vertices) != 8:
        return None
    return lo, hi


def interior_mask(objects, window: ConvexPolytope, eps: Optional[float] = None) -> np.ndarray:
    """True for objects whose closure stays at distance > ``eps`` from the window boundary."""
    if eps is None:
        eps = REL_EPS * window.diameter
    if not objects:
        return np.zeros(0, dtype=bool)
    ext = box_extent(window)
    if ext is not None:
        lo, hi = bounding_boxes(objects)
        return ((lo > ext[0] + eps) & (hi < ext[1] - eps)).all(axis=1)
    hs = window.halfspaces()
    A = np.array([n for n, _ in hs])
    b = np.array([h for _, h in hs])
    out = np.empty(len(objects), dtype=bool)
    for i, o in enumerate(objects):
        V = np.asarray(object_vertices(o), dtype=float)
        out[i] = bool((V @ A.T - b < -eps).all())
    return out


def minus_sample(objects, window: ConvexPolytope, eps: Optional[float] = None) -> list:
    """Keep the objects whose closure does not meet the window boundary."""
    mask = interior_mask(objects, window, eps)
    return [o for o, keep in zip(objects, mask) if keep]


def _eroded_volume(window: ConvexPolytope, verts) -> float:
    """Volume of the translations ``x`` with ``x + (K - v0) ⊂ W`` for the object ``K``."""
    V = np.asarray(verts, dtype=float)
    rel = V - V[0]
    cur_v, cur_f = window.vertices, window.faces
    eps = REL_EPS * window.diameter
    for n, h in window.halfspaces():
        shift = float((rel @ np.asarray(n)).max())
        if window.dim == 2:
            below, _, _ = _split_polygon(cur_v, n, h - shift, eps)
            if len(below) < 3:
                return 0.0
            cur_v = tuple(below)
        else:
            below, _, _ = _split_polyhedron(cur_v, cur_f, n, h - shift, eps)
            if below is None:
                return 0.0
            cur_v, cur_f = below
    return ConvexPolytope(cur_v, cur_f).volume


def ht_weights(objects, window: ConvexPolytope) -> np.ndarray:
    """Horvitz-Thompson weights ``Vol(W) / Vol(W ⊖ K)`` for minus-sampled objects.

    ``1 / weight`` is the fraction of translates of the object that fit in
    the window.  Weighted sums over minus-sampled objects are unbiased for
    the corresponding sums over all objects with reference point in ``W``.
    Objects that cannot fit get weight ``inf``.
    """
    if not objects:
        return np.zeros(0)
    ext = box_extent(window)
    if ext is not None:
        side = ext[1] - ext[0]
        lo, hi = bounding_boxes(objects)
        room = side[None, :] - (hi - lo)
        with np.errstate(divide="ignore"):
            w = np.where((room > 0).all(axis=1),
                         np.prod(side) / np.prod(np.where(room > 0, room, 1.0), axis=1), np.inf)
        return w
    vol = window.volume
    out = np.empty(len(objects))
    for i, o in enumerate(objects):
        e = _eroded_volume(window, object_vertices(o))
        out[i] = vol / e if e > 0.0 else math.inf
    return out


def estimate_intensity(objects, window: ConvexPolytope) -> float:
    """Number of objects per unit window volume."""
    vol = window.volume
    if not vol > 0.0:
        raise ValueError("window must have positive volume")
    return len(objects) / vol


def reference_points(objects, direction=None) -> np.ndarray:
    """Lowest vertex of each object along a fixed generic direction."""
    out = []
    for o in objects:
        V = np.asarray(object_vertices(o), dtype=float)
        u = np.asarray(direction if direction is not None else _REF_DIR[V.shape[1]])
        out.append(V[int(np.argmin(V @ u))])
    return np.asarray(out)


def reference_point_count(objects, window: ConvexPolytope, eps: Optional[float] = None) -> int:
    """Objects whose reference point lies in the open window.

    For a tessellation observed in ``W`` this count is unbiased for
    ``intensity * Vol(W)``: a boundary-chopped object has its reference
    point on the boundary unless the full object's reference point is inside.
    """
    if not objects:
        return 0
    if eps is None:
        eps = REL_EPS * window.diameter
    P = reference_points(objects)
    hs = window.halfspaces()
    A = np.array([n for n, _ in hs])
    b = np.array([h for _, h in hs])
    return int((P @ A.T - b[None, :] < -eps).all(axis=1).sum())


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov

def _weighted_steps(x, w):
    """Sorted distinct values and the normalized ECDF just after each of them."""
    x = np.asarray(x, dtype=float).ravel()
    if w is None:
        w = np.ones_like(x)
    else:
        w = np.asarray(w, dtype=float).ravel()
        if w.shape != x.shape:
            raise ValueError("weights and sample differ in length")
        if (w < 0).any() or not np.isfinite(w).all():
            raise ValueError("weights must be finite and non-negative")
    order = np.argsort(x, kind="mergesort")
    xs, ws = x[order], w[order]
    uniq, start = np.unique(xs, return_index=True)
    cw = np.cumsum(ws)
    total = cw[-1]
    if not total > 0:
        raise ValueError("total weight must be positive")
    end = np.append(start[1:], len(xs)) - 1
    return uniq, cw[end] / total


def effective_size(weights) -> float:
    """Kish effective sample size ``(sum w)^2 / sum w^2``."""
    w = np.asarray(weights, dtype=float)
    return float(w.sum() ** 2 / (w * w).sum())


def _eval_cdf(cdf, x):
    try:
        F = np.asarray(cdf(x), dtype=float)
        if F.shape == x.shape:
            return F
    except (TypeError, ValueError):
        pass
    return np.array([float(cdf(v)) for v in x])


def ks_distance(sample, cdf: Callable, weights=None):
    """One-sample KS statistic against ``cdf`` and its asymptotic p-value.

    With ``weights`` the empirical CDF is weighted and the p-value uses the
    effective sample size.
    """
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    uniq, after = _weighted_steps(x, weights)
    before = np.concatenate(([0.0], after[:-1]))
    F = _eval_cdf(cdf, uniq)
    # left limits matter when the reference law has atoms
    F_left = _eval_cdf(cdf, np.nextafter(uniq, -np.inf))
    D = float(max(np.max(np.abs(after - F)), np.max(np.abs(F_left - before))))
    n = x.size if weights is None else effective_size(weights)
    return D, float(kstwobign.sf(D * math.sqrt(n)))


def two_sample_ks(a, b, wa=None, wb=None):
    """Two-sample KS statistic with the asymptotic p-value (optionally weighted)."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    ua, fa = _weighted_steps(a, wa)
    ub, fb = _weighted_steps(b, wb)
    grid = np.union1d(ua, ub)
    Fa = np.concatenate(([0.0], fa))[np.searchsorted(ua, grid, side="right")]
    Fb = np.concatenate(([0.0], fb))[np.searchsorted(ub, grid, side="right")]
    D = float(np.max(np.abs(Fa - Fb)))
    na = a.size if wa is None else effective_size(wa)
    nb = b.size if wb is None else effective_size(wb)
    en = na * nb / (na + nb)
    return D, float(kstwobign.sf(D * math.sqrt(en)))


def weighted_moments(x, w=None):
    """Weighted mean and variance (the variance uses the effective-size correction)."""
    x = np.asarray(x, dtype=float)
    if w is None:
        return float(x.mean()), float(x.var(ddof=1))
    w = np.asarray(w, dtype=float)
    m = float(np.sum(w * x) / np.sum(w))
    v = float(np.sum(w * (x - m) ** 2) / np.sum(w))
    n = effective_size(w)
    return m, v * n / (n - 1.0)


def ratio_se(x, w):
    """Delta-method standard error of ``sum(w x) / sum(w)`` over independent groups.

    ``x`` and ``w`` are per-group totals (e.g. per replication).
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    n = len(x)
    r = x.sum() / w.sum()
    resid = x - r * w
    return float(math.sqrt(n / (n - 1.0) * np.sum(resid ** 2)) / w.sum())


# ---------------------------------------------------------------------------
# simulation-driven checks

def _rng_of(seed):
    return seed if isinstance(seed, (int, np.integer)) else None


def _run(fn, reps, seed, args, threads):
    from .runner import run_replications

    if isinstance(seed, np.random.Generator):
        # derive a master seed from the caller's stream
        seed = int(seed.integers(2**63))
    return run_replications(fn, reps, seed, args, threads)


def _generator_rep(rng, window, measure, t_grid):
    from .mnw import build_stit

    Y = build_stit(window, measure, t_grid[-1], rng, snapshot_times=t_grid)
    n = np.array([s[1] for s in Y.snapshots], dtype=float)
    g = np.array([s[2] for s in Y.snapshots], dtype=float)
    return n, g


def generator_check(window, measure, t_grid, reps: int, seed, threads=None,
                    sigmas: float = 3.0) -> Verdict:
    """Check ``d/dt E[#cells](t) = E[sum_c Lambda([c])](t)`` on a uniform grid.

    Cell counts and total hitting masses are recorded along each simulated
    path.  At every interior grid point the centered difference quotient of
    the cell count is paired with the total mass of the same replication;
    the mean of the paired difference must be within ``sigmas`` standard
    errors of zero.
    """
    t_grid = [float(x) for x in t_grid]
    if len(t_grid) < 3 or any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise ValueError("t_grid must be increasing with at least three points")
    res = _run(_generator_rep, reps, seed, (window, measure, tuple(t_grid)), threads)
    N = np.array([r[0] for r in res])
    G = np.array([r[1] for r in res])
    parts = []
    table = []
    for i in range(1, len(t_grid) - 1):
        fd = (N[:, i + 1] - N[:, i - 1]) / (t_grid[i + 1] - t_grid[i - 1])
        diff = fd - G[:, i]
        se = float(diff.std(ddof=1) / math.sqrt(len(diff)))
        z = float(diff.mean() / se) if se > 0 else (0.0 if diff.mean() == 0 else math.inf)
        table.append({"t": t_grid[i], "finite_difference": float(fd.mean()),
                      "total_mass": float(G[:, i].mean()), "se": se, "z": z})
        parts.append(Verdict(f"generator t={t_grid[i]:g}", z, 0.0, sigmas, "sigma", n=reps,
                             seed=_rng_of(seed),
                             detail={"finite_difference": float(fd.mean()),
                                     "total_mass": float(G[:, i].mean())}))
    return Verdict.combine("generator identity", parts, _rng_of(seed),
                           {"table": table, "mean_cells": N.mean(axis=0).tolist()})


def _cell_stats(cells, window, rng, thin):
    inner = minus_sample(cells, window)
    keep = [c for c in inner if rng.random() < thin]
    from .geometry import intrinsic_volumes

    area = [c.volume for c in keep]
    surf = [2.0 * intrinsic_volumes(c)[-2] for c in keep]
    return area, surf


def _meq_rep(rng, window, measure, t, thin):
    from .mnw import build_stit
    from .pht import build_pht

    Y = build_stit(window, measure, t, rng)
    P = build_pht(window, measure, t, rng)
    ay, sy = _cell_stats(Y.cells, window, rng, thin)
    ap, sp = _cell_stats(P.cells, window, rng, thin)
    return len(Y.cells), len(P.cells), ay, sy, ap, sp


def meq_check(window, measure, t: float, reps: int, seed, thin: float = 1.0, threads=None,
              alpha: float = 0.01, sigmas: float = 3.0) -> Verdict:
    """Compare STIT and Poisson hyperplane tessellations at equal driving measure.

    Mean cell counts must agree within ``sigmas`` standard errors; pooled
    minus-sampled cell volumes and surface measures (perimeters in the
    plane) are compared by two-sample KS.  ``thin`` keeps each interior cell
    independently with that probability, which preserves the mean cell
    measure while weakening within-realization dependence.
    """
    res = _run(_meq_rep, reps, seed, (window, measure, t, thin), threads)
    ny = np.array([r[0] for r in res], dtype=float)
    npht = np.array([r[1] for r in res], dtype=float)
    se = math.sqrt(ny.var(ddof=1) / reps + npht.var(ddof=1) / reps) if reps > 1 else math.inf
    diff = ny.mean() - npht.mean()
    z = diff / se if se > 0 else (0.0 if diff == 0 else math.inf)
    parts = [Verdict("mean cell count (STIT - PHT)", z, 0.0, sigmas, "sigma", n=reps,
                     seed=_rng_of(seed), detail={"stit": ny.mean(), "pht": npht.mean()})]
    a_y = np.concatenate([r[2] for r in res]) if res else np.zeros(0)
    s_y = np.concatenate([r[3] for r in res]) if res else np.zeros(0)
    a_p = np.concatenate([r[4] for r in res]) if res else np.zeros(0)
    s_p = np.concatenate([r[5] for r in res]) if res else np.zeros(0)
    if len(a_y) and len(a_p):
        D, p = two_sample_ks(a_y, a_p)
        parts.append(Verdict("cell volume KS", p, 0.0, alpha, "pvalue", n=len(a_y) + len(a_p),
                             seed=_rng_of(seed), detail={"D": D, "n_stit": len(a_y),
                                                         "n_pht": len(a_p)}))
        D, p = two_sample_ks(s_y, s_p)
        parts.append(Verdict("cell surface KS", p, 0.0, alpha, "pvalue", n=len(s_y) + len(s_p),
                             seed=_rng_of(seed), detail={"D": D}))
    return Verdict.combine("typical cell coincidence", parts, _rng_of(seed))


def stit_functionals(Y, k: int, window) -> tuple:
    """Reference-point count and total k-measure of the k-maximal polytopes in ``window``.

    k-faces lying in the window boundary are artifacts of the truncation and
    are left out of the total measure.
    """
    objs = Y.maximal_polytopes(k)
    eps = REL_EPS * window.diameter
    total = 0.0
    hs = window.halfspaces()
    A = np.array([n for n, _ in hs])
    b = np.array([h for _, h in hs])
    for o in objs:
        V = np.asarray(o.vertices, dtype=float)
        on = np.abs(V @ A.T - b[None, :]) <= eps
        if len(V) > 1 and on.all(axis=0).any():
            continue
        total += o.measure
    return reference_point_count(objs, window), total


def _arrangement_vertices(hyperplanes, window, eps=None):
    """Index tuples of the d hyperplanes meeting in each vertex inside the open window."""
    d = window.dim
    if len(hyperplanes) < d:
        return np.zeros((0, d), dtype=int)
    if eps is None:
        eps = REL_EPS * window.diameter
    N = np.array([H.normal for H in hyperplanes], dtype=float)
    R = np.array([H.offset for H in hyperplanes], dtype=float)
    idx = np.array(list(itertools.combinations(range(len(hyperplanes)), d)), dtype=int)
    ok = np.abs(np.linalg.det(N[idx])) > 1e-12
    idx = idx[ok]
    if not len(idx):
        return idx
    X = np.linalg.solve(N[idx], R[idx][..., None])[..., 0]
    hs = window.halfspaces()
    A = np.array([n for n, _ in hs])
    b = np.array([h for _, h in hs])
    return idx[(X @ A.T - b[None, :] < -eps).all(axis=1)]


def arrangement_vertices_inside(hyperplanes, window: ConvexPolytope,
                                eps: Optional[float] = None) -> int:
    """Vertices of the hyperplane arrangement lying in the open window."""
    return len(_arrangement_vertices(hyperplanes, window, eps))


def pht_functionals(window, hyperplanes, k: int, marks=None, s_grid=None):
    """Reference k-face count and total k-measure of a Poisson arrangement in ``window``.

    Every vertex of a simple arrangement is the reference point of exactly
    ``C(d, k)`` k-faces and a clipped face has its reference point on the
    boundary, so the count is ``C(d, k)`` times the interior vertices.  The
    total measure is the sum of the window sections of the flats spanned by
    ``d - k`` hyperplanes.  Both agree with counting the faces returned by
    :func:`stitsim.pht.extract_faces`.

    With ``marks`` and ``s_grid`` the arrangement is thinned to the
    hyperplanes with mark ``<= s`` for each ``s``; a list of pairs is returned.
    """
    from .pht import flat_sections

    d = window.dim
    mult = math.comb(d, k)
    V = _arrangement_vertices(hyperplanes, window)
    F, meas = flat_sections(window, hyperplanes, k) if hyperplanes else (
        np.zeros((0, d - k), dtype=int), np.zeros(0))
    if marks is None:
        return mult * len(V), float(meas.sum())
    marks = np.asarray(marks, dtype=float)
    vt = marks[V].max(axis=1) if len(V) else np.zeros(0)
    ft = marks[F].max(axis=1) if len(F) else np.zeros(0)
    return [(mult * int((vt <= s).sum()), float(meas[ft <= s].sum())) for s in s_grid]


def _fkeq_stit_rep(rng, window, measure, t, k):
    from .mnw import build_stit

    return stit_functionals(build_stit(window, measure, t, rng), k, window)


def _fkeq_pht_rep(rng, window, measure, t, k, s_grid):
    from .pht import draw_hyperplanes

    hs = draw_hyperplanes(window, measure, t, rng)
    marks = rng.random(len(hs)) * t
    return pht_functionals(window, hs, k, marks, s_grid)


def _time_integral(s_grid, F, exponent):
    """``int_0^t F(s)/s ds`` by the trapezoid rule; the s=0 end uses ``F ~ s^exponent``."""
    G = np.asarray(F, dtype=float) / np.asarray(s_grid)
    g0 = G[0] if exponent == 1 else 0.0
    s = np.concatenate(([0.0], s_grid))
    g = np.concatenate(([g0], G))
    return float(np.sum(0.5 * (g[1:] + g[:-1]) * np.diff(s)))


def fkeq_check(window, measure, t: float, k: int, reps: int, seed, n_grid: int = 20,
               threads=None, rel_tol: float = 0.03, pht_reps: Optional[int] = None) -> Verdict:
    """Compare STIT k-maximal-polytope functionals with the weighted PHT time integral.

    The STIT side is ``E`` of the count (by reference points) and of the
    total k-measure; the PHT side is
    ``(d-k) 2^(d-k-1) int_0^t (1/s) F_k(PHT(s)) ds`` with the Poisson
    tessellations for all ``s`` coupled by thinning one realization at time
    ``t``, on an ``n_grid``-point trapezoid grid.  The estimate obtained on
    the half grid must differ by less than 0.5%.  The Poisson side is cheap
    and noisy, so it may use more replications (``pht_reps``).
    """
    from .analytic import incidence_coefficient

    d = window.dim
    coef = incidence_coefficient(d, k)
    s_grid = [t * (j + 1) / n_grid for j in range(n_grid)]
    pht_reps = reps if pht_reps is None else pht_reps
    stit = np.array(_run(_fkeq_stit_rep, reps, seed, (window, measure, t, k), threads),
                    dtype=float)
    seed2 = None if _rng_of(seed) is None else int(seed) + 2_000_003
    pht = np.array(_run(_fkeq_pht_rep, pht_reps, seed2 if seed2 is not None else seed,
                        (window, measure, t, k, tuple(s_grid)), threads), dtype=float)
    parts = []
    for col, name, expo in ((0, "count", d), (1, "total measure", d - k)):
        lhs = stit[:, col]
        per_rep = np.array([coef * _time_integral(s_grid, pht[r, :, col], expo)
                            for r in range(pht_reps)])
        half = np.array([coef * _time_integral(s_grid[1::2], pht[r, 1::2, col], expo)
                         for r in range(pht_reps)])
        rhs = float(per_rep.mean())
        parts.append(Verdict(f"k={k} {name}: STIT vs weighted PHT integral", float(lhs.mean()),
                             rhs, rel_tol, "rel", n=reps + pht_reps, seed=_rng_of(seed),
                             detail={"se_stit": float(lhs.std(ddof=1) / math.sqrt(reps)),
                                     "se_pht": float(per_rep.std(ddof=1)
                                                     / math.sqrt(pht_reps))}))
        shift = abs(float(half.mean()) - rhs) / abs(rhs) if rhs else 0.0
        parts.append(Verdict(f"k={k} {name}: grid refinement shift", shift, 0.0, 0.005, "max",
                             n=pht_reps, seed=_rng_of(seed)))
    return Verdict.combine(f"facet measure identity (d={d}, k={k})", parts, _rng_of(seed))


def _stit_intensity_rep(rng, window, measure, t, k):
    from .mnw import build_stit

    Y = build_stit(window, measure, t, rng)
    return reference_point_count(Y.maximal_polytopes(k), window)


def _pht_intensity_rep(rng, window, measure, t, k, cross_check=False):
    """Reference k-face count of a PHT realization.

    With ``cross_check`` the faces are also extracted and counted directly.
    """
    from .pht import PhtTessellation, draw_hyperplanes, extract_faces

    H = draw_hyperplanes(window, measure, t, rng)
    count = pht_functionals(window, H, k)[0]
    if not cross_check:
        return count
    faces = extract_faces(PhtTessellation(window, t, measure, H, [window]), k) if H else []
    return count, reference_point_count(faces, window)


def intensity_ratio_check(window, measure, t: float, k: int, reps_stit: int, reps_pht: int,
                          seed, rel_tol: float, threads=None, n_cross_check: int = 50) -> Verdict:
    """Ratio of the STIT k-maximal-polytope intensity to the PHT k-face intensity.

    Both intensities are estimated without edge bias by reference-point
    counting; the target is ``(d-k)/d * 2^(d-k-1)``.
    """
    from .analytic import intensity_coefficient

    d = window.dim
    vol = window.volume
    a = np.array(_run(_stit_intensity_rep, reps_stit, seed, (window, measure, t, k), threads),
                 dtype=float)
    seed2 = None if _rng_of(seed) is None else int(seed) + 1_000_003
    seed2 = seed2 if seed2 is not None else seed
    b = np.array(_run(_pht_intensity_rep, reps_pht, seed2, (window, measure, t, k), threads),
                 dtype=float)
    # the first realizations again, with the faces extracted explicitly
    pairs = _run(_pht_intensity_rep, min(n_cross_check, reps_pht), seed2,
                 (window, measure, t, k, True), threads)
    agree = sum(a_ == b_ for a_, b_ in pairs)
    la, lb = a.mean() / vol, b.mean() / vol
    ratio = la / lb
    se = ratio * math.sqrt(a.var(ddof=1) / reps_stit / a.mean() ** 2
                           + b.var(ddof=1) / reps_pht / b.mean() ** 2)
    name = f"intensity ratio d={d} k={k}"
    parts = [
        Verdict(name, float(ratio), intensity_coefficient(d, k), rel_tol, "rel",
                n=reps_stit + reps_pht, seed=_rng_of(seed),
                detail={"stit_intensity": la, "pht_intensity": lb, "ratio_se": se}),
        Verdict("PHT face count equals vertex identity", agree, len(pairs), 0, "all",
                n=len(pairs), seed=_rng_of(seed)),
    ]
    return Verdict.combine(name, parts, _rng_of(seed))
