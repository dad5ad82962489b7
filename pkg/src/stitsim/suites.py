"""Verification experiments at their reference sample sizes.

Each public ``check_*`` function runs one experiment and returns a
:class:`~stitsim.stats.Verdict`.  ``SUITES`` maps the command-line suite
names to lists of such checks.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import analytic
from .geometry import (
    ConvexPolytope,
    Hyperplane,
    NoSplitError,
    box,
    clip_halfspace,
    cut_by_hyperplane,
    intrinsic_volumes,
    unit_vector,
)
from .measure import HyperplaneMeasure, axis_parallel, isotropic
from .mnw import build_stit, iterate, rescale
from .runner import run_replications
from .stats import (
    Verdict,
    effective_size,
    fkeq_check,
    generator_check,
    ht_weights,
    intensity_ratio_check,
    ks_distance,
    meq_check,
    minus_sample,
    two_sample_ks,
)

DEFAULT_SEED = 20240607


def _measure(d, kind="isotropic"):
    return HyperplaneMeasure(isotropic(d) if kind == "isotropic" else axis_parallel(d))


def _square(side, d=2):
    return box((0.0,) * d, (float(side),) * d)


# ---------------------------------------------------------------------------
# typical maximal segments

def _segment_rep(rng, window, measure, t):
    Y = build_stit(window, measure, t, rng)
    segs = minus_sample(Y.maximal_polytopes(1), window)
    w = ht_weights(segs, window)
    lengths = np.array([s.measure for s in segs])
    births = np.array([s.birth_time for s in segs])
    return lengths, births, w


@lru_cache(maxsize=4)
def segment_sample(d: int, side: float, t: float, reps: int, seed: int, threads=None):
    """Pooled minus-sampled 1-dimensional maximal polytopes with edge-correction weights.

    Returns ``(lengths, birth_times, weights, per_rep_counts)``.
    """
    window = _square(side, d)
    res = run_replications(_segment_rep, reps, seed, (window, _measure(d), t), threads)
    L = np.concatenate([r[0] for r in res])
    B = np.concatenate([r[1] for r in res])
    W = np.concatenate([r[2] for r in res])
    return L, B, W, np.array([len(r[0]) for r in res])


def _weighted_mean_se(x, w, counts):
    # delta method over replications (objects within a replication are dependent)
    edges = np.concatenate(([0], np.cumsum(counts)))
    sx = np.array([np.sum(w[a:b] * x[a:b]) for a, b in zip(edges[:-1], edges[1:])])
    sw = np.array([np.sum(w[a:b]) for a, b in zip(edges[:-1], edges[1:])])
    m = sx.sum() / sw.sum()
    n = len(sx)
    se = math.sqrt(n / (n - 1.0) * np.sum((sx - m * sw) ** 2)) / sw.sum() if n > 1 else math.nan
    return float(m), se


def check_isegment_mean(seed=DEFAULT_SEED, reps=200, side=200.0, t=1.0, threads=None):
    """Mean typical I-segment length in the plane against pi/t (3% tolerance)."""
    L, _, W, counts = segment_sample(2, side, t, reps, seed, threads)
    m, se = _weighted_mean_se(L, W, counts)
    return Verdict("I-segment mean length (d=2)", m, analytic.isegment_mean(2, t), 0.03, "rel",
                   n=len(L), seed=seed, detail={"se": se, "window_side": side, "reps": reps})


def check_isegment_law(seed=DEFAULT_SEED, reps=200, side=200.0, t=1.0, threads=None):
    """KS distance of I-segment lengths to the closed-form law (D < 0.02, n >= 1e5)."""
    L, _, W, _ = segment_sample(2, side, t, reps, seed, threads)
    D, p = ks_distance(L, lambda x: analytic.isegment_cdf_array(2, t, x), W)
    parts = [
        Verdict("I-segment length KS distance (d=2)", D, 0.0, 0.02, "max", n=len(L), seed=seed,
                detail={"p": p, "n_eff": effective_size(W)}),
        Verdict("I-segment sample size", float(len(L)), 0.0, 1e5, "min", n=len(L), seed=seed),
    ]
    return Verdict.combine("I-segment length law (d=2)", parts, seed)


def check_birth_times(seed=DEFAULT_SEED, reps=200, side=200.0, t=1.0, threads=None):
    """KS distance of I-segment birth times to the density 2s/t^2 (D < 0.02, n >= 1e5)."""
    L, B, W, _ = segment_sample(2, side, t, reps, seed, threads)
    D, p = ks_distance(B, lambda s: analytic.birth_time_cdf(2, t, s), W)
    parts = [
        Verdict("birth-time KS distance (d=2)", D, 0.0, 0.02, "max", n=len(B), seed=seed,
                detail={"p": p, "mean": float(np.sum(W * B) / W.sum()),
                        "expected_mean": analytic.birth_time_mean(2, t)}),
        Verdict("birth-time sample size", float(len(B)), 0.0, 1e5, "min", n=len(B), seed=seed),
    ]
    return Verdict.combine("I-segment birth-time law (d=2)", parts, seed)


def check_segment_moments_3d(seed=DEFAULT_SEED, reps=4, side=60.0, t=1.0, threads=None):
    """Mean (5%) and variance (10%) of 1-dimensional maximal polytopes in space.

    The variance target is 24/t^2.
    """
    L, _, W, counts = segment_sample(3, side, t, reps, seed, threads)
    m, se = _weighted_mean_se(L, W, counts)
    m2, _ = _weighted_mean_se(L * L, W, counts)
    var = m2 - m * m
    parts = [
        Verdict("1-dim maximal polytope mean length (d=3)", m, 3.0 / t, 0.05, "rel", n=len(L),
                seed=seed, detail={"se": se}),
        Verdict("1-dim maximal polytope length variance (d=3)", var, 24.0 / t ** 2, 0.10, "rel",
                n=len(L), seed=seed,
                detail={"second_moment": m2, "closed_form_variance": analytic.isegment_variance(3, t),
                        "closed_form_second_moment": analytic.isegment_moment(3, t, 2)}),
        Verdict("sample size", float(len(L)), 0.0, 3e4, "min", n=len(L), seed=seed),
    ]
    return Verdict.combine("segment moments (d=3)", parts, seed,
                           {"window_side": side, "reps": reps})


# ---------------------------------------------------------------------------
# STIT against Poisson hyperplane comparisons

def check_meq(seed=DEFAULT_SEED, reps=1000, side=20.0, t=1.0, thin=0.1, threads=None):
    """Typical cell coincidence of STIT and PHT, isotropic and axis-parallel."""
    parts = []
    for i, kind in enumerate(("isotropic", "axis-parallel")):
        v = meq_check(_square(side), _measure(2, kind), t, reps, seed + i, thin=thin,
                      threads=threads)
        v.name = f"typical cell coincidence ({kind})"
        parts.append(v)
    return Verdict.combine("typical cell coincidence", parts, seed)


def check_intensity_ratio(seed=DEFAULT_SEED, threads=None, reps_2d=(8000, 60000),
                          reps_3d=(3000, 60000), side_2d=20.0, side_3d=10.0):
    """Maximal polytope intensities over PHT face intensities: 1/2 (d=2, 2%), 1/3 (d=3, 3%)."""
    a = intensity_ratio_check(_square(side_2d), _measure(2), 1.0, 1, reps_2d[0], reps_2d[1],
                              seed, 0.02, threads)
    b = intensity_ratio_check(_square(side_3d, 3), _measure(3), 1.0, 2, reps_3d[0], reps_3d[1],
                              seed + 1, 0.03, threads)
    return Verdict.combine("maximal polytope intensity coefficient", [a, b], seed)


def check_fkeq(seed=DEFAULT_SEED, threads=None, reps_2d=(2000, 8000), reps_3d=(1500, 30000),
               side_3d=6.0):
    """STIT count and total measure against the weighted PHT time integral (3%).

    ``reps_2d`` and ``reps_3d`` are (STIT, PHT) replication counts.
    """
    a = fkeq_check(_square(20.0), _measure(2), 1.0, 1, reps_2d[0], seed, threads=threads,
                   pht_reps=reps_2d[1])
    b = fkeq_check(_square(side_3d, 3), _measure(3), 1.0, 2, reps_3d[0], seed + 1,
                   threads=threads, pht_reps=reps_3d[1])
    return Verdict.combine("facet measure identity", [a, b], seed)


def check_generator(seed=DEFAULT_SEED, reps=10_000, side=20.0, threads=None):
    grid = [0.1 * (i + 1) for i in range(10)]
    return generator_check(_square(side), _measure(2), grid, reps, seed, threads)


# ---------------------------------------------------------------------------
# iteration

def _thinned_lengths(Y, rng, q):
    L = np.array([f.facet.measure for f in Y.facets])
    return L[rng.random(len(L)) < q]


def _stit_rep(rng, window, measure, t, q):
    Y = build_stit(window, measure, t, rng)
    return len(Y.cells), float(Y.facet_measures().sum()), _thinned_lengths(Y, rng, q)


def _additive_rep(rng, window, measure, s, u, q):
    frame = build_stit(window, measure, s, rng)
    Y = iterate(frame, lambda c, r: build_stit(c, measure, u, r), rng)
    return len(Y.cells), float(Y.facet_measures().sum()), _thinned_lengths(Y, rng, q)


def _stability_rep(rng, window, measure, t, q):
    half = ConvexPolytope(tuple(tuple(x / 2.0 for x in v) for v in window.vertices), window.faces)
    frame = build_stit(half, measure, t, rng)
    Y = rescale(iterate(frame, lambda c, r: build_stit(c, measure, t, r), rng), 2.0)
    return len(Y.cells), float(Y.facet_measures().sum()), _thinned_lengths(Y, rng, q)


def _compare(name, ref, alt, window, key, rel_tol, seed, alpha=0.01):
    vol = window.volume
    i = 0 if key == "cell intensity" else 1
    a = np.array([r[i] for r in ref], dtype=float) / vol
    b = np.array([r[i] for r in alt], dtype=float) / vol
    la = np.concatenate([r[2] for r in ref])
    lb = np.concatenate([r[2] for r in alt])
    D, p = two_sample_ks(lb, la)
    se = math.sqrt(a.var(ddof=1) / len(a) + b.var(ddof=1) / len(b))
    parts = [
        Verdict(f"{key} (reference {a.mean():.5g})", float(b.mean()), float(a.mean()), rel_tol,
                "rel", n=len(a) + len(b), seed=seed, detail={"se_difference": se}),
        Verdict("I-segment length two-sample KS", p, 0.0, alpha, "pvalue", n=len(la) + len(lb),
                seed=seed, detail={"D": D, "n_ref": len(la), "n_alt": len(lb)}),
    ]
    return Verdict.combine(name, parts, seed)


def check_time_additivity(seed=DEFAULT_SEED, reps=400, side=20.0, q=0.25, threads=None):
    """Y(0.5) nested with Y(0.5) against Y(1): cell intensity (2%) and length law."""
    window = _square(side)
    m = _measure(2)
    ref = run_replications(_stit_rep, reps, seed, (window, m, 1.0, q), threads)
    alt = run_replications(_additive_rep, reps, seed + 1, (window, m, 0.5, 0.5, q), threads)
    return _compare("time additivity", ref, alt, window, "cell intensity", 0.02, seed)


def check_stability(seed=DEFAULT_SEED, reps=400, side=20.0, q=0.25, threads=None):
    """2 (Y nested with Y) on the half window against Y: surface intensity (2%) and length law."""
    window = _square(side)
    m = _measure(2)
    ref = run_replications(_stit_rep, reps, seed, (window, m, 1.0, q), threads)
    # seed + 2: with seed + 1 the rescaled half-window run would replay the additivity run
    alt = run_replications(_stability_rep, reps, seed + 2, (window, m, 1.0, q), threads)
    return _compare("iteration stability (m=2)", ref, alt, window, "surface intensity", 0.02,
                    seed)


# ---------------------------------------------------------------------------
# incidences

def _incidence_rep(rng, window, measure, t):
    from scipy.spatial import cKDTree

    from .pht import build_pht, extract_faces

    Y = build_pht(window, measure, t, rng, cells=False)
    edges = extract_faces(Y, 1)
    plates = extract_faces(Y, 2)
    tol = 1e-7 * window.diameter
    segs = []
    for f in plates:
        v = f.vertices
        for i in range(len(v)):
            segs.append((v[i], v[(i + 1) % len(v)]))
    if not segs:
        return 0, 0, []
    S = np.asarray(segs, dtype=float)
    tree = cKDTree(S.mean(axis=1))
    bad = []
    n_interior = 0
    for e in edges:
        if e.boundary:
            continue
        n_interior += 1
        a, b = np.asarray(e.vertices)
        hits = 0
        for j in tree.query_ball_point(0.5 * (a + b), tol):
            p, q = S[j]
            if ((np.abs(p - a).max() <= tol and np.abs(q - b).max() <= tol)
                    or (np.abs(p - b).max() <= tol and np.abs(q - a).max() <= tol)):
                hits += 1
        if hits != 4:
            bad.append(hits)
    return n_interior, len(bad), bad


def check_incidence(seed=DEFAULT_SEED, reps=100, side=10.0, t=1.0, threads=None):
    """Every interior edge of a spatial PHT lies on exactly (d-k) 2^(d-k-1) = 4 plates."""
    res = run_replications(_incidence_rep, reps, seed, (_square(side, 3), _measure(3), t),
                           threads)
    n = sum(r[0] for r in res)
    bad = sum(r[1] for r in res)
    return Verdict("interior edges not bordering exactly 4 plates", float(bad), 0.0, 0.0, "abs",
                   n=n, seed=seed,
                   detail={"expected_incidence": analytic.incidence_coefficient(3, 1),
                           "interior_edges": n, "realizations": reps})


# ---------------------------------------------------------------------------
# geometry oracle

def random_clipped_polytope(rng, d: int, n_cuts: int = 4) -> ConvexPolytope:
    """A unit box clipped by random halfspaces through interior points."""
    c = box((0.0,) * d, (1.0,) * d)
    for _ in range(n_cuts):
        u = unit_vector(rng.normal(size=d))
        x = 0.15 + 0.7 * rng.random(d)
        piece = clip_halfspace(c, Hyperplane.make(u, float(np.dot(u, x))), -1)
        if piece is not None and piece.volume > 0.05:
            c = piece
    return c


def _regular_polygon(n):
    a = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    return np.column_stack([np.cos(a), np.sin(a)])


def _minkowski_polygon_area(P, Q):
    """Area of the Minkowski sum of two CCW convex polygons by merging edge directions."""
    def edges(V):
        E = np.roll(V, -1, axis=0) - V
        ang = np.mod(np.arctan2(E[:, 1], E[:, 0]), 2 * np.pi)
        return E, ang

    start = P[np.lexsort((P[:, 0], P[:, 1]))[0]] + Q[np.lexsort((Q[:, 0], Q[:, 1]))[0]]
    Ep, ap = edges(np.roll(P, -int(np.lexsort((P[:, 0], P[:, 1]))[0]), axis=0))
    Eq, aq = edges(np.roll(Q, -int(np.lexsort((Q[:, 0], Q[:, 1]))[0]), axis=0))
    E = np.vstack([Ep, Eq])
    order = np.argsort(np.concatenate([ap, aq]), kind="mergesort")
    V = start + np.vstack([[0.0, 0.0], np.cumsum(E[order], axis=0)[:-1]])
    x, y = V[:, 0], V[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def steiner_fit_2d(c: ConvexPolytope, n_gon: int = 65536, eps_grid=None):
    """``(V1, V2)`` from a quadratic fit of ``Area(c + eps P)`` with ``P`` a fine regular polygon."""
    eps_grid = np.linspace(0.01, 0.1, 10) if eps_grid is None else np.asarray(eps_grid)
    P = np.asarray(c.vertices, dtype=float)
    Q = _regular_polygon(n_gon)
    area_q = 0.5 * n_gon * math.sin(2 * math.pi / n_gon)
    y = np.array([_minkowski_polygon_area(P, e * Q) for e in eps_grid]) - area_q * eps_grid ** 2
    A = np.column_stack([np.ones_like(eps_grid), eps_grid])
    coef = np.linalg.lstsq(A, y, rcond=None)[0]
    return coef[1] / 2.0, coef[0]


@lru_cache(maxsize=None)
def _icosphere(level):
    t = (1 + 5 ** 0.5) / 2
    V = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
         (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    V = [np.array(v, float) / np.linalg.norm(v) for v in V]
    F = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
         (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
         (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    for _ in range(level):
        cache = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = V[a] + V[b]
                V.append(m / np.linalg.norm(m))
                cache[key] = len(V) - 1
            return cache[key]

        nf = []
        for a, b, c in F:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            nf += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        F = nf
    return np.array(V)


def steiner_fit_3d(c: ConvexPolytope, levels=(4, 5), eps_grid=None):
    """``(V1, V2, V3)`` from fits of ``Vol(c + eps P)`` for icosphere approximations ``P``.

    The fits for two refinement levels are Richardson-extrapolated
    (the error of an inscribed icosphere decays by a factor 4 per level).
    """
    from scipy.spatial import ConvexHull

    eps_grid = np.linspace(0.02, 0.12, 4) if eps_grid is None else np.asarray(eps_grid)
    V = np.asarray(c.vertices, dtype=float)
    vol = c.volume
    fits = []
    for lev in levels:
        S = _icosphere(lev)
        vol_s = ConvexHull(S).volume
        y = []
        for e in eps_grid:
            pts = (V[:, None, :] + e * S[None, :, :]).reshape(-1, 3)
            y.append(ConvexHull(pts).volume - vol - vol_s * e ** 3)
        A = np.column_stack([eps_grid, eps_grid ** 2])
        a, b = np.linalg.lstsq(A, np.array(y), rcond=None)[0]
        fits.append((b / math.pi, a / 2.0))
    (v1a, v2a), (v1b, v2b) = fits
    return (4 * v1b - v1a) / 3, (4 * v2b - v2a) / 3, vol


def check_geometry(seed=DEFAULT_SEED, n_polytopes=100, n_splits=10_000):
    """Intrinsic volumes against Steiner fits (1e-6 in 2D, 1e-3 in 3D); cut additivity 1e-9."""
    rng = np.random.default_rng(seed)
    err2 = err3 = 0.0
    for _ in range(n_polytopes):
        c = random_clipped_polytope(rng, 2)
        _, v1, v2 = intrinsic_volumes(c)
        f1, f2 = steiner_fit_2d(c)
        err2 = max(err2, abs(f1 - v1) / v1, abs(f2 - v2) / v2)
    for _ in range(n_polytopes):
        c = random_clipped_polytope(rng, 3)
        _, v1, v2, v3 = intrinsic_volumes(c)
        f1, f2, _ = steiner_fit_3d(c)
        err3 = max(err3, abs(f1 - v1) / v1, abs(f2 - v2) / v2)
    worst = 0.0
    done = 0
    while done < n_splits:
        d = 2 + done % 2
        c = random_clipped_polytope(rng, d, n_cuts=int(rng.integers(0, 5)))
        for _ in range(4):
            u = unit_vector(rng.normal(size=d))
            x = np.asarray(c.vertices).mean(axis=0) + 0.2 * (rng.random(d) - 0.5)
            try:
                plus, minus, _ = cut_by_hyperplane(c, Hyperplane.make(u, float(np.dot(u, x))))
            except NoSplitError:
                continue
            worst = max(worst, abs(plus.volume + minus.volume - c.volume) / c.volume)
            done += 1
            c = plus if plus.volume > minus.volume else minus
    parts = [
        Verdict("intrinsic volumes vs Steiner fit (d=2), max rel. error", err2, 0.0, 1e-6, "max",
                n=n_polytopes, seed=seed),
        Verdict("intrinsic volumes vs Steiner fit (d=3), max rel. error", err3, 0.0, 1e-3, "max",
                n=n_polytopes, seed=seed),
        Verdict("cut volume additivity, max rel. error", worst, 0.0, 1e-9, "max", n=done,
                seed=seed),
    ]
    return Verdict.combine("geometry oracle", parts, seed)


# ---------------------------------------------------------------------------
# analytic self-consistency

def _mixture_integral(d, t, x):
    from scipy.integrate import quad

    g = analytic.gamma1(d)
    f = lambda s: g * s * math.exp(-g * s * x) * d * s ** (d - 1) / t ** d  # noqa: E731
    return quad(f, 0.0, t, epsabs=0.0, epsrel=1e-13, limit=200)[0]


def check_analytic(ts=(0.5, 1.0, 2.0)):
    """Closed-form density against the mixture integral, normalization and tail constant."""
    from scipy.integrate import quad

    worst_mix = worst_norm = worst_tail = 0.0
    grid = np.logspace(-3, 3, 61)
    for d in (2, 3):
        for t in ts:
            for x in grid:
                a = analytic.isegment_density(d, t, float(x))
                b = _mixture_integral(d, t, float(x))
                worst_mix = max(worst_mix, abs(a - b) / b)
            f = lambda x: analytic.isegment_density(d, t, x)  # noqa: E731
            knots = [0.0, 1.0 / t, 10.0 / t, 100.0 / t]
            total = sum(quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=400)[0]
                        for a, b in zip(knots, knots[1:]))
            total += quad(f, knots[-1], np.inf, epsabs=0.0, epsrel=1e-12, limit=400)[0]
            worst_norm = max(worst_norm, abs(total - 1.0))
            x = 1e3 / t
            lim = analytic.tail_constant(d, t)
            worst_tail = max(worst_tail, abs(x ** (d + 1) * f(x) - lim) / lim)
    parts = [
        Verdict("closed form vs mixture quadrature, max rel. error", worst_mix, 0.0, 1e-8, "max",
                n=2 * len(ts) * len(grid)),
        Verdict("density normalization, max abs. error", worst_norm, 0.0, 1e-8, "max",
                n=2 * len(ts)),
        Verdict("tail constant at x=1e3/t, max rel. error", worst_tail, 0.0, 1e-4, "max",
                n=2 * len(ts)),
    ]
    return Verdict.combine("analytic self-consistency", parts)


# ---------------------------------------------------------------------------
# mixture sampler

def _mixture_rep(rng, d, t, n):
    m = _measure(d)
    out = []
    for _ in range(n):
        f, s = analytic.sample_typical_mixture(1, d, t, m, rng)
        out.append((f.measure, s))
    return out


def check_mixture(seed=DEFAULT_SEED, n=100_000, t=1.0, threads=None, chunk=500):
    """Samples of the mixture representation against the time and length laws (KS < 0.02)."""
    reps = max(1, n // chunk)
    res = run_replications(_mixture_rep, reps, seed, (2, t, chunk), threads)
    pairs = np.array([p for r in res for p in r])
    L, S = pairs[:, 0], pairs[:, 1]
    D1, _ = ks_distance(S, lambda s: analytic.birth_time_cdf(2, t, s))
    D2, _ = ks_distance(L, lambda x: analytic.isegment_cdf_array(2, t, x))
    # conditional law: lengths scaled by gamma1 * s are standard exponential
    D3, _ = ks_distance(L * analytic.gamma1(2) * S, lambda y: 1.0 - np.exp(-np.asarray(y)))
    parts = [Verdict("mixing time KS", D1, 0.0, 0.02, "max", n=len(S), seed=seed),
             Verdict("length KS against closed form", D2, 0.0, 0.02, "max", n=len(L), seed=seed),
             Verdict("conditional exponential law KS", D3, 0.0, 0.02, "max", n=len(L), seed=seed)]
    return Verdict.combine("mixture representation", parts, seed)


SUITES = {
    "lengths": [check_isegment_mean, check_isegment_law, check_segment_moments_3d],
    "birthtime": [check_birth_times],
    "meq": [check_meq],
    "fkeq": [check_intensity_ratio, check_fkeq],
    "mixture": [check_mixture],
    "stability": [check_time_additivity, check_stability],
    "generator": [check_generator],
    "incidence": [check_incidence],
    "geometry": [check_geometry],
    "analytic": [check_analytic],
}
SUITES["all"] = [f for name in ("analytic", "geometry", "lengths", "birthtime", "meq", "fkeq",
                                "mixture", "stability", "generator", "incidence")
                 for f in SUITES[name]]
