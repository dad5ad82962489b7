import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stitsim.geometry import Hyperplane, box
from stitsim.measure import HyperplaneMeasure, axis_parallel, hitting_mass, isotropic
from stitsim.mnw import rescale
from stitsim.pht import (
    PhtTessellation,
    build_pht,
    draw_hyperplanes,
    extract_faces,
    flat_sections,
    interior_crossings_2d,
    pht_json,
    split_cells,
)
from stitsim.runner import run_replications
from stitsim.stats import (
    arrangement_vertices_inside,
    ht_weights,
    ks_distance,
    minus_sample,
    pht_functionals,
    reference_point_count,
)

ISO2 = HyperplaneMeasure(isotropic(2))
ISO3 = HyperplaneMeasure(isotropic(3))
SQ = box((0, 0), (1, 1))
W2 = box((0, 0), (5, 5))
W3 = box((0, 0, 0), (3, 3, 3))


def _pht(window, hyperplanes, cells=True):
    out = split_cells(window, hyperplanes) if cells else [window]
    return PhtTessellation(window, 1.0, None, list(hyperplanes), out)


def test_zero_intensity():
    Y = build_pht(W2, ISO2, 0.0, np.random.default_rng(0))
    assert Y.hyperplanes == [] and len(Y.cells) == 1
    assert Y.faces(1) == []


def test_mean_number_of_lines():
    # t * mass = pi * 4/pi = 4 lines hit the unit square on average
    rng = np.random.default_rng(1)
    n = np.array([len(draw_hyperplanes(SQ, ISO2, math.pi, rng)) for _ in range(100_000)])
    assert abs(n.mean() - 4.0) < 4 * math.sqrt(4.0 / len(n))
    assert n.var() == pytest.approx(4.0, rel=0.05)


def test_single_and_crossing_lines():
    H1 = Hyperplane.make((1, 0), 0.5)
    H2 = Hyperplane.make((0, 1), 0.5)
    assert len(extract_faces(_pht(SQ, [H1]), 1)) == 1
    Y = _pht(SQ, [H1, H2])
    edges = extract_faces(Y, 1)
    assert len(edges) == 4 and len(Y.cells) == 4
    assert sum(e.measure for e in edges) == pytest.approx(2.0)
    assert all(e.boundary for e in edges)


def test_face_dimension_bounds():
    Y = _pht(SQ, [Hyperplane.make((1, 0), 0.5)])
    with pytest.raises(ValueError):
        extract_faces(Y, 0)
    with pytest.raises(ValueError):
        extract_faces(Y, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.2, 2.0))
def test_euler_counts_2d(seed, t):
    Y = build_pht(W2, ISO2, t, np.random.default_rng(seed))
    n, c = len(Y.hyperplanes), interior_crossings_2d(W2, Y.hyperplanes)
    assert len(Y.cells) == 1 + n + c
    assert len(Y.faces(1)) == n + 2 * c
    assert arrangement_vertices_inside(Y.hyperplanes, W2) == c
    assert math.fsum(cell.volume for cell in Y.cells) == pytest.approx(25.0, rel=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.3, 1.5))
def test_cells_tile_window_3d(seed, t):
    Y = build_pht(W3, ISO3, t, np.random.default_rng(seed))
    assert math.fsum(cell.volume for cell in Y.cells) == pytest.approx(27.0, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 1), (3, 1), (3, 2)]))
def test_functionals_match_extracted_faces(seed, dk):
    d, k = dk
    W, m = (W2, ISO2) if d == 2 else (W3, ISO3)
    Y = build_pht(W, m, 1.0, np.random.default_rng(seed), cells=False)
    faces = extract_faces(Y, k)
    count, total = pht_functionals(W, Y.hyperplanes, k)
    assert count == reference_point_count(faces, W)
    assert total == pytest.approx(math.fsum(f.measure for f in faces), rel=1e-9, abs=1e-12)
    if Y.hyperplanes:
        _, meas = flat_sections(W, Y.hyperplanes, k)
        assert meas.sum() == pytest.approx(total)


def test_functionals_with_marks_thin_the_arrangement():
    rng = np.random.default_rng(2)
    hs = draw_hyperplanes(W2, ISO2, 1.5, rng)
    marks = rng.random(len(hs))
    grid = [0.3, 0.7, 1.0]
    for s, (cnt, tot) in zip(grid, pht_functionals(W2, hs, 1, marks, grid)):
        kept = [H for H, u in zip(hs, marks) if u <= s]
        assert (cnt, pytest.approx(tot)) == pht_functionals(W2, kept, 1)


def test_only_filter_keeps_carried_faces():
    rng = np.random.default_rng(3)
    Y = build_pht(W3, ISO3, 1.0, rng, cells=False)
    assert len(Y.hyperplanes) >= 3
    all_edges = extract_faces(Y, 1)
    sub = extract_faces(Y, 1, only=[0, 1, 2])
    expected = [f for f in all_edges if set(f.carriers) <= {0, 1, 2}]
    assert len(sub) == len(expected)
    assert sorted(f.measure for f in sub) == pytest.approx(sorted(f.measure for f in expected))


def _edge_rep(rng, window, s):
    Y = build_pht(window, ISO2, s, rng, cells=False)
    edges = minus_sample(extract_faces(Y, 1), window)
    return [e.measure for e in edges], ht_weights(edges, window)


def test_typical_edge_is_exponential():
    # interior edges at intensity s, edge-corrected: Exp(gamma1 * s) with gamma1 = 2/pi
    s, window = 2.0, box((0, 0), (30, 30))
    res = run_replications(_edge_rep, 120, 15, (window, s))
    L = np.concatenate([r[0] for r in res])
    w = np.concatenate([r[1] for r in res])
    assert len(L) >= 100_000
    D, _ = ks_distance(L, lambda x: -np.expm1(-2 / math.pi * s * np.asarray(x)), w)
    assert D < 0.02


def test_interior_edges_meet_four_plates():
    rng = np.random.default_rng(4)
    Y = build_pht(W3, ISO3, 1.5, rng, cells=False)
    plates = extract_faces(Y, 2)
    key = lambda p: tuple(np.round(p, 9))
    plate_edges = {}
    for p in plates:
        V = p.vertices
        for a, b in zip(V, V[1:] + V[:1]):
            e = tuple(sorted((key(a), key(b))))
            plate_edges[e] = plate_edges.get(e, 0) + 1
    interior = minus_sample(extract_faces(Y, 1), W3)
    assert interior
    for e in interior:
        assert plate_edges[tuple(sorted(key(v) for v in e.vertices))] == 4


def test_axis_parallel_grid():
    Y = build_pht(W2, HyperplaneMeasure(axis_parallel(2)), 2.0, np.random.default_rng(5))
    assert all(H.normal in ((1.0, 0.0), (0.0, 1.0)) for H in Y.hyperplanes)
    nx = sum(H.normal == (1.0, 0.0) for H in Y.hyperplanes)
    assert len(Y.cells) == (nx + 1) * (len(Y.hyperplanes) - nx + 1)


def test_rescale_and_json():
    Y = build_pht(W2, ISO2, 1.0, np.random.default_rng(6))
    Z = rescale(Y, 3.0)
    assert math.fsum(c.volume for c in Z.cells) == pytest.approx(225.0)
    assert sum(f.measure for f in Z.faces(1)) == pytest.approx(
        3.0 * sum(f.measure for f in Y.faces(1)))
    obj = json.loads(pht_json(Y))
    assert len(obj["hyperplanes"]) == len(Y.hyperplanes)
    assert len(obj["faces_by_dim"]["1"]) == len(Y.faces(1))


def test_mass_scales_with_intensity():
    rng = np.random.default_rng(7)
    counts = [len(draw_hyperplanes(W3, ISO3, 0.5, rng)) for _ in range(4000)]
    lam = 0.5 * hitting_mass(ISO3, W3)
    assert abs(np.mean(counts) - lam) < 4 * math.sqrt(lam / len(counts))
