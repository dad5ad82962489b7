import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sst

from stitsim.geometry import box, polygon
from stitsim.stats import (
    EmpiricalSummary,
    Verdict,
    effective_size,
    estimate_intensity,
    ht_weights,
    interior_mask,
    ks_distance,
    minus_sample,
    reference_point_count,
    two_sample_ks,
    weighted_moments,
)
from stitsim.stats import _eroded_volume

W = box((0, 0), (10, 10))


def _segments(rng, n, side=10.0, scale=2.0):
    a = rng.random((n, 2)) * side
    b = a + rng.normal(scale=scale, size=(n, 2))
    return [(tuple(p), tuple(q)) for p, q in zip(a, b)]


def test_minus_sample_drops_boundary_objects():
    inside = ((1, 1), (2, 3))
    touching = ((0, 1), (2, 3))
    crossing = ((9, 9), (11, 9))
    assert minus_sample([inside, touching, crossing], W) == [inside]
    assert interior_mask([], W).shape == (0,)


def test_interior_mask_general_window_matches_box_path():
    rng = np.random.default_rng(0)
    segs = _segments(rng, 300)
    # a pentagon with a redundant vertex is not recognized as a box
    sq = polygon([(0, 0), (5, 0), (10, 0), (10, 10), (0, 10)])
    assert np.array_equal(interior_mask(segs, W), interior_mask(segs, sq))


def test_estimate_intensity():
    assert estimate_intensity([((1, 1), (2, 2))] * 50, W) == pytest.approx(0.5)
    assert estimate_intensity([], W) == 0.0


def test_ht_weights_box():
    w = ht_weights([((1, 1), (3, 2)), ((0.5, 0.5), (0.5, 10.5))], W)
    assert w[0] == pytest.approx(100 / (8 * 9))
    assert w[1] == math.inf


def test_ht_weights_general_window_agree_with_box():
    rng = np.random.default_rng(1)
    segs = minus_sample(_segments(rng, 50), W)
    sq = polygon([(0, 0), (10, 0), (10, 10), (0, 10)])
    for s in segs:
        e = _eroded_volume(sq, s)
        assert 100 / e == pytest.approx(ht_weights([s], W)[0], rel=1e-9)


def test_ht_weighted_mean_removes_size_bias():
    # uniform left endpoints; the weighted minus-sampled mean length is unbiased,
    # the plain minus-sampled mean is biased low
    rng = np.random.default_rng(2)
    L, wsum, plain = [], 0.0, []
    for _ in range(200):
        n = 500
        p = rng.random((n, 2)) * 10
        length = rng.exponential(2.0, n)
        q = p + np.column_stack([length, np.zeros(n)])
        segs = [(tuple(a), tuple(b)) for a, b in zip(p, q)]
        keep = interior_mask(segs, W)
        w = ht_weights([s for s, k in zip(segs, keep) if k], W)
        L.append(np.sum(w * length[keep]))
        wsum += w.sum()
        plain.extend(length[keep])
    # segments longer than the window never fit, so the target is the truncated mean
    trunc = 2.0 - 10.0 * math.exp(-5.0) / -math.expm1(-5.0)
    assert sum(L) / wsum == pytest.approx(trunc, rel=0.01)
    assert np.mean(plain) < 0.9 * trunc


def test_reference_point_count():
    objs = [((1, 1), (2, 2)), ((-1, -1), (2, 2)), ((9, 9), (12, 12))]
    assert reference_point_count(objs, W) == 2
    assert reference_point_count([], W) == 0


def test_ks_distance_exact_and_against_scipy():
    rng = np.random.default_rng(3)
    x = rng.random(500)
    D, p = ks_distance(x, lambda v: np.clip(v, 0, 1))
    ref = sst.kstest(x, "uniform", method="asymp")
    assert D == pytest.approx(ref.statistic, abs=1e-15)
    assert p == pytest.approx(ref.pvalue, rel=1e-6)
    # quantile points of a continuous law: D = 1/(2n)
    n = 100
    q = (np.arange(n) + 0.5) / n
    assert ks_distance(q, lambda v: v)[0] == pytest.approx(1 / (2 * n))


def test_ks_distance_point_mass_and_step_cdf():
    # all mass at x0 against a continuous law
    D, _ = ks_distance(np.full(10, 0.3), lambda v: v)
    assert D == pytest.approx(0.7)
    D, _ = ks_distance(np.full(10, 0.8), sst.norm(0.5, 0.1).cdf)
    assert D == pytest.approx(sst.norm(0.5, 0.1).cdf(0.8))
    # identical step functions
    step = lambda v: np.where(v >= 2, 1.0, np.where(v >= 1, 0.5, 0.0))
    D, _ = ks_distance([1.0, 1.0, 2.0, 2.0], step)
    assert D == 0.0
    D, _ = ks_distance([1.0, 1.0, 1.0], lambda v: 1.0 if v >= 1.0 else 0.0)
    assert D == 0.0
    with pytest.raises(ValueError):
        ks_distance([], lambda v: v)


def test_weighted_ks_with_unit_weights_matches_unweighted():
    rng = np.random.default_rng(4)
    x = rng.normal(size=300)
    a = ks_distance(x, sst.norm.cdf)
    b = ks_distance(x, sst.norm.cdf, weights=np.full(300, 2.5))
    assert a[0] == pytest.approx(b[0]) and a[1] == pytest.approx(b[1])


def test_integer_weights_equal_repetition():
    rng = np.random.default_rng(5)
    x = rng.random(40)
    w = rng.integers(1, 4, size=40)
    D1, _ = ks_distance(x, lambda v: v, weights=w)
    D2, _ = ks_distance(np.repeat(x, w), lambda v: v)
    assert D1 == pytest.approx(D2, abs=1e-15)


def test_two_sample_ks():
    rng = np.random.default_rng(6)
    a, b = rng.normal(size=400), rng.normal(0.1, 1.0, size=300)
    D, p = two_sample_ks(a, b)
    ref = sst.ks_2samp(a, b, method="asymp")
    assert D == pytest.approx(ref.statistic, abs=1e-15)
    assert p == pytest.approx(ref.pvalue, rel=0.05)
    assert two_sample_ks(a, a) == (0.0, 1.0)
    assert two_sample_ks([1, 2, 3], [4, 5])[0] == 1.0
    with pytest.raises(ValueError):
        two_sample_ks([], [1.0])


def test_effective_size_and_weighted_moments():
    assert effective_size(np.ones(10)) == pytest.approx(10)
    assert effective_size([1, 0, 0]) == pytest.approx(1)
    x = np.array([1.0, 2.0, 3.0, 4.0])
    m, v = weighted_moments(x, np.ones(4))
    assert m == pytest.approx(2.5) and v == pytest.approx(np.var(x, ddof=1))


values = st.lists(st.floats(-1e6, 1e6, allow_nan=False), max_size=60)


@settings(max_examples=200, deadline=None)
@given(values, values, values)
def test_summary_merge_is_exact_and_associative(a, b, c):
    edges = np.linspace(-1e6, 1e6, 11)

    def summ(v):
        s = EmpiricalSummary(edges)
        s.extend(v)
        return s

    left = summ(a).merge(summ(b)).merge(summ(c))
    right = summ(a).merge(summ(b).merge(summ(c)))
    whole = summ(a + b + c)
    for s in (left, right):
        assert s.count == whole.count
        assert np.array_equal(s.hist, whole.hist)
        assert s._s1.exact() == whole._s1.exact()
        assert s._s2.exact() == whole._s2.exact()
    if whole.count:
        assert whole.mean == pytest.approx(math.fsum(a + b + c) / whole.count, abs=1e-9)


def test_summary_moments_and_csv():
    s = EmpiricalSummary([0, 1, 2], reservoir=3)
    s.extend([0.5, 1.5, 1.5, 3.0, -1.0])
    assert s.count == 5 and s.overflow == 1 and s.underflow == 1
    assert list(s.hist) == [1, 2]
    assert s.mean == pytest.approx(1.1)
    assert s.variance == pytest.approx(np.var([0.5, 1.5, 1.5, 3.0, -1.0], ddof=1))
    assert s.reservoir == [0.5, 1.5, 1.5]
    csv = s.histogram_csv(lambda lo, hi: hi - lo)
    assert csv.splitlines()[0] == "bin_left,bin_right,count,theory_value"
    assert csv.splitlines()[1].startswith("0.0,1.0,1,")
    with pytest.raises(ValueError):
        s.merge(EmpiricalSummary([0, 2]))


def test_summary_sums_cancel_exactly():
    s = EmpiricalSummary()
    s.extend([1e16, 1.0, -1e16])
    assert s.total == 1.0


def test_verdict_kinds():
    assert Verdict("a", 1.05, 1.0, 0.1, "rel").passed
    assert not Verdict("a", 1.2, 1.0, 0.1, "rel").passed
    assert Verdict("z", -2.0, 0.0, 3.0, "sigma").passed
    assert not Verdict("p", 0.001, 0.0, 0.01, "pvalue").passed
    assert Verdict("m", 0.0, 0.0, 1e-3, "max").passed
    assert not Verdict("nan", math.nan, 0.0, 1.0, "max").passed
    with pytest.raises(ValueError):
        Verdict("x", 0, 0, 0, "bogus")
    parts = [Verdict("a", 1.0, 1.0, 0.0), Verdict("b", 2.0, 1.0, 0.5)]
    top = Verdict.combine("both", parts)
    assert not top.passed and top.row().startswith("FAIL  both: 1/2")
    assert top.to_json()["parts"][1]["passed"] is False
    assert "PASS  a:" in top.report()
