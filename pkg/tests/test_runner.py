import numpy as np
import pytest

from stitsim.geometry import box
from stitsim.measure import HyperplaneMeasure, isotropic
from stitsim.mnw import build_stit
from stitsim.runner import rep_rng, run_replications, thread_count


def _cells(rng, t):
    Y = build_stit(box((0, 0), (5, 5)), HyperplaneMeasure(isotropic(2)), t, rng)
    return len(Y.cells), float(Y.birth_times().sum())


def test_results_do_not_depend_on_worker_count():
    one = run_replications(_cells, 12, 99, (1.0,), threads=1)
    two = run_replications(_cells, 12, 99, (1.0,), threads=2)
    assert one == two


def test_replication_streams_are_stable():
    full = run_replications(_cells, 6, 7, (1.0,), threads=1)
    tail = run_replications(_cells, 3, 7, (1.0,), threads=1, start=3)
    assert full[3:] == tail
    assert run_replications(_cells, 6, 8, (1.0,))[0] != full[0]
    assert rep_rng(1, 2).random() == np.random.default_rng([1, 2]).random()


def test_thread_count(monkeypatch):
    monkeypatch.setenv("STITSIM_THREADS", "3")
    assert thread_count() == 3
    assert thread_count(2) == 2
    monkeypatch.setenv("STITSIM_THREADS", "x")
    with pytest.raises(ValueError):
        thread_count()
    with pytest.raises(ValueError):
        thread_count(0)
