import numpy as np
import pytest

from orlicz_kit.utils.helpers import MemoTable, crossing_point


def test_memo_table_evicts_least_recently_used():
    """A full table drops the entry read longest ago and keeps the rest"""
    calls = []

    def compute(key):
        calls.append(key)
        return float(key)

    memo = MemoTable(limit=2)
    memo.get("a", lambda: compute("1"))
    memo.get("b", lambda: compute("2"))
    memo.get("a", lambda: compute("1"))
    memo.get("c", lambda: compute("3"))
    assert memo.get("a", lambda: compute("1")) == 1.0
    assert memo.get("c", lambda: compute("3")) == 3.0
    assert calls == ["1", "2", "3"]
    memo.get("b", lambda: compute("2"))
    assert calls == ["1", "2", "3", "2"]


def test_crossing_point():
    """A trend already below the level crosses at once; a flat one never does"""
    assert crossing_point(10.0, -5.0, 0.0, 0.0, -1.0) == 10.0
    assert np.isinf(crossing_point(10.0, 0.0, 0.0, 0.0, -1.0))
    # y = -(x - 10) falls below -3 just past x = 13
    assert crossing_point(10.0, 0.0, -1.0, 0.0, -3.0) == pytest.approx(13.0, rel=0.1)
    # y = -log(x / 10) falls below -2 past x = 10 e^2
    assert crossing_point(10.0, 0.0, 0.0, -1.0, -2.0) == pytest.approx(10.0 * np.exp(2.0), rel=0.1)
