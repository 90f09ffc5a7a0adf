import numpy as np

from escapelab import RngStream


def test_same_stream_reproduces_bitwise():
    a = RngStream(12345, 7).generator().standard_normal(1000)
    b = RngStream(12345, 7).generator().standard_normal(1000)
    assert np.array_equal(a, b)


def test_distinct_streams_differ():
    a = RngStream(12345, 0).generator().standard_normal(1000)
    b = RngStream(12345, 1).generator().standard_normal(1000)
    assert not np.array_equal(a, b)
    # crude independence sanity: correlation near zero
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.1


def test_distinct_seeds_differ():
    a = RngStream(1, 0).generator().random(100)
    b = RngStream(2, 0).generator().random(100)
    assert not np.array_equal(a, b)


def test_child_changes_stream_only():
    s = RngStream(99, 0)
    c = s.child(5)
    assert c.seed == 99 and c.stream_id == 5
