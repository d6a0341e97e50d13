import numpy as np

from disct.utils.rng import child_seed, make_rng


def test_same_seed_and_keys_reproduce_the_stream():
    a = make_rng(7, 1, 2).standard_normal(5)
    b = make_rng(7, 1, 2).standard_normal(5)
    np.testing.assert_array_equal(a, b)


def test_keys_separate_streams():
    a = make_rng(7, 1).standard_normal(5)
    b = make_rng(7, 2).standard_normal(5)
    assert not np.allclose(a, b)


def test_child_seed_is_deterministic_and_non_negative():
    assert child_seed(3, 4, 5) == child_seed(3, 4, 5)
    assert child_seed(3, 4, 5) != child_seed(3, 4, 6)
    assert child_seed(3, 4, 5) >= 0
