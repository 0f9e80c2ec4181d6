import numpy as np
import pytest

from oucutoff.rng import DEFAULT_SEED, RandomStream


def test_same_key_same_stream():
    a = RandomStream(5, (1, 2)).uniform(size=8)
    b = RandomStream(5).substream(1, 2).uniform(size=8)
    np.testing.assert_array_equal(a, b)


def test_substream_independent_of_parent_state():
    parent = RandomStream(5)
    before = parent.substream(3).normal(size=4)
    parent.uniform(size=1000)
    np.testing.assert_array_equal(before, parent.substream(3).normal(size=4))


def test_distinct_keys_differ():
    a = RandomStream(5, (0,)).uniform(size=8)
    b = RandomStream(5, (1,)).uniform(size=8)
    c = RandomStream(6, (0,)).uniform(size=8)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_default_seed_is_fixed():
    assert DEFAULT_SEED == 123456789
    np.testing.assert_array_equal(RandomStream().uniform(size=3), RandomStream(DEFAULT_SEED).uniform(size=3))


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_seed_range(seed):
    with pytest.raises(ValueError):
        RandomStream(seed)
