import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from crownkit.franke import check_L
from crownkit.generate import SEED_LIMIT, generate_twisted, random_L_member, rng_from_seed
from crownkit.percomplex import PeriodicComplex


def test_rng_is_philox_keyed_by_seed_and_stream():
    a = rng_from_seed(7, stream=2).integers(0, 2**32, 4)
    b = np.random.Generator(np.random.Philox(key=7 + 2 * 2**64)).integers(0, 2**32, 4)
    assert list(a) == list(b)
    assert list(rng_from_seed(7).integers(0, 100, 5)) != list(rng_from_seed(7, 1).integers(0, 100, 5))


@pytest.mark.parametrize("seed", [-1, SEED_LIMIT])
def test_seed_range(seed):
    with pytest.raises(ValueError):
        rng_from_seed(seed)


def test_generation_is_deterministic():
    assert generate_twisted(11, 3, 2, 3) == generate_twisted(11, 3, 2, 3)
    assert random_L_member(11, 4) == random_L_member(11, 4)


def test_max_rank_zero_gives_zero():
    assert generate_twisted(5, 4, 0, 3) == PeriodicComplex.zero(4)


@given(seeds, st.integers(2, 5), st.integers(0, 3), st.integers(1, 4))
def test_twisted_is_a_complex_within_bounds(seed, period, max_rank, max_entry):
    m = generate_twisted(seed, period, max_rank, max_entry)
    assert m.period == period
    assert all(r <= max_rank for r in m.ranks)
    for n in range(period):
        assert (m.d(n - 1) @ m.d(n)).is_zero()
        assert all(abs(v) <= max_entry for v in m.d(n).entries)


@given(seeds, st.sampled_from([2, 3, 4]))
def test_random_members_lie_in_L(seed, period):
    assert check_L(random_L_member(seed, period))
