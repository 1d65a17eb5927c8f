from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from crownkit.exactlin import IntMatrix
from crownkit.generate import generate_twisted

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

seeds = st.integers(0, 2**64 - 1)
periods = st.sampled_from([2, 3, 4])


@st.composite
def int_matrices(draw, max_dim=8, bound=9, rows=None, cols=None):
    r = draw(st.integers(0, max_dim)) if rows is None else rows
    c = draw(st.integers(0, max_dim)) if cols is None else cols
    vals = draw(st.lists(st.integers(-bound, bound), min_size=r * c, max_size=r * c))
    return IntMatrix.from_entries(r, c, vals)


@st.composite
def twisted(draw, period=None, max_rank=2, max_entry=3):
    n = draw(periods) if period is None else period
    return generate_twisted(draw(seeds), n, max_rank, max_entry)
