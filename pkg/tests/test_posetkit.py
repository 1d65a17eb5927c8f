import pytest
from hypothesis import given
from hypothesis import strategies as st

from crownkit.posetkit import (
    FinitePoset,
    InvalidPeriod,
    MonotoneMap,
    NotAPartialOrder,
    NotFound,
    NotMonotone,
    UnknownElement,
    b,
    collapse_to_point,
    corner,
    crown,
    discrete,
    double_crown,
    euler_characteristic,
    g,
    inclusion_i,
    interval,
    is_conically_contractible,
    is_homotopy_final,
    label_str,
    nerve_is_acyclic,
    nondegenerate_chains,
    parse_label,
    point,
    projection_pr,
    slice_over,
    slice_under,
    square,
    square_projection,
    subposet_J,
    z,
)

periods = st.integers(2, 6)


# oracles

def test_crown_2():
    c = crown(2)
    assert set(c) == {b(0, 2), b(1, 2), z(0, 2), z(1, 2)}
    assert set(c.covers) == {(b(0, 2), z(0, 2)), (b(0, 2), z(1, 2)), (b(1, 2), z(1, 2)), (b(1, 2), z(0, 2))}


def test_interval():
    assert interval().leq(0, 1) and not interval().leq(1, 0)


def test_double_crown_2():
    d = double_crown(2)
    assert len(d) == 6
    for n in range(2):
        assert d.leq(b(n, 2), g(n, 2)) and d.leq(g(n, 2), z(n, 2))
        assert d.leq(b(n, 2), g(n + 1, 2)) and d.leq(g(n, 2), z(n + 1, 2))


def test_invalid_period():
    with pytest.raises(InvalidPeriod):
        crown(1)


def test_not_a_partial_order():
    with pytest.raises(NotAPartialOrder):
        FinitePoset([0, 1], [(0, 1), (1, 0)])


def test_not_monotone():
    with pytest.raises(NotMonotone):
        MonotoneMap(interval(), interval(), {0: 1, 1: 0})


def test_projection_examples():
    pr3 = projection_pr(3)
    assert pr3((b(1, 3), b(1, 3))) == b(2, 3)
    assert pr3((z(2, 3), b(2, 3))) == g(1, 3)
    assert projection_pr(2)((z(0, 2), z(0, 2))) == z(0, 2)


def test_inclusion_examples():
    i = inclusion_i(2)
    assert i(b(0, 2)) == g(0, 2)
    assert i(z(1, 2)) == z(1, 2)
    assert i @ MonotoneMap.identity(crown(2)) == i


def test_slice_over_beta_is_discrete():
    for n_ in range(2, 5):
        for n in range(n_):
            sl = slice_over(projection_pr(n_), b(n, n_)).poset
            assert len(sl) == n_ and sl.is_antichain()
            assert set(sl) == {(b(i, n_), b(n - i, n_)) for i in range(n_)}


def test_slice_over_gamma_has_4n_elements():
    for n_ in range(2, 6):
        assert len(slice_over(projection_pr(n_), g(0, n_)).poset) == 4 * n_


def test_square_projection_slice_is_corner():
    sl = slice_over(square_projection(), 0).poset
    assert sl == corner()


def test_unknown_element():
    with pytest.raises(UnknownElement):
        slice_over(inclusion_i(2), "nope")


def test_coslices_of_i():
    n_ = 4
    i = inclusion_i(n_)
    assert set(slice_under(i, z(1, n_)).poset) == {z(1, n_)}
    sl = slice_under(i, g(1, n_)).poset
    assert set(sl) == {b(1, n_), z(1, n_), z(2, n_)}
    assert is_conically_contractible(sl).apex == b(1, n_)


def test_beta_coslice_contains_three_tops():
    """beta_n/i also contains zeta_{n+2}, reached through gamma_{n+1}."""
    n_ = 4
    sl = slice_under(inclusion_i(n_), b(1, n_)).poset
    assert set(sl) == {b(1, n_), b(2, n_), z(1, n_), z(2, n_), z(3, n_)}
    with pytest.raises(NotFound):
        is_conically_contractible(sl)
    assert collapse_to_point(sl).verify(sl)


def test_beta_coslice_is_a_circle_for_period_two():
    sl = slice_under(inclusion_i(2), b(0, 2)).poset
    assert len(sl) == 4
    assert euler_characteristic(sl) == 0
    assert not nerve_is_acyclic(sl)


def test_subposet_J_period_two():
    j = subposet_J(2, 0)
    assert set(j.poset) == {(z(0, 2), z(0, 2)), (z(1, 2), z(1, 2)), (b(1, 2), b(0, 2)), (b(0, 2), b(1, 2))}


def test_subposet_J_retraction():
    n_ = 4
    sj = subposet_J(n_, 1)
    big = sj.theta.target
    ell = sj.retraction
    assert ell is not None
    for c in sj.poset:
        assert ell(sj.theta(c)) == c
    for c in big:
        assert big.leq(c, sj.theta(ell(c)))
    assert ell((z(0, n_), z(1, n_))) == (z(0, n_), z(1, n_))
    assert ell((b(1, n_), b(3, n_))) == (b(1, n_), b(3, n_))


def test_theta_is_homotopy_final():
    for n_ in range(3, 6):
        assert is_homotopy_final(subposet_J(n_, 0).theta, conical_only=True)


def test_chain_examples():
    assert nondegenerate_chains(interval(), 1) == [(0, 1)]
    assert len(nondegenerate_chains(crown(2), 1)) == 4
    assert nondegenerate_chains(crown(2), 2) == []
    assert len(nondegenerate_chains(double_crown(2), 2)) == 8


def test_conical_examples():
    cert = is_conically_contractible(point())
    assert cert.apex == 0 and cert.retraction == {0: 0}


def test_finality_examples():
    two = discrete(["x", "y"])
    # the coslice of the point is two disconnected elements
    assert not is_homotopy_final(MonotoneMap(two, point(), {"x": 0, "y": 0}))
    assert is_homotopy_final(MonotoneMap(point(), point(), {0: 0}))
    assert not is_homotopy_final(MonotoneMap(point(), two, {0: "x"}))


def test_finality_of_i_by_period():
    """The inclusion i is final for N >= 3 via beat-point collapses; never via cones alone."""
    assert not is_homotopy_final(inclusion_i(2))
    for n_ in range(3, 7):
        assert is_homotopy_final(inclusion_i(n_))
        rep = is_homotopy_final(inclusion_i(n_), conical_only=True)
        assert set(rep.failing) == {b(k, n_) for k in range(n_)}


def test_labels_round_trip():
    for e in [b(0, 3), z(2, 3), (b(1, 3), z(0, 3))]:
        assert parse_label(label_str(e)) == e
    assert label_str((b(0, 2), z(1, 2))) == "(b0,z1)"


# properties

@given(periods)
def test_maps_are_monotone(n_):
    projection_pr(n_)
    inclusion_i(n_)


@given(periods, st.data())
def test_theta_matches_slice(n_, data):
    n = data.draw(st.integers(0, n_ - 1))
    sj = subposet_J(n_, n)
    big = slice_over(projection_pr(n_), z(n, n_)).poset
    assert set(sj.poset) <= set(big)
    assert all(big.leq(a, c) == sj.poset.leq(a, c) for a in sj.poset for c in sj.poset)


@given(periods)
def test_certified_posets_have_acyclic_nerves(n_):
    for shape in (crown(n_), double_crown(n_)):
        for d in shape:
            for f in (inclusion_i(n_), projection_pr(n_)):
                if d not in f.target:
                    continue
                sl = slice_under(f, d).poset
                try:
                    is_conically_contractible(sl)
                except NotFound:
                    continue
                assert euler_characteristic(sl) == 1
                assert nerve_is_acyclic(sl)


def test_square_is_product():
    assert len(square()) == 4 and square().height() == 2
