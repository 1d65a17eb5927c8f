import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import seeds, twisted
from crownkit.exactlin import FgAbelianGroup, IntMatrix
from crownkit.generate import random_complex_map, rng_from_seed
from crownkit.percomplex import (
    ChainMap,
    DifferentialNotSquareZero,
    GradedModule,
    KoszulSignError,
    NotAChainMap,
    PeriodMismatch,
    PeriodicComplex,
    concentrated,
    cone,
    direct_sum,
    graded_exact,
    graded_tensor,
    graded_tor,
    homology,
    induced_map,
    is_isomorphic,
    kunneth_map,
    moore,
    shift,
    shift_identification,
    tensor,
    unit,
)

Z = FgAbelianGroup(1)
Z3 = FgAbelianGroup(0, (3,))
ZERO = FgAbelianGroup()


def G(*slots):
    return GradedModule(len(slots), tuple(slots))


# oracles

def test_moore_homology():
    assert homology(moore(2, 3)) == G(Z3, ZERO)


def test_zero_complex_homology():
    assert homology(PeriodicComplex.zero(3)).is_zero()


def test_zero_differential_homology_is_free():
    x = PeriodicComplex(3, [2, 0, 1], [IntMatrix.zeros(1, 2), IntMatrix.zeros(2, 0), IntMatrix.zeros(0, 1)])
    assert homology(x) == G(FgAbelianGroup(2), ZERO, Z)


def test_square_zero_enforced():
    d = IntMatrix.from_rows([[1]])
    with pytest.raises(DifferentialNotSquareZero):
        PeriodicComplex(2, [1, 1], [d, d])


def test_period_must_be_at_least_two():
    with pytest.raises(ValueError):
        PeriodicComplex(1, [0], [IntMatrix.zeros(0, 0)])


def test_shift_examples():
    x = moore(2, 3)
    assert shift(x, 0) == x
    assert shift(shift(x, 1), -1) == x
    assert homology(shift(x, 1)) == G(ZERO, Z3)


def test_cone_of_multiplication_by_three():
    f = ChainMap.scalar(unit(2), 3)
    assert is_isomorphic(homology(cone(f).complex), G(Z3, ZERO))


def test_cone_of_identity_is_acyclic():
    assert homology(cone(ChainMap.identity(moore(3, 5))).complex).is_zero()


def test_cone_of_map_to_zero_is_shift():
    x = moore(2, 3)
    f = ChainMap.zero(x, PeriodicComplex.zero(2))
    assert cone(f).complex == PeriodicComplex(2, shift(x, 1).ranks, [shift(x, 1).d(n) for n in range(2)])


def test_moore_tensor_square():
    assert homology(tensor(moore(2, 3), moore(2, 3))) == G(Z3, Z3)


def test_unit_and_zero_laws():
    x = moore(4, 6, slot=1)
    assert tensor(x, unit(4)) == x
    assert tensor(PeriodicComplex.zero(4), x).is_zero()


def test_period_mismatch():
    with pytest.raises(PeriodMismatch):
        tensor(unit(2), unit(3))


def test_kunneth_moore_misses_tor():
    kappa = kunneth_map(moore(2, 3), moore(2, 3))
    assert kappa.is_injective()
    assert not kappa.is_surjective()
    assert kappa.cokernel() == G(ZERO, Z3)


def test_kunneth_with_unit_is_identity():
    x = moore(2, 4)
    kappa = kunneth_map(x, unit(2))
    assert kappa.is_isomorphism()
    assert all(c.matrix == IntMatrix.identity(c.matrix.rows) for c in kappa.components)


def test_graded_tensor_examples():
    a = GradedModule.concentrated(2, 0, FgAbelianGroup(0, (2,)))
    b = GradedModule.concentrated(2, 0, Z3)
    assert graded_tensor(a, b).is_zero()
    six = GradedModule.concentrated(2, 0, FgAbelianGroup(0, (6,)))
    four = GradedModule.concentrated(2, 0, FgAbelianGroup(0, (4,)))
    assert graded_tensor(six, four) == GradedModule.concentrated(2, 0, FgAbelianGroup(0, (2,)))
    assert graded_tensor(six, homology(unit(2))) == six


def test_is_isomorphic_examples():
    assert is_isomorphic(G(FgAbelianGroup.from_cyclic([0, 2]), ZERO), G(FgAbelianGroup.from_cyclic([2, 0]), ZERO))
    assert not is_isomorphic(G(FgAbelianGroup(0, (4,)), ZERO), G(FgAbelianGroup(0, (2, 2)), ZERO))
    assert is_isomorphic(GradedModule.zero(2), GradedModule.zero(2))


def test_odd_period_tensor_sign_obstruction():
    """A differential leaving slot 0 meets (-1)^0 on both sides of the wrap when N is odd."""
    wrapping = moore(3, 2, slot=2)
    with pytest.raises(KoszulSignError):
        tensor(wrapping, moore(3, 2))
    assert homology(tensor(moore(3, 2), moore(3, 2))).period == 3
    assert homology(tensor(wrapping, concentrated(3, 1, 1))) == homology(shift(wrapping, 1))


def test_not_a_chain_map():
    with pytest.raises(NotAChainMap):
        ChainMap(moore(2, 3), moore(2, 3), [IntMatrix.identity(1), IntMatrix.zeros(1, 1)])


# properties

@given(twisted())
def test_generated_complexes_square_to_zero(x):
    for n in range(x.period):
        assert (x.d(n - 1) @ x.d(n)).is_zero()


@given(seeds, st.sampled_from([2, 3, 4]))
def test_cone_long_exact_sequence(seed, n):
    f = random_complex_map(rng_from_seed(seed), n, 2, 3)
    c = cone(f)
    hf, hi, hb = induced_map(f), induced_map(c.incl), induced_map(c.bdry)
    back = shift_identification(f.source, 1) @ hb
    assert graded_exact(hf, hi)
    assert graded_exact(hi, back)
    assert graded_exact(back, hf)


@given(twisted(), st.integers(-5, 5))
def test_shift_homology(x, k):
    h, hs = homology(x), homology(shift(x, k))
    assert all(hs[n] == h[n - k] for n in range(x.period))
    assert shift_identification(x, k).is_isomorphism()


@given(twisted())
def test_shift_by_period(x):
    s = shift(x, x.period)
    sign = -1 if x.period % 2 else 1
    assert all(s.d(n) == x.d(n).scale(sign) for n in range(x.period))
    assert homology(s) == homology(x)


@given(twisted(period=2), twisted(period=2), twisted(period=2))
def test_tensor_associative_in_homology(x, y, z):
    assert is_isomorphic(homology(tensor(tensor(x, y), z)), homology(tensor(x, tensor(y, z))))


@given(twisted(period=4), twisted(period=4))
def test_tensor_symmetric_in_homology(x, y):
    assert is_isomorphic(homology(tensor(x, y)), homology(tensor(y, x)))


@given(twisted(), twisted())
def test_kunneth_short_exact_sequence(x, y):
    assume(x.period == y.period)
    try:
        kappa = kunneth_map(x, y)
    except KoszulSignError:
        assume(False)
    assert kappa.is_injective()
    assert is_isomorphic(kappa.cokernel(), graded_tor(homology(x), homology(y)))


@given(twisted(period=4), twisted(period=4))
def test_kunneth_iso_for_free_homology(x, y):
    assume(all(g.is_free() for g in homology(x).slots))
    assert kunneth_map(x, y).is_isomorphism()


@given(twisted(), twisted())
def test_direct_sum_homology(x, y):
    assume(x.period == y.period)
    from crownkit.percomplex import direct_sum_complex

    assert homology(direct_sum_complex(x, y)) == direct_sum(homology(x), homology(y))
