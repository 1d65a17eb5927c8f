import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from crownkit.diagramkit import (
    ComplexDiagram,
    DiagramMap,
    NotFree,
    ShapeMismatch,
    category_homology,
    colimit,
    colimit_groups,
    counit_cone,
    derived_pushout_product,
    external_tensor,
    hocolim,
    hocolim_map,
    homology_diagram,
    left_kan,
    pushout_product,
    simplicial_replacement,
    suspension_diagonal,
)
from crownkit.exactlin import FgAbelianGroup, GroupHom, IntMatrix
from crownkit.franke import moore_crowned
from crownkit.generate import _matrix, generate_twisted, random_complex_map, random_L_member, rng_from_seed
from crownkit.percomplex import (
    ChainMap,
    GradedModule,
    PeriodicComplex,
    concentrated,
    cone,
    direct_sum,
    direct_sum_complex,
    disk,
    homology,
    induced_map,
    is_isomorphic,
    is_quasi_isomorphism,
    moore,
    shift,
    tensor,
    tensor_map,
    unit,
)
from crownkit.posetkit import (
    MonotoneMap,
    b,
    corner,
    crown,
    discrete,
    inclusion_i,
    interval,
    point,
    projection_pr,
    slice_over,
    square,
    square_projection,
    subposet_J,
    z,
)

Z3 = FgAbelianGroup(0, (3,))


def scalar_map(period, m, slot=0):
    u = concentrated(period, slot, 1)
    return ChainMap.scalar(u, m)


def corner_diagram(x0, x1, x2, f1, f2):
    return ComplexDiagram(corner(), {(0, 0): x0, (1, 0): x1, (0, 1): x2},
                          {((0, 0), (1, 0)): f1, ((0, 0), (0, 1)): f2})


def random_zero_diff_crown(rng, n_, max_rank=2, bound=3):
    """Crowned diagram of complexes with zero differentials and arbitrary edges."""
    shape = crown(n_)
    verts = {}
    for e in shape:
        ranks = [int(r) for r in rng.integers(0, max_rank, size=n_, endpoint=True)]
        verts[e] = PeriodicComplex(n_, ranks, [IntMatrix.zeros(ranks[(k - 1) % n_], ranks[k]) for k in range(n_)])
    edges = {(a, c): ChainMap(verts[a], verts[c], [_matrix(rng, verts[c].rank(k), verts[a].rank(k), bound)
                                                  for k in range(n_)]) for a, c in shape.covers}
    return ComplexDiagram(shape, verts, edges, n_)


# colimits

def test_pushout_of_2_and_minus_3():
    u = unit(2)
    d = corner_diagram(u, u, u, ChainMap.scalar(u, 2), ChainMap.scalar(u, -3))
    assert colimit_groups(d) == GradedModule(2, (FgAbelianGroup(1), FgAbelianGroup()))
    assert [colimit(d).rank(k) for k in range(2)] == [1, 0]


def test_constant_diagram_colimit():
    x = moore(3, 5)
    assert colimit(ComplexDiagram.constant(crown(3), x)) == x


def test_discrete_colimit_is_sum():
    xs = [moore(2, 2), unit(2)]
    d = ComplexDiagram(discrete(["p", "q"]), {"p": xs[0], "q": xs[1]}, {})
    assert colimit(d) == direct_sum_complex(*xs)


def test_colimit_with_torsion_raises():
    u = unit(2)
    d = corner_diagram(u, u, u, ChainMap.scalar(u, 3), ChainMap.scalar(u, 3))
    with pytest.raises(NotFree):
        colimit(d)
    assert colimit_groups(d)[0] == FgAbelianGroup(1, (3,))


def test_inconsistent_endpoints():
    with pytest.raises(ShapeMismatch):
        ComplexDiagram(interval(), {0: unit(2), 1: moore(2, 3)}, {(0, 1): ChainMap.identity(unit(2))})


# bar construction and hocolim

def test_point_bar_is_vertex():
    x = moore(3, 4)
    assert hocolim(ComplexDiagram(point(), {0: x}, {})) == x


def test_interval_hocolim_is_target():
    f = random_complex_map(rng_from_seed(3), 2, 2, 3)
    d = ComplexDiagram(interval(), {0: f.source, 1: f.target}, {(0, 1): f})
    assert is_isomorphic(homology(hocolim(d)), homology(f.target))


def test_moore_crown_hocolim():
    assert homology(hocolim(moore_crowned(3, 2).diagram)) == GradedModule(2, (Z3, FgAbelianGroup()))


def test_suspension_as_hocolim():
    x = generate_twisted(11, 4, 2, 3)
    zero = PeriodicComplex.zero(4)
    d = corner_diagram(x, zero, zero, ChainMap.zero(x, zero), ChainMap.zero(x, zero))
    assert homology(hocolim(d)) == homology(shift(x, 1))


def test_homotopy_cofiber_of_three():
    u = unit(2)
    zero = PeriodicComplex.zero(2)
    d = corner_diagram(u, u, zero, ChainMap.scalar(u, 3), ChainMap.zero(u, zero))
    assert is_isomorphic(homology(hocolim(d)), GradedModule(2, (Z3, FgAbelianGroup())))


def test_constant_over_contractible_shape():
    x = generate_twisted(2, 3, 2, 3)
    for shape in (corner(), square(), interval()):
        assert homology(hocolim(ComplexDiagram.constant(shape, x))) == homology(x)


def test_hocolim_map_identity():
    d = moore_crowned(3, 2).diagram
    assert hocolim_map(DiagramMap.identity(d)) == ChainMap.identity(hocolim(d))


def test_corner_to_square_comparison():
    x = generate_twisted(4, 2, 2, 3)
    sq = ComplexDiagram.constant(square(), x)
    incl = MonotoneMap(corner(), square(), {e: e for e in corner()})
    phi = DiagramMap.restriction(sq, incl)
    h = hocolim_map(phi)
    assert is_quasi_isomorphism(h)
    assert homology(hocolim(sq)) == homology(x)


def test_theta_induces_quasi_isomorphism():
    n_ = 4
    x, y = random_L_member(5, n_), random_L_member(6, n_)
    e = external_tensor(x.diagram, y.diagram)
    big = slice_over(projection_pr(n_), z(1, n_))
    ez = e.restrict(big.inclusion)
    phi = DiagramMap.restriction(ez, subposet_J(n_, 1).theta)
    assert is_quasi_isomorphism(hocolim_map(phi))


# Kan extensions and tensors

def test_kan_along_identity():
    d = random_L_member(7, 3).diagram
    kan = left_kan(MonotoneMap.identity(d.shape), d).diagram
    for e in d.shape:
        assert homology(kan[e]) == homology(d[e])


def test_kan_along_pr_at_beta():
    n_ = 3
    x, y = random_L_member(8, n_), random_L_member(9, n_)
    kan = left_kan(projection_pr(n_), external_tensor(x.diagram, y.diagram)).diagram
    for n in range(n_):
        want = direct_sum(*[homology(tensor(x.beta(i), y.beta((n - i) % n_))) for i in range(n_)])
        assert is_isomorphic(homology(kan[b(n, n_)]), want)


def test_kan_along_square_projection_is_pushout_product():
    f = scalar_map(2, 3)
    g = scalar_map(2, 2, slot=1)
    ef = ComplexDiagram(interval(), {0: f.source, 1: f.target}, {(0, 1): f})
    eg = ComplexDiagram(interval(), {0: g.source, 1: g.target}, {(0, 1): g})
    kan = left_kan(square_projection(), external_tensor(ef, eg)).diagram
    pp = derived_pushout_product(f, g)
    assert is_isomorphic(homology(kan[0]), homology(pp.source))
    assert is_isomorphic(homology(kan[1]), homology(pp.target))
    assert is_isomorphic(homology(cone(kan.edge[(0, 1)]).complex), homology(cone(pp).complex))


def test_external_tensor_on_points():
    x, y = moore(2, 3), moore(2, 5)
    e = external_tensor(ComplexDiagram(point(), {0: x}, {}), ComplexDiagram(point(), {0: y}, {}))
    assert e[(0, 0)] == tensor(x, y)


# pushout products and cones

def test_pushout_product_of_threes():
    f = scalar_map(2, 3)
    lhs = homology(tensor(cone(f).complex, cone(f).complex))
    rhs = homology(cone(derived_pushout_product(f, f)).complex)
    assert lhs == rhs == GradedModule(2, (Z3, Z3))


def test_strict_pushout_needs_split_legs():
    f = scalar_map(2, 3)
    with pytest.raises(NotFree):
        pushout_product(f, f)


def test_pushout_product_with_identity_leg():
    f = random_complex_map(rng_from_seed(12), 2, 2, 3)
    g = ChainMap.identity(moore(2, 4))
    assert homology(cone(derived_pushout_product(f, g)).complex).is_zero()


def test_pushout_product_from_zero():
    x = generate_twisted(13, 2, 2, 3)
    f = ChainMap.zero(PeriodicComplex.zero(2), x)
    g = scalar_map(2, 3)
    pp = pushout_product(f, g)
    assert pp == tensor_map(ChainMap.identity(x), g)


def test_counit_cone_identity_is_acyclic():
    d = random_L_member(14, 3).diagram
    cc = counit_cone(MonotoneMap.identity(d.shape), d)
    assert all(homology(cc[e]).is_zero() for e in d.shape)


def test_counit_cone_off_image_is_suspension():
    x = generate_twisted(15, 3, 2, 3)
    zero = PeriodicComplex.zero(3)
    d = ComplexDiagram(interval(), {0: x, 1: zero}, {(0, 1): ChainMap.zero(x, zero)})
    f = MonotoneMap(point(), interval(), {0: 0})
    cc = counit_cone(f, d)
    assert homology(cc[1]) == homology(shift(x, 1))


# category homology

def test_discrete_category_homology():
    d = ComplexDiagram(discrete(["p", "q"]), {"p": moore(2, 3), "q": unit(2)}, {})
    hs = category_homology(homology_diagram(d))
    assert len(hs) == 1
    assert hs[0] == direct_sum(homology(moore(2, 3)), homology(unit(2)))


def test_gamma_slice_first_homology_vanishes():
    n_ = 4
    x, y = random_L_member(16, n_), random_L_member(17, n_)
    from crownkit.posetkit import g

    hd = homology_diagram(external_tensor(x.diagram, y.diagram))
    sl = slice_over(projection_pr(n_), g(0, n_))
    hs = category_homology(hd.restrict(sl.inclusion))
    assert hs[1].is_zero()


def test_diagonal_recognition():
    for x in (moore(2, 3), generate_twisted(18, 3, 2, 3), generate_twisted(19, 4, 3, 3)):
        first, second = suspension_diagonal(x)
        assert first.is_isomorphism() and second.is_isomorphism()
        for c, c2 in zip(first.components, second.components):
            assert c2.matrix == GroupHom(c.source, c.target, c.matrix.scale(-1)).matrix


# properties

@given(seeds, st.sampled_from([2, 3, 4]))
def test_H0_is_colimit(seed, n_):
    d = random_zero_diff_crown(rng_from_seed(seed), n_)
    assert category_homology(homology_diagram(d))[0] == colimit_groups(d)


@given(seeds, st.sampled_from([2, 3, 4]))
def test_bar_square_zero(seed, n_):
    d = random_L_member(seed, n_).diagram
    bar = simplicial_replacement(d).complex
    assert all((bar.d(k - 1) @ bar.d(k)).is_zero() for k in range(n_))


@given(seeds, st.sampled_from([2, 3, 4]))
def test_hocolim_invariance(seed, n_):
    rng = rng_from_seed(seed)
    d = random_L_member(rng, n_).diagram
    extra = {e: disk(n_, int(rng.integers(0, n_)), 1) for e in d.shape}
    verts = {e: direct_sum_complex(d[e], extra[e]) for e in d.shape}

    def pad(f, a, c):
        blocks = []
        for k in range(n_):
            rows = [list(r) + [0] * extra[a].rank(k) for r in f.block(k).to_rows()]
            rows += [[0] * verts[a].rank(k) for _ in range(extra[c].rank(k))]
            blocks.append(IntMatrix(verts[c].rank(k), verts[a].rank(k), rows))
        return ChainMap(verts[a], verts[c], blocks)

    d2 = ComplexDiagram(d.shape, verts, {(a, c): pad(f, a, c) for (a, c), f in d.edge.items()})
    comps = {}
    for e in d.shape:
        blocks = [IntMatrix.identity(verts[e].rank(k)).select_columns(range(d[e].rank(k))) for k in range(n_)]
        comps[e] = ChainMap(d[e], verts[e], blocks)
        assert is_quasi_isomorphism(comps[e])
    h = hocolim_map(DiagramMap(d, d2, None, comps))
    assert is_quasi_isomorphism(h)


@given(seeds, st.sampled_from([2, 3, 4]))
def test_kan_extension_preserves_hocolim(seed, n_):
    d = random_L_member(seed, n_).diagram
    for f in (inclusion_i(n_), MonotoneMap(crown(n_), point(), lambda e: 0)):
        kan = left_kan(f, d).diagram
        assert is_isomorphic(homology(hocolim(kan)), homology(hocolim(d)))


@given(seeds, st.sampled_from([3, 4]))
def test_finality_transfer(seed, n_):
    d = random_L_member(seed, n_).diagram
    e = left_kan(inclusion_i(n_), d).diagram
    assert is_isomorphic(homology(hocolim(e.restrict(inclusion_i(n_)))), homology(hocolim(e)))


@given(seeds, st.sampled_from([2, 3, 4]))
def test_two_row_spectral_sequence_ranks(seed, n_):
    d = random_L_member(seed, n_).diagram
    h = homology(hocolim(d))
    h0, h1 = category_homology(homology_diagram(d))
    for n in range(n_):
        assert h[n].free_rank == h0[n].free_rank + h1[n - 1].free_rank


@given(seeds)
def test_hocolim_of_product(seed):
    rng = rng_from_seed(seed)
    f, g = random_complex_map(rng, 2, 2, 2), random_complex_map(rng, 2, 2, 2)
    dx = ComplexDiagram(interval(), {0: f.source, 1: f.target}, {(0, 1): f})
    dy = corner_diagram(g.source, g.target, g.source, g, ChainMap.identity(g.source))
    lhs = homology(hocolim(external_tensor(dx, dy)))
    rhs = homology(tensor(hocolim(dx), hocolim(dy)))
    assert is_isomorphic(lhs, rhs)
