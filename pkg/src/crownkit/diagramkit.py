"""Diagrams of periodic complexes over finite posets and their homotopy colimits.

Homotopy colimits are totalizations of the normalized bar complex: a
p-chain i_0 < ... < i_p carries D(i_0), the face dropping i_0 applies the
structure map D(i_0 -> i_1), the other faces drop an index, and the total
differential is the alternating face sum plus (-1)^p times the internal one.
A generator over internal slot n in bar degree p sits in total slot n + p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

from .exactlin import FgAbelianGroup, IntMatrix, Subquotient, cokernel, hstack, image_basis, \
    kernel_basis, vstack
from .percomplex import (
    ChainMap,
    GradedMap,
    GradedModule,
    PeriodicComplex,
    PeriodMismatch,
    cone,
    homology_module,
    induced_map,
    shift,
    tensor,
    tensor_map,
)
from .posetkit import FinitePoset, MonotoneMap, all_chains, corner, label_str, product, slice_over


class ShapeMismatch(ValueError):
    """Diagrams or maps live on incompatible shapes."""


class InconsistentDiagram(ValueError):
    """Two composites along different paths disagree."""


class NotFree(ValueError):
    """A group that must be free has torsion."""


# complex diagrams


class ComplexDiagram:
    """Functor from a finite poset to periodic complexes, given on covering pairs."""

    def __init__(self, shape: FinitePoset, vertex: Mapping[Hashable, PeriodicComplex],
                 edge: Mapping[tuple[Hashable, Hashable], ChainMap], period: int | None = None,
                 check: bool = True):
        self.shape = shape
        self.vertex = {e: vertex[e] for e in shape}
        periods = {v.period for v in self.vertex.values()}
        if period is not None:
            periods.add(period)
        if len(periods) != 1:
            raise PeriodMismatch(f"vertex periods differ: {sorted(periods)}")
        self.period = periods.pop()
        self.edge = {}
        for a, b in shape.covers:
            f = edge.get((a, b))
            if f is None:
                f = self._composite_from(edge, a, b)
            if f.source != self.vertex[a] or f.target != self.vertex[b]:
                raise ShapeMismatch(f"edge {label_str(a)}->{label_str(b)} has wrong endpoints")
            self.edge[(a, b)] = f
        self._maps: dict = {}
        if check:
            self._build_maps(check=True)

    def _composite_from(self, edge, a, b):
        raise ShapeMismatch(f"missing edge {label_str(a)}->{label_str(b)}")

    def _build_maps(self, check: bool) -> None:
        p = self.shape
        maps = self._maps
        for a in p.elements:
            maps[(a, a)] = ChainMap.identity(self.vertex[a])
        for a in p.elements:
            for c in p.linear_extension:
                if c == a or not p.leq(a, c):
                    continue
                found = None
                for (x, y) in p.covers:
                    if y != c or not p.leq(a, x):
                        continue
                    comp = self.edge[(x, c)] @ maps[(a, x)]
                    if found is None:
                        found = comp
                        if not check:
                            break
                    elif comp != found:
                        raise InconsistentDiagram(
                            f"paths {label_str(a)}->{label_str(c)} give different maps")
                maps[(a, c)] = found

    def map(self, a: Hashable, b: Hashable) -> ChainMap:
        """Structure map D(a) -> D(b) for a <= b."""
        if not self._maps:
            self._build_maps(check=False)
        try:
            return self._maps[(a, b)]
        except KeyError:
            raise ShapeMismatch(f"{label_str(a)} is not below {label_str(b)}") from None

    def __getitem__(self, e: Hashable) -> PeriodicComplex:
        return self.vertex[e]

    def restrict(self, u: MonotoneMap) -> ComplexDiagram:
        """Pullback u*D along u: I -> shape."""
        if u.target != self.shape:
            raise ShapeMismatch("restriction map does not land in the diagram shape")
        return ComplexDiagram(u.source, {i: self.vertex[u(i)] for i in u.source},
                              {(a, c): self.map(u(a), u(c)) for a, c in u.source.covers},
                              self.period, check=False)

    @classmethod
    def constant(cls, shape: FinitePoset, x: PeriodicComplex) -> ComplexDiagram:
        return cls(shape, {e: x for e in shape}, {ab: ChainMap.identity(x) for ab in shape.covers},
                   x.period, check=False)


class DiagramMap:
    """Map of diagrams along a shape map: alpha_i: D(i) -> D'(u(i)), natural in i."""

    def __init__(self, source: ComplexDiagram, target: ComplexDiagram, shape_map: MonotoneMap | None,
                 components: Mapping[Hashable, ChainMap], check: bool = True):
        if shape_map is None:
            shape_map = MonotoneMap.identity(source.shape)
        if shape_map.source != source.shape or shape_map.target != target.shape:
            raise ShapeMismatch("shape map does not match the diagrams")
        self.source, self.target, self.shape_map = source, target, shape_map
        self.components = {i: components[i] for i in source.shape}
        if check:
            for i, a in self.components.items():
                if a.source != source[i] or a.target != target[shape_map(i)]:
                    raise ShapeMismatch(f"component at {label_str(i)} has wrong endpoints")
            for i, j in source.shape.covers:
                lhs = self.components[j] @ source.edge[(i, j)]
                rhs = target.map(shape_map(i), shape_map(j)) @ self.components[i]
                if lhs != rhs:
                    raise InconsistentDiagram(f"naturality fails on {label_str(i)}->{label_str(j)}")

    @classmethod
    def identity(cls, d: ComplexDiagram) -> DiagramMap:
        return cls(d, d, None, {i: ChainMap.identity(d[i]) for i in d.shape}, check=False)

    @classmethod
    def restriction(cls, d: ComplexDiagram, u: MonotoneMap) -> DiagramMap:
        """Canonical map u*D -> D over u."""
        r = d.restrict(u)
        return cls(r, d, u, {i: ChainMap.identity(r[i]) for i in u.source}, check=False)


# bar construction


@dataclass(frozen=True)
class BarBlock:
    degree: int
    chain: tuple
    slot: int


class BarComplex:
    """Normalized bar complex of a diagram, totalized into a periodic complex."""

    def __init__(self, diagram: ComplexDiagram):
        self.diagram = diagram
        self.period = N = diagram.period
        self.chains = all_chains(diagram.shape)
        # offsets[total_slot][(p, chain)] = first row of the block D(i_0)_{slot - p}
        offsets = [dict() for _ in range(N)]
        ranks = [0] * N
        for p, chs in enumerate(self.chains):
            for ch in chs:
                v = diagram[ch[0]]
                for n in range(N):
                    offsets[n][(p, ch)] = ranks[n]
                    ranks[n] += v.rank(n - p)
        self.offsets = offsets
        self.ranks = ranks
        diffs = []
        for n in range(N):
            data = [[0] * ranks[n] for _ in range(ranks[(n - 1) % N])]
            for p, chs in enumerate(self.chains):
                sign_int = -1 if p % 2 else 1
                for ch in chs:
                    v = diagram[ch[0]]
                    m = (n - p) % N
                    c0 = offsets[n][(p, ch)]
                    if v.rank(m) == 0:
                        continue
                    # internal differential, same chain, slot m -> m-1
                    _paste(data, offsets[(n - 1) % N][(p, ch)], c0, v.d(m), sign_int)
                    if p == 0:
                        continue
                    # face 0 applies the structure map
                    f = diagram.map(ch[0], ch[1]).block(m)
                    _paste(data, offsets[(n - 1) % N][(p - 1, ch[1:])], c0, f, 1)
                    for k in range(1, p + 1):
                        face = ch[:k] + ch[k + 1:]
                        _paste(data, offsets[(n - 1) % N][(p - 1, face)], c0,
                               IntMatrix.identity(v.rank(m)), -1 if k % 2 else 1)
            diffs.append(IntMatrix._raw(ranks[(n - 1) % N], ranks[n], tuple(map(tuple, data))))
        # d^2 = 0 holds by the simplicial identities; the property tests check it
        self.complex = PeriodicComplex(N, ranks, diffs, check=False)

    def block_range(self, total_slot: int, degree: int, chain: tuple) -> tuple[int, int]:
        n = total_slot % self.period
        start = self.offsets[n][(degree, chain)]
        return start, start + self.diagram[chain[0]].rank(n - degree)


def _paste(data: list[list[int]], r0: int, c0: int, blk: IntMatrix, sign: int) -> None:
    for a in range(blk.rows):
        row = data[r0 + a]
        for bb, v in enumerate(blk.row(a)):
            if v:
                row[c0 + bb] += sign * v


_BAR_CACHE: dict[int, BarComplex] = {}


def simplicial_replacement(d: ComplexDiagram) -> BarComplex:
    """Normalized bar complex of d (cached per diagram object)."""
    key = id(d)
    hit = _BAR_CACHE.get(key)
    if hit is None or hit.diagram is not d:
        hit = BarComplex(d)
        if len(_BAR_CACHE) > 4096:
            _BAR_CACHE.clear()
        _BAR_CACHE[key] = hit
    return hit


def hocolim(d: ComplexDiagram) -> PeriodicComplex:
    return simplicial_replacement(d).complex


def hocolim_map(phi: DiagramMap) -> ChainMap:
    """Induced chain map of bar totalizations; degenerate image chains go to zero."""
    src = simplicial_replacement(phi.source)
    tgt = simplicial_replacement(phi.target)
    N = src.period
    u = phi.shape_map
    blocks = []
    for n in range(N):
        data = [[0] * src.ranks[n] for _ in range(tgt.ranks[n])]
        for p, chs in enumerate(src.chains):
            for ch in chs:
                img = tuple(u(x) for x in ch)
                if len(set(img)) != len(img):
                    continue
                m = (n - p) % N
                blk = phi.components[ch[0]].block(m)
                if blk.cols == 0:
                    continue
                _paste(data, tgt.offsets[n][(p, img)], src.offsets[n][(p, ch)], blk, 1)
        blocks.append(IntMatrix(tgt.ranks[n], src.ranks[n], data))
    return ChainMap(src.complex, tgt.complex, blocks)


# Kan extensions, products


@dataclass
class KanExtension:
    """Pointwise homotopy left Kan extension with its slice data."""

    diagram: ComplexDiagram
    slices: dict
    slice_diagrams: dict


def left_kan(f: MonotoneMap, d: ComplexDiagram) -> KanExtension:
    """Vertex j is hocolim over f/j; edges come from slice inclusions."""
    if f.source != d.shape:
        raise ShapeMismatch("Kan extension map does not start at the diagram shape")
    slices, sdiag, verts = {}, {}, {}
    for j in f.target:
        sl = slice_over(f, j)
        slices[j] = sl
        sdiag[j] = d.restrict(sl.inclusion)
        verts[j] = hocolim(sdiag[j])
    edges = {}
    for j, j2 in f.target.covers:
        incl = MonotoneMap.inclusion(slices[j].poset, slices[j2].poset)
        phi = DiagramMap(sdiag[j], sdiag[j2], incl,
                         {c: ChainMap.identity(sdiag[j][c]) for c in slices[j].poset}, check=False)
        edges[(j, j2)] = hocolim_map(phi)
    return KanExtension(ComplexDiagram(f.target, verts, edges, d.period, check=False), slices, sdiag)


def external_tensor(x: ComplexDiagram, y: ComplexDiagram) -> ComplexDiagram:
    """(a, c) -> X_a (x) Y_c with edgewise f (x) g."""
    if x.period != y.period:
        raise PeriodMismatch(f"{x.period} != {y.period}")
    shape = product(x.shape, y.shape)
    verts = {(a, c): tensor(x[a], y[c]) for a, c in shape}
    edges = {}
    for (s, t) in shape.covers:
        (a, c), (a2, c2) = s, t
        edges[(s, t)] = tensor_map(x.map(a, a2), y.map(c, c2))
    return ComplexDiagram(shape, verts, edges, x.period, check=False)


def pushout(f: ChainMap, g: ChainMap) -> tuple[PeriodicComplex, ChainMap, ChainMap]:
    """Strict pushout of B <-f- A -g-> C when [f; -g] is a split injection slotwise.

    Returns (P, B -> P, C -> P). The quotient of B + C by the image of A is
    computed on complements of the image.
    """
    if f.source != g.source:
        raise ShapeMismatch("pushout legs must share a source")
    a, bc, cc = f.source, f.target, g.target
    N = f.period
    quot, proj = [], []
    for n in range(N):
        leg = vstack([f.block(n), -g.block(n)])
        s = _split_quotient(leg)
        quot.append(s)
    ranks = [q.rows for q in quot]
    # projection matrices: B + C -> P, differential induced
    diffs = []
    for n in range(N):
        tot_d = _block_diag2(bc.d(n), cc.d(n))
        lift = _section(quot[n])
        diffs.append(quot[(n - 1) % N] @ tot_d @ lift)
    p = PeriodicComplex(N, ranks, diffs)
    to_p_b = ChainMap(bc, p, [quot[n].select_columns(range(bc.rank(n))) for n in range(N)])
    to_p_c = ChainMap(cc, p, [quot[n].select_columns(range(bc.rank(n), bc.rank(n) + cc.rank(n)))
                              for n in range(N)])
    return p, to_p_b, to_p_c


def _block_diag2(x: IntMatrix, y: IntMatrix) -> IntMatrix:
    from .exactlin import block_diag

    return block_diag([x, y])


def _split_quotient(leg: IntMatrix) -> IntMatrix:
    """Matrix q with kernel = column span of leg, surjective onto Z^k; leg must be split."""
    from .exactlin import snf

    s = snf(leg)
    r = s.rank
    if any(x != 1 for x in s.d[:r]):
        raise NotFree("pushout leg is not a split injection")
    # u @ leg @ v = diag(1..1,0); rows r.. of u kill the image and are onto
    return s.u.select_rows(range(r, leg.rows))


def _section(q: IntMatrix) -> IntMatrix:
    """Right inverse of a surjective integer matrix."""
    from .exactlin import snf

    s = snf(q)
    if s.rank != q.rows or any(x != 1 for x in s.d):
        raise NotFree("quotient map is not split surjective")
    # u q v = [I 0] so q (v[:, :k] u) = I
    return s.v.select_columns(range(q.rows)) @ s.u


def pushout_product(f: ChainMap, g: ChainMap) -> ChainMap:
    """f box g: X_0 (x) Y_1 union over X_0 (x) Y_0 of X_1 (x) Y_0 -> X_1 (x) Y_1."""
    a = tensor_map(f, ChainMap.identity(g.source))      # X0 Y0 -> X1 Y0
    c = tensor_map(ChainMap.identity(f.source), g)      # X0 Y0 -> X0 Y1
    p, from_x1y0, from_x0y1 = pushout(a, c)
    to_top_1 = tensor_map(ChainMap.identity(f.target), g)   # X1 Y0 -> X1 Y1
    to_top_0 = tensor_map(f, ChainMap.identity(g.target))   # X0 Y1 -> X1 Y1
    N = f.period
    blocks = []
    for n in range(N):
        lift = _section(hstack([from_x1y0.block(n), from_x0y1.block(n)]))
        blocks.append(hstack([to_top_1.block(n), to_top_0.block(n)]) @ lift)
    return ChainMap(p, to_top_1.target, blocks)


def cylinder(f: ChainMap) -> tuple[ChainMap, ChainMap]:
    """Mapping cylinder X0 -> Cyl(f) -> X1: a split injection followed by a quasi-isomorphism."""
    from .posetkit import interval

    d = ComplexDiagram(interval(), {0: f.source, 1: f.target}, {(0, 1): f}, f.period, check=False)
    bar = simplicial_replacement(d)
    N = bar.period
    blocks = []
    for n in range(N):
        data = [[0] * f.source.rank(n) for _ in range(bar.ranks[n])]
        _paste(data, bar.offsets[n][(0, (0,))], 0, IntMatrix.identity(f.source.rank(n)), 1)
        blocks.append(IntMatrix(bar.ranks[n], f.source.rank(n), data))
    return ChainMap(f.source, bar.complex, blocks), augmentation(d, 1)


def derived_pushout_product(f: ChainMap, g: ChainMap) -> ChainMap:
    """Pushout-product of the cylinder replacements; valid for arbitrary chain maps."""
    return pushout_product(cylinder(f)[0], cylinder(g)[0])


def suspension_diagonal(x: PeriodicComplex) -> tuple[GradedMap, GradedMap]:
    """hocolim(CX <- X -> CX) -> hocolim(SX <- 0 -> SX) = SX + SX, followed by each projection.

    CX is the cone of the identity and SX = shift(X, 1); both composites are
    returned as maps on homology.
    """
    n_ = x.period
    cx = cone(ChainMap.identity(x))
    sx, zero = shift(x, 1), PeriodicComplex.zero(n_)
    c = corner()
    mid, left, right = (0, 0), (1, 0), (0, 1)
    d = ComplexDiagram(c, {mid: x, left: cx.complex, right: cx.complex},
                       {(mid, left): cx.incl, (mid, right): cx.incl}, n_)
    d2 = ComplexDiagram(c, {mid: zero, left: sx, right: sx},
                        {(mid, left): ChainMap.zero(zero, sx), (mid, right): ChainMap.zero(zero, sx)}, n_)
    h = hocolim_map(DiagramMap(d, d2, None, {mid: ChainMap.zero(x, zero), left: cx.bdry, right: cx.bdry}))
    bar = simplicial_replacement(d2)
    out = []
    for side in (left, right):
        blocks = []
        for n in range(n_):
            lo, hi = bar.block_range(n, 0, (side,))
            blocks.append(IntMatrix.identity(bar.ranks[n]).select_rows(range(lo, hi)))
        out.append(induced_map(ChainMap(bar.complex, sx, blocks) @ h))
    return out[0], out[1]


def counit_cone(f: MonotoneMap, d: ComplexDiagram) -> ComplexDiagram:
    """Vertexwise cone of (Lan_f f*D)_j -> D_j."""
    r = d.restrict(f)
    kan = left_kan(f, r)
    verts, comps = {}, {}
    for j in f.target:
        sl = kan.slices[j]
        # augmentation of the bar complex over f/j into D_j
        phi = _augmentation(kan.slice_diagrams[j], d, j, f, sl)
        comps[j] = phi
        verts[j] = cone(phi).complex
    edges = {}
    for j, j2 in f.target.covers:
        edges[(j, j2)] = _cone_functorial(comps[j], comps[j2], kan.diagram.edge[(j, j2)], d.map(j, j2))
    return ComplexDiagram(f.target, verts, edges, d.period, check=False)


def _augmentation(sd: ComplexDiagram, d: ComplexDiagram, j, f: MonotoneMap, sl) -> ChainMap:
    """hocolim over f/j of D(f(-)) -> D_j: bar degree 0 maps by structure maps, higher degrees vanish."""
    bar = simplicial_replacement(sd)
    N = bar.period
    tgt = d[j]
    blocks = []
    for n in range(N):
        data = [[0] * bar.ranks[n] for _ in range(tgt.rank(n))]
        for ch in bar.chains[0]:
            blk = d.map(f(ch[0]), j).block(n)
            _paste(data, 0, bar.offsets[n][(0, ch)], blk, 1)
        blocks.append(IntMatrix(tgt.rank(n), bar.ranks[n], data))
    return ChainMap(bar.complex, tgt, blocks)


def _cone_functorial(phi: ChainMap, phi2: ChainMap, a: ChainMap, bmap: ChainMap) -> ChainMap:
    from .percomplex import cone_map

    return cone_map(phi, phi2, a, bmap)


def augmentation(d: ComplexDiagram, j: Hashable) -> ChainMap:
    """hocolim over the shape -> D(j) for a terminal element j."""
    p = d.shape
    if any(not p.leq(e, j) for e in p):
        raise ShapeMismatch(f"{label_str(j)} is not terminal")
    bar = simplicial_replacement(d)
    N = bar.period
    tgt = d[j]
    blocks = []
    for n in range(N):
        data = [[0] * bar.ranks[n] for _ in range(tgt.rank(n))]
        for ch in bar.chains[0]:
            _paste(data, 0, bar.offsets[n][(0, ch)], d.map(ch[0], j).block(n), 1)
        blocks.append(IntMatrix(tgt.rank(n), bar.ranks[n], data))
    return ChainMap(bar.complex, tgt, blocks)


# colimits and module diagrams


def colimit_groups(d: ComplexDiagram) -> GradedModule:
    """Slotwise strict colimit groups coker(sum over covers D_a -> sum D_i)."""
    N = d.period
    slots = []
    for n in range(N):
        slots.append(cokernel(_colim_relations(d, n)))
    return GradedModule(N, tuple(slots))


def _colim_relations(d: ComplexDiagram, n: int) -> IntMatrix:
    els = list(d.shape)
    offs, acc = {}, 0
    for e in els:
        offs[e] = acc
        acc += d[e].rank(n)
    cols = []
    for a, c in d.shape.covers:
        f = d.edge[(a, c)].block(n)
        for k in range(d[a].rank(n)):
            v = [0] * acc
            v[offs[a] + k] -= 1
            for r in range(f.rows):
                v[offs[c] + r] += f[r, k]
            cols.append(v)
    return IntMatrix.from_columns(cols, acc) if cols else IntMatrix.zeros(acc, 0)


def colimit(d: ComplexDiagram) -> PeriodicComplex:
    """Strict colimit; slots must be free (raise NotFree otherwise)."""
    N = d.period
    quots = []
    for n in range(N):
        rel = _colim_relations(d, n)
        q = _free_quotient(rel)
        quots.append(q)
    diffs = []
    for n in range(N):
        big = _block_diag_list([d[e].d(n) for e in d.shape])
        diffs.append(quots[(n - 1) % N] @ big @ _section(quots[n]) if quots[n].rows else
                     IntMatrix.zeros(quots[(n - 1) % N].rows, 0))
    return PeriodicComplex(N, [q.rows for q in quots], diffs)


def _block_diag_list(ms: Sequence[IntMatrix]) -> IntMatrix:
    from .exactlin import block_diag

    return block_diag(list(ms))


def _free_quotient(rel: IntMatrix) -> IntMatrix:
    from .exactlin import snf

    s = snf(rel)
    r = s.rank
    if any(x != 1 for x in s.d[:r]):
        raise NotFree("colimit has torsion in some slot")
    return s.u.select_rows(range(r, rel.rows))


class ModuleDiagram:
    """Functor from a finite poset to graded modules, given on covering pairs."""

    def __init__(self, shape: FinitePoset, vertex: Mapping[Hashable, GradedModule],
                 edge: Mapping[tuple[Hashable, Hashable], GradedMap], check: bool = True):
        self.shape = shape
        self.vertex = {e: vertex[e] for e in shape}
        periods = {v.period for v in self.vertex.values()}
        if len(periods) != 1:
            raise PeriodMismatch(f"vertex periods differ: {sorted(periods)}")
        self.period = periods.pop()
        self.edge = {ab: edge[ab] for ab in shape.covers}
        for (a, c), f in self.edge.items():
            if f.source != self.vertex[a] or f.target != self.vertex[c] or f.shift:
                raise ShapeMismatch(f"edge {label_str(a)}->{label_str(c)} has wrong endpoints")
        self._maps: dict = {}
        self._build(check)

    def _build(self, check: bool) -> None:
        p = self.shape
        for a in p:
            self._maps[(a, a)] = GradedMap.identity(self.vertex[a])
        for a in p:
            for c in p.linear_extension:
                if c == a or not p.leq(a, c):
                    continue
                found = None
                for x, y in p.covers:
                    if y != c or not p.leq(a, x):
                        continue
                    comp = self.edge[(x, c)] @ self._maps[(a, x)]
                    if found is None:
                        found = comp
                        if not check:
                            break
                    elif comp != found:
                        raise InconsistentDiagram(
                            f"paths {label_str(a)}->{label_str(c)} give different maps")
                self._maps[(a, c)] = found

    def map(self, a: Hashable, c: Hashable) -> GradedMap:
        return self._maps[(a, c)]

    def __getitem__(self, e: Hashable) -> GradedModule:
        return self.vertex[e]

    def restrict(self, u: MonotoneMap) -> ModuleDiagram:
        return ModuleDiagram(u.source, {i: self.vertex[u(i)] for i in u.source},
                             {(a, c): self.map(u(a), u(c)) for a, c in u.source.covers}, check=False)


def homology_diagram(d: ComplexDiagram) -> ModuleDiagram:
    """Vertexwise homology with induced edge maps."""
    return ModuleDiagram(d.shape, {e: homology_module(d[e]) for e in d.shape},
                         {ab: induced_map(f) for ab, f in d.edge.items()}, check=False)


def module_colimit(d: ModuleDiagram) -> GradedModule:
    """Colimit computed on presentations."""
    return category_homology(d, max_degree=0)[0]


def category_homology(d: ModuleDiagram, max_degree: int | None = None) -> list[GradedModule]:
    """H_p(I; D) for p = 0..height(I), from the bar complex of presentations."""
    N = d.period
    chains = all_chains(d.shape)
    top = len(chains) - 1 if max_degree is None else min(max_degree, len(chains) - 1)
    out = []
    for p in range(top + 1):
        slots = []
        for n in range(N):
            slots.append(_module_bar_homology(d, chains, p, n))
        out.append(GradedModule(N, tuple(slots)))
    return out


def _module_chain_group(d: ModuleDiagram, chains, p: int, n: int):
    offs, orders = {}, []
    if p < 0 or p >= len(chains):
        return offs, orders
    for ch in chains[p]:
        offs[ch] = len(orders)
        orders.extend(d[ch[0]][n].orders)
    return offs, orders


def _module_bar_diff(d: ModuleDiagram, chains, p: int, n: int, src, tgt) -> IntMatrix:
    (so, sord), (to, tord) = src, tgt
    data = [[0] * len(sord) for _ in tord]
    for ch in chains[p]:
        c0 = so[ch]
        g = d[ch[0]][n]
        f = d.map(ch[0], ch[1]).components[n].matrix
        _paste(data, to[ch[1:]], c0, f, 1)
        for k in range(1, p + 1):
            face = ch[:k] + ch[k + 1:]
            _paste(data, to[face], c0, IntMatrix.identity(g.ngens), -1 if k % 2 else 1)
    return IntMatrix(len(tord), len(sord), data)


def _relations(orders: Sequence[int]) -> IntMatrix:
    k = len(orders)
    return IntMatrix.from_columns([[o if r == c else 0 for r in range(k)]
                                   for c, o in enumerate(orders) if o], k)


def _module_bar_homology(d: ModuleDiagram, chains, p: int, n: int) -> FgAbelianGroup:
    cur = _module_chain_group(d, chains, p, n)
    below = _module_chain_group(d, chains, p - 1, n)
    above = _module_chain_group(d, chains, p + 1, n)
    k = len(cur[1])
    if k == 0:
        return FgAbelianGroup()
    if p > 0:
        dp = _module_bar_diff(d, chains, p, n, cur, below)
        rel_below = _relations(below[1])
        kk = kernel_basis(hstack([dp, rel_below]))
        proj = kk.select_rows(range(k))
        ker = image_basis(proj) if proj.cols else IntMatrix.zeros(k, 0)
    else:
        ker = IntMatrix.identity(k)
    gens = [_relations(cur[1])]
    if above[1]:
        gens.append(_module_bar_diff(d, chains, p + 1, n, above, cur))
    img = hstack(gens)
    return Subquotient(ker, img).group
