"""N-periodic chain complexes of finitely generated free abelian groups.

Conventions: ``diff[n]`` maps slot n to slot n-1 (indices mod N), and
``shift(X, k)`` places ``X_{n-k}`` in slot n, so shifting by one is
suspension.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Sequence

from .exactlin import (
    FgAbelianGroup,
    GroupHom,
    IntMatrix,
    Subquotient,
    block_diag,
    block_matrix,
    hstack,
    invariant_factors,
    is_exact,
    kernel_basis,
    kron,
    tor_cyclic,
    vstack,
)


class PeriodMismatch(ValueError):
    """Operands have different periods."""


class DifferentialNotSquareZero(ValueError):
    """A differential composed with itself is nonzero."""


class KoszulSignError(DifferentialNotSquareZero):
    """The Koszul-signed tensor differential does not square to zero.

    With integer coefficients this happens exactly for odd periods when both
    factors carry nonzero differentials.
    """


class NotAChainMap(ValueError):
    """Blocks do not commute with the differentials."""


def _check_period(n: int) -> None:
    if n < 2:
        raise ValueError(f"period must be at least 2, got {n}")


# graded modules


@dataclass(frozen=True)
class GradedModule:
    """Slot n holds a finitely generated abelian group, n in Z/N."""

    period: int
    slots: tuple[FgAbelianGroup, ...]

    def __post_init__(self) -> None:
        _check_period(self.period)
        object.__setattr__(self, "slots", tuple(self.slots))
        if len(self.slots) != self.period:
            raise ValueError("slots.len must equal the period")

    @classmethod
    def zero(cls, period: int) -> GradedModule:
        return cls(period, (FgAbelianGroup(),) * period)

    @classmethod
    def concentrated(cls, period: int, slot: int, group: FgAbelianGroup) -> GradedModule:
        slots = [FgAbelianGroup()] * period
        slots[slot % period] = group
        return cls(period, tuple(slots))

    def __getitem__(self, n: int) -> FgAbelianGroup:
        return self.slots[n % self.period]

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.slots)

    def shifted(self, k: int) -> GradedModule:
        """Slot n of the result is slot n-k of self."""
        return GradedModule(self.period, tuple(self[n - k] for n in range(self.period)))

    def __str__(self) -> str:
        return "(" + ", ".join(str(g) for g in self.slots) + ")"


def direct_sum(*mods: GradedModule) -> GradedModule:
    period = _common_period(mods)
    return GradedModule(period, tuple(
        sum((m.slots[n] for m in mods), FgAbelianGroup()) for n in range(period)))


def is_isomorphic(a: GradedModule, b: GradedModule) -> bool:
    """Complete isomorphism test: identical invariant factors in every slot."""
    if a.period != b.period:
        raise PeriodMismatch(f"{a.period} != {b.period}")
    return a.slots == b.slots


def _common_period(objs: Sequence) -> int:
    periods = {o.period for o in objs}
    if len(periods) != 1:
        raise PeriodMismatch(f"periods differ: {sorted(periods)}")
    return periods.pop()


@dataclass(frozen=True)
class TensorPresentation:
    """Slotwise presentation of a graded tensor product of groups.

    ``pairs[n]`` lists (i, a, b): generator a of slot i of the left factor
    tensored with generator b of slot n-i of the right factor.
    """

    module: GradedModule
    pairs: tuple[tuple[tuple[int, int, int], ...], ...]
    presentations: tuple[Subquotient, ...]


def graded_tensor_presentation(m: GradedModule, mp: GradedModule) -> TensorPresentation:
    period = _common_period([m, mp])
    slots, pairs, pres = [], [], []
    for n in range(period):
        ps, orders = [], []
        for i in range(period):
            left, right = m[i], mp[n - i]
            for a, oa in enumerate(left.orders):
                for b, ob in enumerate(right.orders):
                    ps.append((i, a, b))
                    orders.append(gcd(oa, ob))
        k = len(ps)
        rel = IntMatrix.from_columns(
            [[o if r == c else 0 for r in range(k)] for c, o in enumerate(orders) if o], k)
        sq = Subquotient(IntMatrix.identity(k), rel)
        slots.append(sq.group)
        pairs.append(tuple(ps))
        pres.append(sq)
    return TensorPresentation(GradedModule(period, tuple(slots)), tuple(pairs), tuple(pres))


def graded_tensor(m: GradedModule, mp: GradedModule) -> GradedModule:
    """Slot n is the direct sum over i+j=n of M_i tensor M'_j."""
    return graded_tensor_presentation(m, mp).module


def graded_tor(m: GradedModule, mp: GradedModule) -> GradedModule:
    """Slot n is the direct sum over i+j=n-1 of Tor(M_i, M'_j)."""
    period = _common_period([m, mp])
    slots = []
    for n in range(period):
        orders = []
        for i in range(period):
            for oa in m[i].orders:
                for ob in mp[n - 1 - i].orders:
                    orders.append(tor_cyclic(oa, ob))
        slots.append(FgAbelianGroup.from_cyclic(orders))
    return GradedModule(period, tuple(slots))


@dataclass(frozen=True)
class GradedMap:
    """Homomorphisms slot n of source -> slot n+shift of target."""

    source: GradedModule
    target: GradedModule
    shift: int
    components: tuple[GroupHom, ...]

    def __post_init__(self) -> None:
        _common_period([self.source, self.target])
        object.__setattr__(self, "components", tuple(self.components))
        for n, c in enumerate(self.components):
            if c.source != self.source[n] or c.target != self.target[n + self.shift]:
                raise ValueError(f"component {n} has wrong source or target")

    @property
    def period(self) -> int:
        return self.source.period

    @classmethod
    def identity(cls, m: GradedModule) -> GradedMap:
        return cls(m, m, 0, tuple(GroupHom.identity(g) for g in m.slots))

    def __matmul__(self, other: GradedMap) -> GradedMap:
        """self after other."""
        if other.target != self.source:
            raise ValueError("graded maps are not composable")
        comps = tuple(self.components[(n + other.shift) % self.period] @ other.components[n]
                      for n in range(self.period))
        return GradedMap(other.source, self.target, self.shift + other.shift, comps)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def is_injective(self) -> bool:
        return all(c.is_injective() for c in self.components)

    def is_surjective(self) -> bool:
        return all(c.is_surjective() for c in self.components)

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def kernel(self) -> GradedModule:
        return GradedModule(self.period, tuple(c.kernel() for c in self.components))

    def image(self) -> GradedModule:
        """Graded by the target slot."""
        slots = [FgAbelianGroup()] * self.period
        for n, c in enumerate(self.components):
            slots[(n + self.shift) % self.period] = c.image()
        return GradedModule(self.period, tuple(slots))

    def cokernel(self) -> GradedModule:
        slots = [FgAbelianGroup()] * self.period
        for n, c in enumerate(self.components):
            slots[(n + self.shift) % self.period] = c.cokernel()
        return GradedModule(self.period, tuple(slots))


def graded_exact(f: GradedMap, g: GradedMap) -> bool:
    """Exactness of source(f) -> target(f) = source(g) -> target(g) in every slot."""
    if f.target != g.source:
        raise ValueError("graded maps are not composable")
    n_ = f.period
    return all(is_exact(f.components[n], g.components[(n + f.shift) % n_]) for n in range(n_))


# complexes


class PeriodicComplex:
    """N-periodic chain complex with free slots and d_{n-1} d_n = 0."""

    __slots__ = ("period", "ranks", "diff", "__dict__")

    def __init__(self, period: int, ranks: Sequence[int], diff: Sequence[IntMatrix], check: bool = True):
        _check_period(period)
        ranks = tuple(int(r) for r in ranks)
        diff = tuple(diff)
        if len(ranks) != period or len(diff) != period:
            raise ValueError("ranks and diff must have one entry per slot")
        for n, d in enumerate(diff):
            if d.shape != (ranks[(n - 1) % period], ranks[n]):
                raise ValueError(f"d_{n} has shape {d.shape}, expected "
                                 f"{(ranks[(n - 1) % period], ranks[n])}")
        self.period = period
        self.ranks = ranks
        self.diff = diff
        if check:
            for n in range(period):
                if not (diff[(n - 1) % period] @ diff[n]).is_zero():
                    raise DifferentialNotSquareZero(f"d_{(n - 1) % period} d_{n} != 0")

    def d(self, n: int) -> IntMatrix:
        return self.diff[n % self.period]

    def rank(self, n: int) -> int:
        return self.ranks[n % self.period]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PeriodicComplex):
            return NotImplemented
        return (self.period, self.ranks, self.diff) == (other.period, other.ranks, other.diff)

    def __hash__(self) -> int:
        return hash((self.period, self.ranks, self.diff))

    def __repr__(self) -> str:
        return f"PeriodicComplex(period={self.period}, ranks={self.ranks})"

    @classmethod
    def zero(cls, period: int) -> PeriodicComplex:
        return concentrated(period, 0, 0)

    def is_zero(self) -> bool:
        return not any(self.ranks)

    def has_zero_differential(self) -> bool:
        return all(d.is_zero() for d in self.diff)

    @cached_property
    def homology_data(self) -> tuple[Subquotient | ReducedSubquotient, ...]:
        """Explicit ker d_n / im d_{n+1} with canonical generators.

        Large complexes are first shrunk by cancelling unit entries of the
        differential; lifts and coordinates pass through the reduction maps.
        """
        if sum(self.ranks) <= DIRECT_LIMIT:
            return self._direct_homology_data()
        red = reduce_complex(self)
        inner = red.reduced._direct_homology_data()
        return tuple(ReducedSubquotient(sq, red, n) for n, sq in enumerate(inner))

    def _direct_homology_data(self) -> tuple[Subquotient, ...]:
        out = []
        for n in range(self.period):
            k = kernel_basis(self.d(n))
            out.append(Subquotient(k, self.d(n + 1)))
        return tuple(out)

    @cached_property
    def reduction(self) -> Reduction:
        return reduce_complex(self)


DIRECT_LIMIT = 24


class Reduction:
    """Homotopy equivalence onto a smaller complex obtained by cancelling unit pairs.

    ``proj[n]`` maps slot n of the original onto the reduced complex and
    ``incl[n]`` maps back; both are chain maps and proj after incl is the
    identity.
    """

    def __init__(self, original: PeriodicComplex, reduced: PeriodicComplex,
                 proj: list[IntMatrix], incl: list[IntMatrix]):
        self.original = original
        self.reduced = reduced
        self.proj = proj
        self.incl = incl


def reduce_complex(x: PeriodicComplex) -> Reduction:
    n_ = x.period
    # sparse differential: cols[n][c] = {r: v}, rows[n][r] = {c: v} for d_n
    cols = [dict() for _ in range(n_)]
    rows = [dict() for _ in range(n_)]
    for n in range(n_):
        d = x.d(n)
        for r in range(d.rows):
            for c, v in enumerate(d.row(r)):
                if v:
                    cols[n].setdefault(c, {})[r] = v
                    rows[n].setdefault(r, {})[c] = v
    alive = [set(range(x.rank(n))) for n in range(n_)]
    # proj rows: current element -> {original: coeff}; incl columns: current -> {original: coeff}
    proj = [{e: {e: 1} for e in range(x.rank(n))} for n in range(n_)]
    incl = [{e: {e: 1} for e in range(x.rank(n))} for n in range(n_)]

    def drop_row(n: int, r: int) -> None:
        for c in rows[n].pop(r, {}):
            col = cols[n][c]
            del col[r]
            if not col:
                del cols[n][c]

    def drop_col(n: int, c: int) -> None:
        for r in cols[n].pop(c, {}):
            row = rows[n][r]
            del row[c]
            if not row:
                del rows[n][r]

    def add(n: int, r: int, c: int, v: int) -> None:
        row = rows[n].setdefault(r, {})
        nv = row.get(c, 0) + v
        col = cols[n].setdefault(c, {})
        if nv:
            row[c] = nv
            col[r] = nv
        else:
            row.pop(c, None)
            col.pop(r, None)
            if not row:
                del rows[n][r]
            if not col:
                del cols[n][c]

    progress = True
    while progress:
        progress = False
        for n in range(n_):
            while True:
                pivot = None
                for c in sorted(cols[n]):
                    for r, v in sorted(cols[n][c].items()):
                        if v in (1, -1):
                            pivot = (r, c, v)
                            break
                    if pivot:
                        break
                if pivot is None:
                    break
                progress = True
                b, a, u = pivot
                m = (n - 1) % n_
                gamma = {r: v for r, v in cols[n][a].items() if r != b}
                beta = {c: v for c, v in rows[n][b].items() if c != a}
                for r, gv in gamma.items():
                    for c, bv in beta.items():
                        add(n, r, c, -u * gv * bv)
                # incl: c -> c - u beta_c a
                ia = incl[n][a]
                for c, bv in beta.items():
                    tgt = incl[n][c]
                    for e, w in ia.items():
                        nv = tgt.get(e, 0) - u * bv * w
                        if nv:
                            tgt[e] = nv
                        else:
                            tgt.pop(e, None)
                # proj: row r += -u gamma_r row b
                pb = proj[m][b]
                for r, gv in gamma.items():
                    tgt = proj[m][r]
                    for e, w in pb.items():
                        nv = tgt.get(e, 0) - u * gv * w
                        if nv:
                            tgt[e] = nv
                        else:
                            tgt.pop(e, None)
                drop_row(n, b)
                drop_col(n, a)
                drop_row((n + 1) % n_, a)
                drop_col(m, b)
                del proj[n][a], incl[n][a], proj[m][b], incl[m][b]
                alive[n].discard(a)
                alive[m].discard(b)
    order = [sorted(alive[n]) for n in range(n_)]
    pos = [{e: i for i, e in enumerate(order[n])} for n in range(n_)]
    diffs = []
    for n in range(n_):
        m = (n - 1) % n_
        data = [[0] * len(order[n]) for _ in order[m]]
        for c, col in cols[n].items():
            for r, v in col.items():
                data[pos[m][r]][pos[n][c]] = v
        diffs.append(IntMatrix(len(order[m]), len(order[n]), data))
    reduced = PeriodicComplex(n_, [len(o) for o in order], diffs, check=False)
    pmats, imats = [], []
    for n in range(n_):
        k, full = len(order[n]), x.rank(n)
        pdata = [[0] * full for _ in range(k)]
        idata = [[0] * k for _ in range(full)]
        for i, e in enumerate(order[n]):
            for o, w in proj[n][e].items():
                pdata[i][o] = w
            for o, w in incl[n][e].items():
                idata[o][i] = w
        pmats.append(IntMatrix(k, full, pdata))
        imats.append(IntMatrix(full, k, idata))
    return Reduction(x, reduced, pmats, imats)


class ReducedSubquotient:
    """Homology of one slot read through a reduction; same interface as Subquotient."""

    def __init__(self, inner: Subquotient, red: Reduction, slot: int):
        self.inner = inner
        self.group = inner.group
        self._proj = red.proj[slot]
        self.ambient = red.original.rank(slot)
        self.lifts = red.incl[slot] @ inner.lifts

    def contains(self, x: Sequence[int]) -> bool:
        return self.inner.contains(self._proj.apply(x))

    def coords(self, x: Sequence[int]) -> tuple[int, ...]:
        return self.inner.coords(self._proj.apply(x))

    def coords_matrix(self, x: IntMatrix) -> IntMatrix:
        return self.inner.coords_matrix(self._proj @ x)

    def induced(self, f: IntMatrix, target) -> IntMatrix:
        return target.coords_matrix(f @ self.lifts)


def concentrated(period: int, slot: int, rank: int) -> PeriodicComplex:
    """Z^rank in one slot with zero differential."""
    ranks = [0] * period
    ranks[slot % period] = rank
    return PeriodicComplex(period, ranks, [IntMatrix.zeros(ranks[(n - 1) % period], ranks[n])
                                           for n in range(period)])


def unit(period: int) -> PeriodicComplex:
    return concentrated(period, 0, 1)


def moore(period: int, m: int, slot: int = 0) -> PeriodicComplex:
    """Z --m--> Z from slot+1 to slot; homology Z/m in the given slot."""
    return two_term(period, slot + 1, IntMatrix.from_rows([[m]]))


def two_term(period: int, top: int, d: IntMatrix) -> PeriodicComplex:
    """Complex with d: Z^cols in slot top -> Z^rows in slot top-1."""
    ranks = [0] * period
    top %= period
    bot = (top - 1) % period
    ranks[top] = d.cols
    ranks[bot] = d.rows
    diffs = []
    for n in range(period):
        if n == top:
            diffs.append(d)
        else:
            diffs.append(IntMatrix.zeros(ranks[(n - 1) % period], ranks[n]))
    return PeriodicComplex(period, ranks, diffs)


def disk(period: int, top: int, rank: int = 1) -> PeriodicComplex:
    """Contractible disk: identity from slot top to slot top-1."""
    return two_term(period, top, IntMatrix.identity(rank))


def homology(x: PeriodicComplex) -> GradedModule:
    """Slot n is ker d_n / im d_{n+1}."""
    if sum(x.ranks) > DIRECT_LIMIT:
        x = x.reduction.reduced
    facs = [invariant_factors(x.d(n)) for n in range(x.period)]
    slots = []
    for n in range(x.period):
        rk_n = sum(1 for f in facs[n] if f)
        nxt = facs[(n + 1) % x.period]
        rk_next = sum(1 for f in nxt if f)
        slots.append(FgAbelianGroup(x.rank(n) - rk_n - rk_next, tuple(f for f in nxt if f > 1)))
    return GradedModule(x.period, tuple(slots))


def homology_module(x: PeriodicComplex) -> GradedModule:
    return GradedModule(x.period, tuple(sq.group for sq in x.homology_data))


def graded_from_ambient(src: PeriodicComplex, tgt: PeriodicComplex, blocks: Sequence[IntMatrix],
                        shift: int = 0) -> GradedMap:
    """Map on homology induced by slotwise matrices src_n -> tgt_{n+shift}."""
    hs, ht = src.homology_data, tgt.homology_data
    n_ = src.period
    comps = []
    for n in range(n_):
        t = (n + shift) % n_
        mat = hs[n].induced(blocks[n], ht[t])
        comps.append(GroupHom(hs[n].group, ht[t].group, mat))
    return GradedMap(homology_module(src), homology_module(tgt), shift, tuple(comps))


class ChainMap:
    """Slotwise matrices commuting with the differentials."""

    __slots__ = ("source", "target", "blocks")

    def __init__(self, source: PeriodicComplex, target: PeriodicComplex, blocks: Sequence[IntMatrix],
                 check: bool = True):
        if source.period != target.period:
            raise PeriodMismatch(f"{source.period} != {target.period}")
        blocks = tuple(blocks)
        n_ = source.period
        if len(blocks) != n_:
            raise ValueError("one block per slot required")
        for n, b in enumerate(blocks):
            if b.shape != (target.rank(n), source.rank(n)):
                raise ValueError(f"block {n} has shape {b.shape}")
        self.source, self.target, self.blocks = source, target, blocks
        if check:
            for n in range(n_):
                if blocks[(n - 1) % n_] @ source.d(n) != target.d(n) @ blocks[n]:
                    raise NotAChainMap(f"square at slot {n} does not commute")

    @property
    def period(self) -> int:
        return self.source.period

    def block(self, n: int) -> IntMatrix:
        return self.blocks[n % self.period]

    @classmethod
    def identity(cls, x: PeriodicComplex) -> ChainMap:
        return cls(x, x, [IntMatrix.identity(r) for r in x.ranks], check=False)

    @classmethod
    def zero(cls, source: PeriodicComplex, target: PeriodicComplex) -> ChainMap:
        return cls(source, target, [IntMatrix.zeros(target.rank(n), source.rank(n))
                                    for n in range(source.period)], check=False)

    @classmethod
    def scalar(cls, x: PeriodicComplex, c: int) -> ChainMap:
        return cls(x, x, [IntMatrix.scalar(r, c) for r in x.ranks], check=False)

    def __matmul__(self, other: ChainMap) -> ChainMap:
        if other.target != self.source:
            raise ValueError("chain maps are not composable")
        return ChainMap(other.source, self.target,
                        [a @ b for a, b in zip(self.blocks, other.blocks)], check=False)

    def __add__(self, other: ChainMap) -> ChainMap:
        return ChainMap(self.source, self.target,
                        [a + b for a, b in zip(self.blocks, other.blocks)], check=False)

    def __neg__(self) -> ChainMap:
        return ChainMap(self.source, self.target, [-a for a in self.blocks], check=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (self.source, self.target, self.blocks) == (other.source, other.target, other.blocks)

    def __hash__(self) -> int:
        return hash(self.blocks)

    def is_zero(self) -> bool:
        return all(b.is_zero() for b in self.blocks)


def induced_map(f: ChainMap) -> GradedMap:
    """H(f) in canonical homology coordinates."""
    return graded_from_ambient(f.source, f.target, f.blocks)


def is_quasi_isomorphism(f: ChainMap) -> bool:
    return induced_map(f).is_isomorphism()


# shifts and cones


def shift(x: PeriodicComplex, k: int) -> PeriodicComplex:
    """Slot n of the result is slot n-k of x; differentials pick up (-1)^k."""
    sign = -1 if k % 2 else 1
    n_ = x.period
    return PeriodicComplex(n_, [x.rank(n - k) for n in range(n_)],
                           [x.d(n - k).scale(sign) for n in range(n_)], check=False)


def shift_map(f: ChainMap, k: int) -> ChainMap:
    n_ = f.period
    return ChainMap(shift(f.source, k), shift(f.target, k), [f.block(n - k) for n in range(n_)],
                    check=False)


def shift_identification(x: PeriodicComplex, k: int) -> GradedMap:
    """H(shift(x, k)) -> H(x), slot n to slot n-k, induced by identity matrices."""
    sx = shift(x, k)
    return graded_from_ambient(sx, x, [IntMatrix.identity(sx.rank(n)) for n in range(x.period)], -k)


@dataclass(frozen=True)
class Cone:
    """cone(f) with its inclusion, boundary map and null-homotopy of incl after f.

    ``homotopy[n]`` maps source slot n to cone slot n+1 and satisfies
    d h + h d = incl f.
    """

    complex: PeriodicComplex
    incl: ChainMap
    bdry: ChainMap
    homotopy: tuple[IntMatrix, ...]


def cone(f: ChainMap) -> Cone:
    """Slot n is Y_n + X_{n-1} with differential [[d_Y, f], [0, -d_X]]."""
    x, y = f.source, f.target
    n_ = f.period
    ranks = [y.rank(n) + x.rank(n - 1) for n in range(n_)]
    diffs = []
    for n in range(n_):
        diffs.append(block_matrix([
            [y.d(n), f.block(n - 1)],
            [IntMatrix.zeros(x.rank(n - 2), y.rank(n)), -x.d(n - 1)],
        ]))
    c = PeriodicComplex(n_, ranks, diffs)
    incl = ChainMap(y, c, [vstack([IntMatrix.identity(y.rank(n)),
                                   IntMatrix.zeros(x.rank(n - 1), y.rank(n))]) for n in range(n_)])
    bdry = ChainMap(c, shift(x, 1), [hstack([IntMatrix.zeros(x.rank(n - 1), y.rank(n)),
                                             IntMatrix.identity(x.rank(n - 1))]) for n in range(n_)])
    homotopy = tuple(vstack([IntMatrix.zeros(y.rank(n + 1), x.rank(n)), IntMatrix.identity(x.rank(n))])
                     for n in range(n_))
    return Cone(c, incl, bdry, homotopy)


def cone_map(f: ChainMap, f2: ChainMap, a: ChainMap, b: ChainMap) -> ChainMap:
    """Map cone(f) -> cone(f2) induced by a square f2 a = b f (a on sources, b on targets)."""
    c1, c2 = cone(f).complex, cone(f2).complex
    return ChainMap(c1, c2, [block_diag([b.block(n), a.block(n - 1)]) for n in range(f.period)])


# direct sums and tensors


def direct_sum_complex(*xs: PeriodicComplex) -> PeriodicComplex:
    n_ = _common_period(xs)
    return PeriodicComplex(n_, [sum(x.rank(n) for x in xs) for n in range(n_)],
                           [block_diag([x.d(n) for x in xs]) for n in range(n_)], check=False)


def direct_sum_map(*fs: ChainMap) -> ChainMap:
    n_ = _common_period([f.source for f in fs])
    return ChainMap(direct_sum_complex(*[f.source for f in fs]),
                    direct_sum_complex(*[f.target for f in fs]),
                    [block_diag([f.block(n) for f in fs]) for n in range(n_)], check=False)


@dataclass(frozen=True)
class TensorLayout:
    """Offsets of the (i, j) blocks inside slot n of X tensor Y."""

    period: int
    offsets: tuple[dict, ...]
    ranks: tuple[int, ...]

    def offset(self, i: int, j: int) -> int:
        n_ = self.period
        return self.offsets[(i + j) % n_][i % n_]


def tensor_layout(x: PeriodicComplex, y: PeriodicComplex) -> TensorLayout:
    n_ = _common_period([x, y])
    offsets, ranks = [], []
    for n in range(n_):
        off, acc = {}, 0
        for i in range(n_):
            off[i] = acc
            acc += x.rank(i) * y.rank(n - i)
        offsets.append(off)
        ranks.append(acc)
    return TensorLayout(n_, tuple(offsets), tuple(ranks))


def koszul_sign(degree: int, period: int) -> int:
    """(-1)^|x| with |x| the representative of the slot in 0..N-1."""
    return -1 if (degree % period) % 2 else 1


def tensor(x: PeriodicComplex, y: PeriodicComplex) -> PeriodicComplex:
    """Slot n is the sum over i+j=n of X_i (x) Y_j; d(x(x)y) = dx(x)y + (-1)^|x| x(x)dy.

    Raises KoszulSignError when the signed differential fails d^2 = 0, which
    for integer coefficients happens for odd periods with both differentials
    nonzero.
    """
    lay = tensor_layout(x, y)
    n_ = lay.period
    diffs = []
    for n in range(n_):
        data = [[0] * lay.ranks[n] for _ in range(lay.ranks[(n - 1) % n_])]
        for i in range(n_):
            j = (n - i) % n_
            c0 = lay.offset(i, j)
            # dx (x) y lands in block (i-1, j)
            blk = kron(x.d(i), IntMatrix.identity(y.rank(j)))
            _paste(data, lay.offset(i - 1, j), c0, blk)
            # sign * x (x) dy lands in block (i, j-1)
            blk = kron(IntMatrix.identity(x.rank(i)), y.d(j)).scale(koszul_sign(i, n_))
            _paste(data, lay.offset(i, j - 1), c0, blk)
        diffs.append(IntMatrix(lay.ranks[(n - 1) % n_], lay.ranks[n], data))
    t = PeriodicComplex(n_, lay.ranks, diffs, check=False)
    for n in range(n_):
        if not (t.d(n - 1) @ t.d(n)).is_zero():
            raise KoszulSignError(
                f"Koszul-signed tensor differential fails d^2 = 0 at slot {n} for period {n_}")
    return t


def _paste(data: list[list[int]], r0: int, c0: int, blk: IntMatrix) -> None:
    for a in range(blk.rows):
        row = data[r0 + a]
        for b, v in enumerate(blk.row(a)):
            if v:
                row[c0 + b] += v


def tensor_map(f: ChainMap, g: ChainMap) -> ChainMap:
    """f (x) g, blockwise Kronecker products (degree-zero maps need no sign)."""
    src = tensor(f.source, g.source)
    tgt = tensor(f.target, g.target)
    ls = tensor_layout(f.source, g.source)
    lt = tensor_layout(f.target, g.target)
    n_ = f.period
    blocks = []
    for n in range(n_):
        data = [[0] * ls.ranks[n] for _ in range(lt.ranks[n])]
        for i in range(n_):
            j = (n - i) % n_
            _paste(data, lt.offset(i, j), ls.offset(i, j), kron(f.block(i), g.block(j)))
        blocks.append(IntMatrix(lt.ranks[n], ls.ranks[n], data))
    return ChainMap(src, tgt, blocks)


def tensor_vector(x: PeriodicComplex, y: PeriodicComplex, i: int, u: Sequence[int], j: int,
                  v: Sequence[int]) -> tuple[int, ...]:
    """Coordinates of u (x) v in slot i+j of X (x) Y."""
    lay = tensor_layout(x, y)
    n = (i + j) % lay.period
    out = [0] * lay.ranks[n]
    off = lay.offset(i, j)
    rv = len(v)
    for a, ua in enumerate(u):
        if ua:
            for b, vb in enumerate(v):
                out[off + a * rv + b] += ua * vb
    return tuple(out)


def kunneth_map(x: PeriodicComplex, y: PeriodicComplex) -> GradedMap:
    """H(X) (x) H(Y) -> H(X (x) Y), product of representing cycles."""
    t = tensor(x, y)
    hx, hy, ht = x.homology_data, y.homology_data, t.homology_data
    pres = graded_tensor_presentation(homology_module(x), homology_module(y))
    comps = []
    for n in range(t.period):
        images = []
        for i, a, b in pres.pairs[n]:
            j = (n - i) % t.period
            images.append(tensor_vector(x, y, i, hx[i].lifts.column(a), j, hy[j].lifts.column(b)))
        sq = pres.presentations[n]
        amb = IntMatrix.from_columns(images, t.rank(n)) if images else IntMatrix.zeros(t.rank(n), 0)
        mat = ht[n].coords_matrix(amb @ sq.lifts) if images else IntMatrix.zeros(ht[n].group.ngens, 0)
        comps.append(GroupHom(sq.group, ht[n].group, mat))
    return GradedMap(pres.module, homology_module(t), 0, tuple(comps))
