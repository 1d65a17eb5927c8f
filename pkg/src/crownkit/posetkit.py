"""Finite posets, monotone maps, slices and contractibility certificates.

Crown and double-crown elements are tagged ``Vertex(kind, index)`` with kind
``"b"``, ``"g"`` or ``"z"`` and index mod N; products use tuples of labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

from .exactlin import IntMatrix, invariant_factors


class InvalidPeriod(ValueError):
    """Period below 2."""


class UnknownElement(KeyError):
    """Label not present in the poset."""


class NotAPartialOrder(ValueError):
    """Relation is not antisymmetric."""


class NotMonotone(ValueError):
    """Assignment does not preserve the order."""


class Vertex(NamedTuple):
    kind: str
    index: int

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"


def label_str(x: Hashable) -> str:
    """Text form of a label: "b0", "(b0,z1)", or str() for other labels."""
    if isinstance(x, Vertex):
        return str(x)
    if isinstance(x, tuple):
        return "(" + ",".join(label_str(y) for y in x) + ")"
    return str(x)


def parse_label(s: str) -> Hashable:
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        parts, depth, cur = [], 0, ""
        for ch in s[1:-1]:
            if ch == "," and depth == 0:
                parts.append(cur)
                cur = ""
                continue
            depth += ch == "("
            depth -= ch == ")"
            cur += ch
        parts.append(cur)
        return tuple(parse_label(p) for p in parts)
    if s and s[0] in "bgz" and s[1:].lstrip("-").isdigit():
        return Vertex(s[0], int(s[1:]))
    if s.lstrip("-").isdigit():
        return int(s)
    raise ValueError(f"unrecognized label {s!r}")


class FinitePoset:
    """Partial order on a list of labels, stored as up-set bitmasks."""

    def __init__(self, elements: Sequence[Hashable], relations: Iterable[tuple[Hashable, Hashable]] = (),
                 name: str = ""):
        self.elements = tuple(elements)
        self.index = {e: k for k, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError("duplicate elements")
        n = len(self.elements)
        up = [1 << k for k in range(n)]
        for a, b in relations:
            up[self._idx(a)] |= 1 << self._idx(b)
        # transitive closure
        changed = True
        while changed:
            changed = False
            for k in range(n):
                acc = up[k]
                m = acc & ~(1 << k)
                while m:
                    low = m & -m
                    acc |= up[low.bit_length() - 1]
                    m ^= low
                if acc != up[k]:
                    up[k] = acc
                    changed = True
        for a in range(n):
            for b in range(a + 1, n):
                if (up[a] >> b) & 1 and (up[b] >> a) & 1:
                    raise NotAPartialOrder(f"{self.elements[a]} and {self.elements[b]} are mutually related")
        self._up = tuple(up)
        self.name = name

    def _idx(self, e: Hashable) -> int:
        try:
            return self.index[e]
        except KeyError:
            raise UnknownElement(e) from None

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, e: Hashable) -> bool:
        return e in self.index

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self) -> str:
        return f"FinitePoset({self.name or len(self)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinitePoset):
            return NotImplemented
        if self is other or (self.elements == other.elements and self._up == other._up):
            return True
        return set(self.elements) == set(other.elements) and all(
            self.leq(a, b) == other.leq(a, b) for a in self.elements for b in self.elements)

    def __hash__(self) -> int:
        return hash(frozenset(self.elements))

    def leq(self, a: Hashable, b: Hashable) -> bool:
        return bool((self._up[self._idx(a)] >> self._idx(b)) & 1)

    def lt(self, a: Hashable, b: Hashable) -> bool:
        return a != b and self.leq(a, b)

    def up_set(self, a: Hashable) -> list[Hashable]:
        m = self._up[self._idx(a)]
        return [e for k, e in enumerate(self.elements) if (m >> k) & 1]

    def down_set(self, a: Hashable) -> list[Hashable]:
        k = self._idx(a)
        return [e for j, e in enumerate(self.elements) if (self._up[j] >> k) & 1]

    @cached_property
    def covers(self) -> tuple[tuple[Hashable, Hashable], ...]:
        """Covering pairs (a, b): a < b with nothing strictly between."""
        out = []
        for a in self.elements:
            above = [b for b in self.up_set(a) if b != a]
            for b in above:
                if not any(c != b and self.leq(c, b) for c in above):
                    out.append((a, b))
        return tuple(out)

    @cached_property
    def linear_extension(self) -> tuple[Hashable, ...]:
        """Elements sorted so that a < b implies a comes first; ties by listing order."""
        return tuple(sorted(self.elements, key=lambda e: (len(self.down_set(e)), self.index[e])))

    def maximal(self) -> list[Hashable]:
        return [e for e in self.elements if len(self.up_set(e)) == 1]

    def minimal(self) -> list[Hashable]:
        return [e for e in self.elements if len(self.down_set(e)) == 1]

    def height(self) -> int:
        """Length of the longest chain (number of steps)."""
        best: dict[Hashable, int] = {}
        for e in self.linear_extension:
            best[e] = max((best[d] + 1 for d in self.down_set(e) if d != e), default=0)
        return max(best.values(), default=0)

    def subposet(self, elements: Iterable[Hashable], name: str = "") -> FinitePoset:
        """Full subposet; order of elements follows this poset."""
        keep = set(elements)
        els = [e for e in self.elements if e in keep]
        rel = [(a, b) for a in els for b in els if a != b and self.leq(a, b)]
        return FinitePoset(els, rel, name)

    def is_antichain(self) -> bool:
        return all(len(self.up_set(e)) == 1 for e in self.elements)


class MonotoneMap:
    """Order-preserving map between finite posets."""

    def __init__(self, source: FinitePoset, target: FinitePoset, assignment: Mapping | Callable,
                 name: str = ""):
        self.source = source
        self.target = target
        amap = assignment if isinstance(assignment, Mapping) else {e: assignment(e) for e in source}
        self.assignment = {e: amap[e] for e in source}
        for e, v in self.assignment.items():
            if v not in target:
                raise UnknownElement(v)
        for a, b in source.covers:
            if not target.leq(self.assignment[a], self.assignment[b]):
                raise NotMonotone(f"{a} <= {b} but {self(a)} is not <= {self(b)}")
        self.name = name

    def __call__(self, e: Hashable) -> Hashable:
        return self.assignment[e]

    def __matmul__(self, other: MonotoneMap) -> MonotoneMap:
        return MonotoneMap(other.source, self.target, {e: self(other(e)) for e in other.source})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MonotoneMap):
            return NotImplemented
        return self.source == other.source and self.target == other.target and \
            self.assignment == other.assignment

    def __hash__(self) -> int:
        return hash(tuple(sorted(map(repr, self.assignment.items()))))

    @classmethod
    def identity(cls, p: FinitePoset) -> MonotoneMap:
        return cls(p, p, {e: e for e in p})

    @classmethod
    def inclusion(cls, sub: FinitePoset, p: FinitePoset) -> MonotoneMap:
        return cls(sub, p, {e: e for e in sub})


# catalogue


def _check_n(n: int) -> None:
    if n < 2:
        raise InvalidPeriod(f"period must be at least 2, got {n}")


def b(i: int, n: int) -> Vertex:
    return Vertex("b", i % n)


def g(i: int, n: int) -> Vertex:
    return Vertex("g", i % n)


def z(i: int, n: int) -> Vertex:
    return Vertex("z", i % n)


def interval() -> FinitePoset:
    return FinitePoset([0, 1], [(0, 1)], "[1]")


def corner() -> FinitePoset:
    """(1,0) <- (0,0) -> (0,1)."""
    return FinitePoset([(0, 0), (1, 0), (0, 1)], [((0, 0), (1, 0)), ((0, 0), (0, 1))], "corner")


def square() -> FinitePoset:
    return product(interval(), interval(), "square")


def discrete(elements: Sequence[Hashable]) -> FinitePoset:
    return FinitePoset(elements, (), "discrete")


def point() -> FinitePoset:
    return FinitePoset([0], (), "point")


def crown(n: int) -> FinitePoset:
    """b_i < z_i and b_i < z_{i+1}."""
    _check_n(n)
    els = [b(i, n) for i in range(n)] + [z(i, n) for i in range(n)]
    rel = [(b(i, n), z(i, n)) for i in range(n)] + [(b(i, n), z(i + 1, n)) for i in range(n)]
    return FinitePoset(els, rel, f"C{n}")


def double_crown(n: int) -> FinitePoset:
    """b_n <= g_n <= z_n, b_n <= g_{n+1}, g_n <= z_{n+1}."""
    _check_n(n)
    els = [b(i, n) for i in range(n)] + [g(i, n) for i in range(n)] + [z(i, n) for i in range(n)]
    rel = []
    for i in range(n):
        rel += [(b(i, n), g(i, n)), (g(i, n), z(i, n)), (b(i, n), g(i + 1, n)), (g(i, n), z(i + 1, n))]
    return FinitePoset(els, rel, f"D{n}")


def product(p: FinitePoset, q: FinitePoset, name: str = "") -> FinitePoset:
    els = [(a, c) for a in p for c in q]
    rel = [((a, c), (a2, c)) for (a, a2) in p.covers for c in q] + \
          [((a, c), (a, c2)) for a in p for (c, c2) in q.covers]
    return FinitePoset(els, rel, name or f"{p.name}x{q.name}")


def product_map(f: MonotoneMap, h: MonotoneMap) -> MonotoneMap:
    src = product(f.source, h.source)
    tgt = product(f.target, h.target)
    return MonotoneMap(src, tgt, {(a, c): (f(a), h(c)) for a, c in src})


def projection_pr(n: int) -> MonotoneMap:
    """C_N x C_N -> D_N: bb -> b, zz -> z, mixed pairs -> g, indices added mod N."""
    _check_n(n)
    src = product(crown(n), crown(n), f"C{n}xC{n}")

    def pr(e):
        (x, y) = e
        s = (x.index + y.index) % n
        if x.kind == "b" and y.kind == "b":
            return b(s, n)
        if x.kind == "z" and y.kind == "z":
            return z(s, n)
        return g(s, n)

    return MonotoneMap(src, double_crown(n), pr, "pr")


def inclusion_i(n: int) -> MonotoneMap:
    """C_N -> D_N: z_n -> z_n, b_n -> g_n."""
    _check_n(n)
    return MonotoneMap(crown(n), double_crown(n),
                       lambda e: z(e.index, n) if e.kind == "z" else g(e.index, n), "i")


def square_projection() -> MonotoneMap:
    """[1] x [1] -> [1], (a, c) -> min(a, c); the slice over 0 is the corner."""
    return MonotoneMap(square(), interval(), lambda e: min(e))


# slices


@dataclass(frozen=True)
class Slice:
    """Full subposet of ``f.source`` together with its inclusion map."""

    poset: FinitePoset
    inclusion: MonotoneMap


def slice_over(f: MonotoneMap, d: Hashable) -> Slice:
    """f/d = {c : f(c) <= d}."""
    if d not in f.target:
        raise UnknownElement(d)
    sub = f.source.subposet([c for c in f.source if f.target.leq(f(c), d)], f"{f.name}/{label_str(d)}")
    return Slice(sub, MonotoneMap.inclusion(sub, f.source))


def slice_under(f: MonotoneMap, d: Hashable) -> Slice:
    """d/f = {c : d <= f(c)}."""
    if d not in f.target:
        raise UnknownElement(d)
    sub = f.source.subposet([c for c in f.source if f.target.leq(d, f(c))], f"{label_str(d)}/{f.name}")
    return Slice(sub, MonotoneMap.inclusion(sub, f.source))


@dataclass(frozen=True)
class SubposetJ:
    """J_n inside pr/z_n with inclusion theta and its left adjoint L (when it exists)."""

    poset: FinitePoset
    theta: MonotoneMap
    retraction: MonotoneMap | None


def subposet_J(n_period: int, n: int) -> SubposetJ:
    """J_n = {(z_a, z_b): a+b=n} + {(b_a, b_b): a+b=n-1} inside pr/z_n.

    The retraction L sends c to the least element of J_n above c; it exists
    (and is then left adjoint to theta) iff every such set has a minimum,
    which holds for N >= 3.
    """
    N = n_period
    _check_n(N)
    n %= N
    big = slice_over(projection_pr(N), z(n, N)).poset
    els = [(z(a, N), z(n - a, N)) for a in range(N)] + [(b(a, N), b(n - 1 - a, N)) for a in range(N)]
    j = big.subposet(els, f"J{n}")
    theta = MonotoneMap.inclusion(j, big)
    assign = {}
    for c in big:
        above = [e for e in j if big.leq(c, e)]
        least = [e for e in above if all(big.leq(e, o) for o in above)]
        if len(least) != 1:
            assign = None
            break
        assign[c] = least[0]
    retraction = MonotoneMap(big, j, assign, "L") if assign is not None else None
    return SubposetJ(j, theta, retraction)


# chains and nerves


def nondegenerate_chains(p: FinitePoset, length: int) -> list[tuple[Hashable, ...]]:
    """Strictly increasing (length+1)-tuples, lexicographic in element order."""
    if length < 0:
        raise ValueError("chain length must be non-negative")
    out: list[tuple[Hashable, ...]] = []

    def extend(chain: list[int]) -> None:
        if len(chain) == length + 1:
            out.append(tuple(p.elements[k] for k in chain))
            return
        last = chain[-1]
        up = p._up[last]
        for k in range(len(p)):
            if k != last and (up >> k) & 1:
                chain.append(k)
                extend(chain)
                chain.pop()

    for k in range(len(p)):
        extend([k])
    return sorted(out, key=lambda ch: tuple(p.index[e] for e in ch))


def all_chains(p: FinitePoset) -> list[list[tuple[Hashable, ...]]]:
    """Nondegenerate chains grouped by length 0..height."""
    return [nondegenerate_chains(p, k) for k in range(p.height() + 1)]


def order_complex_boundaries(p: FinitePoset) -> list[IntMatrix]:
    """Boundary matrices of the order complex: entry k maps k-chains to (k-1)-chains."""
    chains = all_chains(p)
    mats = []
    for k in range(1, len(chains)):
        idx = {c: r for r, c in enumerate(chains[k - 1])}
        data = [[0] * len(chains[k]) for _ in chains[k - 1]]
        for col, c in enumerate(chains[k]):
            for face in range(k + 1):
                data[idx[c[:face] + c[face + 1:]]][col] += (-1) ** face
        mats.append(IntMatrix(len(chains[k - 1]), len(chains[k]), data))
    return mats


def euler_characteristic(p: FinitePoset) -> int:
    return sum((-1) ** k * len(c) for k, c in enumerate(all_chains(p)))


def nerve_reduced_homology(p: FinitePoset) -> list[tuple[int, tuple[int, ...]]]:
    """Reduced homology of the order complex as (free rank, torsion) per degree."""
    chains = all_chains(p)
    if not p.elements:
        return [(0, ())]
    mats = order_complex_boundaries(p)
    aug = IntMatrix(1, len(chains[0]), [[1] * len(chains[0])])
    bds = [aug] + mats
    out = []
    for k in range(len(chains)):
        dk = invariant_factors(bds[k])
        rk = sum(1 for x in dk if x)
        nxt = invariant_factors(bds[k + 1]) if k + 1 < len(bds) else ()
        rn = sum(1 for x in nxt if x)
        out.append((len(chains[k]) - rk - rn, tuple(x for x in nxt if x > 1)))
    return out


def nerve_is_acyclic(p: FinitePoset) -> bool:
    """Euler characteristic 1 and vanishing reduced homology."""
    return bool(p.elements) and euler_characteristic(p) == 1 and \
        all(r == 0 and not t for r, t in nerve_reduced_homology(p))


# contractibility certificates


@dataclass(frozen=True)
class ConicalCertificate:
    """c0 and monotone f with c <= f(c) >= c0 for every c."""

    apex: Hashable
    retraction: dict

    def verify(self, p: FinitePoset) -> bool:
        f = self.retraction
        try:
            MonotoneMap(p, p, f)
        except (NotMonotone, UnknownElement, KeyError):
            return False
        return all(p.leq(c, f[c]) and p.leq(self.apex, f[c]) for c in p)


class NotFound(LookupError):
    """No conical-contractibility certificate exists."""


def is_conically_contractible(p: FinitePoset) -> ConicalCertificate:
    """Exhaustive search for (c0, f); raises NotFound when none exists."""
    if not p.elements:
        raise NotFound("empty poset")
    order = p.linear_extension
    for c0 in p.elements:
        up0 = set(p.up_set(c0))
        # candidates: above c and above c0
        cands = {c: [u for u in p.up_set(c) if u in up0] for c in order}
        if any(not v for v in cands.values()):
            continue
        f: dict = {}

        def search(k: int) -> bool:
            if k == len(order):
                return True
            c = order[k]
            below = [a for a in p.down_set(c) if a != c]
            for u in cands[c]:
                if all(p.leq(f[a], u) for a in below):
                    f[c] = u
                    if search(k + 1):
                        return True
                    del f[c]
            return False

        if search(0):
            cert = ConicalCertificate(c0, dict(f))
            assert cert.verify(p)
            return cert
    raise NotFound(f"no conical contractibility certificate for {p!r}")


@dataclass(frozen=True)
class CollapseCertificate:
    """Sequence of beat-point removals reducing the poset to one element.

    A beat point has a unique lower cover or a unique upper cover; removing
    it is a strong deformation retraction of the order complex.
    """

    removals: tuple[Hashable, ...]

    def verify(self, p: FinitePoset) -> bool:
        cur = p
        for e in self.removals:
            if e not in cur or not _is_beat_point(cur, e):
                return False
            cur = cur.subposet([x for x in cur if x != e])
        return len(cur) == 1


def _is_beat_point(p: FinitePoset, e: Hashable) -> bool:
    ups = [bb for a, bb in p.covers if a == e]
    downs = [a for a, bb in p.covers if bb == e]
    return len(ups) == 1 or len(downs) == 1


def collapse_to_point(p: FinitePoset) -> CollapseCertificate:
    """Greedy beat-point dismantling; raises NotFound if it gets stuck.

    Dismantlability does not depend on the removal order (Stong), so the
    greedy search is complete.
    """
    if not p.elements:
        raise NotFound("empty poset")
    cur, removed = p, []
    while len(cur) > 1:
        beat = next((e for e in cur if _is_beat_point(cur, e)), None)
        if beat is None:
            raise NotFound(f"{p!r} is not dismantlable")
        removed.append(beat)
        cur = cur.subposet([x for x in cur if x != beat])
    return CollapseCertificate(tuple(removed))


def contractibility_certificate(p: FinitePoset) -> ConicalCertificate | CollapseCertificate:
    """Conical certificate if one exists, otherwise a beat-point collapse."""
    try:
        return is_conically_contractible(p)
    except NotFound:
        return collapse_to_point(p)


@dataclass(frozen=True)
class FinalityReport:
    final: bool
    certificates: dict = field(default_factory=dict)
    failing: tuple = ()

    def __bool__(self) -> bool:
        return self.final


def is_homotopy_final(f: MonotoneMap, conical_only: bool = False) -> FinalityReport:
    """Certify that every coslice d/f is contractible.

    By default a coslice is accepted with a conical certificate or a
    beat-point collapse; ``conical_only`` restricts to conical certificates.
    """
    certs, failing = {}, []
    for d in f.target:
        sl = slice_under(f, d).poset
        try:
            certs[d] = is_conically_contractible(sl) if conical_only else contractibility_certificate(sl)
        except NotFound:
            failing.append(d)
    return FinalityReport(not failing, certs, tuple(failing))
