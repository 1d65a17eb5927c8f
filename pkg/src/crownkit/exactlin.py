"""Exact integer matrix algebra: Smith normal form, lattices, subquotients.

All arithmetic uses Python integers, so intermediate entries never overflow.
Matrices are immutable; every operation returns a fresh value.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence


class ImageNotContained(ValueError):
    """Raised when an image lattice is not contained in the kernel lattice."""


class IntMatrix:
    """Dense integer matrix stored as a tuple of row tuples."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, data: Sequence[Sequence[int]]):
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError(f"data does not match shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self._data = tuple(tuple(int(x) for x in r) for r in data)

    # construction

    @classmethod
    def _raw(cls, rows: int, cols: int, data: tuple) -> IntMatrix:
        m = object.__new__(cls)
        m.rows, m.cols, m._data = rows, cols, data
        return m

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        return cls(rows, cols, data)

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Sequence[int]) -> IntMatrix:
        if len(entries) != rows * cols:
            raise ValueError("entries.len must equal rows*cols")
        return cls(rows, cols, [entries[i * cols:(i + 1) * cols] for i in range(rows)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        cols = len(columns)
        return cls._raw(rows, cols, tuple(tuple(int(c[i]) for c in columns) for i in range(rows)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls._raw(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls._raw(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def scalar(cls, n: int, c: int) -> IntMatrix:
        return cls._raw(n, n, tuple(tuple(c if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None) -> IntMatrix:
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            data[i][i] = v
        return cls(rows, cols, data)

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(x for r in self._data for x in r)

    def to_rows(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._data[i][j]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}, {self.cols}, {[list(r) for r in self._data]})"

    # arithmetic

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        # row-by-row accumulation over nonzero entries; the matrices here are sparse
        ncols = other.cols
        sparse = [[(j, x) for j, x in enumerate(row) if x] for row in other._data]
        data = []
        for r in self._data:
            acc = [0] * ncols
            for k, a in enumerate(r):
                if a:
                    for j, x in sparse[k]:
                        acc[j] += a * x
            data.append(tuple(acc))
        return IntMatrix._raw(self.rows, ncols, tuple(data))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix times column vector."""
        nz = [(k, x) for k, x in enumerate(v) if x]
        return tuple(sum(r[k] * x for k, x in nz) for r in self._data)

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        return IntMatrix._raw(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)))

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        return self + (-other)

    def __neg__(self) -> IntMatrix:
        return self.scale(-1)

    def scale(self, c: int) -> IntMatrix:
        return IntMatrix._raw(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self._data))

    @property
    def T(self) -> IntMatrix:
        return IntMatrix._raw(self.cols, self.rows, tuple(zip(*self._data)) if self.rows else
                              tuple(() for _ in range(self.cols)))

    def select_rows(self, idx: Iterable[int]) -> IntMatrix:
        idx = list(idx)
        return IntMatrix._raw(len(idx), self.cols, tuple(self._data[i] for i in idx))

    def select_columns(self, idx: Iterable[int]) -> IntMatrix:
        idx = list(idx)
        return IntMatrix._raw(self.rows, len(idx), tuple(tuple(r[j] for j in idx) for r in self._data))

    def determinant(self) -> int:
        """Exact determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        a = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


def hstack(blocks: Sequence[IntMatrix], rows: int | None = None) -> IntMatrix:
    if not blocks:
        return IntMatrix.zeros(rows or 0, 0)
    r = blocks[0].rows
    if any(b.rows != r for b in blocks):
        raise ValueError("hstack row mismatch")
    return IntMatrix._raw(r, sum(b.cols for b in blocks),
                          tuple(sum((b._data[i] for b in blocks), ()) for i in range(r)))


def vstack(blocks: Sequence[IntMatrix], cols: int | None = None) -> IntMatrix:
    if not blocks:
        return IntMatrix.zeros(0, cols or 0)
    c = blocks[0].cols
    if any(b.cols != c for b in blocks):
        raise ValueError("vstack column mismatch")
    return IntMatrix._raw(sum(b.rows for b in blocks), c, sum((b._data for b in blocks), ()))


def block_matrix(grid: Sequence[Sequence[IntMatrix]]) -> IntMatrix:
    return vstack([hstack(row) for row in grid])


def block_diag(blocks: Sequence[IntMatrix]) -> IntMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            data[r0 + i][c0:c0 + b.cols] = b._data[i]
        r0 += b.rows
        c0 += b.cols
    return IntMatrix(rows, cols, data)


def kron(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    """Kronecker product; basis of the tensor ordered as (i, j) -> i*dim_b + j."""
    data = []
    for ra in a._data:
        for rb in b._data:
            data.append(tuple(x * y for x in ra for y in rb))
    return IntMatrix._raw(a.rows * b.rows, a.cols * b.cols, tuple(data))


# Smith normal form


@dataclass(frozen=True)
class SnfDecomposition:
    """u @ a @ v == diag(d) with u, v unimodular; u_inv is the inverse of u."""

    d: tuple[int, ...]
    u: IntMatrix
    v: IntMatrix
    u_inv: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d if x != 0)


def _smith(a: IntMatrix, transforms: bool):
    m, n = a.rows, a.cols
    A = a.to_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    Ui = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None

    def row_addmul(dst: int, src: int, q: int) -> None:
        # row dst -= q * row src
        rs = A[src]
        A[dst] = [x - q * y for x, y in zip(A[dst], rs)]
        if transforms:
            U[dst] = [x - q * y for x, y in zip(U[dst], U[src])]
            for r in Ui:
                r[src] += q * r[dst]

    def col_addmul(dst: int, src: int, q: int) -> None:
        # col dst -= q * col src
        for r in A:
            if r[src]:
                r[dst] -= q * r[src]
        if transforms:
            for r in V:
                if r[src]:
                    r[dst] -= q * r[src]

    def swap_rows(i: int, j: int) -> None:
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        if transforms:
            U[i], U[j] = U[j], U[i]
            for r in Ui:
                r[i], r[j] = r[j], r[i]

    def swap_cols(i: int, j: int) -> None:
        if i == j:
            return
        for r in A:
            r[i], r[j] = r[j], r[i]
        if transforms:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def negate_row(i: int) -> None:
        A[i] = [-x for x in A[i]]
        if transforms:
            U[i] = [-x for x in U[i]]
            for r in Ui:
                r[i] = -r[i]

    d: list[int] = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                x = row[j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                x = A[i][t]
                if x:
                    q = x // p
                    if q:
                        row_addmul(i, t, q)
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                x = A[t][j]
                if x:
                    q = x // p
                    if q:
                        col_addmul(j, t, q)
                    if A[t][j]:
                        dirty = True
            if dirty:
                # a smaller remainder exists in row or column t: pivot on it
                cand = None
                for i in range(t + 1, m):
                    x = A[i][t]
                    if x and (cand is None or abs(x) < cand[0]):
                        cand = (abs(x), i, None)
                for j in range(t + 1, n):
                    x = A[t][j]
                    if x and (cand is None or abs(x) < cand[0]):
                        cand = (abs(x), None, j)
                if cand[1] is not None:
                    swap_rows(t, cand[1])
                else:
                    swap_cols(t, cand[2])
                continue
            # row and column clear; enforce divisibility on the remaining block
            bad = None
            for i in range(t + 1, m) if abs(p) != 1 else ():
                if any(x % p for x in A[i][t + 1:]):
                    bad = i
                    break
            if bad is None:
                break
            row_addmul(t, bad, -1)
        if A[t][t] < 0:
            negate_row(t)
        d.append(A[t][t])
        t += 1
    d.extend([0] * (min(m, n) - len(d)))
    if not transforms:
        return tuple(d)
    return SnfDecomposition(
        tuple(d),
        IntMatrix(m, m, U),
        IntMatrix(n, n, V),
        IntMatrix(m, m, Ui),
    )


def snf(a: IntMatrix) -> SnfDecomposition:
    """Smith normal form with unimodular transforms, u @ a @ v == diag(d)."""
    return _smith(a, True)


def invariant_factors(a: IntMatrix) -> tuple[int, ...]:
    """Diagonal of the Smith normal form, without tracking transforms."""
    return _smith(a, False)


def rank(a: IntMatrix) -> int:
    return sum(1 for x in invariant_factors(a) if x)


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """Columns form a basis of the integer kernel of ``a``."""
    s = snf(a)
    return s.v.select_columns(range(s.rank, a.cols))


def image_basis(a: IntMatrix) -> IntMatrix:
    """Columns form a basis of the column span of ``a``."""
    s = snf(a)
    r = s.rank
    cols = [tuple(x * s.d[j] for x in s.u_inv.column(j)) for j in range(r)]
    return IntMatrix.from_columns(cols, a.rows)


# finitely generated abelian groups


@dataclass(frozen=True)
class FgAbelianGroup:
    """Z^free_rank plus cyclic torsion factors forming a divisibility chain."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "torsion", tuple(int(x) for x in self.torsion))
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        if any(x < 2 for x in self.torsion):
            raise ValueError(f"torsion entries must be >= 2, got {self.torsion}")
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise ValueError(f"torsion is not a divisibility chain: {self.torsion}")

    @classmethod
    def from_factors(cls, factors: Iterable[int], extra_free: int = 0) -> FgAbelianGroup:
        """Group presented by invariant factors; zeros are free summands, ones vanish."""
        factors = list(factors)
        return cls(extra_free + sum(1 for x in factors if x == 0),
                   tuple(sorted(x for x in factors if x > 1)))

    @classmethod
    def from_cyclic(cls, orders: Iterable[int]) -> FgAbelianGroup:
        """Direct sum of cyclic groups Z/o (o = 0 means Z), in any order."""
        orders = list(orders)
        return cls.from_factors(invariant_factors(IntMatrix.diagonal(orders)), 0)

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.free_rank

    @property
    def orders(self) -> tuple[int, ...]:
        """Order of each canonical generator; 0 marks a free generator."""
        return self.torsion + (0,) * self.free_rank

    def is_zero(self) -> bool:
        return self.ngens == 0

    def is_free(self) -> bool:
        return not self.torsion

    def relations(self) -> IntMatrix:
        """Columns span the relation lattice in canonical coordinates."""
        return IntMatrix.diagonal(self.torsion, rows=self.ngens, cols=len(self.torsion))

    def normalize(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % o if o else x for x, o in zip(v, self.orders))

    def __add__(self, other: FgAbelianGroup) -> FgAbelianGroup:
        return FgAbelianGroup.from_cyclic(self.orders + other.orders)

    def __str__(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


def cokernel(a: IntMatrix) -> FgAbelianGroup:
    """Isomorphism type of Z^rows / column span of ``a``."""
    d = invariant_factors(a)
    r = sum(1 for x in d if x)
    return FgAbelianGroup(a.rows - r, tuple(x for x in d if x > 1))


def tor_cyclic(a: int, b: int) -> int:
    """Order of Tor(Z/a, Z/b) with 0 standing for Z; 1 means the zero group."""
    if a == 0 or b == 0:
        return 1
    return gcd(a, b)


def tensor_cyclic(a: int, b: int) -> int:
    """Order of Z/a tensor Z/b with 0 standing for Z."""
    return gcd(a, b)


class LatticeSolver:
    """Exact solver for ``basis @ c == x`` where ``basis`` has independent columns."""

    def __init__(self, basis: IntMatrix):
        self.basis = basis
        self._snf = snf(basis)
        if self._snf.rank != basis.cols:
            raise ValueError("lattice basis columns are dependent")

    def solve(self, x: Sequence[int]) -> tuple[int, ...] | None:
        """Coordinates of ``x`` in the basis, or None if ``x`` is not in the lattice."""
        s = self._snf
        y = s.u.apply(x)
        k = self.basis.cols
        if any(y[k:]):
            return None
        w = []
        for yi, di in zip(y, s.d):
            q, r = divmod(yi, di)
            if r:
                return None
            w.append(q)
        return s.v.apply(w)

    def solve_matrix(self, x: IntMatrix) -> IntMatrix | None:
        cols = []
        for c in x.columns():
            sol = self.solve(c)
            if sol is None:
                return None
            cols.append(sol)
        return IntMatrix.from_columns(cols, self.basis.cols)


class Subquotient:
    """The group span(kernel) / span(image) with canonical generators.

    ``kernel`` columns must be independent; ``image`` columns may be any
    generating set of a sublattice of span(kernel). Canonical coordinates list
    torsion generators first (ascending orders), then free generators.
    """

    def __init__(self, kernel: IntMatrix, image: IntMatrix):
        self.kernel = kernel
        self.ambient = kernel.rows
        self._solver = LatticeSolver(kernel)
        coords = self._solver.solve_matrix(image)
        if coords is None:
            raise ImageNotContained("image lattice is not contained in the kernel lattice")
        s = snf(coords)
        k = kernel.cols
        d = list(s.d) + [0] * (k - len(s.d))
        keep = [j for j in range(k) if d[j] != 1]
        self._u = s.u.select_rows(keep)
        self._orders = tuple(d[j] for j in keep)
        self.group = FgAbelianGroup(sum(1 for o in self._orders if o == 0),
                                    tuple(o for o in self._orders if o))
        # generators expressed in the ambient lattice
        self.lifts = kernel @ s.u_inv.select_columns(keep)

    def contains(self, x: Sequence[int]) -> bool:
        return self._solver.solve(x) is not None

    def coords(self, x: Sequence[int]) -> tuple[int, ...]:
        """Canonical coordinates of the class of an ambient vector lying in span(kernel)."""
        c = self._solver.solve(x)
        if c is None:
            raise ImageNotContained("vector does not lie in the kernel lattice")
        return self.group.normalize(self._u.apply(c))

    def coords_matrix(self, x: IntMatrix) -> IntMatrix:
        return IntMatrix.from_columns([self.coords(c) for c in x.columns()], self.group.ngens)

    def induced(self, f: IntMatrix, target: Subquotient) -> IntMatrix:
        """Matrix of the map on subquotients induced by the ambient map ``f``."""
        return target.coords_matrix(f @ self.lifts)


def subquotient(kernel: IntMatrix, image: IntMatrix) -> FgAbelianGroup:
    """Isomorphism type of span(kernel) / span(image)."""
    if kernel.cols and rank(kernel) != kernel.cols:
        kernel = image_basis(kernel)
    return Subquotient(kernel, image).group


class GroupHom:
    """Homomorphism between groups in canonical coordinates.

    Column j is the image of the j-th canonical generator of ``source``.
    """

    def __init__(self, source: FgAbelianGroup, target: FgAbelianGroup, matrix: IntMatrix):
        if matrix.shape != (target.ngens, source.ngens):
            raise ValueError(f"matrix shape {matrix.shape} does not match groups")
        self.source = source
        self.target = target
        self.matrix = IntMatrix.from_columns(
            [target.normalize(c) for c in matrix.columns()], target.ngens)
        for o, c in zip(source.orders, self.matrix.columns()):
            if o and any(target.normalize(tuple(o * x for x in c))):
                raise ValueError("map does not respect torsion of the source")

    @classmethod
    def zero(cls, source: FgAbelianGroup, target: FgAbelianGroup) -> GroupHom:
        return cls(source, target, IntMatrix.zeros(target.ngens, source.ngens))

    @classmethod
    def identity(cls, group: FgAbelianGroup) -> GroupHom:
        return cls(group, group, IntMatrix.identity(group.ngens))

    def __matmul__(self, other: GroupHom) -> GroupHom:
        if other.target != self.source:
            raise ValueError("composition of incompatible homomorphisms")
        return GroupHom(other.source, self.target, self.matrix @ other.matrix)

    def __add__(self, other: GroupHom) -> GroupHom:
        return GroupHom(self.source, self.target, self.matrix + other.matrix)

    def __neg__(self) -> GroupHom:
        return GroupHom(self.source, self.target, -self.matrix)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupHom):
            return NotImplemented
        return (self.source, self.target, self.matrix) == (other.source, other.target, other.matrix)

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.matrix))

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def _lifted(self) -> IntMatrix:
        return hstack([self.matrix, self.target.relations()], self.target.ngens)

    def kernel_lattice(self) -> IntMatrix:
        """Basis of the preimage in source coordinates of the target relations."""
        k = kernel_basis(self._lifted())
        proj = k.select_rows(range(self.source.ngens))
        if proj.cols == 0:
            return IntMatrix.zeros(self.source.ngens, 0)
        return image_basis(proj)

    def kernel(self) -> FgAbelianGroup:
        return Subquotient(self.kernel_lattice(), self.source.relations()).group

    def image(self) -> FgAbelianGroup:
        return subquotient(image_basis(self._lifted()), self.target.relations())

    def cokernel(self) -> FgAbelianGroup:
        return cokernel(self._lifted())

    def is_injective(self) -> bool:
        return self.kernel().is_zero()

    def is_surjective(self) -> bool:
        return self.cokernel().is_zero()

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()


def is_exact(f: GroupHom, g: GroupHom) -> bool:
    """True iff image(f) == kernel(g) for composable f: A -> B, g: B -> C."""
    if f.target != g.source:
        raise ValueError("maps are not composable")
    if not (g @ f).is_zero():
        return False
    ker = g.kernel_lattice()
    img = hstack([f.matrix, f.target.relations()], f.target.ngens)
    if ker.cols == 0:
        return True
    return Subquotient(ker, img).group.is_zero()


def preimage(a: IntMatrix, x: Sequence[int]) -> tuple[int, ...] | None:
    """Some integer c with a @ c == x, or None if there is none."""
    s = snf(a)
    y = s.u.apply(x)
    r = s.rank
    if any(y[r:]):
        return None
    w = []
    for yi, di in zip(y[:r], s.d):
        q, rem = divmod(yi, di)
        if rem:
            return None
        w.append(q)
    w += [0] * (a.cols - r)
    return s.v.apply(w)


def pushout_product_hom(f: IntMatrix, g: IntMatrix) -> GroupHom:
    """Z^a1 (x) Z^b0 glued to Z^a0 (x) Z^b1 along Z^a0 (x) Z^b0, mapped into Z^a1 (x) Z^b1."""
    (a1, a0), (b1, b0) = f.shape, g.shape
    rel = vstack([kron(f, IntMatrix.identity(b0)), kron(IntMatrix.identity(a0), g).scale(-1)],
                 cols=a0 * b0)
    corner = Subquotient(IntMatrix.identity(a1 * b0 + a0 * b1), rel)
    outward = hstack([kron(IntMatrix.identity(a1), g), kron(f, IntMatrix.identity(b1))], rows=a1 * b1)
    return GroupHom(corner.group, FgAbelianGroup(a1 * b1), outward @ corner.lifts)
