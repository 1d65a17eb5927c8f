"""Seeded random instances: twisted complexes, chain maps and members of L.

All randomness comes from Philox4x64-10 with the 128-bit key
``seed + 2**64 * stream`` and a zero counter, so a (seed, stream) pair names
the same random sequence in any implementation of that generator.
"""

from __future__ import annotations

import numpy as np

from .exactlin import IntMatrix, kernel_basis
from .franke import CrownedDiagram, Q_inverse
from .percomplex import ChainMap, PeriodicComplex, direct_sum_complex, disk

MAX_TRIES = 64


SEED_LIMIT = 2**64


def rng_from_seed(seed: int, stream: int = 0) -> np.random.Generator:
    if not (0 <= seed < SEED_LIMIT and 0 <= stream < SEED_LIMIT):
        raise ValueError("seed and stream must be unsigned 64-bit integers")
    return np.random.Generator(np.random.Philox(key=seed + stream * SEED_LIMIT))


def _matrix(rng: np.random.Generator, rows: int, cols: int, bound: int) -> IntMatrix:
    if rows == 0 or cols == 0 or bound == 0:
        return IntMatrix.zeros(rows, cols)
    vals = rng.integers(-bound, bound, size=(rows, cols), endpoint=True)
    return IntMatrix.from_rows(vals.tolist(), cols)


def _bounded(m: IntMatrix, bound: int) -> bool:
    return all(abs(v) <= bound for v in m.entries)


def _through(rng: np.random.Generator, left: IntMatrix, right: IntMatrix, bound: int) -> IntMatrix:
    """left @ R @ right.T for a small random R, resampled until entries are within bound."""
    rows, cols = left.rows, right.rows
    if left.cols == 0 or right.cols == 0:
        return IntMatrix.zeros(rows, cols)
    for _ in range(MAX_TRIES):
        m = left @ _matrix(rng, left.cols, right.cols, 1) @ right.T
        if _bounded(m, bound):
            return m
    return IntMatrix.zeros(rows, cols)


def generate_twisted(seed: int | np.random.Generator, period: int, max_rank: int,
                     max_entry: int) -> PeriodicComplex:
    """Degreewise-free twisted complex with d^2 = 0.

    d_1 is sampled freely, each following d_n is a random combination of
    kernel vectors of d_{n-1}, and d_0 closes the cycle by also annihilating
    the image of d_1.
    """
    rng = seed if isinstance(seed, np.random.Generator) else rng_from_seed(seed)
    n_ = period
    if max_rank <= 0:
        return PeriodicComplex.zero(n_)
    ranks = [int(r) for r in rng.integers(0, max_rank, size=n_, endpoint=True)]
    diffs: dict[int, IntMatrix] = {}
    diffs[1 % n_] = _matrix(rng, ranks[0], ranks[1 % n_], max_entry)
    for n in range(2, n_):
        ker = kernel_basis(diffs[n - 1])
        diffs[n] = _through(rng, ker, IntMatrix.identity(ranks[n]), max_entry)
    if n_ > 1:
        ker = kernel_basis(diffs[n_ - 1]) if n_ > 2 else kernel_basis(diffs[1])
        coker = kernel_basis(diffs[1].T)
        d0 = _through(rng, ker, coker, max_entry)
        diffs[0] = d0
    return PeriodicComplex(n_, ranks, [diffs[n] for n in range(n_)])


def random_chain_map(rng: np.random.Generator, x: PeriodicComplex, y: PeriodicComplex,
                     bound: int = 2) -> ChainMap:
    """A null-homotopic chain map d h + h d with small random h."""
    n_ = x.period
    h = [_matrix(rng, y.rank(n + 1), x.rank(n), bound) for n in range(n_)]
    blocks = [y.d(n + 1) @ h[n] + h[(n - 1) % n_] @ x.d(n) for n in range(n_)]
    return ChainMap(x, y, blocks)


def _unimodular(rng: np.random.Generator, k: int, steps: int = 3) -> tuple[IntMatrix, IntMatrix]:
    """A random unimodular matrix with its inverse, from elementary operations."""
    m = [[int(i == j) for j in range(k)] for i in range(k)]
    inv = [[int(i == j) for j in range(k)] for i in range(k)]
    if k >= 2:
        for _ in range(steps):
            a, c = (int(v) for v in rng.choice(k, size=2, replace=False))
            s = int(rng.choice([-1, 1]))
            # row a += s * row c on m; column c -= s * column a on inv
            m[a] = [u + s * v for u, v in zip(m[a], m[c])]
            for row in inv:
                row[c] -= s * row[a]
    return IntMatrix(k, k, m), IntMatrix(k, k, inv)


def _conjugate(x: PeriodicComplex, ps, pinvs) -> PeriodicComplex:
    n_ = x.period
    return PeriodicComplex(n_, [x.rank(n) for n in range(n_)],
                           [ps[(n - 1) % n_] @ x.d(n) @ pinvs[n] for n in range(n_)])


def thicken(rng: np.random.Generator, base: CrownedDiagram, max_disks: int = 1,
            bound: int = 2) -> CrownedDiagram:
    """Add contractible disks at every vertex, perturb edges by null-homotopic
    maps and change bases by unimodular matrices. Vertexwise homology and
    the maps it induces are unchanged."""
    n_ = base.period
    verts, basis = {}, {}
    for kind in ("b", "z"):
        for i in range(n_):
            v = base.beta(i) if kind == "b" else base.zeta(i)
            ndisk = int(rng.integers(0, max_disks, endpoint=True))
            disks = [disk(n_, int(rng.integers(0, n_)), 1) for _ in range(ndisk)]
            w = direct_sum_complex(v, *disks) if disks else v
            pairs = [_unimodular(rng, w.rank(n)) for n in range(n_)]
            ps, pinvs = [p for p, _ in pairs], [q for _, q in pairs]
            verts[(kind, i)] = (v, w, ps, pinvs)
    newv = {key: _conjugate(w, ps, pinvs) for key, (v, w, ps, pinvs) in verts.items()}

    def edge(f: ChainMap, src, tgt) -> ChainMap:
        v0, w0, _, pinv0 = verts[src]
        v1, w1, p1, _ = verts[tgt]
        blocks = []
        for n in range(n_):
            pad = [[0] * w0.rank(n) for _ in range(w1.rank(n))]
            blk = f.block(n)
            for r in range(blk.rows):
                for c in range(blk.cols):
                    pad[r][c] = blk[r, c]
            blocks.append(IntMatrix(w1.rank(n), w0.rank(n), pad))
        padded = ChainMap(w0, w1, blocks) + random_chain_map(rng, w0, w1, bound)
        return ChainMap(newv[src], newv[tgt],
                        [p1[n] @ padded.block(n) @ pinv0[n] for n in range(n_)])

    betas = [newv[("b", i)] for i in range(n_)]
    zetas = [newv[("z", i)] for i in range(n_)]
    ls = [edge(base.l(i), ("b", i), ("z", i)) for i in range(n_)]
    ks = [edge(base.k(i), ("b", (i - 1) % n_), ("z", i)) for i in range(n_)]
    return CrownedDiagram.build(n_, betas, zetas, ls, ks)


def random_L_member(seed: int | np.random.Generator, period: int, max_rank: int = 2,
                    max_entry: int = 3, max_disks: int = 1) -> CrownedDiagram:
    """Thickened split realization of a random twisted complex; free vertex homology."""
    rng = seed if isinstance(seed, np.random.Generator) else rng_from_seed(seed)
    m = generate_twisted(rng, period, max_rank, max_entry)
    return thicken(rng, Q_inverse(m), max_disks)


def random_mono(rng: np.random.Generator, max_rank: int, max_entry: int) -> IntMatrix:
    """An injective integer matrix (full column rank)."""
    from .exactlin import rank

    for _ in range(MAX_TRIES):
        cols = int(rng.integers(0, max_rank, endpoint=True))
        rows = int(rng.integers(cols, max_rank, endpoint=True)) if cols <= max_rank else cols
        m = _matrix(rng, rows, cols, max_entry)
        if rank(m) == cols:
            return m
    return IntMatrix.zeros(0, 0)


def random_complex_map(rng: np.random.Generator, period: int, max_rank: int,
                       max_entry: int) -> ChainMap:
    """A chain map between random twisted complexes (not necessarily null-homotopic)."""
    x = generate_twisted(rng, period, max_rank, max_entry)
    y = generate_twisted(rng, period, max_rank, max_entry)
    for _ in range(MAX_TRIES):
        blocks = [_matrix(rng, y.rank(n), x.rank(n), 1) for n in range(period)]
        if all((y.d(n) @ blocks[n]) == (blocks[(n - 1) % period] @ x.d(n)) for n in range(period)):
            return ChainMap(x, y, blocks)
    return random_chain_map(rng, x, y, 1)
