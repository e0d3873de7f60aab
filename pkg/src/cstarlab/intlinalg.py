"""Exact integer-matrix algebra: Smith normal form, kernels, cokernels.

Everything here runs over Z with Python's arbitrary-precision integers, so
there is no overflow regardless of how large intermediate entries get.  The
two consumers are the six-term exact-sequence solver (boundary/exponential
maps between free K-groups) and the Cuntz-semigroup surjectivity criterion.

Pivoting strategy: always move the smallest nonzero entry (in absolute
value) of the working block into pivot position.  This keeps entry growth
modest in practice at the desk scales we care about (dims <= 100).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IntMatrix:
    """An immutable rows x cols integer matrix (row-major nested tuples)."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.entries)}")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError(f"expected {self.cols} columns, got {len(row)}")
            for x in row:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise TypeError(f"entries must be Python ints, got {x!r}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], *, cols: int | None = None) -> "IntMatrix":
        """Build from any nested iterable; `cols` disambiguates empty rows."""
        data = tuple(tuple(int(x) for x in row) for row in rows)
        ncols = cols if cols is not None else (len(data[0]) if data else 0)
        return cls(len(data), ncols, data)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def entry(self, i: int, j: int) -> int:
        return self.entries[i][j]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.entries[i][j] for i in range(self.rows))
                               for j in range(self.cols)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            row = self.entries[i]
            out.append(tuple(sum(row[k] * other.entries[k][j] for k in range(self.cols))
                             for j in range(other.cols)))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(a + b for a, b in zip(ra, rb))
                               for ra, rb in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same_shape(other)
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(a - b for a, b in zip(ra, rb))
                               for ra, rb in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols,
                         tuple(tuple(-a for a in row) for row in self.entries))

    def _check_same_shape(self, other: "IntMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def is_diagonal(self) -> bool:
        return all(self.entries[i][j] == 0
                   for i in range(self.rows) for j in range(self.cols) if i != j)

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(min(self.rows, self.cols)))

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.entries) + "]"


@dataclass(frozen=True)
class FGAbelianGroup:
    """A finitely generated abelian group Z^free_rank + Z/d1 + ... + Z/dk.

    The torsion orders form a divisibility chain d1 | d2 | ... with every
    di >= 2 (trivial factors are never stored), so equality of invariants
    is literal structural equality.
    """

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for d in self.torsion:
            if not isinstance(d, int) or d < 2:
                raise ValueError(f"torsion orders must be integers >= 2, got {d!r}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a != 0:
                raise ValueError(f"torsion orders must form a divisibility chain, got {self.torsion}")

    @classmethod
    def free(cls, rank: int) -> "FGAbelianGroup":
        return cls(rank, ())

    @classmethod
    def zero(cls) -> "FGAbelianGroup":
        return cls(0, ())

    @classmethod
    def cyclic(cls, n: int) -> "FGAbelianGroup":
        """Z/n for n >= 2, Z for n = 0, trivial group for n = 1."""
        if n == 0:
            return cls(1, ())
        if n == 1:
            return cls(0, ())
        return cls(0, (n,))

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def direct_sum(self, other: "FGAbelianGroup") -> "FGAbelianGroup":
        """Direct sum, renormalising the combined torsion to a chain."""
        return FGAbelianGroup(self.free_rank + other.free_rank,
                              invariant_factors(self.torsion + other.torsion))

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


Z = FGAbelianGroup.free(1)
ZERO_GROUP = FGAbelianGroup.zero()


def invariant_factors(orders: Sequence[int]) -> tuple[int, ...]:
    """Renormalise cyclic orders (each >= 2) into a divisibility chain.

    Works prime-by-prime: the multiset of p-adic valuations is preserved,
    largest valuations going to the last factor.
    """
    orders = [int(d) for d in orders if d != 1]
    if any(d < 1 for d in orders):
        raise ValueError("cyclic orders must be positive")
    if not orders:
        return ()
    # collect prime powers
    powers: dict[int, list[int]] = {}
    for d in orders:
        n = d
        p = 2
        while p * p <= n:
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                powers.setdefault(p, []).append(e)
            p += 1
        if n > 1:
            powers.setdefault(n, []).append(1)
    k = max(len(v) for v in powers.values())
    factors = [1] * k
    for p, exps in powers.items():
        exps = sorted(exps, reverse=True)
        for slot, e in enumerate(exps):
            factors[k - 1 - slot] *= p ** e
    return tuple(f for f in factors if f >= 2)


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ m @ V == d with U, V unimodular and d diagonal (chain d1|d2|...)."""

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d.diagonal() if x != 0)

    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(x for x in self.d.diagonal() if x != 0)


def smith_normal_form(m: IntMatrix) -> SmithDecomposition:
    """Diagonalise m over Z by unimodular row and column operations.

    Returns (U, D, V) with U*m*V = D exactly, |det U| = |det V| = 1 and the
    nonzero diagonal of D a divisibility chain of positive integers.  Empty
    matrices come back unchanged with identity transforms.
    """
    r, c = m.rows, m.cols
    a = m.to_lists()
    u = IntMatrix.identity(r).to_lists()
    v = IntMatrix.identity(c).to_lists()

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(r, c):
        # smallest nonzero entry of the remaining block becomes the pivot
        best = None
        for i in range(t, r):
            for j in range(t, c):
                x = abs(a[i][j])
                if x and (best is None or x < best[0]):
                    best = (x, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            swap_cols(t, bj)
        if a[t][t] < 0:
            negate_row(t)

        while True:
            # clear column t, restarting whenever a smaller remainder shows up
            reduced = True
            while reduced:
                reduced = False
                for i in range(t + 1, r):
                    if a[i][t]:
                        q, rem = divmod(a[i][t], a[t][t])
                        add_row(i, t, -q)
                        if rem:
                            swap_rows(t, i)  # rem < pivot: shrink the pivot
                            reduced = True
                for j in range(t + 1, c):
                    if a[t][j]:
                        q, rem = divmod(a[t][j], a[t][t])
                        add_col(j, t, -q)
                        if rem:
                            swap_cols(t, j)
                            reduced = True
            # pivot must divide the rest of the block for the chain property
            d = a[t][t]
            offender = None
            for i in range(t + 1, r):
                for j in range(t + 1, c):
                    if a[i][j] % d:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(t, offender, 1)
        t += 1

    return SmithDecomposition(IntMatrix.from_rows(u, cols=r),
                              IntMatrix.from_rows(a, cols=c),
                              IntMatrix.from_rows(v, cols=c))


def rank(m: IntMatrix) -> int:
    """Rank of m over Q (equivalently the number of nonzero SNF entries)."""
    return smith_normal_form(m).rank


def cokernel(m: IntMatrix) -> FGAbelianGroup:
    """Cokernel of m viewed as a map Z^cols -> Z^rows."""
    snf = smith_normal_form(m)
    torsion = tuple(d for d in snf.invariant_factors() if d > 1)
    return FGAbelianGroup(m.rows - snf.rank, torsion)


def kernel_rank(m: IntMatrix) -> int:
    """Rank of ker(m : Z^cols -> Z^rows); kernels of integer maps are free."""
    return m.cols - smith_normal_form(m).rank


def det_bareiss(m: IntMatrix) -> int:
    """Exact determinant via Bareiss fraction-free elimination.

    Kept independent of the SNF code path so tests can certify that the
    transforms returned by `smith_normal_form` really are unimodular.
    """
    if m.rows != m.cols:
        raise ValueError("determinant requires a square matrix")
    n = m.rows
    if n == 0:
        return 1
    a = m.to_lists()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # exact division: every 2x2 minor update is divisible by prev
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_unimodular(m: IntMatrix) -> bool:
    return m.rows == m.cols and abs(det_bareiss(m)) == 1
