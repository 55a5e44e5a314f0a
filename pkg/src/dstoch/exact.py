"""Exact value layer: rationals, doubly stochastic matrices, permutations,
partitions, simplex vectors and generator sets.

Indices are 0-based internally. Everything that leaves the library (JSON,
reports, CLI output) is converted to 1-based indices.

Matrices are stored as a row-major tuple of integer numerators over one
common positive denominator, reduced so that the gcd of all numerators and
the denominator is 1. That form is unique for a given matrix value, so
equality and hashing work on it directly and products stay in integer
arithmetic.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from operator import mul

from .errors import (
    ColSumNotOne,
    DimensionMismatch,
    InvalidGeneratorSet,
    InvalidPartition,
    InvalidPermutation,
    InvalidRational,
    InvalidSubsetPair,
    InvalidVector,
    NegativeEntry,
    NotSquare,
    RowSumNotOne,
    UnknownGenerator,
)

Rational = Fraction


def to_rational(value) -> Fraction:
    """Parse an exact rational from a string ("a/b", "3"), int or Fraction.

    Floats are refused: they would silently import rounding error into the
    exact layer.
    """
    if isinstance(value, bool):
        raise InvalidRational(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidRational(f"not a rational: {value!r}") from exc
    raise InvalidRational(f"not an exact rational: {value!r}")


def fmt(value: Fraction) -> str:
    return str(Fraction(value))


class DSMatrix:
    """An immutable n x n doubly stochastic matrix with exact entries."""

    __slots__ = ("n", "_num", "_den", "_rows", "_key", "_hash")

    def __init__(self, n: int, num: Sequence[int], den: int):
        # Trusted constructor: callers guarantee validity and reduced form.
        self.n = n
        self._num = tuple(num)
        self._den = den
        self._rows = None
        self._key = None
        self._hash = None

    @classmethod
    def _from_ints(cls, n: int, num: Sequence[int], den: int) -> "DSMatrix":
        g = math.gcd(den, *num)
        if g != 1:
            num = [a // g for a in num]
            den //= g
        return cls(n, num, den)

    @classmethod
    def from_fractions(cls, rows: Sequence[Sequence[Fraction]]) -> "DSMatrix":
        n = len(rows)
        den = math.lcm(*(Fraction(x).denominator for r in rows for x in r)) if n else 1
        num = [int(Fraction(x) * den) for r in rows for x in r]
        return cls(n, num, den)

    @classmethod
    def identity(cls, n: int) -> "DSMatrix":
        return cls(n, [1 if i == j else 0 for i in range(n) for j in range(n)], 1)

    @classmethod
    def uniform(cls, n: int) -> "DSMatrix":
        return cls(n, [1] * (n * n), n)

    # -- access -----------------------------------------------------------
    @property
    def den(self) -> int:
        return self._den

    @property
    def num(self) -> tuple:
        return self._num

    @property
    def rows(self) -> tuple:
        if self._rows is None:
            n, d = self.n, self._den
            self._rows = tuple(
                tuple(Fraction(a, d) for a in self._num[i * n:(i + 1) * n]) for i in range(n)
            )
        return self._rows

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return Fraction(self._num[i * self.n + j], self._den)

    def entries(self) -> Iterator[Fraction]:
        for r in self.rows:
            yield from r

    def support(self) -> Iterator[tuple]:
        n = self.n
        for idx, a in enumerate(self._num):
            if a:
                yield divmod(idx, n)

    def is_identity(self) -> bool:
        return self == DSMatrix.identity(self.n)

    def is_permutation(self) -> bool:
        return self._den == 1

    # -- algebra ----------------------------------------------------------
    def __matmul__(self, other: "DSMatrix") -> "DSMatrix":
        return multiply(self, other)

    def transpose(self) -> "DSMatrix":
        n, a = self.n, self._num
        return DSMatrix(n, [a[j * n + i] for i in range(n) for j in range(n)], self._den)

    def apply(self, p: "SimplexVector") -> "SimplexVector":
        """Matrix-vector product M p."""
        if p.n != self.n:
            raise DimensionMismatch(f"matrix is {self.n}x{self.n}, vector has {p.n} coordinates")
        return SimplexVector._trusted(tuple(
            sum((x * c for x, c in zip(row, p.coords)), Fraction(0)) for row in self.rows
        ))

    def permute_rows(self, perm: "Permutation") -> "DSMatrix":
        """Return perm_matrix @ self: row i of the result is row perm^-1(i) of self."""
        n, a = self.n, self._num
        inv = perm.inverse().images
        return DSMatrix(n, [a[inv[i] * n + j] for i in range(n) for j in range(n)], self._den)

    def conjugate(self, perm: "Permutation") -> "DSMatrix":
        """P^-1 M P."""
        n, a, p = self.n, self._num, perm.images
        # (P^-1 M P)[i, j] = M[P i, P j]
        return DSMatrix(n, [a[p[i] * n + p[j]] for i in range(n) for j in range(n)], self._den)

    def to_float(self):
        import numpy as np

        return np.array(self._num, dtype=float).reshape(self.n, self.n) / self._den

    # -- identity ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, DSMatrix):
            return NotImplemented
        return self.n == other.n and self._den == other._den and self._num == other._num

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self._den, self._num))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(fmt(x) for x in r) for r in self.rows)
        return f"DSMatrix([{body}])"

    def to_json(self) -> dict:
        return {"n": self.n, "rows": [[fmt(x) for x in r] for r in self.rows]}


def ds_from_rows(rows) -> DSMatrix:
    """Validate a grid of rationals and build a :class:`DSMatrix`.

    Entries may be Fractions, ints or strings such as ``"3/4"``.
    """
    rows = [list(r) for r in rows]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise NotSquare(f"expected a square grid, got row lengths {[len(r) for r in rows]}")
    grid = [[to_rational(x) for x in r] for r in rows]
    for i, r in enumerate(grid):
        for j, x in enumerate(r):
            if x < 0:
                raise NegativeEntry(f"entry ({i + 1},{j + 1}) is {x}", row=i, col=j)
    for i, r in enumerate(grid):
        total = sum(r)
        if total != 1:
            raise RowSumNotOne(i, total)
    for j in range(n):
        total = sum(grid[i][j] for i in range(n))
        if total != 1:
            raise ColSumNotOne(j, total)
    return DSMatrix.from_fractions(grid)


def multiply(a: DSMatrix, b: DSMatrix) -> DSMatrix:
    if a.n != b.n:
        raise DimensionMismatch(f"cannot multiply {a.n}x{a.n} by {b.n}x{b.n}")
    n = a.n
    an, bn = a._num, b._num
    cols = [bn[j::n] for j in range(n)]
    out = [sum(map(mul, an[i * n:(i + 1) * n], c)) for i in range(n) for c in cols]
    return DSMatrix._from_ints(n, out, a._den * b._den)


def product(matrices: Iterable[DSMatrix], n: int | None = None) -> DSMatrix:
    """Left-to-right product; the empty product is the identity (needs ``n``)."""
    result = None
    for m in matrices:
        result = m if result is None else multiply(result, m)
    if result is None:
        if n is None:
            raise DimensionMismatch("empty product needs an explicit dimension")
        return DSMatrix.identity(n)
    return result


def canonical_key(m: DSMatrix) -> bytes:
    """Row-major reduced-fraction encoding; injective on matrix values."""
    if m._key is None:
        d = m._den
        parts = []
        for a in m._num:
            g = math.gcd(a, d)
            parts.append(f"{a // g}/{d // g}")
        m._key = f"{m.n}:{','.join(parts)}".encode()
    return m._key


# -- permutations ----------------------------------------------------------

@dataclass(frozen=True)
class Permutation:
    """Element of S_n; ``images[j]`` is P(j) (0-based)."""

    images: tuple

    def __post_init__(self):
        imgs = tuple(self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise InvalidPermutation(f"not a bijection on 0..{len(imgs) - 1}: {imgs}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def from_one_based(cls, images: Sequence[int]) -> "Permutation":
        try:
            return cls(tuple(int(i) - 1 for i in images))
        except (TypeError, ValueError) as exc:
            raise InvalidPermutation(f"bad permutation {images!r}") from exc

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        imgs = list(range(n))
        imgs[i], imgs[j] = imgs[j], imgs[i]
        return cls(tuple(imgs))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, j: int) -> int:
        return self.images[j]

    def compose(self, other: "Permutation") -> "Permutation":
        """self o other, i.e. j -> self(other(j)); matches matrix product self @ other."""
        return Permutation(tuple(self.images[k] for k in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for j, i in enumerate(self.images):
            inv[i] = j
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for j, i in enumerate(self.images))

    def apply_set(self, mask: int) -> int:
        out = 0
        for j in iter_bits(mask):
            out |= 1 << self.images[j]
        return out

    def matrix(self) -> DSMatrix:
        return permutation_matrix(self)

    def to_one_based(self) -> list:
        return [i + 1 for i in self.images]


def permutation_matrix(perm: Permutation) -> DSMatrix:
    """P[i, j] = 1 iff i = P(j)."""
    n = perm.n
    num = [0] * (n * n)
    for j, i in enumerate(perm.images):
        num[i * n + j] = 1
    return DSMatrix(n, num, 1)


# -- partitions -----------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Set partition of {0..n-1} in canonical form (blocks sorted by minimum)."""

    blocks: tuple

    def __post_init__(self):
        blocks = [tuple(sorted(int(i) for i in b)) for b in self.blocks]
        if any(not b for b in blocks):
            raise InvalidPartition("empty block")
        flat = [i for b in blocks for i in b]
        if sorted(flat) != list(range(len(flat))):
            raise InvalidPartition(f"blocks do not partition 0..{len(flat) - 1}: {blocks}")
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @classmethod
    def from_one_based(cls, blocks, n: int | None = None) -> "Partition":
        try:
            part = cls(tuple(tuple(int(i) - 1 for i in b) for b in blocks))
        except (TypeError, ValueError) as exc:
            raise InvalidPartition(f"bad partition {blocks!r}") from exc
        if n is not None and part.n != n:
            raise InvalidPartition(f"partition covers {part.n} indices, expected {n}")
        return part

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        return cls(tuple((i,) for i in range(n)))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        groups: dict = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i)
        return cls(tuple(groups.values()))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def labels(self) -> list:
        lab = [0] * self.n
        for t, b in enumerate(self.blocks):
            for i in b:
                lab[i] = t
        return lab

    def join(self, other: "Partition") -> "Partition":
        """Finest partition coarser than both."""
        if self.n != other.n:
            raise DimensionMismatch("partitions of different sizes")
        uf = UnionFind(self.n)
        for b in self.blocks + other.blocks:
            for i in b[1:]:
                uf.union(b[0], i)
        return Partition.from_labels([uf.find(i) for i in range(self.n)])

    def to_one_based(self) -> list:
        return [[i + 1 for i in b] for b in self.blocks]


def averaging(partition: Partition) -> DSMatrix:
    """M[i, j] = 1/|B| when i and j share block B, else 0."""
    n = partition.n
    den = math.lcm(*(len(b) for b in partition.blocks))
    num = [0] * (n * n)
    for b in partition.blocks:
        w = den // len(b)
        for i in b:
            for j in b:
                num[i * n + j] = w
    return DSMatrix(n, num, den)


def averaging_over(n: int, *blocks_one_based) -> DSMatrix:
    """A_P convenience: the listed 1-based blocks are averaged, every other index is fixed."""
    seen = {i - 1 for b in blocks_one_based for i in b}
    blocks = [tuple(i - 1 for i in b) for b in blocks_one_based]
    blocks += [(i,) for i in range(n) if i not in seen]
    return averaging(Partition(tuple(blocks)))


class UnionFind:
    """Disjoint sets over 0..size-1 with path halving and union by size."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def groups(self) -> list:
        out: dict = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


# -- vectors and subset pairs ---------------------------------------------

@dataclass(frozen=True)
class SimplexVector:
    coords: tuple

    def __post_init__(self):
        coords = tuple(to_rational(c) for c in self.coords)
        if not coords:
            raise InvalidVector("empty vector")
        if any(c < 0 or c > 1 for c in coords):
            raise InvalidVector(f"coordinates must lie in [0, 1]: {[fmt(c) for c in coords]}")
        if sum(coords) != 1:
            raise InvalidVector(f"coordinates sum to {sum(coords)}, not 1")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def _trusted(cls, coords: tuple) -> "SimplexVector":
        v = object.__new__(cls)
        object.__setattr__(v, "coords", coords)
        return v

    @classmethod
    def basis(cls, n: int, i: int = 0) -> "SimplexVector":
        return cls(tuple(Fraction(int(k == i)) for k in range(n)))

    @classmethod
    def uniform(cls, n: int) -> "SimplexVector":
        return cls((Fraction(1, n),) * n)

    @property
    def n(self) -> int:
        return len(self.coords)

    def __getitem__(self, i: int) -> Fraction:
        return self.coords[i]

    def permuted(self, perm: Permutation) -> "SimplexVector":
        """P p: coordinate P(j) of the result is coordinate j of p."""
        out = [Fraction(0)] * self.n
        for j, i in enumerate(perm.images):
            out[i] = self.coords[j]
        return SimplexVector._trusted(tuple(out))

    def to_json(self) -> dict:
        return {"n": self.n, "coords": [fmt(c) for c in self.coords]}


def linf(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return max((abs(a - b) for a, b in zip(u, v)), default=Fraction(0))


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True, order=True)
class SubsetPair:
    """Index sets X, Y as bitmasks (bit i = index i); |X| = |Y| and X != Y."""

    X: int
    Y: int

    def __post_init__(self):
        if self.X == self.Y or self.X.bit_count() != self.Y.bit_count():
            raise InvalidSubsetPair(f"need X != Y with |X| = |Y|, got {self.X:b}, {self.Y:b}")

    @property
    def size(self) -> int:
        return self.X.bit_count()

    def block_sum(self, m: DSMatrix) -> Fraction:
        return sum((m[i, j] for i in iter_bits(self.X) for j in iter_bits(self.Y)), Fraction(0))

    def to_json(self) -> dict:
        return {"X": [i + 1 for i in iter_bits(self.X)], "Y": [j + 1 for j in iter_bits(self.Y)]}


# -- generator sets ---------------------------------------------------------

class GeneratorSet(Mapping):
    """Nonempty, ordered name -> DSMatrix mapping with a common dimension."""

    def __init__(self, items):
        if isinstance(items, Mapping):
            items = list(items.items())
        else:
            items = list(items)
        if not items:
            raise InvalidGeneratorSet("generator set must be nonempty")
        names = [k for k, _ in items]
        if len(set(names)) != len(names):
            raise InvalidGeneratorSet(f"duplicate generator names in {names}")
        dims = {m.n for _, m in items}
        if len(dims) != 1:
            raise DimensionMismatch(f"generators have mixed dimensions {sorted(dims)}")
        self._items = dict(items)
        self.n = dims.pop()

    @classmethod
    def of(cls, *matrices: DSMatrix, prefix: str = "M") -> "GeneratorSet":
        return cls([(f"{prefix}{k + 1}", m) for k, m in enumerate(matrices)])

    def __getitem__(self, name: str) -> DSMatrix:
        try:
            return self._items[name]
        except KeyError:
            raise UnknownGenerator(f"unknown generator {name!r}") from None

    def __iter__(self):
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    @property
    def names(self) -> list:
        return list(self._items)

    def subset(self, names: Iterable[str]) -> "GeneratorSet":
        return GeneratorSet([(k, self[k]) for k in names])

    def union(self, other: Mapping) -> "GeneratorSet":
        return GeneratorSet(list(self.items()) + list(other.items()))

    def evaluate(self, word: Sequence[str]) -> DSMatrix:
        return product((self[w] for w in word), self.n)

    def to_json(self) -> dict:
        return {"generators": {k: m.to_json() for k, m in self.items()}}


Word = tuple
