"""Bit-packed linear algebra over F2 and arithmetic in GF(2^m).

Vectors are Python ints with coordinate k stored in bit k. A matrix keeps one
packed int per row, so row operations are single xors.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import FrozenSet, Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np

from .errors import FieldError, NonDivisorError, SingularError


def bits_of(x: int) -> Iterator[int]:
    """Yield the indices of the set bits of x, lowest first."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass(frozen=True)
class BitVector:
    dim: int
    bits: int = 0

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("dim must be non-negative")
        if self.bits < 0 or self.bits >> self.dim:
            raise ValueError(f"bits {self.bits:#b} exceed dimension {self.dim}")

    @classmethod
    def basis(cls, dim: int, k: int) -> "BitVector":
        return cls(dim, 1 << k)

    @classmethod
    def from_list(cls, coords: Sequence[int]) -> "BitVector":
        bits = 0
        for k, c in enumerate(coords):
            if c & 1:
                bits |= 1 << k
        return cls(len(coords), bits)

    def __getitem__(self, k: int) -> int:
        return (self.bits >> k) & 1

    def __add__(self, other: "BitVector") -> "BitVector":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return BitVector(self.dim, self.bits ^ other.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def support(self) -> Tuple[int, ...]:
        return tuple(bits_of(self.bits))

    def to_list(self) -> List[int]:
        return [(self.bits >> k) & 1 for k in range(self.dim)]


VectorLike = Union[BitVector, int]


def _reduce_rows(rows: Iterable[int], cols: int) -> Tuple[List[int], List[int]]:
    """Gauss-Jordan on packed rows, pivoting on the first set bit.

    Only bits below `cols` are used as pivots; higher bits ride along, which is
    how the augmented inverse works. Returns the nonzero reduced rows and their
    pivot columns.
    """
    work = list(rows)
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        bit = 1 << c
        pivot = None
        for i in range(r, len(work)):
            if work[i] & bit:
                pivot = i
                break
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        head = work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= head
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def row_basis(vectors: Iterable[int], dim: int) -> List[int]:
    """Reduced echelon basis of the span of `vectors`."""
    reduced, _ = _reduce_rows(vectors, dim)
    return reduced


def span(basis: Sequence[int]) -> np.ndarray:
    """All F2-combinations of `basis`, sorted."""
    out = np.zeros(1, dtype=np.int64)
    for v in basis:
        out = np.concatenate([out, out ^ v])
    return np.sort(out)


@dataclass(frozen=True)
class BitMatrix:
    rows: int
    cols: int
    data: Tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix shape must be non-negative")
        if len(self.data) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.data)}")
        limit = 1 << self.cols
        for r, row in enumerate(self.data):
            if row < 0 or row >= limit:
                raise ValueError(f"row {r} has bits beyond column {self.cols}")

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << k for k in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int = None) -> "BitMatrix":
        cols = rows if cols is None else cols
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int = None) -> "BitMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        data = []
        for r, row in enumerate(rows):
            if len(row) != cols:
                raise ValueError(f"row {r} has {len(row)} entries, expected {cols}")
            data.append(BitVector.from_list(row).bits)
        return cls(len(rows), cols, tuple(data))

    @classmethod
    def from_columns(cls, columns: Sequence[int], rows: int) -> "BitMatrix":
        data = [0] * rows
        for c, col in enumerate(columns):
            for r in bits_of(col):
                if r >= rows:
                    raise ValueError(f"column {c} has bits beyond row {rows}")
                data[r] |= 1 << c
        return cls(rows, len(columns), tuple(data))

    @classmethod
    def stack(cls, matrices: Sequence["BitMatrix"], cols: int) -> "BitMatrix":
        """Rows of all `matrices` one after another."""
        data: List[int] = []
        for m in matrices:
            if m.cols != cols:
                raise ValueError("column count mismatch in stack")
            data.extend(m.data)
        return cls(len(data), cols, tuple(data))

    def entry(self, r: int, c: int) -> int:
        return (self.data[r] >> c) & 1

    def row(self, r: int) -> BitVector:
        return BitVector(self.cols, self.data[r])

    @cached_property
    def columns(self) -> Tuple[int, ...]:
        cols = [0] * self.cols
        for r, row in enumerate(self.data):
            for c in bits_of(row):
                cols[c] |= 1 << r
        return tuple(cols)

    def apply(self, v: int) -> int:
        out = 0
        cols = self.columns
        for k in bits_of(v):
            out ^= cols[k]
        return out

    def __call__(self, v: VectorLike) -> VectorLike:
        if isinstance(v, BitVector):
            if v.dim != self.cols:
                raise ValueError("dimension mismatch")
            return BitVector(self.rows, self.apply(v.bits))
        return self.apply(v)

    def images(self) -> np.ndarray:
        """M*v for every v in 0 .. 2^cols - 1, indexed by v."""
        out = np.zeros(1, dtype=np.int64)
        for col in self.columns:
            out = np.concatenate([out, out ^ col])
        return out

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        data = []
        for row in self.data:
            acc = 0
            for k in bits_of(row):
                acc ^= other.data[k]
            data.append(acc)
        return BitMatrix(self.rows, other.cols, tuple(data))

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return BitMatrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.data, other.data)))

    def __pow__(self, k: int) -> "BitMatrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        result = BitMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.cols, self.rows, self.columns)

    def is_zero(self) -> bool:
        return not any(self.data)

    def is_identity(self) -> bool:
        return self.rows == self.cols and self.data == BitMatrix.identity(self.rows).data

    def commutes_with(self, other: "BitMatrix") -> bool:
        return self @ other == other @ self

    def rank(self) -> int:
        reduced, _ = _reduce_rows(self.data, self.cols)
        return len(reduced)

    def inverse(self) -> "BitMatrix":
        if self.rows != self.cols:
            raise SingularError(f"{self.rows}x{self.cols} matrix is not square")
        n = self.rows
        augmented = [row | (1 << (n + r)) for r, row in enumerate(self.data)]
        reduced, pivots = _reduce_rows(augmented, n)
        if len(pivots) < n:
            raise SingularError(f"matrix has rank {len(pivots)} < {n}")
        return BitMatrix(n, n, tuple(row >> n for row in reduced))

    def kernel_basis(self) -> Tuple[int, ...]:
        """Basis of {v : M v = 0}, one vector per free column."""
        reduced, pivots = _reduce_rows(self.data, self.cols)
        pivot_set = set(pivots)
        basis = []
        for free in range(self.cols):
            if free in pivot_set:
                continue
            v = 1 << free
            for row, p in zip(reduced, pivots):
                if (row >> free) & 1:
                    v |= 1 << p
            basis.append(v)
        return tuple(basis)

    def to_lists(self) -> List[List[int]]:
        return [[(row >> c) & 1 for c in range(self.cols)] for row in self.data]


def rank(matrix: BitMatrix) -> int:
    return matrix.rank()


def invert(matrix: BitMatrix) -> BitMatrix:
    return matrix.inverse()


# GF(2^m)

# Fixed irreducible moduli, bit k = coefficient of x^k.
STANDARD_MODULI = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
    9: (1 << 9) | (1 << 4) | 1,
    10: (1 << 10) | (1 << 3) | 1,
    11: (1 << 11) | (1 << 2) | 1,
    12: (1 << 12) | (1 << 6) | (1 << 4) | (1 << 1) | 1,
}

MAX_FIELD_DEGREE = 16


def poly_mod(a: int, b: int) -> int:
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        a ^= b << (a.bit_length() - 1 - db)
    return a


@lru_cache(maxsize=None)
def is_irreducible(poly: int) -> bool:
    """Brute-force divisor search over all polynomials of degree <= deg/2."""
    degree = poly.bit_length() - 1
    if degree < 1:
        return False
    for divisor in range(2, 1 << (degree // 2 + 1)):
        if poly_mod(poly, divisor) == 0:
            return False
    return True


def format_poly(poly: int) -> str:
    terms = []
    for k in sorted(bits_of(poly), reverse=True):
        terms.append("1" if k == 0 else ("x" if k == 1 else f"x^{k}"))
    return " + ".join(terms) or "0"


@dataclass(frozen=True)
class FieldF2m:
    m: int
    modulus: int

    def __post_init__(self):
        if not 1 <= self.m <= MAX_FIELD_DEGREE:
            raise FieldError(f"extension degree {self.m} outside 1..{MAX_FIELD_DEGREE}")
        if self.modulus.bit_length() - 1 != self.m:
            raise FieldError(f"modulus {format_poly(self.modulus)} does not have degree {self.m}")
        if not is_irreducible(self.modulus):
            raise FieldError(f"modulus {format_poly(self.modulus)} is reducible")

    @classmethod
    def standard(cls, m: int) -> "FieldF2m":
        if m not in STANDARD_MODULI:
            raise FieldError(f"no built-in modulus for m = {m}; pass one explicitly")
        return cls(m, STANDARD_MODULI[m])

    @property
    def order(self) -> int:
        return 1 << self.m

    def contains(self, a: int) -> bool:
        return 0 <= a < self.order

    def mul(self, a: int, b: int) -> int:
        result = 0
        top = 1 << self.m
        while b:
            if b & 1:
                result ^= a
            b >>= 1
            a <<= 1
            if a & top:
                a ^= self.modulus
        return result

    def pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def inverse(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, self.order - 2)

    def frobenius(self, a: int, times: int = 1) -> int:
        for _ in range(times):
            a = self.mul(a, a)
        return a


def field_mul(field: FieldF2m, a: int, b: int) -> int:
    return field.mul(a, b)


def _subfield_map(field: FieldF2m, d: int) -> BitMatrix:
    if d <= 0 or field.m % d:
        raise NonDivisorError(f"{d} does not divide {field.m}")
    columns = [field.frobenius(1 << k, d) ^ (1 << k) for k in range(field.m)]
    return BitMatrix.from_columns(columns, field.m)


def subfield_basis(field: FieldF2m, d: int) -> Tuple[int, ...]:
    """F2-basis of the subfield GF(2^d): the kernel of a -> a^(2^d) + a."""
    return _subfield_map(field, d).kernel_basis()


def subfield_elements(field: FieldF2m, d: int) -> FrozenSet[int]:
    return frozenset(int(x) for x in span(subfield_basis(field, d)))


def mul_endomorphism(field: FieldF2m, c: int) -> BitMatrix:
    """Matrix of a -> c*a in the basis 1, x, ..., x^(m-1)."""
    return BitMatrix.from_columns([field.mul(c, 1 << k) for k in range(field.m)], field.m)
