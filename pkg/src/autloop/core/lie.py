"""Lie algebras over F2 given by structure constants.

Basis vectors and elements are packed ints (see gf2). Only [e_i, e_j] for i < j
is stored; the table is alternating and symmetric because the field has
characteristic 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from .errors import JacobiError, UnsupportedParams
from .gf2 import BitMatrix, BitVector, bits_of, row_basis
from .models import CatalogKind, SeriesReport, W2PlusMethod

Element = Union[BitVector, int]

MAX_CATALOG_DIM = 32


class LieAlgebraF2:
    def __init__(self, dim: int, brackets: Mapping[Tuple[int, int], Element] = None):
        if dim < 0:
            raise UnsupportedParams(f"dimension must be non-negative, got {dim}")
        self.dim = dim
        table = [[0] * dim for _ in range(dim)]
        for (i, j), out in (brackets or {}).items():
            if not (0 <= i < j < dim):
                raise UnsupportedParams(f"bracket index pair ({i}, {j}) must satisfy 0 <= i < j < {dim}")
            bits = out.bits if isinstance(out, BitVector) else int(out)
            if bits < 0 or bits >> dim:
                raise UnsupportedParams(f"bracket [e{i}, e{j}] leaves the {dim}-dimensional space")
            table[i][j] = table[j][i] = bits
        self._table = table

    @classmethod
    def _from_table(cls, dim: int, table: List[List[int]]) -> "LieAlgebraF2":
        algebra = cls.__new__(cls)
        algebra.dim = dim
        algebra._table = table
        return algebra

    def table(self, i: int, j: int) -> int:
        return self._table[i][j]

    @property
    def structure(self) -> Dict[Tuple[int, int], int]:
        """Nonzero structure constants keyed by (i, j), i < j."""
        n = self.dim
        return {(i, j): self._table[i][j] for i in range(n) for j in range(i + 1, n) if self._table[i][j]}

    def bracket_bits(self, x: int, y: int) -> int:
        out = 0
        for i in bits_of(x):
            row = self._table[i]
            for j in bits_of(y):
                out ^= row[j]
        return out

    def _key(self):
        return self.dim, tuple(sorted(self.structure.items()))

    def __eq__(self, other):
        if not isinstance(other, LieAlgebraF2):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        pairs = ", ".join(f"[e{i},e{j}]={out:#b}" for (i, j), out in sorted(self.structure.items()))
        return f"LieAlgebraF2(dim={self.dim}{', ' + pairs if pairs else ''})"


def bracket(L: LieAlgebraF2, x: Element, y: Element) -> Element:
    if isinstance(x, BitVector) or isinstance(y, BitVector):
        xv = x if isinstance(x, BitVector) else BitVector(L.dim, x)
        yv = y if isinstance(y, BitVector) else BitVector(L.dim, y)
        if xv.dim != L.dim or yv.dim != L.dim:
            raise ValueError("element dimension does not match the algebra")
        return BitVector(L.dim, L.bracket_bits(xv.bits, yv.bits))
    return L.bracket_bits(x, y)


def ad_matrix(L: LieAlgebraF2, x: Element) -> BitMatrix:
    """Matrix of y -> [x, y]; column k is [x, e_k]."""
    bits = x.bits if isinstance(x, BitVector) else x
    return BitMatrix.from_columns([L.bracket_bits(bits, 1 << k) for k in range(L.dim)], L.dim)


def jacobi_failure(L: LieAlgebraF2) -> Optional[Tuple[Tuple[int, int, int], int]]:
    """First basis triple i < j < k where the Jacobi sum is nonzero, with the residual."""
    n = L.dim
    t = L._table
    for i in range(n):
        for j in range(i + 1, n):
            ij = t[i][j]
            for k in range(j + 1, n):
                residual = L.bracket_bits(ij, 1 << k) ^ L.bracket_bits(t[j][k], 1 << i) ^ L.bracket_bits(t[k][i], 1 << j)
                if residual:
                    return (i, j, k), residual
    return None


def validate(L: LieAlgebraF2) -> LieAlgebraF2:
    failure = jacobi_failure(L)
    if failure is not None:
        raise JacobiError(*failure)
    return L


def _descending(L: LieAlgebraF2, derived: bool) -> List[int]:
    n = L.dim
    full = [1 << k for k in range(n)]
    current = full
    dims = [n]
    while current:
        left = current if derived else full
        nxt = row_basis((L.bracket_bits(x, y) for x in left for y in current), n)
        if len(nxt) == len(current):
            break
        dims.append(len(nxt))
        current = nxt
    return dims


def series(L: LieAlgebraF2) -> SeriesReport:
    lower = _descending(L, derived=False)
    return SeriesReport(
        lower_central_dims=lower,
        derived_dims=_descending(L, derived=True),
        nilpotent=lower[-1] == 0,
    )


def w1_violation(L: LieAlgebraF2) -> Optional[int]:
    """Some x with id + ad_x singular, or None."""
    if series(L).nilpotent:
        return None
    identity = BitMatrix.identity(L.dim)
    for x in range(1, 1 << L.dim):
        if (identity + ad_matrix(L, x)).rank() < L.dim:
            return x
    return None


def check_W1(L: LieAlgebraF2) -> bool:
    return w1_violation(L) is None


def _commutators(L: LieAlgebraF2) -> List[List[int]]:
    n = L.dim
    return [[L.table(i, j) for j in range(n)] for i in range(n)]


def check_W2(L: LieAlgebraF2) -> bool:
    """[[x,y],[z,y]] = 0 for all x, y, z.

    The quantifier is quadratic in y, so on a basis it splits into the
    diagonal terms and the polarized pairs [[x,y],[z,w]] + [[x,w],[z,y]].
    """
    n = L.dim
    c = _commutators(L)
    cache: Dict[Tuple[int, int], int] = {}

    def double(a: int, b: int, p: int, q: int) -> int:
        u, v = c[a][b], c[p][q]
        if not u or not v:
            return 0
        key = (u, v) if u <= v else (v, u)
        if key not in cache:
            cache[key] = L.bracket_bits(u, v)
        return cache[key]

    for x, y, z in product(range(n), repeat=3):
        if double(x, y, z, y):
            return False
    for x, y, z, w in product(range(n), repeat=4):
        if y < w and double(x, y, z, w) != double(x, w, z, y):
            return False
    return True


def check_W2plus(L: LieAlgebraF2, method: W2PlusMethod = W2PlusMethod.DIRECT) -> bool:
    method = W2PlusMethod(method)
    if method is W2PlusMethod.DERIVED_SERIES:
        dims = series(L).derived_dims
        return dims[min(2, len(dims) - 1)] == 0
    n = L.dim
    pairs = [L.table(i, j) for i in range(n) for j in range(i + 1, n)]
    pairs = sorted(set(p for p in pairs if p))
    for a, u in enumerate(pairs):
        for v in pairs[a + 1:]:
            if L.bracket_bits(u, v):
                return False
    return True


def transform(L: LieAlgebraF2, P: BitMatrix) -> LieAlgebraF2:
    """Structure constants in the basis given by the columns of P."""
    n = L.dim
    if P.rows != n or P.cols != n:
        raise ValueError("basis change must be square of the algebra dimension")
    back = P.inverse()
    cols = P.columns
    brackets = {}
    for i in range(n):
        for j in range(i + 1, n):
            out = back.apply(L.bracket_bits(cols[i], cols[j]))
            if out:
                brackets[(i, j)] = out
    return LieAlgebraF2(n, brackets)


def bracket_table(L: LieAlgebraF2) -> np.ndarray:
    """[x, y] for all pairs of packed elements, shape (2^n, 2^n)."""
    size = 1 << L.dim
    table = np.zeros((size, size), dtype=np.int64)
    for i in range(L.dim):
        low = 1 << i
        images = ad_matrix(L, low).images()
        table[low:2 * low] = table[:low] ^ images[None, :]
    return table


# Catalog

@dataclass(frozen=True)
class HallBasis:
    gens: int
    max_weight: int
    weights: Tuple[int, ...]
    parts: Tuple[Optional[Tuple[int, int]], ...]
    index: Mapping[Tuple[int, int], int]


def hall_basis(gens: int, max_weight: int) -> HallBasis:
    """Basic commutators up to `max_weight`, ordered by weight.

    Element u = [s, t] (s > t) is basic when s is a generator or the right
    factor of s is <= t.
    """
    weights: List[int] = [1] * gens
    parts: List[Optional[Tuple[int, int]]] = [None] * gens
    index: Dict[Tuple[int, int], int] = {}
    for w in range(2, max_weight + 1):
        count = len(weights)
        for i in range(count):
            for j in range(i):
                if weights[i] + weights[j] != w:
                    continue
                if parts[i] is not None and parts[i][1] > j:
                    continue
                index[(i, j)] = len(weights)
                weights.append(w)
                parts.append((i, j))
    return HallBasis(gens, max_weight, tuple(weights), tuple(parts), index)


def _hall_bracket(hb: HallBasis, a: int, b: int, memo: Dict[Tuple[int, int], int]) -> int:
    if a == b or hb.weights[a] + hb.weights[b] > hb.max_weight:
        return 0
    if a < b:
        a, b = b, a
    key = (a, b)
    if key in memo:
        return memo[key]
    if key in hb.index:
        result = 1 << hb.index[key]
    else:
        # a = [s, t] with t > b: [[s,t],b] = [[s,b],t] + [s,[t,b]]
        s, t = hb.parts[a]
        result = 0
        for u in bits_of(_hall_bracket(hb, s, b, memo)):
            result ^= _hall_bracket(hb, u, t, memo)
        for v in bits_of(_hall_bracket(hb, t, b, memo)):
            result ^= _hall_bracket(hb, s, v, memo)
    memo[key] = result
    return result


def free_nilpotent(gens: int, nil_class: int) -> LieAlgebraF2:
    if gens not in (2, 3) or nil_class not in (2, 3, 4):
        raise UnsupportedParams(f"free nilpotent algebra needs gens in {{2,3}} and class in {{2,3,4}}, got ({gens}, {nil_class})")
    hb = hall_basis(gens, nil_class)
    n = len(hb.weights)
    if n > MAX_CATALOG_DIM:
        raise UnsupportedParams(f"free nilpotent ({gens}, {nil_class}) has dimension {n} > {MAX_CATALOG_DIM}")
    memo: Dict[Tuple[int, int], int] = {}
    brackets = {}
    for i in range(n):
        for j in range(i + 1, n):
            out = _hall_bracket(hb, j, i, memo)
            if out:
                brackets[(i, j)] = out
    return validate(LieAlgebraF2(n, brackets))


def heisenberg(dim: int = 3) -> LieAlgebraF2:
    if dim < 3 or dim % 2 == 0:
        raise UnsupportedParams(f"Heisenberg algebra needs odd dimension >= 3, got {dim}")
    top = dim - 1
    return LieAlgebraF2(dim, {(2 * l, 2 * l + 1): 1 << top for l in range(top // 2)})


def abelian(dim: int) -> LieAlgebraF2:
    return LieAlgebraF2(dim)


def catalog_make(kind: CatalogKind, dim: Optional[int] = None, gens: Optional[int] = None,
                 nil_class: Optional[int] = None) -> LieAlgebraF2:
    kind = CatalogKind(kind)
    if kind is CatalogKind.ABELIAN:
        if dim is None:
            raise UnsupportedParams("abelian algebra needs a dimension")
        return validate(abelian(dim))
    if kind is CatalogKind.HEISENBERG:
        return validate(heisenberg(3 if dim is None else dim))
    if gens is None or nil_class is None:
        raise UnsupportedParams("free nilpotent algebra needs gens and class")
    return free_nilpotent(gens, nil_class)


def hall_weights(gens: int, nil_class: int) -> Dict[int, int]:
    """Number of Hall basis elements of each weight."""
    counts: Dict[int, int] = {}
    for w in hall_basis(gens, nil_class).weights:
        counts[w] = counts.get(w, 0) + 1
    return counts
