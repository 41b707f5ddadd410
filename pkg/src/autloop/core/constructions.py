"""Loop constructions over F2.

Product loops live on K x H with the K coordinates in the low bits and the H
coordinates in the high bits: element (a, i) is a | (i << k_dim).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BadSubfield,
    CenterMismatch,
    DegenerateX,
    Mismatch,
    NonCommutingBeta,
    NotInjective,
    NotInSpan,
    PhiConditionError,
    PropertyFailure,
    SingularIdPlusBeta,
    UnitInImage,
    UnsupportedParams,
    W1Violation,
    XSquareNonzero,
)
from .gf2 import (
    BitMatrix,
    FieldF2m,
    bits_of,
    mul_endomorphism,
    row_basis,
    span,
    subfield_basis,
    subfield_elements,
)
from .lie import LieAlgebraF2, bracket_table, ad_matrix, validate, w1_violation
from .loops import FiniteLoop, automorphic_checked, is_normal, validate_loop


def _combine(matrices: Sequence[BitMatrix], i: int, size: int) -> BitMatrix:
    acc = BitMatrix.zero(size)
    for l in bits_of(i):
        acc = acc + matrices[l]
    return acc


@dataclass(frozen=True)
class BetaMap:
    k_dim: int
    h_dim: int
    matrices: Tuple[BitMatrix, ...]

    def __post_init__(self):
        if self.k_dim < 0 or self.h_dim < 0:
            raise UnsupportedParams("k_dim and h_dim must be non-negative")
        if len(self.matrices) != self.h_dim:
            raise UnsupportedParams(f"expected {self.h_dim} matrices, got {len(self.matrices)}")
        for l, m in enumerate(self.matrices):
            if (m.rows, m.cols) != (self.k_dim, self.k_dim):
                raise UnsupportedParams(f"beta(e{l}) is {m.rows}x{m.cols}, expected {self.k_dim}x{self.k_dim}")

    @classmethod
    def zero(cls, k_dim: int, h_dim: int) -> "BetaMap":
        return cls(k_dim, h_dim, tuple(BitMatrix.zero(k_dim) for _ in range(h_dim)))

    def at(self, i: int) -> BitMatrix:
        """beta(i), extended linearly from the basis images."""
        return _combine(self.matrices, i, self.k_dim)

    def shifted(self, i: int) -> BitMatrix:
        """id + beta(i)."""
        return BitMatrix.identity(self.k_dim) + self.at(i)


@dataclass(frozen=True)
class PhiFamily:
    k_dim: int
    h_dim: int
    maps: Dict[Tuple[int, int], BitMatrix]

    def phi(self, i: int, j: int) -> BitMatrix:
        return self.maps[(i, j)]

    @classmethod
    def identity(cls, k_dim: int, h_dim: int) -> "PhiFamily":
        ident = BitMatrix.identity(k_dim)
        size = 1 << h_dim
        return cls(k_dim, h_dim, {(i, j): ident for i in range(size) for j in range(size)})


def _encode(a: np.ndarray, i: np.ndarray, k_dim: int) -> np.ndarray:
    return a | (i << k_dim)


def _split_coords(order: int, k_dim: int) -> Tuple[np.ndarray, np.ndarray]:
    idx = np.arange(order)
    return idx & ((1 << k_dim) - 1), idx >> k_dim


def _require(Q: FiniteLoop, what: str) -> FiniteLoop:
    preds = Q.predicates
    if not (preds.commutative and preds.exponent2):
        raise PropertyFailure(f"{what}: expected a commutative loop of exponent 2")
    if not automorphic_checked(Q):
        raise PropertyFailure(f"{what}: expected an automorphic loop")
    return Q


# Lie algebras

def lie_to_loop(L: LieAlgebraF2) -> FiniteLoop:
    """x o y = x + y + [x, y] on the packed elements."""
    validate(L)
    bad = w1_violation(L)
    if bad is not None:
        raise W1Violation(bad)
    size = 1 << L.dim
    idx = np.arange(size)
    return validate_loop(idx[:, None] ^ idx[None, :] ^ bracket_table(L))


def lie_left_division(L: LieAlgebraF2, x: int, z: int) -> int:
    """The y with x o y = z, namely (id + ad_x)^-1 (z + x)."""
    shifted = BitMatrix.identity(L.dim) + ad_matrix(L, x)
    return shifted.inverse().apply(z ^ x)


def bracket_annihilator(L: LieAlgebraF2) -> Tuple[int, ...]:
    """Elements a with [[e_i, e_j], a] = 0 for all basis pairs."""
    n = L.dim
    commutators = {L.table(i, j) for i in range(n) for j in range(i + 1, n)} - {0}
    stacked = BitMatrix.stack([ad_matrix(L, c) for c in sorted(commutators)], n)
    return tuple(int(v) for v in span(stacked.kernel_basis()))


def beta_lie_algebra(beta: BetaMap) -> LieAlgebraF2:
    """[a + i, b + j] = beta(j)a + beta(i)b on K + H, without any validation."""
    k = beta.k_dim
    brackets = {}
    for l, m in enumerate(beta.matrices):
        for a in range(k):
            out = m.apply(1 << a)
            if out:
                brackets[(a, k + l)] = out
    return LieAlgebraF2(k + beta.h_dim, brackets)


# Phi families

def validate_phi_family(phi: PhiFamily) -> PhiFamily:
    k, size = phi.k_dim, 1 << phi.h_dim
    ident = BitMatrix.identity(k)
    h = range(size)
    for i, j in product(h, h):
        m = phi.phi(i, j)
        if (m.rows, m.cols) != (k, k) or m.rank() < k:
            raise PhiConditionError("automorphism", (i, j))
    for i, j in product(h, h):
        if phi.phi(i, j) != phi.phi(j, i):
            raise PhiConditionError("symmetry", (i, j))
    for i in h:
        if phi.phi(0, i) != ident:
            raise PhiConditionError("identity", (0, i))
    distinct: Dict[BitMatrix, Tuple[int, int]] = {}
    for i, j in product(h, h):
        distinct.setdefault(phi.phi(i, j), (i, j))
    members = list(distinct.items())
    for a, (m1, first) in enumerate(members):
        for m2, second in members[a + 1:]:
            if not m1.commutes_with(m2):
                raise PhiConditionError("commuting", first + second)
    for i, j, l in product(h, h, h):
        if phi.phi(i, j ^ l) @ phi.phi(j, l) != phi.phi(l, i ^ j) @ phi.phi(i, j):
            raise PhiConditionError("cocycle", (i, j, l))
        if phi.phi(i, j ^ l) + phi.phi(j, i ^ l) + phi.phi(l, i ^ j) != ident:
            raise PhiConditionError("sum", (i, j, l))
    return phi


def nuclear_semidirect(phi: PhiFamily, verify: bool = True) -> FiniteLoop:
    """(a, i) * (b, j) = (phi_{i,j}(a + b), i + j)."""
    validate_phi_family(phi)
    k, size = phi.k_dim, 1 << phi.h_dim
    images = np.stack([np.stack([phi.phi(i, j).images() for j in range(size)]) for i in range(size)])
    a, i = _split_coords(1 << (k + phi.h_dim), k)
    Q = validate_loop(_encode(
        images[i[:, None], i[None, :], a[:, None] ^ a[None, :]],
        i[:, None] ^ i[None, :],
        k,
    ))
    if verify:
        _check_k_part(Q, k)
    return Q


def _check_k_part(Q: FiniteLoop, k_dim: int):
    k_part = range(1 << k_dim)
    if not set(k_part) <= set(Q.nuclei.middle):
        raise PropertyFailure("K-part is not inside the middle nucleus")
    if not is_normal(Q, k_part):
        raise PropertyFailure("K-part is not a normal subloop")


def phi_from_beta(beta: BetaMap) -> PhiFamily:
    """phi_{i,j} = (id + beta(i+j))^-1 (id + beta(i)) (id + beta(j))."""
    size = 1 << beta.h_dim
    shifted = [beta.shifted(i) for i in range(size)]
    inverses = [m.inverse() for m in shifted]
    maps = {(i, j): inverses[i ^ j] @ shifted[i] @ shifted[j] for i in range(size) for j in range(size)}
    return PhiFamily(beta.k_dim, beta.h_dim, maps)


# Beta construction

def validate_beta(beta: BetaMap) -> BetaMap:
    for p in range(beta.h_dim):
        for q in range(p + 1, beta.h_dim):
            if not beta.matrices[p].commutes_with(beta.matrices[q]):
                raise NonCommutingBeta(p, q)
    for i in range(1 << beta.h_dim):
        if beta.shifted(i).rank() < beta.k_dim:
            raise SingularIdPlusBeta(i)
    return beta


def _beta_table(beta: BetaMap) -> np.ndarray:
    k, size = beta.k_dim, 1 << beta.h_dim
    images = np.stack([beta.at(i).images() for i in range(size)])
    a, i = _split_coords(1 << (k + beta.h_dim), k)
    low = a[:, None] ^ a[None, :] ^ images[i[None, :], a[:, None]] ^ images[i[:, None], a[None, :]]
    return _encode(low, i[:, None] ^ i[None, :], k)


def beta_loop(beta: BetaMap, verify: bool = True) -> FiniteLoop:
    """(a + i)(b + j) = (a + b + beta(j)a + beta(i)b) + (i + j)."""
    validate_beta(beta)
    Q = validate_loop(_beta_table(beta))
    return _require(Q, "beta loop") if verify else Q


@dataclass(frozen=True)
class PredictedCenter:
    k_basis: Tuple[int, ...]
    h_part: Tuple[int, ...]
    k_dim: int

    def elements(self) -> Tuple[int, ...]:
        return tuple(sorted(int(a) | (i << self.k_dim) for a in span(self.k_basis) for i in self.h_part))


def predicted_center(beta: BetaMap) -> PredictedCenter:
    """Center of the beta loop read off from beta alone.

    (a, i) is central iff phi_{j,k}(a) = a for all j, k and phi_{i,j} = id
    for all j. Since phi_{j,k} = id + (id + beta(j+k))^-1 beta(j)beta(k),
    the K-part is the common kernel of the products beta(e_p)beta(e_q) and
    the H-part is {i : beta(i)beta(e_q) = 0}. The K-part contains the
    common kernel of the beta(e_p), often strictly.
    """
    k = beta.k_dim
    mats = beta.matrices
    products = [mats[p] @ mats[q] for p in range(len(mats)) for q in range(p, len(mats))]
    k_basis = BitMatrix.stack(products, k).kernel_basis()
    h_part = tuple(
        i for i in range(1 << beta.h_dim)
        if all((beta.at(i) @ m).is_zero() for m in mats)
    )
    return PredictedCenter(k_basis, h_part, k)


def u_isomorphism_check(beta: BetaMap) -> bool:
    """u(a, i) = ((id + beta(i))a, i) carries the Phi loop onto the beta loop."""
    validate_beta(beta)
    phi = validate_phi_family(phi_from_beta(beta))
    star = nuclear_semidirect(phi)
    target = beta_loop(beta)
    k = beta.k_dim
    a, i = _split_coords(target.order, k)
    images = np.stack([beta.shifted(h).images() for h in range(1 << beta.h_dim)])
    u = _encode(images[i, a], i, k)
    if np.unique(u).size != target.order:
        raise Mismatch(0, 0)
    bad = np.argwhere(u[star.table] != target.table[u[:, None], u[None, :]])
    if len(bad):
        raise Mismatch(int(bad[0][0]), int(bad[0][1]))
    return True


# Field examples

def example1_loop(F: FieldF2m, delta: BitMatrix, verify: bool = True) -> FiniteLoop:
    """beta(i) = multiplication by delta(i); delta's columns are field elements."""
    if delta.rows != F.m:
        raise UnsupportedParams(f"delta has {delta.rows} rows, field degree is {F.m}")
    h = delta.cols
    if delta.rank() < h:
        raise NotInjective(f"delta has rank {delta.rank()} < {h}")
    if 1 in set(int(v) for v in span(delta.columns)):
        raise UnitInImage("1 lies in the image of delta")
    beta = BetaMap(F.m, h, tuple(mul_endomorphism(F, c) for c in delta.columns))
    Q = beta_loop(beta, verify=verify)
    if verify and h >= 1 and Q.nuclei.center != (0,):
        raise CenterMismatch(f"expected a trivial center, got {len(Q.nuclei.center)} elements")
    return Q


def example2_delta(m: int, d: int) -> Tuple[FieldF2m, BitMatrix]:
    if d < 1 or d >= m or m % d:
        raise BadSubfield(f"GF(2^{d}) is not a proper subfield of GF(2^{m})")
    F = FieldF2m.standard(m)
    subfield = subfield_elements(F, d)
    sigma = next(x for x in range(F.order) if x not in subfield)
    columns = [F.mul(sigma, b) for b in subfield_basis(F, d)]
    return F, BitMatrix.from_columns(columns, m)


def example2_loop(m: int, d: int, verify: bool = True) -> FiniteLoop:
    """K = GF(2^m), H = GF(2^d), beta(i) = multiplication by sigma*i."""
    F, delta = example2_delta(m, d)
    return example1_loop(F, delta, verify=verify)


def example2_beta(m: int, d: int) -> BetaMap:
    F, delta = example2_delta(m, d)
    return BetaMap(F.m, delta.cols, tuple(mul_endomorphism(F, c) for c in delta.columns))


# Common fixed points

def _flat(m: BitMatrix) -> int:
    out = 0
    for r, row in enumerate(m.data):
        out |= row << (r * m.cols)
    return out


def fixed_vector_witness(X: Sequence[BitMatrix], bilinear_m: Sequence[Sequence[BitMatrix]]) -> Tuple[FiniteLoop, int]:
    """Loop with phi_{i,j} = id + m(i, j), m valued in span(X), X^2 = 0.

    Returns the loop and a nonzero a fixed by every x in X; (a, 0) is central.
    """
    if not X or all(x.is_zero() for x in X):
        raise DegenerateX("X must contain a nonzero endomorphism")
    k = X[0].rows
    shapes = [(x.rows, x.cols) for x in X] + [(v.rows, v.cols) for row in bilinear_m for v in row]
    if any(shape != (k, k) for shape in shapes):
        raise UnsupportedParams(f"X and m(i, j) must all be {k}x{k} matrices")
    for p, x in enumerate(X):
        for q, y in enumerate(X):
            if not (x @ y).is_zero():
                raise XSquareNonzero(p, q)
    h = len(bilinear_m)
    x_span = row_basis((_flat(x) for x in X), k * k)
    for l in range(h):
        if len(bilinear_m[l]) != h:
            raise UnsupportedParams("bilinear form table must be square")
        for r in range(h):
            if bilinear_m[l][r] != bilinear_m[r][l]:
                raise PhiConditionError("symmetry", (1 << l, 1 << r))
            if len(row_basis(x_span + [_flat(bilinear_m[l][r])], k * k)) > len(x_span):
                raise NotInSpan(f"m(e{l}, e{r}) is not in the span of X")

    ident = BitMatrix.identity(k)
    size = 1 << h
    maps = {}
    for i in range(size):
        for j in range(size):
            acc = ident
            for l in bits_of(i):
                for r in bits_of(j):
                    acc = acc + bilinear_m[l][r]
            maps[(i, j)] = acc
    Q = nuclear_semidirect(PhiFamily(k, h, maps))
    fixed = BitMatrix.stack(list(X), k).kernel_basis()
    a = fixed[0]
    if a not in Q.nuclei.center:
        raise CenterMismatch(f"fixed vector {a} is not central")
    return Q, a


# Seeded generators

def random_matrix(n: int, rng: random.Random, cols: Optional[int] = None) -> BitMatrix:
    cols = n if cols is None else cols
    return BitMatrix(n, cols, tuple(rng.getrandbits(cols) if cols else 0 for _ in range(n)))


def random_invertible(n: int, rng: random.Random) -> BitMatrix:
    while True:
        m = random_matrix(n, rng)
        if m.rank() == n:
            return m


def _polynomial(A: BitMatrix, coeffs: int) -> BitMatrix:
    acc = BitMatrix.zero(A.rows)
    power = BitMatrix.identity(A.rows)
    for t in range(A.rows):
        if (coeffs >> t) & 1:
            acc = acc + power
        power = power @ A
    return acc


def _satisfies_condition_ii(matrices: Sequence[BitMatrix], k: int) -> bool:
    ident = BitMatrix.identity(k)
    return all((ident + _combine(matrices, i, k)).rank() == k for i in range(1 << len(matrices)))


def random_beta(k_dim: int, h_dim: int, rng: random.Random, max_tries: int = 200) -> BetaMap:
    """beta(e_l) are polynomials in one random matrix, so they commute.

    Falls back to polynomials without constant term in a nilpotent matrix,
    which always satisfy condition (ii).
    """
    if k_dim < 1:
        return BetaMap.zero(k_dim, h_dim)
    for _ in range(max_tries):
        A = random_matrix(k_dim, rng)
        matrices = [_polynomial(A, rng.getrandbits(k_dim)) for _ in range(h_dim)]
        if _satisfies_condition_ii(matrices, k_dim):
            return BetaMap(k_dim, h_dim, tuple(matrices))
    upper = BitMatrix(k_dim, k_dim, tuple(rng.getrandbits(k_dim) & ~((1 << (r + 1)) - 1) for r in range(k_dim)))
    P = random_invertible(k_dim, rng)
    N = P @ upper @ P.inverse()
    matrices = [_polynomial(N, rng.getrandbits(k_dim) & ~1) for _ in range(h_dim)]
    return BetaMap(k_dim, h_dim, tuple(matrices))


def random_square_zero_family(k_dim: int, h_dim: int, rng: random.Random) -> Tuple[List[BitMatrix], List[List[BitMatrix]]]:
    """X conjugate to blocks [[0, B], [0, 0]] and a random symmetric m into span(X)."""
    if k_dim < 2:
        raise UnsupportedParams("need k_dim >= 2 for a nonzero X with X^2 = 0")
    r = rng.randint(1, k_dim // 2)
    P = random_invertible(k_dim, rng)
    back = P.inverse()
    X: List[BitMatrix] = []
    while not X or all(x.is_zero() for x in X):
        X = []
        for _ in range(rng.randint(1, 3)):
            # nonzero only in rows < r and columns >= r
            rows = tuple((rng.getrandbits(k_dim - r) << r) if row < r else 0 for row in range(k_dim))
            X.append(P @ BitMatrix(k_dim, k_dim, rows) @ back)
    m = [[BitMatrix.zero(k_dim)] * h_dim for _ in range(h_dim)]
    for l in range(h_dim):
        for q in range(l, h_dim):
            value = _combine(X, rng.getrandbits(len(X)), k_dim)
            m[l][q] = value
            m[q][l] = value
    return X, m
