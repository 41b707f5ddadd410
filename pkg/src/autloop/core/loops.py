"""Finite loops as Cayley tables.

Element 0 is the identity; table[x, y] = x*y. Heavy predicates work on whole
rows at once through numpy fancy indexing, in chunks over the first argument
so memory stays around a few million cells.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import LoopAxiomError, MethodDisagreement, NotASubloop, SizeLimit
from .models import (
    AutomorphicMethod,
    DivisionSide,
    LoopReport,
    NonSplitTranscript,
    SplitModel,
)

CHUNK_CELLS = 1 << 22
DEFAULT_SUBLOOP_BUDGET = 10 ** 6


def _chunks(n: int, per_row: int) -> Iterator[np.ndarray]:
    step = max(1, CHUNK_CELLS // max(1, per_row))
    for start in range(0, n, step):
        yield np.arange(start, min(n, start + step))


class Permutation:
    def __init__(self, image: Sequence[int]):
        image = np.asarray(image, dtype=np.int64)
        n = len(image)
        if image.ndim != 1 or not np.array_equal(np.sort(image), np.arange(n)):
            raise ValueError("image is not a permutation of 0..n-1")
        self.image = image

    def __call__(self, x: int) -> int:
        return int(self.image[x])

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition, self after other."""
        return Permutation(self.image[other.image])

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.image)
        inv[self.image] = np.arange(len(self.image))
        return Permutation(inv)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.image, np.arange(len(self.image))))

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.image, other.image)

    def __hash__(self):
        return hash(self.image.tobytes())

    def __repr__(self):
        return f"Permutation({self.image.tolist()})"


@dataclass(frozen=True)
class LoopPredicates:
    commutative: bool
    exponent2: bool
    associative: bool


@dataclass(frozen=True)
class Nuclei:
    left: Tuple[int, ...]
    middle: Tuple[int, ...]
    right: Tuple[int, ...]
    commutant: Tuple[int, ...]
    center: Tuple[int, ...]


class FiniteLoop:
    """A validated Cayley table. Build through validate_loop."""

    def __init__(self, table: np.ndarray):
        self.table = table
        self.table.setflags(write=False)
        self.order = int(table.shape[0])

    @cached_property
    def left_division(self) -> np.ndarray:
        """ld[a, c] = a \\ c."""
        n = self.order
        ld = np.empty_like(self.table)
        ld[np.arange(n)[:, None], self.table] = np.arange(n)[None, :]
        return ld

    @cached_property
    def right_division(self) -> np.ndarray:
        """rd[c, a] = c / a."""
        n = self.order
        rd = np.empty_like(self.table)
        rd[self.table, np.arange(n)[None, :]] = np.arange(n)[:, None]
        return rd

    @cached_property
    def predicates(self) -> LoopPredicates:
        t = self.table
        return LoopPredicates(
            commutative=bool(np.array_equal(t, t.T)),
            exponent2=bool(np.all(np.diagonal(t) == 0)),
            associative=_is_associative(t),
        )

    @cached_property
    def nuclei(self) -> Nuclei:
        return _nuclei(self.table)

    @cached_property
    def distinct_inner(self) -> np.ndarray:
        seen = np.arange(self.order)[None, :]
        for block in _inner_blocks(self, reduced=self.predicates.commutative):
            seen = np.unique(np.concatenate([seen, block]), axis=0)
        return seen

    def __eq__(self, other):
        return isinstance(other, FiniteLoop) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def __repr__(self):
        return f"FiniteLoop(order={self.order})"


def validate_loop(table) -> FiniteLoop:
    t = np.array(table, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise LoopAxiomError(f"table is not square: shape {t.shape}")
    n = t.shape[0]
    if n == 0:
        raise LoopAxiomError("empty table has no identity")
    ident = np.arange(n)
    bad = np.argwhere((t < 0) | (t >= n))
    if len(bad):
        r, c = (int(v) for v in bad[0])
        raise LoopAxiomError(f"entry {t[r, c]} at ({r}, {c}) is out of range", row=r, column=c)
    if not np.array_equal(t[0], ident):
        raise LoopAxiomError("row 0 is not the identity row", row=0)
    if not np.array_equal(t[:, 0], ident):
        raise LoopAxiomError("column 0 is not the identity column", column=0)
    rows_ok = np.all(np.sort(t, axis=1) == ident[None, :], axis=1)
    if not rows_ok.all():
        r = int(np.argmin(rows_ok))
        raise LoopAxiomError(f"row {r} is not a permutation", row=r)
    cols_ok = np.all(np.sort(t, axis=0) == ident[:, None], axis=0)
    if not cols_ok.all():
        c = int(np.argmin(cols_ok))
        raise LoopAxiomError(f"column {c} is not a permutation", column=c)
    return FiniteLoop(t)


def divide(Q: FiniteLoop, side: DivisionSide, a: int, b: int) -> int:
    """left: a \\ b, the y with a*y = b. right: b / a, the x with x*a = b."""
    if DivisionSide(side) is DivisionSide.LEFT:
        return int(Q.left_division[a, b])
    return int(Q.right_division[b, a])


def predicates(Q: FiniteLoop) -> LoopPredicates:
    return Q.predicates


def _is_associative(t: np.ndarray) -> bool:
    n = t.shape[0]
    for xs in _chunks(n, n * n):
        lhs = t[t[xs]]            # (x*y)*z
        rhs = t[xs][:, t]         # x*(y*z)
        if not np.array_equal(lhs, rhs):
            return False
    return True


def _inner_blocks(Q: FiniteLoop, reduced: bool) -> Iterator[np.ndarray]:
    """Rows are images of L_{x,y}, then R_{x,y}, then T_x."""
    t, ld, rd = Q.table, Q.left_division, Q.right_division
    n = Q.order
    ar = np.arange(n)
    for xs in _chunks(n, n * n):
        xy = t[xs]
        x_yz = t[xs[:, None, None], t[None, :, :]]
        yield ld[xy[:, :, None], x_yz].reshape(-1, n)
    if reduced:
        return
    tt = t.T
    for xs in _chunks(n, n * n):
        xy = t[xs]
        zx_y = t[tt[xs][:, None, :], ar[None, :, None]]
        yield rd[zx_y, xy[:, :, None]].reshape(-1, n)
    yield np.take_along_axis(ld, tt, axis=1)


def inner_generators(Q: FiniteLoop, reduced: bool = False) -> List[Permutation]:
    """L_{x,y}, R_{x,y}, T_x for all x, y (2n^2 + n maps).

    With reduced=True only the n^2 maps L_{x,y}, allowed once the table is
    known to be commutative.
    """
    if reduced and not Q.predicates.commutative:
        raise LoopAxiomError("reduced inner generators need a commutative loop")
    return [Permutation(row) for block in _inner_blocks(Q, reduced) for row in block]


def _respects_product(t: np.ndarray, s: np.ndarray) -> bool:
    return bool(np.array_equal(s[:, t], t[s[:, :, None], s[:, None, :]]))


def _conjugation_closed(t: np.ndarray, s: np.ndarray) -> bool:
    """s^-1 R_y s is again a right translation, for every y."""
    n = t.shape[0]
    b = s.shape[0]
    sinv = np.empty_like(s)
    sinv[np.arange(b)[:, None], s] = np.arange(n)[None, :]
    conj = sinv[np.arange(b)[:, None, None], t[s].transpose(0, 2, 1)]
    return bool(np.array_equal(conj, t.T[conj[:, :, 0]]))


def is_automorphic(Q: FiniteLoop, method: AutomorphicMethod = AutomorphicMethod.DIRECT) -> bool:
    check = _respects_product if AutomorphicMethod(method) is AutomorphicMethod.DIRECT else _conjugation_closed
    gens = Q.distinct_inner
    n = Q.order
    step = max(1, CHUNK_CELLS // (n * n))
    for start in range(0, len(gens), step):
        if not check(Q.table, gens[start:start + step]):
            return False
    return True


def automorphic_checked(Q: FiniteLoop) -> bool:
    direct = is_automorphic(Q, AutomorphicMethod.DIRECT)
    conj = is_automorphic(Q, AutomorphicMethod.SECTION_CONJUGATION)
    if direct != conj:
        raise MethodDisagreement(f"automorphic: direct={direct}, section_conjugation={conj}")
    return direct


def _nuclei(t: np.ndarray) -> Nuclei:
    n = t.shape[0]
    ar = np.arange(n)
    tt = t.T
    left, middle, right = [], [], []
    for xs in _chunks(n, n * n):
        ta, tta = t[xs], tt[xs]
        # a(xy) = (ax)y
        left.append(np.all(ta[:, t] == t[ta], axis=(1, 2)))
        # x(ay) = (xa)y
        middle.append(np.all(t[ar[None, :, None], ta[:, None, :]] == t[tta[:, :, None], ar[None, None, :]], axis=(1, 2)))
        # x(ya) = (xy)a
        right.append(np.all(t[ar[None, :, None], tta[:, None, :]] == t[t[None, :, :], xs[:, None, None]], axis=(1, 2)))
    lam, mu, rho = (np.concatenate(parts) for parts in (left, middle, right))
    comm = np.all(t == tt, axis=1)
    center = comm & lam & mu & rho
    as_tuple = lambda mask: tuple(int(v) for v in np.flatnonzero(mask))
    return Nuclei(as_tuple(lam), as_tuple(mu), as_tuple(rho), as_tuple(comm), as_tuple(center))


def nuclei_and_center(Q: FiniteLoop) -> Nuclei:
    return Q.nuclei


# Subloops

def _closure_mask(Q: FiniteLoop, mask: np.ndarray) -> np.ndarray:
    t, ld, rd = Q.table, Q.left_division, Q.right_division
    mask = mask.copy()
    mask[0] = True
    size = int(mask.sum())
    while True:
        members = np.flatnonzero(mask)
        grid = np.ix_(members, members)
        mask[t[grid]] = True
        mask[ld[grid]] = True
        mask[rd[grid]] = True
        grown = int(mask.sum())
        if grown == size:
            return mask
        size = grown


def _as_mask(Q: FiniteLoop, elements: Iterable[int]) -> np.ndarray:
    mask = np.zeros(Q.order, dtype=bool)
    idx = np.fromiter((int(e) for e in elements), dtype=np.int64)
    if len(idx) and (idx.min() < 0 or idx.max() >= Q.order):
        raise NotASubloop("element index out of range")
    mask[idx] = True
    return mask


def _elements(mask: np.ndarray) -> Tuple[int, ...]:
    return tuple(int(v) for v in np.flatnonzero(mask))


def closure(Q: FiniteLoop, elements: Iterable[int]) -> Tuple[int, ...]:
    """The subloop generated by `elements`."""
    return _elements(_closure_mask(Q, _as_mask(Q, elements)))


def default_max_generators(order: int) -> int:
    return max(0, math.ceil(math.log2(order))) + 1


def _subloop_masks(Q: FiniteLoop, max_generators: int, within: Optional[Sequence[int]] = None,
                   max_size: Optional[int] = None, budget: Optional[int] = None) -> List[np.ndarray]:
    budget = DEFAULT_SUBLOOP_BUDGET if budget is None else budget
    candidates = range(Q.order) if within is None else sorted(within)
    start = np.zeros(Q.order, dtype=bool)
    start[0] = True
    found: Dict[bytes, np.ndarray] = {start.tobytes(): start}
    frontier = [start]
    closures = 0
    for _ in range(max_generators):
        nxt = []
        for mask in frontier:
            for g in candidates:
                if mask[g]:
                    continue
                closures += 1
                if closures > budget:
                    raise SizeLimit(f"subloop enumeration exceeded {budget} closures")
                grown = mask.copy()
                grown[g] = True
                grown = _closure_mask(Q, grown)
                if max_size is not None and grown.sum() > max_size:
                    continue
                key = grown.tobytes()
                if key in found:
                    continue
                found[key] = grown
                nxt.append(grown)
        frontier = nxt
        if not frontier:
            break
    return sorted(found.values(), key=lambda m: (int(m.sum()), _elements(m)))


def subloops(Q: FiniteLoop, max_generators: Optional[int] = None, *, within: Optional[Sequence[int]] = None,
             max_size: Optional[int] = None, budget: Optional[int] = None) -> List[Tuple[int, ...]]:
    """All closures of at most `max_generators` elements, sorted by (size, elements)."""
    if max_generators is None:
        max_generators = default_max_generators(Q.order)
    return [_elements(m) for m in _subloop_masks(Q, max_generators, within, max_size, budget)]


def _normal_mask(Q: FiniteLoop, mask: np.ndarray) -> bool:
    members = np.flatnonzero(mask)
    return bool(np.all(mask[Q.distinct_inner[:, members]]))


def is_normal(Q: FiniteLoop, K: Iterable[int]) -> bool:
    mask = _as_mask(Q, K)
    if not mask[0] or not np.array_equal(_closure_mask(Q, mask), mask):
        raise NotASubloop(f"{_elements(mask)} is not closed under the loop operations")
    return _normal_mask(Q, mask)


def _associative_subset(Q: FiniteLoop, members: np.ndarray) -> bool:
    t = Q.table
    xy = t[np.ix_(members, members)]
    lhs = t[xy[:, :, None], members[None, None, :]]
    rhs = t[members[:, None, None], xy[None, :, :]]
    return bool(np.array_equal(lhs, rhs))


# Nuclear splitting

@dataclass(frozen=True)
class SplitWitness:
    K: Tuple[int, ...]
    H: Tuple[int, ...]
    phi: Dict[Tuple[int, int], Tuple[int, ...]]


@dataclass(frozen=True)
class NonSplit:
    k_candidates: int
    h_candidates: int
    pairs_examined: int

    def transcript(self) -> NonSplitTranscript:
        return NonSplitTranscript(
            k_candidates=self.k_candidates,
            h_candidates=self.h_candidates,
            pairs_examined=self.pairs_examined,
        )


def split_phi(Q: FiniteLoop, K: Sequence[int], H: Sequence[int]) -> Dict[Tuple[int, int], Tuple[int, ...]]:
    """phi_{i,j}(c) = ((c*i)*j) / (i*j) on K, for coset representatives i, j in H."""
    t, rd = Q.table, Q.right_division
    k = np.asarray(K)
    phi = {}
    for i in H:
        for j in H:
            phi[(int(i), int(j))] = tuple(int(v) for v in rd[t[t[k, i], j], t[i, j]])
    return phi


def nuclear_split(Q: FiniteLoop, max_generators: Optional[int] = None,
                  budget: Optional[int] = None) -> Union[SplitWitness, NonSplit]:
    n = Q.order
    if max_generators is None:
        max_generators = max(1, math.ceil(math.log2(n))) if n > 1 else 1
    middle = Q.nuclei.middle

    k_masks = [m for m in _subloop_masks(Q, max_generators, within=middle, budget=budget) if _normal_mask(Q, m)]
    k_masks.sort(key=lambda m: (-int(m.sum()), _elements(m)))
    targets = {n // int(m.sum()) for m in k_masks if n % int(m.sum()) == 0}
    if not targets:
        return NonSplit(len(k_masks), 0, 0)

    h_by_size: Dict[int, List[np.ndarray]] = {}
    for m in _subloop_masks(Q, max_generators, max_size=max(targets), budget=budget):
        size = int(m.sum())
        if size in targets:
            h_by_size.setdefault(size, []).append(m)
    associative: Dict[bytes, bool] = {}
    h_seen = set()
    pairs = 0

    for k_mask in k_masks:
        k_size = int(k_mask.sum())
        if n % k_size:
            continue
        k_members = np.flatnonzero(k_mask)
        for h_mask in h_by_size.get(n // k_size, []):
            key = h_mask.tobytes()
            h_seen.add(key)
            pairs += 1
            if np.count_nonzero(k_mask & h_mask) != 1:
                continue
            if key not in associative:
                associative[key] = _associative_subset(Q, np.flatnonzero(h_mask))
            if not associative[key]:
                continue
            h_members = np.flatnonzero(h_mask)
            products = Q.table[np.ix_(h_members, k_members)]
            if np.unique(products).size == n:
                K, H = _elements(k_mask), _elements(h_mask)
                return SplitWitness(K, H, split_phi(Q, K, H))
    return NonSplit(len(k_masks), len(h_seen), pairs)


def analyze_loop(Q: FiniteLoop, split: bool = True, budget: Optional[int] = None) -> LoopReport:
    preds = Q.predicates
    nuc = Q.nuclei
    report = LoopReport(
        order=Q.order,
        commutative=preds.commutative,
        exponent2=preds.exponent2,
        associative=preds.associative,
        automorphic=automorphic_checked(Q),
        center=list(nuc.center),
        nucleus_left=list(nuc.left),
        nucleus_middle=list(nuc.middle),
        nucleus_right=list(nuc.right),
    )
    if split:
        result = nuclear_split(Q, budget=budget)
        if isinstance(result, SplitWitness):
            report.split = SplitModel(K=list(result.K), H=list(result.H))
        else:
            report.nonsplit = result.transcript()
    return report
