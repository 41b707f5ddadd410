"""Exhaustive and sampled searches over flag-adapted nilpotent brackets.

A flag-adapted table has [e_i, e_j] in span(e_{j+1}, ..., e_{n-1}) for i < j.
Its free coefficients are numbered slot by slot (pairs in lexicographic order,
then output index ascending) and packed into one integer, the pattern.
"""
import asyncio
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

from tqdm import tqdm

from .constructions import lie_to_loop
from .errors import BudgetExceeded, DimTooLarge, LimitExceeded, MethodDisagreement
from .formats import lief2_dict
from .gf2 import BitMatrix, bits_of
from .lie import LieAlgebraF2, check_W2, check_W2plus, jacobi_failure, series
from .loops import NonSplit, automorphic_checked, nuclear_split
from .models import (
    ClassifyVerdict,
    CoverageReport,
    NonsplitReport,
    NonsplitWitness,
    ScanMode,
    ScanReport,
    Verdict,
    W2PlusMethod,
)

MAX_EXHAUSTIVE_DIM = 6
MAX_SAMPLED_DIM = 9
MAX_NONSPLIT_EXHAUSTIVE_DIM = 5
MAX_NONSPLIT_SAMPLED_DIM = 6
MAX_ISOMORPHISM_DIM = 4
DEFAULT_BUDGET_ORDER = 1 << 13
CHUNK_PATTERNS = 4096


def classify_lie(L: LieAlgebraF2, budget_order: Optional[int] = None) -> ClassifyVerdict:
    """Test W2 first; then W2+ if it holds, else the automorphic property of the loop."""
    budget_order = DEFAULT_BUDGET_ORDER if budget_order is None else budget_order
    if check_W2(L):
        direct = check_W2plus(L, W2PlusMethod.DIRECT)
        derived = check_W2plus(L, W2PlusMethod.DERIVED_SERIES)
        if direct != derived:
            raise MethodDisagreement(f"W2+: direct={direct}, derived_series={derived}")
        verdict = Verdict.CONSISTENT if direct else Verdict.COUNTEREXAMPLE_B
        return ClassifyVerdict(w2=True, w2plus=direct, verdict=verdict)
    order = 1 << L.dim
    if order > budget_order:
        raise BudgetExceeded(f"loop of order {order} exceeds the cap {budget_order}")
    w2minus = automorphic_checked(lie_to_loop(L))
    verdict = Verdict.COUNTEREXAMPLE_A if w2minus else Verdict.CONSISTENT
    return ClassifyVerdict(w2=False, w2minus=w2minus, verdict=verdict)


# Flag-adapted patterns

def flag_slots(n: int) -> List[Tuple[int, int, int]]:
    return [(i, j, k) for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)]


def flag_pattern_bits(n: int) -> int:
    return len(flag_slots(n))


def flag_algebra(n: int, pattern: int, slots: Optional[Sequence[Tuple[int, int, int]]] = None) -> LieAlgebraF2:
    """Unvalidated algebra for one pattern."""
    slots = flag_slots(n) if slots is None else slots
    table = [[0] * n for _ in range(n)]
    for s in bits_of(pattern):
        i, j, k = slots[s]
        table[i][j] ^= 1 << k
        table[j][i] ^= 1 << k
    return LieAlgebraF2._from_table(n, table)


def enumerate_flag_nilpotent(n: int) -> Iterator[LieAlgebraF2]:
    if n > MAX_EXHAUSTIVE_DIM:
        raise DimTooLarge(f"exhaustive enumeration supports dim <= {MAX_EXHAUSTIVE_DIM}, got {n}")
    for _, L in _flag_stream(n, range(1 << flag_pattern_bits(n))):
        yield L


def sample_patterns(n: int, count: int, seed: int) -> List[int]:
    if n > MAX_SAMPLED_DIM:
        raise DimTooLarge(f"sampling supports dim <= {MAX_SAMPLED_DIM}, got {n}")
    rng = random.Random(seed)
    bits = flag_pattern_bits(n)
    return [rng.getrandbits(bits) if bits else 0 for _ in range(count)]


def sample_flag_nilpotent(n: int, count: int, seed: int) -> Iterator[LieAlgebraF2]:
    """`count` seeded draws; only the Jacobi-passing ones are emitted."""
    for _, L in _flag_stream(n, sample_patterns(n, count, seed)):
        yield L


def _flag_stream(n: int, patterns) -> Iterator[Tuple[int, LieAlgebraF2]]:
    slots = flag_slots(n)
    for p in patterns:
        L = flag_algebra(n, p, slots)
        if jacobi_failure(L) is None:
            yield p, L


def _patterns(n: int, mode: ScanMode, samples: Optional[int], seed: int, max_exhaustive: int) -> Sequence[int]:
    if ScanMode(mode) is ScanMode.EXHAUSTIVE:
        if n > max_exhaustive:
            raise DimTooLarge(f"exhaustive scan supports dim <= {max_exhaustive}, got {n}")
        return range(1 << flag_pattern_bits(n))
    return sample_patterns(n, samples or 0, seed)


# Chunked execution

@dataclass
class ChunkResult:
    candidates: int = 0
    jacobi_passed: int = 0
    consistent: int = 0
    skipped_budget: int = 0
    w2_true: int = 0
    w2_false: int = 0
    index4: int = 0
    automorphic: int = 0
    counterexamples: List[int] = field(default_factory=list)
    witnesses: List[dict] = field(default_factory=list)
    rows: List[dict] = field(default_factory=list)


def _problem1_chunk(n: int, patterns: Sequence[int], budget_order: int, collect_rows: bool) -> ChunkResult:
    result = ChunkResult(candidates=len(patterns))
    for p, L in _flag_stream(n, patterns):
        result.jacobi_passed += 1
        try:
            verdict = classify_lie(L, budget_order)
        except BudgetExceeded:
            result.skipped_budget += 1
            if collect_rows:
                result.rows.append({"pattern": p, "dim": n, "w2": check_W2(L), "w2plus": None,
                                    "w2minus": None, "verdict": None, "skipped": True})
            continue
        if verdict.w2:
            result.w2_true += 1
        else:
            result.w2_false += 1
        if verdict.verdict is Verdict.CONSISTENT:
            result.consistent += 1
        else:
            result.counterexamples.append(p)
        if collect_rows:
            row = verdict.model_dump(mode="json")
            row.update(pattern=p, dim=n, skipped=False)
            result.rows.append(row)
    return result


def _nonsplit_chunk(n: int, patterns: Sequence[int], budget: Optional[int]) -> ChunkResult:
    result = ChunkResult(candidates=len(patterns))
    for p, L in _flag_stream(n, patterns):
        result.jacobi_passed += 1
        Q = lie_to_loop(L)
        middle = Q.nuclei.middle
        if Q.order != 4 * len(middle):
            continue
        result.index4 += 1
        preds = Q.predicates
        if not (preds.commutative and preds.exponent2 and automorphic_checked(Q)):
            continue
        result.automorphic += 1
        try:
            outcome = nuclear_split(Q, budget=budget)
        except LimitExceeded:
            result.skipped_budget += 1
            continue
        if isinstance(outcome, NonSplit):
            result.witnesses.append(NonsplitWitness(
                pattern=p,
                algebra=lief2_dict(L),
                middle_nucleus=list(middle),
                table=Q.table.tolist(),
                transcript=outcome.transcript(),
            ).model_dump(mode="json"))
    return result


def _split(patterns: Sequence[int], size: int) -> List[Sequence[int]]:
    return [patterns[start:start + size] for start in range(0, len(patterns), size)]


def _run_chunks(worker: Callable[..., ChunkResult], args: Tuple, chunks: List[Sequence[int]],
                jobs: int, progress: Optional[bool]) -> List[ChunkResult]:
    """Run worker(args[0], chunk, *args[1:]) over every chunk, results in chunk order."""
    bar = tqdm(total=len(chunks), unit="chunk", disable=None if progress else True, leave=False)
    try:
        if jobs <= 1 or len(chunks) <= 1:
            results = []
            for chunk in chunks:
                results.append(worker(args[0], chunk, *args[1:]))
                bar.update(1)
            return results

        async def run_all():
            loop = asyncio.get_running_loop()
            semaphore = asyncio.Semaphore(jobs)
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                async def one(chunk):
                    async with semaphore:
                        res = await loop.run_in_executor(pool, worker, args[0], list(chunk), *args[1:])
                        bar.update(1)
                        return res
                return await asyncio.gather(*(one(c) for c in chunks))

        return asyncio.run(run_all())
    finally:
        bar.close()


def _merge(results: List[ChunkResult]) -> ChunkResult:
    total = ChunkResult()
    for r in results:
        for name in ("candidates", "jacobi_passed", "consistent", "skipped_budget",
                     "w2_true", "w2_false", "index4", "automorphic"):
            setattr(total, name, getattr(total, name) + getattr(r, name))
        total.counterexamples.extend(r.counterexamples)
        total.witnesses.extend(r.witnesses)
        total.rows.extend(r.rows)
    return total


def scan_problem1(n: int, mode: ScanMode = ScanMode.EXHAUSTIVE, samples: Optional[int] = None, seed: int = 0,
                  budget_order: Optional[int] = None, jobs: int = 1, collect_rows: bool = False,
                  progress: Optional[bool] = False) -> ScanReport:
    mode = ScanMode(mode)
    budget_order = DEFAULT_BUDGET_ORDER if budget_order is None else budget_order
    patterns = _patterns(n, mode, samples, seed, MAX_EXHAUSTIVE_DIM)
    chunks = _split(patterns, CHUNK_PATTERNS)
    merged = _merge(_run_chunks(_problem1_chunk, (n, budget_order, collect_rows), chunks, jobs, progress))

    slots = flag_slots(n)
    report = ScanReport(
        dim=n,
        mode=mode,
        seed=seed if mode is ScanMode.SAMPLED else None,
        samples=samples if mode is ScanMode.SAMPLED else None,
        candidates=merged.candidates,
        jacobi_passed=merged.jacobi_passed,
        consistent=merged.consistent,
        counterexamples=[lief2_dict(flag_algebra(n, p, slots)) for p in sorted(set(merged.counterexamples))],
        skipped_budget=merged.skipped_budget,
        w2_true=merged.w2_true,
        w2_false=merged.w2_false,
    )
    report._rows = sorted(merged.rows, key=lambda row: row["pattern"])
    return report


def scan_nonsplit(n: int, mode: ScanMode = ScanMode.EXHAUSTIVE, samples: Optional[int] = None, seed: int = 0,
                  budget: Optional[int] = None, jobs: int = 1, progress: Optional[bool] = False) -> NonsplitReport:
    """Loops with middle-nucleus index 4 that are automorphic and do not split nuclearly."""
    mode = ScanMode(mode)
    if mode is ScanMode.SAMPLED and n > MAX_NONSPLIT_SAMPLED_DIM:
        raise DimTooLarge(f"sampled nonsplit scan supports dim <= {MAX_NONSPLIT_SAMPLED_DIM}, got {n}")
    patterns = _patterns(n, mode, samples, seed, MAX_NONSPLIT_EXHAUSTIVE_DIM)
    chunks = _split(patterns, max(1, CHUNK_PATTERNS // 16))
    merged = _merge(_run_chunks(_nonsplit_chunk, (n, budget), chunks, jobs, progress))

    unique = {w["pattern"]: w for w in merged.witnesses}
    return NonsplitReport(
        dim=n,
        mode=mode,
        seed=seed if mode is ScanMode.SAMPLED else None,
        samples=samples if mode is ScanMode.SAMPLED else None,
        candidates=merged.candidates,
        jacobi_passed=merged.jacobi_passed,
        index4=merged.index4,
        automorphic=merged.automorphic,
        skipped_budget=merged.skipped_budget,
        witnesses=[NonsplitWitness.model_validate(unique[p]) for p in sorted(unique)],
    )


# Isomorphism and coverage

def _is_homomorphism(L1: LieAlgebraF2, L2: LieAlgebraF2, cols: Sequence[int]) -> bool:
    P = BitMatrix.from_columns(cols, L1.dim)
    n = L1.dim
    for i in range(n):
        for j in range(i + 1, n):
            if P.apply(L1.table(i, j)) != L2.bracket_bits(cols[i], cols[j]):
                return False
    return True


def _invertible_columns(n: int) -> Iterator[List[int]]:
    """Column lists of every invertible n x n matrix."""
    def extend(cols: List[int], spanned: set):
        if len(cols) == n:
            yield list(cols)
            return
        for v in range(1, 1 << n):
            if v in spanned:
                continue
            cols.append(v)
            yield from extend(cols, spanned | {s ^ v for s in spanned})
            cols.pop()
    yield from extend([], {0})


def lie_isomorphic(L1: LieAlgebraF2, L2: LieAlgebraF2) -> bool:
    if L1.dim != L2.dim:
        return False
    if L1.dim > MAX_ISOMORPHISM_DIM:
        raise DimTooLarge(f"isomorphism search supports dim <= {MAX_ISOMORPHISM_DIM}, got {L1.dim}")
    if series(L1) != series(L2):
        return False
    return any(_is_homomorphism(L1, L2, cols) for cols in _invertible_columns(L1.dim))


def _orbit_codes(F: LieAlgebraF2, pairs: Sequence[Tuple[int, int]]) -> set:
    n = F.dim
    codes = set()
    for cols in _invertible_columns(n):
        P = BitMatrix.from_columns(cols, n)
        back = P.inverse()
        code = 0
        for idx, (i, j) in enumerate(pairs):
            code |= back.apply(F.bracket_bits(cols[i], cols[j])) << (n * idx)
        codes.add(code)
    return codes


def verify_flag_coverage(n: int) -> CoverageReport:
    """Every nilpotent bracket table of dim n is isomorphic to a flag-adapted one.

    The orbits of the flag tables under GL(n, 2) are collected first; any
    other candidate that passes Jacobi and is nilpotent is uncovered.
    """
    if n > MAX_ISOMORPHISM_DIM:
        raise DimTooLarge(f"coverage check supports dim <= {MAX_ISOMORPHISM_DIM}, got {n}")
    flags = list(enumerate_flag_nilpotent(n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    covered: set = set()
    for F in flags:
        covered |= _orbit_codes(F, pairs)
    mask = (1 << n) - 1
    candidates = nilpotent = 0
    uncovered = []
    for code in range(1 << (n * len(pairs))):
        candidates += 1
        if code in covered:
            nilpotent += 1
            continue
        table = [[0] * n for _ in range(n)]
        for idx, (i, j) in enumerate(pairs):
            table[i][j] = table[j][i] = (code >> (n * idx)) & mask
        L = LieAlgebraF2._from_table(n, table)
        if jacobi_failure(L) is not None or not series(L).nilpotent:
            continue
        nilpotent += 1
        uncovered.append(lief2_dict(L))
    return CoverageReport(dim=n, candidates=candidates, nilpotent_valid=nilpotent,
                          flag_tables=len(flags), uncovered=uncovered)
