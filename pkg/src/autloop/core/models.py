from datetime import datetime
from enum import Enum
from typing import Optional, List, Dict, Any
from pydantic import BaseModel, Field, ConfigDict, PrivateAttr


class Verdict(str, Enum):
    CONSISTENT = "consistent"
    COUNTEREXAMPLE_A = "counterexample_a"
    COUNTEREXAMPLE_B = "counterexample_b"


class ScanMode(str, Enum):
    EXHAUSTIVE = "exhaustive"
    SAMPLED = "sampled"


class AutomorphicMethod(str, Enum):
    DIRECT = "direct"
    SECTION_CONJUGATION = "section_conjugation"


class W2PlusMethod(str, Enum):
    DIRECT = "direct"
    DERIVED_SERIES = "derived_series"


class DivisionSide(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class CatalogKind(str, Enum):
    ABELIAN = "abelian"
    HEISENBERG = "heisenberg"
    FREE_NILPOTENT = "free-nilpotent"


class Config(BaseModel):
    lang: Optional[str] = None  # en or ru
    jobs: Optional[int] = Field(default=None, ge=1)
    seed: int = 0
    budget_order: int = Field(default=1 << 13, ge=1)
    subloop_budget: int = Field(default=10 ** 6, ge=1)
    progress: bool = True


class ManifestEntry(BaseModel):
    ts: str = Field(default_factory=lambda: datetime.now().isoformat())
    event: str
    hash: str
    src: str
    kind: str = "file"
    status: str
    details: Optional[Dict[str, Any]] = None
    dst: Optional[str] = None


class SeriesReport(BaseModel):
    lower_central_dims: List[int]
    derived_dims: List[int]
    nilpotent: bool


class ClassifyVerdict(BaseModel):
    w2: bool
    w2plus: Optional[bool] = None
    w2minus: Optional[bool] = None
    verdict: Verdict


class LieReport(BaseModel):
    """Output of `lie props`."""
    dim: int
    series: SeriesReport
    w1: bool
    w2: bool
    w2plus: bool
    bracket_annihilator_size: int
    classification: Optional[ClassifyVerdict] = None


class SplitModel(BaseModel):
    K: List[int]
    H: List[int]


class NonSplitTranscript(BaseModel):
    k_candidates: int
    h_candidates: int
    pairs_examined: int


class LoopReport(BaseModel):
    order: int
    commutative: bool
    exponent2: bool
    associative: bool
    automorphic: bool
    center: List[int]
    nucleus_left: List[int]
    nucleus_middle: List[int]
    nucleus_right: List[int]
    split: Optional[SplitModel] = None
    nonsplit: Optional[NonSplitTranscript] = None


class ScanReport(BaseModel):
    dim: int
    mode: ScanMode
    seed: Optional[int] = None
    samples: Optional[int] = None
    candidates: int = 0
    jacobi_passed: int = 0
    consistent: int = 0
    counterexamples: List[Dict[str, Any]] = Field(default_factory=list, description="lief2-v1 objects")
    skipped_budget: int = 0
    w2_true: int = 0
    w2_false: int = 0

    # Per-algebra rows for --table, never serialized.
    _rows: List[Dict[str, Any]] = PrivateAttr(default_factory=list)

    model_config = ConfigDict(extra='forbid')


class NonsplitWitness(BaseModel):
    pattern: int
    algebra: Dict[str, Any]
    middle_nucleus: List[int]
    table: List[List[int]]
    transcript: NonSplitTranscript


class NonsplitReport(BaseModel):
    dim: int
    mode: ScanMode
    seed: Optional[int] = None
    samples: Optional[int] = None
    candidates: int = 0
    jacobi_passed: int = 0
    index4: int = 0
    automorphic: int = 0
    skipped_budget: int = 0
    witnesses: List[NonsplitWitness] = Field(default_factory=list)


class CoverageReport(BaseModel):
    dim: int
    candidates: int
    nilpotent_valid: int
    flag_tables: int
    uncovered: List[Dict[str, Any]] = Field(default_factory=list)
