"""Readers and writers for lief2-v1, cayley-v1 and beta-v1 files."""
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .constructions import BetaMap
from .errors import ParseError
from .gf2 import BitMatrix, bits_of
from .lie import LieAlgebraF2
from .loops import FiniteLoop, validate_loop

LIE_FORMAT = "lief2-v1"
BETA_FORMAT = "beta-v1"


class BracketEntry(BaseModel):
    i: int = Field(ge=0)
    j: int = Field(ge=0)
    out: List[int] = []

    model_config = ConfigDict(extra='forbid')


class LieFile(BaseModel):
    format: Literal["lief2-v1"]
    dim: int = Field(ge=0)
    brackets: List[BracketEntry] = []

    model_config = ConfigDict(extra='forbid')

    @model_validator(mode="after")
    def _check_indices(self):
        seen = set()
        for entry in self.brackets:
            if entry.i >= entry.j:
                raise ValueError(f"pair ({entry.i}, {entry.j}) must have i < j")
            if entry.j >= self.dim:
                raise ValueError(f"pair ({entry.i}, {entry.j}) out of range for dim {self.dim}")
            if (entry.i, entry.j) in seen:
                raise ValueError(f"duplicate pair ({entry.i}, {entry.j})")
            seen.add((entry.i, entry.j))
            if len(set(entry.out)) != len(entry.out):
                raise ValueError(f"repeated index in out of pair ({entry.i}, {entry.j})")
            for k in entry.out:
                if not 0 <= k < self.dim:
                    raise ValueError(f"out index {k} of pair ({entry.i}, {entry.j}) out of range")
        return self


class BetaFile(BaseModel):
    format: Literal["beta-v1"]
    k_dim: int = Field(ge=0)
    h_dim: int = Field(ge=0)
    matrices: List[List[List[int]]]

    model_config = ConfigDict(extra='forbid')

    @model_validator(mode="after")
    def _check_shapes(self):
        if len(self.matrices) != self.h_dim:
            raise ValueError(f"expected {self.h_dim} matrices, got {len(self.matrices)}")
        for l, m in enumerate(self.matrices):
            if len(m) != self.k_dim or any(len(row) != self.k_dim for row in m):
                raise ValueError(f"matrix {l} is not {self.k_dim}x{self.k_dim}")
            if any(v not in (0, 1) for row in m for v in row):
                raise ValueError(f"matrix {l} has entries other than 0 and 1")
        return self


def _field_of(error: ValidationError) -> str:
    first = error.errors()[0]
    return ".".join(str(part) for part in first["loc"]) or None


def _load_json(text: str, source: Optional[str]) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, source=source, line=e.lineno)


def _validated(model, data: Any, source: Optional[str]):
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ParseError(first["msg"], source=source, field=_field_of(e))


# lief2-v1

def lief2_dict(L: LieAlgebraF2) -> Dict[str, Any]:
    return {
        "format": LIE_FORMAT,
        "dim": L.dim,
        "brackets": [
            {"i": i, "j": j, "out": list(bits_of(out))}
            for (i, j), out in sorted(L.structure.items())
        ],
    }


def lie_from_dict(data: Any, source: Optional[str] = None) -> LieAlgebraF2:
    parsed = _validated(LieFile, data, source)
    brackets = {(b.i, b.j): sum(1 << k for k in b.out) for b in parsed.brackets}
    return LieAlgebraF2(parsed.dim, brackets)


def parse_lief2(text: str, source: Optional[str] = None) -> LieAlgebraF2:
    return lie_from_dict(_load_json(text, source), source)


def dump_lief2(L: LieAlgebraF2) -> str:
    return json.dumps(lief2_dict(L), indent=2) + "\n"


# cayley-v1

def parse_cayley(text: str, source: Optional[str] = None) -> FiniteLoop:
    lines = [line.rstrip() for line in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if not lines:
        raise ParseError("empty file", source=source, line=1)
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise ParseError(f"expected the order, got {lines[0]!r}", source=source, line=1)
    if n < 1:
        raise ParseError(f"order must be positive, got {n}", source=source, line=1)
    if len(lines) != n + 1:
        raise ParseError(f"expected {n} table rows, got {len(lines) - 1}", source=source, line=len(lines))
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) != n:
            raise ParseError(f"expected {n} entries, got {len(fields)}", source=source, line=lineno)
        try:
            rows.append([int(v) for v in fields])
        except ValueError:
            raise ParseError("entries must be integers", source=source, line=lineno)
    return validate_loop(rows)


def dump_cayley(Q: Union[FiniteLoop, np.ndarray]) -> str:
    table = Q.table if isinstance(Q, FiniteLoop) else np.asarray(Q)
    width = len(str(len(table) - 1))
    body = "\n".join(" ".join(str(int(v)).rjust(width) for v in row) for row in table)
    return f"{len(table)}\n{body}\n"


# beta-v1

def beta_dict(beta: BetaMap) -> Dict[str, Any]:
    return {
        "format": BETA_FORMAT,
        "k_dim": beta.k_dim,
        "h_dim": beta.h_dim,
        "matrices": [m.to_lists() for m in beta.matrices],
    }


def parse_beta(text: str, source: Optional[str] = None) -> BetaMap:
    parsed = _validated(BetaFile, _load_json(text, source), source)
    matrices = tuple(BitMatrix.from_rows(m, cols=parsed.k_dim) for m in parsed.matrices)
    return BetaMap(parsed.k_dim, parsed.h_dim, matrices)


def dump_beta(beta: BetaMap) -> str:
    return json.dumps(beta_dict(beta)) + "\n"


# files

def read_text(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(e.strerror or str(e), source=str(path))


def read_lief2(path: Path) -> LieAlgebraF2:
    return parse_lief2(read_text(path), source=str(path))


def read_cayley(path: Path) -> FiniteLoop:
    return parse_cayley(read_text(path), source=str(path))


def read_beta(path: Path) -> BetaMap:
    return parse_beta(read_text(path), source=str(path))


def read_any(path: Path) -> Union[LieAlgebraF2, FiniteLoop, BetaMap]:
    """Dispatch on the JSON format tag; anything that is not JSON is a Cayley table."""
    text = read_text(path)
    stripped = text.lstrip()
    if not stripped.startswith("{"):
        return parse_cayley(text, source=str(path))
    data = _load_json(text, str(path))
    tag = data.get("format") if isinstance(data, dict) else None
    if tag == LIE_FORMAT:
        return lie_from_dict(data, str(path))
    if tag == BETA_FORMAT:
        return parse_beta(text, source=str(path))
    raise ParseError(f"unknown format {tag!r}", source=str(path), field="format")
