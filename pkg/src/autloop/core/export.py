from pathlib import Path
from typing import Dict, Iterable

import pandas as pd

from .i18n import t

COLUMNS = ["pattern", "dim", "w2", "w2plus", "w2minus", "verdict", "skipped"]


def scan_frame(rows: Iterable[Dict]) -> pd.DataFrame:
    """One row per classified algebra, sorted by (dim, pattern)."""
    df = pd.DataFrame(list(rows), columns=COLUMNS)
    if not df.empty:
        df = df.sort_values(["dim", "pattern"], kind="stable").reset_index(drop=True)
    return df


def write_scan_table(rows: Iterable[Dict], output_path: Path, localized: bool = False) -> int:
    df = scan_frame(rows)
    if localized:
        df = df.rename(columns={c: t(f"export.cols.{c}") for c in COLUMNS})
    Path(output_path).parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(output_path, index=False)
    return len(df)
