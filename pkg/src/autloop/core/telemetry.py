import json
import time
from datetime import datetime
from typing import Any, Dict, List, Optional
from pydantic import BaseModel, Field

from .storage import Workspace


class RunMetrics(BaseModel):
    run_id: str
    command: str
    start_time: float
    end_time: float = 0.0
    dims: List[int] = Field(default_factory=list)
    candidates: int = 0
    jacobi_passed: int = 0
    counterexamples: int = 0
    witnesses: int = 0
    skipped_budget: int = 0
    stage_times: Dict[str, float] = Field(default_factory=dict)

    @property
    def duration(self) -> float:
        return self.end_time - self.start_time


class Telemetry:
    def __init__(self, workspace: Workspace, command: str):
        self.workspace = workspace
        self.run_id = datetime.now().strftime("%Y%m%d_%H%M%S_%f")
        self.metrics = RunMetrics(run_id=self.run_id, command=command, start_time=time.time())
        self.runs_dir = self.workspace.runs

    def start_stage(self, stage_name: str):
        self.metrics.stage_times[f"{stage_name}_start"] = time.time()

    def end_stage(self, stage_name: str):
        start = self.metrics.stage_times.pop(f"{stage_name}_start", None)
        if start:
            self.metrics.stage_times[stage_name] = time.time() - start

    def record(self, report: Any):
        """Add the counters of a ScanReport or NonsplitReport."""
        m = self.metrics
        m.dims.append(report.dim)
        m.candidates += report.candidates
        m.jacobi_passed += report.jacobi_passed
        m.skipped_budget += report.skipped_budget
        m.counterexamples += len(getattr(report, "counterexamples", []))
        m.witnesses += len(getattr(report, "witnesses", []))

    def save(self) -> Optional[str]:
        """Write runs/<run_id>.json when inside a workspace."""
        self.metrics.end_time = time.time()
        if not self.workspace.is_valid():
            return None
        self.runs_dir.mkdir(parents=True, exist_ok=True)
        run_file = self.runs_dir / f"{self.run_id}.json"
        with open(run_file, "w", encoding="utf-8") as f:
            f.write(self.metrics.model_dump_json(indent=2))
        return str(run_file)


def load_runs(workspace: Workspace) -> List[RunMetrics]:
    runs = []
    if not workspace.runs.exists():
        return runs
    for run_file in sorted(workspace.runs.glob("*.json")):
        try:
            with open(run_file, "r", encoding="utf-8") as f:
                runs.append(RunMetrics(**json.load(f)))
        except (OSError, ValueError):
            continue
    return runs
