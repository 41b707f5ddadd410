import hashlib
import json
from pathlib import Path
from typing import Optional

from .models import ManifestEntry

CHUNK_SIZE = 1 << 16


class Workspace:
    def __init__(self, root: Path):
        self.root = root.absolute()
        self.system = self.root / ".autloop"
        self.runs = self.system / "runs"
        self.manifest_path = self.system / "manifest.jsonl"
        self.config_path = self.system / "config.yml"

    def ensure_structure(self):
        """Create necessary directories."""
        for p in [self.system, self.runs]:
            p.mkdir(parents=True, exist_ok=True)
        if not self.manifest_path.exists():
            self.manifest_path.touch()

    def is_valid(self) -> bool:
        """Check if this is a valid workspace."""
        return self.system.exists() and self.manifest_path.exists()


def get_workspace(path: Optional[Path] = None) -> Workspace:
    """Get workspace from path or current directory."""
    return Workspace(Path.cwd() if path is None else path)


def calculate_sha256(file_path: Path) -> str:
    """Calculate SHA256 hash of a file efficiently."""
    sha256 = hashlib.sha256()
    with open(file_path, "rb") as f:
        while chunk := f.read(CHUNK_SIZE):
            sha256.update(chunk)
    return sha256.hexdigest()


def log_manifest(ws: Workspace, event: str, src: Optional[Path], status: str,
                 dst: Optional[str] = None, details: Optional[dict] = None):
    """Append one line to manifest.jsonl; no-op outside a workspace."""
    if not ws.is_valid():
        return
    src_path = Path(src) if src else None
    digest = calculate_sha256(src_path) if src_path and src_path.is_file() else ""
    entry = ManifestEntry(event=event, hash=digest, src=str(src_path or ""), status=status,
                          dst=dst, details=details)
    with open(ws.manifest_path, "a", encoding="utf-8") as f:
        f.write(entry.model_dump_json() + "\n")


def read_manifest(ws: Workspace) -> list:
    if not ws.manifest_path.exists():
        return []
    entries = []
    with open(ws.manifest_path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                entries.append(ManifestEntry(**json.loads(line)))
    return entries
