import os
import yaml
from pathlib import Path
from typing import Optional
from dotenv import load_dotenv
from rich.console import Console

from .models import Config

load_dotenv()

console = Console(stderr=True)


def _env_int(name: str) -> Optional[int]:
    raw = os.getenv(name)
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        console.print(f"[yellow]Warning: ignoring {name}={raw!r}, expected an integer[/yellow]")
        return None


class Settings:
    LANG: Optional[str] = os.getenv("AUTLOOP_LANG")
    JOBS: Optional[int] = _env_int("AUTLOOP_JOBS")
    BUDGET_ORDER: Optional[int] = _env_int("AUTLOOP_BUDGET_ORDER")
    SUBLOOP_BUDGET: Optional[int] = _env_int("AUTLOOP_SUBLOOP_BUDGET")

    _cli_lang_set: bool = False

    def __init__(self):
        self.config = self._env_config()
        self._init_i18n()

    def _env_config(self) -> Config:
        overrides = {}
        if self.JOBS is not None:
            overrides["jobs"] = self.JOBS
        if self.BUDGET_ORDER is not None:
            overrides["budget_order"] = self.BUDGET_ORDER
        if self.SUBLOOP_BUDGET is not None:
            overrides["subloop_budget"] = self.SUBLOOP_BUDGET
        try:
            return Config(**overrides)
        except ValueError as e:
            console.print(f"[yellow]Warning: ignoring environment overrides: {e}[/yellow]")
            return Config()

    def _init_i18n(self):
        from .i18n import get_i18n
        self.i18n = get_i18n()
        self.i18n.set_language(self.LANG or "en")

    def set_cli_language(self, lang: str):
        """Called by CLI callback to enforce language."""
        if lang:
            self.i18n.set_language(lang)
            self._cli_lang_set = True

    def load_user_config(self, config_path: Path):
        """Overlay .autloop/config.yml; environment values the file leaves out survive."""
        if not config_path.exists():
            return
        try:
            with open(config_path, 'r', encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
            merged = self.config.model_dump()
            merged.update({k: v for k, v in data.items() if v is not None})
            self.config = Config(**merged)
            if self.config.lang and not self._cli_lang_set:
                self.i18n.set_language(self.config.lang)
        except (OSError, yaml.YAMLError, ValueError, AttributeError) as e:
            console.print(f"[yellow]Warning: Failed to load config: {e}[/yellow]")

    def effective_jobs(self, jobs: Optional[int] = None) -> int:
        return jobs or self.config.jobs or os.cpu_count() or 1

    def effective_budget_order(self, budget_order: Optional[int] = None) -> int:
        return budget_order or self.config.budget_order

    def effective_subloop_budget(self, budget: Optional[int] = None) -> int:
        return budget or self.config.subloop_budget


settings = Settings()
