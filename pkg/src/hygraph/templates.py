"""Versioned prompt templates shipped under ``prompts/``."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

PROMPT_VERSION = "1"


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    return resources.files(__package__).joinpath("prompts", f"{name}.txt").read_text(encoding="utf-8")


def render(name: str, **slots: str) -> str:
    return load_template(name).format_map(slots)
