"""Deterministic, diff-friendly JSON output.

Objects are spread over lines; arrays whose items are scalars or arrays of
scalars stay on one line, so coordinate pairs and adjacency rows read
naturally.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

__all__ = ["dumps", "write"]


def _is_flat(value: Any) -> bool:
    if not isinstance(value, list):
        return False
    return all(not isinstance(v, (dict, list)) or (isinstance(v, list) and _is_scalar_list(v)) for v in value)


def _is_scalar_list(value: list) -> bool:
    return all(not isinstance(v, (dict, list)) for v in value)


def _format(value: Any, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_format(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, list):
        if _is_flat(value):
            return json.dumps(value, separators=(", ", ": "))
        items = [f"{inner}{_format(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(value)


def dumps(doc: Any) -> str:
    """Serialize ``doc`` with a trailing newline."""
    return _format(doc, 0) + "\n"


def write(doc: Any, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc))
    return path
