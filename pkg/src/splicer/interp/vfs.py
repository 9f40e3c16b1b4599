"""Read-only in-memory file system for file-reading built-ins."""

from __future__ import annotations

import json
from collections.abc import Mapping
from pathlib import Path
from types import MappingProxyType


class VirtualFS(Mapping):
    def __init__(self, files: Mapping[str, str] | None = None):
        self._files = MappingProxyType(dict(files or {}))

    def __getitem__(self, path: str) -> str:
        return self._files[path]

    def __iter__(self):
        return iter(self._files)

    def __len__(self) -> int:
        return len(self._files)

    def __repr__(self) -> str:
        return f"VirtualFS({sorted(self._files)})"

    @classmethod
    def from_manifest(cls, path: str | Path) -> "VirtualFS":
        """Load a manifest: a JSON object ``{path: content}`` or a list of pairs."""
        data = json.loads(Path(path).read_text())
        if isinstance(data, dict):
            return cls(data)
        return cls({p: c for p, c in data})


EMPTY_FS = VirtualFS()
