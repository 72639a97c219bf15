"""Append-only JSONL journal with crash-tolerant replay.

Every state mutation is journaled before it is applied; replaying the
journal over the initial samples file reconstructs identical state. A
torn final line (crash mid-write) is ignored on replay.
"""

from __future__ import annotations

import json
import os
from pathlib import Path


class Journal:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, entry: dict) -> None:
        line = json.dumps(entry, ensure_ascii=False)
        with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def replay(self) -> list[dict]:
        if not self.path.exists():
            return []
        entries = []
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                stripped = line.strip()
                if not stripped:
                    continue
                if not line.endswith("\n"):
                    break  # torn tail from a crash mid-append
                try:
                    entries.append(json.loads(stripped))
                except json.JSONDecodeError:
                    break
        return entries


def atomic_write_json(path: str | Path, payload) -> None:
    """Write JSON via a temp file and rename, so readers never see a
    partial document."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
