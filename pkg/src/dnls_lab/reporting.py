"""Deterministic artifact emission: CSV tables, run manifests, digests.

Floats are serialized with 17 significant digits so every table value
round-trips exactly; rows are joined with a fixed terminator so reruns
of the same seeded config reproduce each CSV byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Sequence


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def sha256_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(
    out_dir: str | Path,
    scenario: str,
    resolved_config: dict,
    tables: Sequence[Path],
    tool_version: str,
    extra: dict | None = None,
) -> Path:
    out_dir = Path(out_dir)
    payload = {
        "scenario": scenario,
        "tool_version": tool_version,
        "config": resolved_config,
        "digests": {p.name: sha256_digest(p) for p in tables},
    }
    if extra:
        payload.update(extra)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path
