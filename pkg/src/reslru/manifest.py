"""Run manifests: reproducibility metadata written next to the artifacts."""
from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path

from . import __version__


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def config_hash(raw_config: dict) -> str:
    blob = json.dumps(raw_config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def write_manifest(
    out_dir: Path,
    command: str,
    raw_config: dict,
    outputs: list[Path],
    wall_time_s: float,
) -> Path:
    """Write the manifest atomically (tmp file + rename)."""
    manifest = {
        "tool": "reslru",
        "version": __version__,
        "command": command,
        "config": raw_config,
        "config_sha256": config_hash(raw_config),
        "wall_time_s": round(wall_time_s, 3),
        "outputs": [
            {"path": p.name, "sha256": _sha256(p)} for p in sorted(outputs)
        ],
    }
    path = out_dir / f"{command}_manifest.json"
    tmp = path.with_suffix(".json.tmp")
    with open(tmp, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    os.replace(tmp, path)
    return path


def write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    """Deterministic CSV: fixed %.12g float formatting, LF endings."""
    def fmt(x):
        if isinstance(x, float):
            return f"{x:.12g}"
        return str(x)

    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(fmt(x) for x in row) + "\n")
    os.replace(tmp, path)
    return path


def write_json(path: Path, obj) -> Path:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")
    os.replace(tmp, path)
    return path
