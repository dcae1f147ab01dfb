"""Run manifests: reproducibility metadata written alongside every pipeline file.

Each stage output <file> gets a sidecar <file>.manifest.json recording input
digests, the output digest and counts. Run ids are content-derived (a hash of
the inputs, options and tool version), so identical runs produce identical
ids; wall-clock timestamps live only in the sidecar, keeping the stage files
and reports byte-reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .fileio import atomic_write_text, sha256_file, sha256_text

TOOL_NAME = "mtgender"


def tool_version() -> str:
    from . import __version__

    return __version__


def derive_run_id(payload: dict) -> str:
    """Content-derived run id: stable across reruns with identical inputs."""
    canonical = json.dumps(payload, ensure_ascii=False, sort_keys=True)
    return sha256_text(canonical)[:16]


def file_ref(path: str | Path) -> dict:
    return {"path": str(path), "sha256": sha256_file(path)}


@dataclass
class RunManifest:
    run_id: str
    command: str
    suite: str | None
    inputs: dict[str, dict]
    output: dict
    counts: dict[str, int]
    backend: dict | None = None
    tool: str = TOOL_NAME
    version: str = field(default_factory=tool_version)
    created_utc: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "suite": self.suite,
            "created_utc": self.created_utc,
            "backend": self.backend,
            "inputs": self.inputs,
            "output": self.output,
            "counts": self.counts,
        }


def sidecar_path(output_path: str | Path) -> Path:
    return Path(str(output_path) + ".manifest.json")


def write_sidecar(manifest: RunManifest) -> Path:
    path = sidecar_path(manifest.output["path"])
    atomic_write_text(path, json.dumps(manifest.to_dict(), ensure_ascii=False, indent=2,
                                       sort_keys=True) + "\n")
    return path


def verify_against_sidecar(path: str | Path) -> tuple[bool, str]:
    """Check a pipeline file against its manifest digest.

    Returns (ok, message): ok is False only on a digest mismatch; a file
    without a sidecar passes with a note, since externally produced corpora
    are legitimate inputs.
    """
    sidecar = sidecar_path(path)
    if not sidecar.exists():
        return True, f"{path}: no manifest sidecar"
    try:
        recorded = json.loads(sidecar.read_text(encoding="utf-8"))["output"]["sha256"]
    except (json.JSONDecodeError, KeyError):
        return False, f"{sidecar}: malformed manifest"
    actual = sha256_file(path)
    if actual != recorded:
        return False, (
            f"{path}: digest {actual[:12]}... does not match manifest {recorded[:12]}..."
        )
    return True, f"{path}: manifest digest ok"
