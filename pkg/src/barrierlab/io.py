"""Output plumbing: config hashing, CSV/JSON writers, run metadata."""
from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

from .mc import ConvergenceReport

PACKAGE_VERSION = "0.1.0"


_UNHASHED_KEYS = ("out",)  # where results land does not change what they are


def config_hash(cfg: dict) -> str:
    """Short stable hash of a resolved configuration."""
    hashable = {k: v for k, v in cfg.items() if k not in _UNHASHED_KEYS}
    blob = json.dumps(hashable, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def timestamp() -> str:
    return time.strftime("%Y%m%d-%H%M%S")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(obj):
    try:
        import numpy as np

        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
    except ImportError:
        pass
    return str(obj)


def write_rows_csv(path: Path, header: str, rows, cfg_hash: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"# config_hash={cfg_hash}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


def write_report_csv(path: Path, report: ConvergenceReport, cfg_hash: str) -> None:
    rows = zip(report.ladder, report.stat, report.stat_lo, report.stat_hi)
    write_rows_csv(path, "n,stat,stat_lo,stat_hi", rows, cfg_hash)


def write_meta(out_dir: Path, stem: str, cfg: dict, extra: dict | None = None) -> Path:
    """Write the resolved configuration next to a run's outputs."""
    payload = {
        "config": cfg,
        "config_hash": config_hash(cfg),
        "version": PACKAGE_VERSION,
        **(extra or {}),
    }
    path = out_dir / f"{stem}_meta.json"
    write_json(path, payload)
    return path
