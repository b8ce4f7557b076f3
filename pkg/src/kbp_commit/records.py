from __future__ import annotations

from dataclasses import asdict
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional
import hashlib
import json

from kbp_commit import __version__


def stable_hash(obj: Any) -> str:
    """
    Create a stable short hash for provenance using canonical JSON.
    """
    payload = json.dumps(to_jsonable(obj), ensure_ascii=False, sort_keys=True, default=str).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:16]


def to_jsonable(obj: Any) -> Any:
    """
    Convert dataclasses, enums and tuples to JSON-serialisable values.
    """
    if isinstance(obj, Enum):
        return obj.value
    if hasattr(obj, "__dataclass_fields__"):
        return {k: to_jsonable(v) for k, v in asdict(obj).items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(to_jsonable(k)): to_jsonable(v) for k, v in obj.items()}
    return obj


def provenance(config: Any, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Header block echoed into every report so a result can be traced to its inputs."""
    block = {
        "tool": "kbp-commit",
        "version": __version__,
        "config": to_jsonable(config),
        "config_hash": stable_hash(config),
    }
    if extra:
        block.update(extra)
    return block


def save_json(payload: Any, out_path: str | Path) -> None:
    """
    Serialize a record to JSON (human-inspectable, byte-stable for identical inputs).
    """
    with open(out_path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(payload), f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
