from __future__ import annotations

from dataclasses import dataclass, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict

from kbp_commit.errors import ConfigInvalid


class Policy(str, Enum):
    NEVER = "never"
    NONDETERMINISTIC = "nondeterministic"


_POLICY_ALIASES = {"never": Policy.NEVER, "nondet": Policy.NONDETERMINISTIC, "nondeterministic": Policy.NONDETERMINISTIC}

MIN_AGENTS, MAX_AGENTS = 2, 5
MIN_HORIZON = 6


def parse_policy(text: str) -> Policy:
    try:
        return _POLICY_ALIASES[text.strip().lower()]
    except KeyError:
        raise ConfigInvalid(f"unknown policy {text!r} (expected never, nondet or nondeterministic)") from None


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ConfigInvalid(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class Config:
    d: int = 3                          # agents including the coordinator
    horizon: int = 10
    reliable_channels: bool = True      # False: start may be lost, and such runs never quiesce
    trap_policy: Policy = Policy.NONDETERMINISTIC
    byzantine_policy: Policy = Policy.NONDETERMINISTIC

    def validate(self) -> "Config":
        if not isinstance(self.d, int) or not MIN_AGENTS <= self.d <= MAX_AGENTS:
            raise ConfigInvalid(f"d must be between {MIN_AGENTS} and {MAX_AGENTS}, got {self.d!r}")
        if not isinstance(self.horizon, int) or self.horizon < MIN_HORIZON:
            raise ConfigInvalid(f"horizon must be at least {MIN_HORIZON}, got {self.horizon!r}")
        for name in ("trap_policy", "byzantine_policy"):
            if not isinstance(getattr(self, name), Policy):
                raise ConfigInvalid(f"{name} must be a Policy, got {getattr(self, name)!r}")
        return self

    def with_overrides(self, **overrides: Any) -> "Config":
        """Apply non-None overrides (CLI flags win over file values)."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        for k in ("trap_policy", "byzantine_policy"):
            if isinstance(changes.get(k), str):
                changes[k] = parse_policy(changes[k])
        return replace(self, **changes)

    def as_lines(self) -> Dict[str, str]:
        return {
            "d": str(self.d),
            "horizon": str(self.horizon),
            "reliable_channels": "true" if self.reliable_channels else "false",
            "trap_policy": self.trap_policy.value,
            "byzantine_policy": self.byzantine_policy.value,
        }


def load_config(path: str | Path) -> Config:
    """Read a key=value config file; '#' starts a comment, blank lines are ignored."""
    known = {f.name for f in fields(Config)}
    values: Dict[str, Any] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalid(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigInvalid(f"{path}:{lineno}: unknown key {key!r}")
        if key in ("d", "horizon"):
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigInvalid(f"{path}:{lineno}: {key} must be an integer, got {value!r}") from None
        elif key == "reliable_channels":
            values[key] = _parse_bool(value)
        else:
            values[key] = parse_policy(value)
    return Config(**values).validate()


def save_config(cfg: Config, path: str | Path) -> None:
    lines = [f"{k}={v}" for k, v in cfg.as_lines().items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
