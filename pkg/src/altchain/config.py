"""Plain ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored.  Values are parsed as int, float,
comma-separated lists, or kept as strings; command-line flags override file
values.
"""

from __future__ import annotations

from pathlib import Path

from .itebd import Schedule

SCHEDULE_KEYS = {
    "tau_initial": float,
    "tau_shrink": float,
    "tau_floor": float,
    "sweeps_per_tau": int,
    "energy_tol": float,
    "check_every": int,
    "order": int,
}


class ConfigError(ValueError):
    pass


def _value(text: str):
    text = text.strip()
    if "," in text:
        return [_value(part) for part in text.split(",") if part.strip()]
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    return text


def parse_config(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = _value(val)
    return out


def load_config(path) -> dict:
    return parse_config(Path(path).read_text())


def schedule_from(config: dict, base: Schedule | None = None) -> Schedule:
    """Build a Schedule from any schedule keys present, starting from ``base``."""
    base = base or Schedule()
    fields = {k: getattr(base, k) for k in SCHEDULE_KEYS}
    for key, cast in SCHEDULE_KEYS.items():
        if config.get(key) is not None:
            try:
                fields[key] = cast(config[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {config[key]!r}") from exc
    return Schedule(**fields)
