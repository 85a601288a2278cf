"""Flat ``key = value`` config files, merged underneath command-line flags."""

from __future__ import annotations

from pathlib import Path


class ConfigError(ValueError):
    pass


def parse_config(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment. Keys use ``-`` or ``_`` interchangeably."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        out[key] = value.strip()
    return out


def load_config(path) -> dict[str, str]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {p}: {e}") from None
    return parse_config(text, str(p))


def merge(flags: dict, file_values: dict[str, str], types: dict[str, type], defaults: dict) -> dict:
    """Flags that were given win, then file values, then defaults.

    A flag counts as given when it is not None. File values are converted with
    ``types``; unknown keys are an error.
    """
    unknown = set(file_values) - set(types)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    out = dict(defaults)
    for key, raw in file_values.items():
        out[key] = _convert(key, raw, types[key])
    for key, value in flags.items():
        if value is not None:
            out[key] = value
    return out


def _convert(key: str, raw: str, kind: type):
    try:
        if kind is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"config key {key}: cannot parse {raw!r} as {kind.__name__}") from None
