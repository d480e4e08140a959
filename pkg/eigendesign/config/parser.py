"""
Parser for the `key = value` run configuration.

One binding per line, `#` starts a comment, quoting follows the dotenv
grammar. Variable expansion is never applied and the process environment is
never consulted.
"""
import io
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv.parser import parse_stream
from pydantic import ValidationError

from eigendesign.exceptions import ConfigError
from eigendesign.schemas.schema import RunConfig

logger = logging.getLogger(__name__)


def _binding_line(binding) -> int:
    # the recorded position is where the preceding blank lines start
    text = binding.original.string
    leading = text[: len(text) - len(text.lstrip())]
    return binding.original.line + leading.count("\n")


def _validation_line(exc: ValidationError, lines: Dict[str, int]) -> ConfigError:
    error = exc.errors()[0]
    if error["type"] == "variant_invariant":
        fields = error.get("ctx", {}).get("fields", [])
        line = max((lines.get(name, 0) for name in fields), default=0)
        return ConfigError(error["msg"], line=line, error=exc)
    key = str(error["loc"][0]) if error["loc"] else ""
    return ConfigError(f"{key}: {error['msg']}", line=lines.get(key, 0), error=exc)


def parse_config(source: str, base: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    Validate a config text into a RunConfig.

    Args:
        source: file contents
        base: overrides applied before the file, e.g. a preset

    Returns:
        RunConfig with defaults for omitted keys
    """
    values: Dict[str, Any] = dict(base or {})
    lines: Dict[str, int] = {}
    for binding in parse_stream(io.StringIO(source)):
        line = _binding_line(binding)
        if binding.error:
            raise ConfigError(f"cannot parse {binding.original.string.strip()!r}", line=line)
        if binding.key is None:
            continue
        key = binding.key
        if key in lines:
            raise ConfigError(f"duplicate key {key!r} (first given on line {lines[key]})", line=line)
        if key not in RunConfig.model_fields:
            raise ConfigError(f"unknown key {key!r}", line=line)
        if binding.value is None or binding.value.strip() == "":
            raise ConfigError(f"missing value for {key!r}", line=line)
        values[key] = binding.value.strip()
        lines[key] = line

    try:
        config = RunConfig.model_validate(values)
    except ValidationError as exc:
        raise _validation_line(exc, lines) from exc
    logger.debug("Parsed config with keys %s", sorted(lines))
    return config


def load_config(path: Optional[Union[str, Path]] = None, preset: Optional[str] = None) -> RunConfig:
    """Config from an optional file layered over an optional preset."""
    from eigendesign.config.presets import FigurePresets

    base = FigurePresets.get(preset) if preset else None
    if path is None:
        return parse_config("", base)
    try:
        source = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}", line=0, error=exc) from exc
    return parse_config(source, base)
