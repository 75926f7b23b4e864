"""Run configuration: flat ``key = value`` text with optional sections.

Physical parameters sit at the top level; ``[grid]``, ``[output]`` and
``[sweep]`` sections hold the rest.  ``#`` starts a comment::

    gamma1 = 1
    omega1 = 3
    omega2 = 3
    splitting = 0.1
    p = 1

    [grid]
    span = 30
    refine_center = true
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import ParameterError
from .model import PARAM_NAMES, SystemParams
from .spectrum import DEFAULT_POINTS, NORMALIZATIONS

FORMATS = ("csv", "structured-text")
_TOP = "params"


@dataclass(frozen=True)
class GridConfig:
    span: Optional[float] = None  # half-width of the uniform grid; None = automatic
    points: int = DEFAULT_POINTS
    refine_center: bool = False

    def __post_init__(self):
        if self.span is not None and not self.span > 0:
            raise ParameterError("grid.span", f"must be > 0, got {self.span}")
        if self.points < 3:
            raise ParameterError("grid.points", f"must be >= 3, got {self.points}")


@dataclass(frozen=True)
class OutputConfig:
    format: str = "csv"
    path: Optional[str] = None
    normalization: str = "total"

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ParameterError("output.format", f"must be one of {FORMATS}, got {self.format!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ParameterError(
                "output.normalization", f"must be one of {NORMALIZATIONS}, got {self.normalization!r}"
            )


@dataclass(frozen=True)
class SweepConfig:
    vary: Optional[str] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    steps: Optional[int] = None

    def __post_init__(self):
        if self.vary is not None and self.vary not in PARAM_NAMES:
            raise ParameterError("sweep.vary", f"unknown parameter {self.vary!r}")
        if self.steps is not None and self.steps < 1:
            raise ParameterError("sweep.steps", f"must be >= 1, got {self.steps}")


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    grid: GridConfig = field(default_factory=GridConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def to_text(self) -> str:
        lines = [f"{k} = {_fmt(v)}" for k, v in self.params.as_dict().items()]
        for name, section, keys in (
            ("grid", self.grid, ("span", "points", "refine_center")),
            ("output", self.output, ("format", "path", "normalization")),
            ("sweep", self.sweep, ("vary", "start", "stop", "steps")),
        ):
            body = [f"{k} = {_fmt(getattr(section, k))}" for k in keys if getattr(section, k) is not None]
            if body:
                lines += ["", f"[{name}]"] + body
        return "\n".join(lines) + "\n"

    def with_overrides(self, **sections) -> RunConfig:
        """Replace individual fields, e.g. ``grid={"span": 20}``; None values are ignored."""
        cfg = self
        for name, changes in sections.items():
            changes = {k: v for k, v in changes.items() if v is not None}
            if changes:
                try:
                    cfg = replace(cfg, **{name: replace(getattr(cfg, name), **changes)})
                except TypeError as exc:
                    raise ParameterError(name, str(exc)) from None
        return cfg


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    # repr gives the shortest decimal that round-trips
    return repr(value) if isinstance(value, float) else str(value)


def _bool(key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ParameterError(key, f"not a boolean: {raw!r}")


def _num(key: str, raw: str, kind=float):
    try:
        return kind(raw)
    except ValueError:
        raise ParameterError(key, f"not a valid {kind.__name__}: {raw!r}") from None


_SECTION_TYPES = {
    "grid": (GridConfig, {"span": float, "points": int, "refine_center": bool}),
    "output": (OutputConfig, {"format": str, "path": str, "normalization": str}),
    "sweep": (SweepConfig, {"vary": str, "from": float, "start": float, "to": float, "stop": float, "steps": int}),
}
_ALIASES = {"from": "start", "to": "stop"}


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(
        comment_prefixes=("#",), inline_comment_prefixes=("#",), interpolation=None
    )
    try:
        parser.read_string(f"[{_TOP}]\n" + text)
    except configparser.Error as exc:
        raise ParameterError("config", str(exc).splitlines()[0]) from None

    values = {}
    for key, raw in parser[_TOP].items():
        if key not in PARAM_NAMES:
            raise ParameterError(key, "unknown parameter")
        values[key] = _num(key, raw)
    cfg = {"params": SystemParams(**values)}

    for name in parser.sections():
        if name == _TOP:
            continue
        if name not in _SECTION_TYPES:
            raise ParameterError(name, "unknown config section")
        cls, types = _SECTION_TYPES[name]
        kwargs = {}
        for key, raw in parser[name].items():
            full = f"{name}.{key}"
            if key not in types:
                raise ParameterError(full, "unknown key")
            kind = types[key]
            if kind is bool:
                value = _bool(full, raw)
            elif kind is str:
                value = raw.strip()
            else:
                value = _num(full, raw, kind)
            kwargs[_ALIASES.get(key, key)] = value
        cfg[name] = cls(**kwargs)
    return RunConfig(**cfg)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ParameterError("config", f"cannot read {path}: {exc.strerror}") from None


def config_from_header(lines) -> RunConfig:
    """Recover the configuration echoed into a ``#``-prefixed CSV header."""
    body = []
    for line in lines:
        if not line.startswith("#"):
            break
        text = line[1:].strip()
        if text == "[result]":
            break
        body.append(text)
    return parse_config("\n".join(body))


__all__ = [
    "GridConfig",
    "OutputConfig",
    "RunConfig",
    "SweepConfig",
    "config_from_header",
    "load_config",
    "parse_config",
]
