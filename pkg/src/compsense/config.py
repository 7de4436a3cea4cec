"""Flat key = value configuration for the pipeline command.

The format is a plain text file: one ``key = value`` assignment per
line, ``#`` comments, blank lines ignored. No sections, no nesting, no
interpolation; a config is a finite set of known keys, and any unknown
key is an error so typos cannot silently fall back to defaults. All
problems in a file are collected and reported together.

Relative input paths resolve against the directory containing the
config file; relative output names resolve under ``workdir`` (itself
resolved against the config directory). ``normalized()`` renders the
fully-resolved config as sorted key = value lines, which is what the
run manifest stores: two files that differ only in comments, ordering,
or spacing normalize to identical snapshots.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

from .errors import DataValidationError

DEFAULT_LAMBDA_GRID = (0.5, 0.6, 0.7)


@dataclass(frozen=True)
class PipelineConfig:
    # inputs
    train: tuple[str, ...] = ()
    dev: str | None = None
    preds: tuple[str, ...] = ()
    # output locations
    workdir: str = "."
    vocab: str = "vocab.voc"
    model: str = "model.bow"
    lms: str = "lms.jsonl"
    report: str = "report.csv"
    report_format: str = "csv"
    model_format: str = "binary"
    # feature space
    min_count: int = 2
    hashing: bool = False
    hash_bits: int = 20
    # training
    l2: float = 1e-6
    epochs: int = 3
    batch_size: int = 256
    learning_rate: float = 0.5
    lr_decay: float = 1.0
    seed: int = 0
    shuffle_block: int = 8192
    use_bias: bool = True
    # extraction and scoring
    lambda_grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID
    strict: bool = False

    def normalized(self) -> str:
        lines = []
        for f in sorted(fields(self), key=lambda f: f.name):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                rendered = " ".join(str(v) for v in value)
            elif isinstance(value, bool):
                rendered = "true" if value else "false"
            elif value is None:
                rendered = ""
            else:
                rendered = str(value)
            lines.append(f"{f.name} = {rendered}")
        return "\n".join(lines) + "\n"

    def out_path(self, name: str) -> str:
        if os.path.isabs(name):
            return name
        return os.path.join(self.workdir, name)


_PATH_LIST_KEYS = {"train", "preds"}
_PATH_KEYS = {"dev"}
_FLOAT_LIST_KEYS = {"lambda_grid"}
_INT_KEYS = {"min_count", "hash_bits", "epochs", "batch_size", "seed", "shuffle_block"}
_FLOAT_KEYS = {"l2", "learning_rate", "lr_decay"}
_BOOL_KEYS = {"hashing", "use_bias", "strict"}
_STR_KEYS = {
    "workdir", "vocab", "model", "lms", "report", "report_format", "model_format",
}
_ALL_KEYS = (
    _PATH_LIST_KEYS | _PATH_KEYS | _FLOAT_LIST_KEYS
    | _INT_KEYS | _FLOAT_KEYS | _BOOL_KEYS | _STR_KEYS
)

_TRUE = {"true", "yes", "1", "on"}
_FALSE = {"false", "no", "0", "off"}


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_config_text(text: str) -> dict[str, str]:
    """Raw key -> value string pairs; syntax errors aggregated."""
    values: dict[str, str] = {}
    problems: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            problems.append(f"line {lineno}: expected 'key = value'")
            continue
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.split("#", 1)[0].strip()
        if not key:
            problems.append(f"line {lineno}: empty key")
            continue
        if key in values:
            problems.append(f"line {lineno}: duplicate key {key!r}")
            continue
        values[key] = value
    if problems:
        raise DataValidationError("config syntax: " + "; ".join(problems))
    return values


def validate_config(path) -> PipelineConfig:
    """Parse, type-check, fill defaults, and resolve every path."""
    with open(path, encoding="utf-8") as fh:
        raw = parse_config_text(fh.read())
    base = os.path.dirname(os.path.abspath(path))
    return _build_config(raw, base)


def config_from_pairs(pairs: dict[str, str], base: str = ".") -> PipelineConfig:
    return _build_config(dict(pairs), os.path.abspath(base))


def _build_config(raw: dict[str, str], base: str) -> PipelineConfig:
    problems = [f"unknown key {k!r}" for k in sorted(set(raw) - _ALL_KEYS)]
    kwargs: dict = {}

    def _resolve(p: str) -> str:
        return p if os.path.isabs(p) else os.path.normpath(os.path.join(base, p))

    for key, value in raw.items():
        if key not in _ALL_KEYS:
            continue
        try:
            if key in _PATH_LIST_KEYS:
                kwargs[key] = tuple(_resolve(p) for p in value.split())
            elif key in _PATH_KEYS:
                kwargs[key] = _resolve(value) if value else None
            elif key in _FLOAT_LIST_KEYS:
                grid = tuple(float(v) for v in value.split())
                if not grid:
                    raise ValueError("empty list")
                if any(not 0.0 <= g <= 1.0 for g in grid):
                    raise ValueError("lambda values must be in [0, 1]")
                kwargs[key] = grid
            elif key in _INT_KEYS:
                kwargs[key] = int(value)
            elif key in _FLOAT_KEYS:
                kwargs[key] = float(value)
            elif key in _BOOL_KEYS:
                kwargs[key] = _parse_bool(value)
            else:
                kwargs[key] = value
        except ValueError as exc:
            problems.append(f"key {key!r}: {exc}")

    if "workdir" in kwargs:
        kwargs["workdir"] = _resolve(kwargs["workdir"])
    else:
        kwargs["workdir"] = base

    config = PipelineConfig(**kwargs) if not problems else None
    if config is not None:
        problems.extend(_check_ranges(config))
    if problems:
        raise DataValidationError("invalid config: " + "; ".join(problems))
    return config


def _check_ranges(config: PipelineConfig) -> list[str]:
    problems = []
    if config.epochs < 1:
        problems.append("epochs must be >= 1")
    if config.batch_size < 1:
        problems.append("batch_size must be >= 1")
    if config.l2 < 0:
        problems.append("l2 must be >= 0")
    if config.learning_rate <= 0:
        problems.append("learning_rate must be > 0")
    if config.min_count < 1:
        problems.append("min_count must be >= 1")
    if config.report_format not in ("csv", "markdown", "json"):
        problems.append("report_format must be csv, markdown, or json")
    if config.model_format not in ("binary", "text"):
        problems.append("model_format must be binary or text")
    return problems
