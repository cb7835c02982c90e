"""Run configuration, TSV stats records and the batch configuration file.

Batch files are INI documents read with :mod:`configparser`::

    [batch]
    schema = 1
    patch = 7
    bins = 16
    alpha = 0.7
    seed = 0

    [case fused-a]
    command = fusion-eval
    mri = fixtures/structural.png
    pet = fixtures/functional.png
    fused = fixtures/fused_average.png

Relative paths resolve against the directory holding the batch file. Any
``[batch]`` option except ``schema`` may be overridden inside a case.
"""

from __future__ import annotations

import configparser
import csv
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .perturb import KINDS, NoiseSpec

SCHEMA_VERSION = 1

COMMAND_INPUTS = {
    "map": ("source", "target"),
    "fusion-eval": ("mri", "pet", "fused"),
    "translation-eval": ("source", "reference", "predicted"),
    "perturb": ("mri", "pet", "fused"),
}


@dataclass(frozen=True)
class RunConfig:
    patch: int = 7
    bins: int = 16
    alpha: float = 0.7
    seed: int = 0
    normalize: bool = False
    mask: Path | None = None
    noises: tuple[str, ...] = KINDS
    workers: int = 1

    def noise_specs(self) -> list[NoiseSpec]:
        return [NoiseSpec.parse(text, seed=self.seed) for text in self.noises]

    def dump(self) -> dict:
        out = asdict(self)
        out["mask"] = None if self.mask is None else str(self.mask)
        out["noises"] = {spec.label(): spec.params for spec in self.noise_specs()}
        out["schema"] = SCHEMA_VERSION
        return out


STATS_FIELDS = (
    "case", "command", "map", "noise", "status", "mean", "min", "max",
    "frac_ge_half", "delta_mean", "frac_cyan", "frac_blue", "frac_magenta",
    "frac_white", "error",
)
_FLOAT_FIELDS = {"mean", "min", "max", "frac_ge_half", "delta_mean",
                 "frac_cyan", "frac_blue", "frac_magenta", "frac_white"}


@dataclass
class StatsRecord:
    case: str
    command: str
    map: str
    noise: str = "none"
    status: str = "ok"
    mean: float | None = None
    min: float | None = None
    max: float | None = None
    frac_ge_half: float | None = None
    delta_mean: float | None = None
    frac_cyan: float | None = None
    frac_blue: float | None = None
    frac_magenta: float | None = None
    frac_white: float | None = None
    error: str = ""


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value).replace("\t", " ").replace("\n", " ")


def write_stats(path, records, append: bool = False) -> None:
    """Write records as TSV; appending keeps a single header row."""
    path = Path(path)
    fresh = not (append and path.exists() and path.stat().st_size > 0)
    if not fresh:
        with path.open(newline="") as fh:
            header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != STATS_FIELDS:
            raise ValueError(f"{path}: existing header does not match the stats schema")
    with path.open("w" if fresh else "a", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        if fresh:
            writer.writerow(STATS_FIELDS)
        for rec in records:
            writer.writerow([_cell(getattr(rec, name)) for name in STATS_FIELDS])


def read_stats(path) -> list[StatsRecord]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh, delimiter="\t")
        if tuple(reader.fieldnames or ()) != STATS_FIELDS:
            raise ValueError(f"{path}: header does not match the stats schema")
        out = []
        for row in reader:
            kw = {}
            for name in STATS_FIELDS:
                raw = row[name]
                kw[name] = (float(raw) if raw else None) if name in _FLOAT_FIELDS else raw
            out.append(StatsRecord(**kw))
    return out


class BatchConfigError(ValueError):
    pass


@dataclass
class CaseSpec:
    name: str
    command: str
    inputs: dict[str, Path]
    config: RunConfig
    line: int = 0


@dataclass
class BatchSpec:
    config: RunConfig
    cases: list[CaseSpec] = field(default_factory=list)


def _line_index(text: str) -> dict[tuple[str, str | None], int]:
    index: dict[tuple[str, str | None], int] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            index[(section, None)] = lineno
        elif section is not None:
            key = line.split("=", 1)[0].split(":", 1)[0].strip().lower()
            index.setdefault((section, key), lineno)
    return index


def _apply_options(base: RunConfig, items, where, root: Path) -> RunConfig:
    changes = {}
    for key, value in items:
        try:
            if key in ("patch", "bins", "seed", "workers"):
                changes[key] = int(value)
            elif key == "alpha":
                changes[key] = float(value)
                if not math.isfinite(changes[key]):
                    raise ValueError("alpha must be finite")
            elif key == "normalize":
                changes[key] = configparser.ConfigParser.BOOLEAN_STATES[value.lower()]
            elif key == "mask":
                changes[key] = (root / value) if value else None
            elif key == "noises":
                changes[key] = tuple(value.split())
                for text in changes[key]:
                    NoiseSpec.parse(text)
            else:
                raise BatchConfigError(f"{where(key)}: unknown option {key!r}")
        except BatchConfigError:
            raise
        except (KeyError, ValueError) as exc:
            raise BatchConfigError(f"{where(key)}: bad value {value!r} for {key!r}: {exc}") from None
    return replace(base, **changes)


def load_batch(path) -> BatchSpec:
    """Parse and validate a batch file, reporting problems as ``file:line: message``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise BatchConfigError(f"{path}: cannot read batch file: {exc}") from None
    lines = _line_index(text)
    root = path.parent

    def at(section, key=None):
        lineno = lines.get((section, key)) or lines.get((section, None), 0)
        return f"{path}:{lineno}"

    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise BatchConfigError(str(exc).replace("\n", " ")) from None

    if not parser.has_section("batch"):
        raise BatchConfigError(f"{path}:1: missing [batch] section")
    head = dict(parser.items("batch"))
    schema = head.pop("schema", None)
    if schema is None:
        raise BatchConfigError(f"{at('batch')}: missing 'schema' option")
    if schema.strip() != str(SCHEMA_VERSION):
        raise BatchConfigError(f"{at('batch', 'schema')}: unsupported schema {schema!r}, expected {SCHEMA_VERSION}")
    base = _apply_options(RunConfig(), head.items(), lambda k: at("batch", k), root)

    batch = BatchSpec(config=base)
    seen = set()
    for section in parser.sections():
        if section == "batch":
            continue
        kind, _, name = section.partition(" ")
        name = name.strip()
        if kind != "case" or not name:
            raise BatchConfigError(f"{at(section)}: unexpected section [{section}], expected [case <name>]")
        if name in seen:
            raise BatchConfigError(f"{at(section)}: duplicate case name {name!r}")
        if "/" in name or name in (".", ".."):
            raise BatchConfigError(f"{at(section)}: case name {name!r} is not a valid directory name")
        seen.add(name)
        opts = dict(parser.items(section))
        command = opts.pop("command", None)
        if command not in COMMAND_INPUTS:
            raise BatchConfigError(
                f"{at(section, 'command')}: command must be one of {', '.join(COMMAND_INPUTS)}, got {command!r}"
            )
        inputs = {}
        for key in COMMAND_INPUTS[command]:
            if key not in opts:
                raise BatchConfigError(f"{at(section)}: case {name!r} is missing input {key!r}")
            inputs[key] = root / opts.pop(key)
        cfg = _apply_options(base, opts.items(), lambda k: at(section, k), root)
        batch.cases.append(CaseSpec(name, command, inputs, cfg, lines.get((section, None), 0)))
    return batch
