"""Experiment configuration: one ``key = value`` file with sections.

Example::

    [paths]
    workdir = runs/small

    [corpus]
    size = 1600
    n_min = 6
    n_max = 15
    positive_fraction = 0.55
    seed = 0

    [layout]
    kind = circular

    [render]
    scheme = uniform

    [split]
    train_total = 1000

    [experiment]
    seeds = 0, 1, 2, 3, 4

    [sweep.table2a]
    render.node_scale = 0.01, 0.5, 5, 100
    render.edge_scale = 0.01, 0.1, 1, 10, 100

Relative paths resolve against the directory holding the config file.
"""

from __future__ import annotations

import configparser
import dataclasses
import itertools
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .classifier import TrainConfig
from .dataset import CorpusConfig, SplitSpec
from .layout import LayoutSpec
from .raster import RenderSpec

SECTIONS = {
    "corpus": CorpusConfig,
    "layout": LayoutSpec,
    "render": RenderSpec,
    "split": SplitSpec,
    "train": TrainConfig,
}
DEFAULT_SEEDS = (0, 1, 2, 3, 4)


class ConfigError(ValueError):
    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line else f"{path}: "
        super().__init__(where + message)
        self.line = line


@dataclass
class ExperimentConfig:
    corpus: CorpusConfig = field(default_factory=CorpusConfig)
    layout: LayoutSpec = field(default_factory=LayoutSpec)
    render: RenderSpec = field(default_factory=RenderSpec)
    split: SplitSpec = field(default_factory=SplitSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    seeds: tuple = DEFAULT_SEEDS
    workdir: Path = Path("work")
    sweeps: dict = field(default_factory=dict)
    source: Path | None = None

    @property
    def variant(self) -> str:
        """Directory tag naming the layout, rendering and training-size choices."""
        lay = self.layout
        if lay.kind == "circular":
            ltag = f"circular-a{lay.a:g}-b{lay.b:g}"
        elif lay.kind == "spiral":
            ltag = f"spiral-r{lay.r:g}"
        else:
            ltag = f"random-s{lay.seed}"
        r = self.render
        return f"{ltag}-{r.scheme}-x{r.node_scale:g}-y{r.edge_scale:g}-t{self.split.train_total}"

    def describe(self) -> dict:
        return {
            "layout": dataclasses.asdict(self.layout),
            "render": dataclasses.asdict(self.render),
            "split": dataclasses.asdict(self.split),
            "variant": self.variant,
        }

    def override(self, key: str, value: str) -> "ExperimentConfig":
        """Copy with one dotted ``section.key`` replaced by a raw string value."""
        section, _, name = key.partition(".")
        if section == "experiment" and name == "seeds":
            return replace(self, seeds=_parse_seeds(value))
        if section == "paths" and name == "workdir":
            return replace(self, workdir=Path(value))
        if section not in SECTIONS:
            raise ConfigError(f"unknown section in override {key!r}")
        current = getattr(self, section)
        new = _set_field(current, name, value, self.source)
        return replace(self, **{section: new})


def _convert(ftype, raw: str, base: Path | None):
    raw = raw.strip()
    t = str(ftype)
    if t in ("int", "<class 'int'>"):
        return int(raw, 0)
    if t in ("float", "<class 'float'>"):
        return float(raw)
    if t in ("str", "<class 'str'>"):
        return raw
    if t in ("tuple", "<class 'tuple'>"):
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        if base is not None:
            parts = [str((base / p)) if not Path(p).is_absolute() else p for p in parts]
        return tuple(parts)
    raise TypeError(f"unsupported field type {t}")


def _field_value(obj, name: str, raw: str, base_path=None):
    fields = {f.name: f for f in dataclasses.fields(obj)}
    if name not in fields:
        raise ConfigError(f"unknown key {name!r} for [{type(obj).__name__}]")
    base = Path(base_path).parent if base_path else None
    try:
        if name == "background":
            return tuple(int(p) for p in raw.split(","))
        return _convert(fields[name].type, raw, base if name == "graph6_files" else None)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad value {raw!r} for {name}: {exc}") from None


def _set_field(obj, name: str, raw: str, base_path=None):
    value = _field_value(obj, name, raw, base_path)
    try:
        return replace(obj, **{name: value})
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad value {raw!r} for {name}: {exc}") from None


def _parse_seeds(raw: str) -> tuple:
    try:
        seeds = tuple(int(p, 0) for p in raw.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"bad seed list {raw!r}: {exc}") from None
    if not seeds:
        raise ConfigError("seed list must be nonempty")
    return seeds


def _line_index(text: str) -> dict:
    """Map ``(section, key)`` to its 1-based line number."""
    index = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"^\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
            index.setdefault((section, None), lineno)
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", s)
        if m and section is not None:
            index[(section, m.group(1).strip().lower())] = lineno
    return index


def parse_config(text: str, path=None) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=str(path or "<config>"))
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise ConfigError(str(exc).splitlines()[0], path, line) from None
    lines = _line_index(text)
    base = Path(path).resolve().parent if path else Path.cwd()
    cfg = ExperimentConfig(workdir=base / "work", source=Path(path).resolve() if path else None)

    for section in parser.sections():
        items = parser[section]
        if section in SECTIONS:
            obj = getattr(cfg, section)
            values = {}
            for key, raw in items.items():
                try:
                    values[key] = _field_value(obj, key, raw, cfg.source)
                except ConfigError as exc:
                    raise ConfigError(str(exc), path, lines.get((section, key))) from None
            try:
                setattr(cfg, section, replace(obj, **values))
            except (ValueError, TypeError) as exc:
                # point at the first key that is invalid on its own, else the header
                line = lines.get((section, None))
                for key, value in values.items():
                    try:
                        replace(obj, **{key: value})
                    except (ValueError, TypeError):
                        line = lines.get((section, key), line)
                        break
                raise ConfigError(f"invalid [{section}]: {exc}", path, line) from None
        elif section == "paths":
            for key, raw in items.items():
                if key != "workdir":
                    raise ConfigError(f"unknown key {key!r} in [paths]", path, lines.get((section, key)))
                p = Path(raw.strip())
                cfg.workdir = p if p.is_absolute() else (base / p).resolve()
        elif section == "experiment":
            for key, raw in items.items():
                if key != "seeds":
                    raise ConfigError(f"unknown key {key!r} in [experiment]", path, lines.get((section, key)))
                try:
                    cfg.seeds = _parse_seeds(raw)
                except ConfigError as exc:
                    raise ConfigError(str(exc), path, lines.get((section, key))) from None
        elif section.startswith("sweep."):
            grid = {}
            for key, raw in items.items():
                values = [v.strip() for v in raw.split(",") if v.strip()]
                if "." not in key or not values:
                    raise ConfigError(f"sweep entries look like 'section.key = v1, v2', got {key!r}",
                                      path, lines.get((section, key)))
                grid[key] = values
            cfg.sweeps[section[len("sweep."):]] = grid
        else:
            raise ConfigError(f"unknown section [{section}]", path, lines.get((section, None)))
    return cfg


def load_config(path, overrides=()) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    cfg = parse_config(path.read_text(), path)
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} must look like section.key=value")
        cfg = cfg.override(key.strip(), value.strip())
    return cfg


def sweep_points(cfg: ExperimentConfig, name: str):
    """Yield ``(assignment, config)`` for every point of the named sweep grid."""
    if name not in cfg.sweeps:
        raise ConfigError(f"no [sweep.{name}] section in config (have: {sorted(cfg.sweeps)})")
    grid = cfg.sweeps[name]
    keys = list(grid)
    for combo in itertools.product(*(grid[k] for k in keys)):
        point = cfg
        assignment = dict(zip(keys, combo))
        for key, value in assignment.items():
            if key == "layout.ratio":
                # a/b ratio with b held at 1
                point = point.override("layout.a", value).override("layout.b", "1")
            else:
                point = point.override(key, value)
        yield assignment, point
