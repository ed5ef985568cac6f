"""Metric tables, entry arguments, run configuration and log setup."""

import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Union

import yaml
from loguru import logger

from .core.ir import Gate
from .core.scheduler import PRESETS, T_DEPTH, MetricTable, preset, t_depth_metric
from .errors import ConfigError

METRIC_ENV = "QPAR_METRIC"
LOG_LEVEL_ENV = "QPAR_LOG_LEVEL"
YAML_SUFFIXES = (".yaml", ".yml")
LOG_FORMAT = "<level>{level: <8}</level> {message}"


def _gate(name: str, where: str) -> Gate:
    try:
        return Gate.from_name(name.strip())
    except KeyError:
        known = ", ".join(g.value for g in Gate)
        raise ConfigError(f"{where}: unknown gate {name.strip()!r} (known: {known})") from None


def _cost(value: Any, where: str) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: cost must be a non-negative integer, got {value!r}")
    try:
        cost = int(str(value).strip())
    except ValueError:
        raise ConfigError(f"{where}: cost must be a non-negative integer, got {value!r}") from None
    if cost < 0:
        raise ConfigError(f"{where}: cost must be a non-negative integer, got {cost}")
    return cost


def parse_metric_lines(text: str, name: str = "custom") -> MetricTable:
    """``GATE=COST`` lines; ``#`` starts a comment and unlisted gates cost 0."""
    costs: Dict[Gate, int] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}: expected GATE=COST, got {raw.strip()!r}")
        gate_name, value = line.split("=", 1)
        where = f"line {number}"
        costs[_gate(gate_name, where)] = _cost(value, where)
    return MetricTable(name, costs)


def metric_from_mapping(data: Mapping[str, Any], name: str = "custom") -> MetricTable:
    """``{preset, costs, rz_cost}`` mapping as loaded from YAML.

    The preset is the starting table (t-depth when absent); ``rz_cost`` only
    applies to the t-depth preset and ``costs`` overrides individual gates.
    """
    unknown = set(data) - {"preset", "costs", "rz_cost"}
    if unknown:
        raise ConfigError(f"unknown metric config keys: {', '.join(sorted(unknown))}")
    base_name = data.get("preset") or T_DEPTH
    if base_name not in PRESETS:
        raise ConfigError(f"unknown metric preset {base_name!r} (choose from {', '.join(PRESETS)})")
    if "rz_cost" in data:
        if base_name != T_DEPTH:
            raise ConfigError("rz_cost only applies to the t-depth preset")
        table = t_depth_metric(_cost(data["rz_cost"], "rz_cost"))
    else:
        table = preset(base_name)
    costs = data.get("costs") or {}
    if not isinstance(costs, Mapping):
        raise ConfigError("costs must be a mapping of gate name to cost")
    for gate_name, value in costs.items():
        table = table.with_cost(_gate(str(gate_name), "costs"), _cost(value, f"costs.{gate_name}"))
    return MetricTable(name, dict(table.costs))


def load_metric(path: Union[str, Path]) -> MetricTable:
    """Read a metric table from a YAML file or a ``GATE=COST`` file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read metric file {path}: {exc.strerror}") from None
    if path.suffix.lower() in YAML_SUFFIXES:
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML in {path}: {exc}") from None
        if not isinstance(data, Mapping):
            raise ConfigError(f"{path}: expected a mapping at the top level")
        table = metric_from_mapping(data, path.stem)
    else:
        table = parse_metric_lines(text, path.stem)
    logger.debug(f"[SCHEDULE] loaded metric {table.name} from {path}")
    return table


def resolve_metric(
    value: Optional[str] = None, environ: Optional[Mapping[str, str]] = None
) -> MetricTable:
    """Explicit ``value``, then ``$QPAR_METRIC``, then the t-depth preset.

    A value names either a preset or a metric file.
    """
    env = os.environ if environ is None else environ
    chosen = value or env.get(METRIC_ENV) or T_DEPTH
    if chosen in PRESETS:
        return preset(chosen)
    if Path(chosen).is_file():
        return load_metric(chosen)
    raise ConfigError(
        f"unknown metric {chosen!r}: not a preset ({', '.join(PRESETS)}) or a readable file"
    )


def _number(text: str) -> Union[int, float]:
    try:
        return int(text)
    except ValueError:
        return float(text)


def parse_entry_args(pairs: Sequence[str]) -> Dict[str, Union[int, float]]:
    """``name=value`` pairs; values are Int when they parse as one, else Double."""
    args: Dict[str, Union[int, float]] = {}
    for pair in pairs:
        name, sep, text = pair.partition("=")
        name = name.strip()
        if not sep or not name:
            raise ConfigError(f"entry argument must look like name=value, got {pair!r}")
        if name in args:
            raise ConfigError(f"entry argument {name} given twice")
        try:
            args[name] = _number(text.strip())
        except ValueError:
            raise ConfigError(f"entry argument {name} is not a number: {text!r}") from None
    return args


@dataclass
class RunConfig:
    """Everything one CLI invocation needs to trace and measure a program."""

    source: Path
    entry: str = "Main"
    args: Dict[str, Union[int, float]] = field(default_factory=dict)
    metric: MetricTable = field(default_factory=t_depth_metric)
    force_serial: bool = False
    output: Optional[Path] = None
    seed: int = 0
    max_qubits: Optional[int] = None
    top: int = 5

    def read_source(self) -> str:
        try:
            return self.source.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {self.source}: {exc.strerror}") from None


def setup_logging(verbose: bool = False, environ: Optional[Mapping[str, str]] = None) -> str:
    """Route qparallel logs to stderr; returns the level in effect."""
    env = os.environ if environ is None else environ
    level = env.get(LOG_LEVEL_ENV) or ("DEBUG" if verbose else "WARNING")
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)
    logger.enable("qparallel")
    return level.upper()
