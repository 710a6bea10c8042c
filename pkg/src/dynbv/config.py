"""Experiment configuration files: a small INI-style format with line-anchored errors.

Three flat sections. [environment] describes the objective, [grid] lists one
`cell = VARIANT mu=... c=...` line per algorithm, [run] holds dimension, run
count, seed, cap multiplier, and output directory.

    [environment]
    kind = DynBV
    change_period = 1

    [grid]
    cell = EA mu=2 c=1.5
    cell = GA mu=2 c=2.5 crossover_probability=0.5

    [run]
    n = 500
    runs = 20
    seed = 12345
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .environments import EnvironmentSpec
from .evolve import VARIANTS, AlgorithmConfig
from .harness import DEFAULT_CAP_MULTIPLIER, DEFAULT_RUNS

__all__ = ["ExperimentConfig", "ConfigError", "parse_config", "emit_config"]


class ConfigError(ValueError):
    """Configuration problem, anchored to a source line when one applies."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass
class ExperimentConfig:
    environment: EnvironmentSpec
    algorithms: list[AlgorithmConfig]
    n: int
    runs: int = DEFAULT_RUNS
    seed: int = 1
    cap_multiplier: float = DEFAULT_CAP_MULTIPLIER
    output_dir: Path = field(default_factory=lambda: Path("results"))


_ENV_KEYS = {"kind", "beta", "change_period", "weights"}
_RUN_KEYS = {"n", "runs", "seed", "cap_multiplier", "output_dir"}


def _parse_number(raw: str, line: int, kind: type, what: str):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{what} must be a {kind.__name__}, got {raw!r}", line) from None


def _parse_cell(raw: str, line: int) -> AlgorithmConfig:
    parts = raw.split()
    if not parts:
        raise ConfigError("empty cell definition", line)
    variant = parts[0]
    if variant not in VARIANTS:
        raise ConfigError(
            f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}", line
        )
    fields: dict[str, float] = {}
    for token in parts[1:]:
        if "=" not in token:
            raise ConfigError(f"expected key=value in cell, got {token!r}", line)
        key, _, value = token.partition("=")
        if key == "mu":
            fields["mu"] = _parse_number(value, line, int, "mu")
        elif key == "c":
            fields["c"] = _parse_number(value, line, float, "c")
        elif key == "crossover_probability":
            fields["crossover_probability"] = _parse_number(
                value, line, float, "crossover_probability"
            )
        else:
            raise ConfigError(f"unknown cell key {key!r}", line)
    if "mu" not in fields or "c" not in fields:
        raise ConfigError("cell needs both mu= and c=", line)
    try:
        return AlgorithmConfig(variant=variant, **fields)
    except ValueError as exc:
        raise ConfigError(str(exc), line) from None


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a configuration document."""
    section = None
    env_fields: dict[str, tuple[str, int]] = {}
    run_fields: dict[str, tuple[str, int]] = {}
    cells: list[tuple[AlgorithmConfig, int]] = []

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in ("environment", "grid", "run"):
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if section is None:
            raise ConfigError("key outside of any section", lineno)
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", lineno)
        key, _, value = (part.strip() for part in line.partition("="))
        if section == "grid":
            if key != "cell":
                raise ConfigError(f"unknown key {key!r} in [grid]; use cell =", lineno)
            cells.append((_parse_cell(value, lineno), lineno))
        elif section == "environment":
            if key not in _ENV_KEYS:
                raise ConfigError(f"unknown key {key!r} in [environment]", lineno)
            if key in env_fields:
                raise ConfigError(f"duplicate key {key!r} in [environment]", lineno)
            env_fields[key] = (value, lineno)
        else:
            if key not in _RUN_KEYS:
                raise ConfigError(f"unknown key {key!r} in [run]", lineno)
            if key in run_fields:
                raise ConfigError(f"duplicate key {key!r} in [run]", lineno)
            run_fields[key] = (value, lineno)

    kind, kind_line = env_fields.get("kind", ("DynBV", None))
    beta = None
    if "beta" in env_fields:
        beta = _parse_number(env_fields["beta"][0], env_fields["beta"][1], float, "beta")
    change_period = 1
    if "change_period" in env_fields:
        change_period = _parse_number(
            env_fields["change_period"][0], env_fields["change_period"][1], int, "change_period"
        )
    weights = None
    if "weights" in env_fields:
        raw, wline = env_fields["weights"]
        weights = tuple(
            _parse_number(tok.strip(), wline, float, "weight") for tok in raw.split(",")
        )
    try:
        environment = EnvironmentSpec(
            kind=kind, beta=beta, change_period=change_period, weights=weights
        )
    except ValueError as exc:
        raise ConfigError(str(exc), kind_line) from None

    if not cells:
        raise ConfigError("no algorithm cells defined in [grid]")
    seen: dict[tuple, int] = {}
    for cell, lineno in cells:
        key = (cell.variant, cell.mu, cell.c)
        if key in seen:
            raise ConfigError(
                f"duplicate cell {cell.variant} mu={cell.mu} c={cell.c:g} "
                f"(first defined on line {seen[key]})",
                lineno,
            )
        seen[key] = lineno

    if "n" not in run_fields:
        raise ConfigError("missing required key n in [run]")
    n = _parse_number(run_fields["n"][0], run_fields["n"][1], int, "n")
    if n < 2:
        raise ConfigError("n must be >= 2", run_fields["n"][1])
    runs = DEFAULT_RUNS
    if "runs" in run_fields:
        runs = _parse_number(run_fields["runs"][0], run_fields["runs"][1], int, "runs")
        if runs < 1:
            raise ConfigError("runs must be >= 1", run_fields["runs"][1])
    seed = 1
    if "seed" in run_fields:
        seed = _parse_number(run_fields["seed"][0], run_fields["seed"][1], int, "seed")
    cap_multiplier = DEFAULT_CAP_MULTIPLIER
    if "cap_multiplier" in run_fields:
        cap_multiplier = _parse_number(
            run_fields["cap_multiplier"][0], run_fields["cap_multiplier"][1], float, "cap_multiplier"
        )
        if cap_multiplier <= 0:
            raise ConfigError("cap_multiplier must be positive", run_fields["cap_multiplier"][1])
    output_dir = Path(run_fields["output_dir"][0]) if "output_dir" in run_fields else Path("results")

    return ExperimentConfig(
        environment=environment,
        algorithms=[cell for cell, _ in cells],
        n=n,
        runs=runs,
        seed=seed,
        cap_multiplier=cap_multiplier,
        output_dir=output_dir,
    )


def emit_config(config: ExperimentConfig) -> str:
    """Render a config document that parses back to an equal config."""
    env = config.environment
    lines = ["[environment]", f"kind = {env.kind}"]
    if env.beta is not None:
        lines.append(f"beta = {env.beta!r}")
    if env.change_period != 1:
        lines.append(f"change_period = {env.change_period}")
    if env.weights is not None:
        lines.append("weights = " + ", ".join(repr(w) for w in env.weights))
    lines.append("")
    lines.append("[grid]")
    for cell in config.algorithms:
        entry = f"cell = {cell.variant} mu={cell.mu} c={cell.c!r}"
        if cell.crossover_probability != 0.5:
            entry += f" crossover_probability={cell.crossover_probability!r}"
        lines.append(entry)
    lines.append("")
    lines.append("[run]")
    lines.append(f"n = {config.n}")
    lines.append(f"runs = {config.runs}")
    lines.append(f"seed = {config.seed}")
    lines.append(f"cap_multiplier = {config.cap_multiplier!r}")
    lines.append(f"output_dir = {config.output_dir}")
    return "\n".join(lines) + "\n"
