"""Experiment configuration: plain key = value text with [sections].

One file describes one reproducible run::

    [experiment]
    suite = martingale
    seed = 7
    workers = 2
    out = reports

    [experiment.overrides]
    n_paths = 20000
    dt = 0.0009765625

    [family.phi]
    kind = phi
    form = exponential
    rate = 1.0

``[family.<name>]`` blocks (or a single ``[family]`` block) override the
canonical spec of that family wherever the suite is family-parametric; every
referenced spec is validated at load time.  The seed is mandatory — there is
no wall-clock default.
"""

from __future__ import annotations

import ast
import configparser
import os
from dataclasses import dataclass, field

from .errors import ConfigError
from .weights import validate_family

__all__ = ["ExperimentConfig", "load_config", "parse_config"]

ENV_PREFIX = "PENBM_"


@dataclass
class ExperimentConfig:
    suite: str
    seed: int
    workers: int = 1
    out_dir: str = "reports"
    overrides: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)

    def suite_params(self) -> dict:
        params = dict(self.overrides)
        if self.families:
            params["families"] = self.families
        return params


def _coerce(value: str):
    try:
        return ast.literal_eval(value)
    except (ValueError, SyntaxError):
        return value


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    if "experiment" not in cp:
        raise ConfigError("missing [experiment] section")
    exp = cp["experiment"]
    suite = exp.get("suite")
    if not suite:
        raise ConfigError("experiment.suite is required")
    if "seed" not in exp:
        raise ConfigError("experiment.seed is mandatory (no wall-clock default)")
    try:
        seed = int(exp["seed"])
    except ValueError as exc:
        raise ConfigError(f"experiment.seed must be an integer, got {exp['seed']!r}") from exc
    workers = int(exp.get("workers", "1"))
    out_dir = exp.get("out", "reports")
    overrides = {}
    if "experiment.overrides" in cp:
        overrides = {k: _coerce(v) for k, v in cp["experiment.overrides"].items()}
    families = {}
    for section in cp.sections():
        if section == "family" or section.startswith("family."):
            spec = validate_family(dict(cp[section]))  # raises with the condition name
            tag = section.partition(".")[2] or spec.kind
            families[tag] = spec
    return ExperimentConfig(
        suite=suite, seed=seed, workers=workers, out_dir=out_dir,
        overrides=overrides, families=families,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config(text)


def env_override(name: str, current):
    """Environment variables mirror the CLI flags with the PENBM_ prefix."""
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return current
    if isinstance(current, int) or name in ("seed", "workers"):
        return int(raw)
    return raw
