"""
Experiment manifests: flat YAML mappings keyed by the camelCase names of
:class:`~inavfiter.dto.ExperimentConfig` fields, e.g.::

    trajectory:
      mode: level
      duration: 4000
    sensorLabel: nav
    damped: true
    algorithms: [inavfiter, typical2]
"""

import pathlib
from typing import Any

import pydantic
from ruamel import yaml
from ruamel.yaml.error import MarkedYAMLError, YAMLError

from .._conf import Settings
from ..dto import ExperimentConfig, SensorSpec
from ..exc import Location, ManifestSyntaxError, ManifestValidationError
from ..util.model import convert_errors, format_errors
from .exc import ConfigSyntaxError, ConfigValidationError

__all__ = (
    "load_mapping",
    "merge",
    "load_manifest",
    "load_sensor_spec",
    "load_settings",
)

SyntaxErrorType = type[ManifestSyntaxError] | type[ConfigSyntaxError]


def _location(path: pathlib.Path, ex: YAMLError | None = None) -> Location:
    loc = Location(filename=path)
    if isinstance(ex, MarkedYAMLError) and ex.problem_mark is not None:
        loc["line"] = ex.problem_mark.line + 1
        loc["col"] = ex.problem_mark.column + 1
    return loc


def load_mapping(
    path: pathlib.Path, error: SyntaxErrorType = ManifestSyntaxError
) -> dict[str, Any]:
    """
    Raises:
        ManifestSyntaxError: The file is not a YAML mapping (or ``error``).
    """
    loader = yaml.YAML(typ="safe")
    try:
        payload = loader.load(path.read_bytes())
    except YAMLError as ex:
        raise error(str(ex), ctx=error.Context(loc=_location(path, ex))) from ex
    except OSError as ex:
        raise error(str(ex), ctx=error.Context(loc=_location(path))) from ex

    if payload is None:
        return {}
    if not isinstance(payload, dict):
        raise error(
            "Expected a mapping at the top level, got %s" % type(payload).__name__,
            ctx=error.Context(loc=_location(path)),
        )
    return payload


def merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Recursively merge ``override`` into a copy of ``base``."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _validate(
    path: pathlib.Path, model: type[pydantic.BaseModel], payload: dict[str, Any]
) -> Any:
    try:
        return model.model_validate(payload)
    except pydantic.ValidationError as ex:
        raise ManifestValidationError(
            format_errors(convert_errors(ex)),
            ctx=ManifestValidationError.Context(loc=_location(path)),
        ) from ex


def load_manifest(path: pathlib.Path, base: dict[str, Any]) -> ExperimentConfig:
    """
    Build an experiment from ``base`` (camelCase keys derived from command-line
    flags) overridden by the manifest at ``path``.

    Raises:
        ManifestSyntaxError: The manifest is not a YAML mapping.
        ManifestValidationError: The merged configuration is invalid.
    """
    config = _validate(path, ExperimentConfig, merge(base, load_mapping(path)))
    assert isinstance(config, ExperimentConfig)
    return config


def load_sensor_spec(path: pathlib.Path, seed: int) -> SensorSpec:
    """A sensor error model from a YAML file; ``seed`` fills a missing seed."""
    payload = merge({"seed": seed}, load_mapping(path))
    spec = _validate(path, SensorSpec, payload)
    assert isinstance(spec, SensorSpec)
    return spec


def load_settings(path: pathlib.Path | None) -> Settings:
    """
    Harness settings from the YAML file at ``path`` and the environment.

    Raises:
        ConfigSyntaxError: The file is not a YAML mapping.
        ConfigValidationError: The settings are invalid.
    """
    payload = load_mapping(path, ConfigSyntaxError) if path is not None else {}
    try:
        return Settings(**payload)
    except pydantic.ValidationError as ex:
        raise ConfigValidationError(format_errors(convert_errors(ex))) from ex
