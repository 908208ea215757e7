import pathlib
from typing import Annotated

import annotated_types
from pydantic import Field
from pydantic.alias_generators import to_camel
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

from .dto.iteration import IterConfig

__all__ = ("Settings",)


class Settings(BaseSettings):
    """
    Harness settings, read from the ``-c/--config`` YAML file and from
    environment variables named after the camelCase keys (``MAXWORKERS``,
    ``ITERATION__TOL``), which take precedence.

    Attributes:
        max_workers: Algorithms running concurrently; 0 means no limit.
        progress_interval: Update intervals between two progress events.
    """

    model_config = SettingsConfigDict(
        alias_generator=to_camel,
        populate_by_name=True,
        extra="forbid",
        env_nested_delimiter="__",
    )

    output_dir: pathlib.Path = pathlib.Path("out")
    max_workers: Annotated[int, annotated_types.Ge(0)] = 0
    progress_interval: Annotated[int, annotated_types.Ge(1)] = 250
    iteration: IterConfig = Field(default_factory=IterConfig)

    @classmethod
    def settings_customise_sources(
        cls,
        _: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return env_settings, file_secret_settings, init_settings
