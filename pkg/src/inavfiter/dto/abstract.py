from pydantic import BaseModel, ConfigDict
from pydantic.alias_generators import to_camel


class AbstractDTO(BaseModel):
    """
    Base of every configuration object: camelCase keys in files and
    environment variables, snake_case attributes in code, immutable once
    validated.
    """

    model_config = ConfigDict(
        alias_generator=to_camel,
        populate_by_name=True,
        extra="forbid",
        frozen=True,
    )
