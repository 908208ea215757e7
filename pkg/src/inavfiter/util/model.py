from typing import Any

import pydantic
import pydantic_core

__all__ = ("convert_errors", "format_errors")


CUSTOM_TYPES = {
    "dict_type": "mapping_type",
    "model_attributes_type": "mapping_type",
    "model_type": "mapping_type",
    "list_type": "sequence_type",
    "tuple_type": "sequence_type",
    "literal_error": "enum_value_out_of_range",
    "unexpected_keyword_argument": "extra_field",
    "extra_forbidden": "extra_field",
}
CUSTOM_MESSAGES = {
    "extra_field": "Extra fields not allowed",
    "missing": "Field is required",
    "enum_value_out_of_range": (
        "Input must be set to one of the following values: {expected}"
    ),
    "mapping_type": "Input must be a valid mapping",
    "sequence_type": "Input must be a valid sequence",
    "too_short": (
        "Sequence must have at least {min_length} item after validation, not "
        "{actual_length}"
    ),
}


def convert_errors(
    ex: pydantic.ValidationError,
    custom_messages: dict[str, str] = CUSTOM_MESSAGES,
    custom_types: dict[str, str] = CUSTOM_TYPES,
) -> list[pydantic_core.ErrorDetails]:
    """
    Rewrite pydantic error details into user-facing messages: shared error
    types are merged, messages replaced and the internal context dropped.
    """
    new_errors: list[pydantic_core.ErrorDetails] = []

    for error in ex.errors(include_url=False):
        ctx: dict[str, Any] | None = error.get("ctx")

        # 'loc': ('sensors', 'gyroBias', 'function-after[...]') => drop the
        # validator frame
        error["loc"] = tuple(
            part
            for part in error["loc"]
            if not (isinstance(part, str) and part.startswith("function-"))
        )

        if custom_type := custom_types.get(error["type"]):
            error["type"] = custom_type

        if custom_message := custom_messages.get(error["type"]):
            try:
                error["msg"] = custom_message.format(**ctx) if ctx else custom_message
            except KeyError:
                pass

        if ctx:
            # we don't want to show the context to the user
            del error["ctx"]

        new_errors.append(error)

    return new_errors


def format_errors(errors: list[pydantic_core.ErrorDetails]) -> str:
    """One ``loc.path: message`` line per error."""
    lines = []
    for error in errors:
        where = ".".join(str(part) for part in error["loc"]) or "<root>"
        lines.append("%s: %s" % (where, error["msg"]))
    return "\n".join(lines)
