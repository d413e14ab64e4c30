# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

# pylint: disable=missing-module-docstring

import enum

import pydantic
from pydantic_core import core_schema

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"


class BaseModel(pydantic.BaseModel):
    """Overrides pydantic to strip strings and reject unknown fields."""

    model_config = pydantic.ConfigDict(
        str_strip_whitespace=True,
        extra="forbid",
        validate_default=True,
    )


class EnumByName(enum.Enum):
    """A custom Enum type for pydantic to validate by case-insensitive name.

    Members are serialized by name as well, so the JSON form of a model and its
    schema only ever show member names.
    """

    @classmethod
    def __get_pydantic_core_schema__(cls, source_type, handler):
        # pylint: disable=unused-argument
        return core_schema.no_info_plain_validator_function(
            cls._validate,
            serialization=core_schema.plain_serializer_function_ser_schema(
                lambda member: member.name
            ),
        )

    @classmethod
    def __get_pydantic_json_schema__(cls, schema, handler):
        # pylint: disable=unused-argument
        """Override pydantic using Enum.name for schema enum values"""
        return {"type": "string", "enum": list(cls.__members__.keys())}

    @classmethod
    def _validate(cls, value):
        """Validate enum reference, `value`.

        We check:
          1. If it is already a member of this Enum
          2. If we can find it by name, ignoring case.
        """
        if isinstance(value, enum.Enum) and value in cls:
            return value

        try:
            return cls[str(value).upper()]
        except KeyError as exc:
            name = cls.__name__
            expected = list(cls.__members__.keys())
            raise ValueError(
                f"{value} not found for enum {name}. Expected one of: {expected}"
            ) from exc
