"""Base functionality for all Pydantic data models used in mfcz"""

from enum import Enum
import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from mfcz.exceptions import MFCZInvalidFile
from mfcz.utils.files import load_data


logger = logging.getLogger(__name__)


def _encode_numpy(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value.item()


class MFCZBaseModel(BaseModel):
    """Base data model for all mfcz data models"""

    class Config:
        title = "MFCZBaseModel"
        anystr_strip_whitespace = True
        validate_assignment = True
        validate_all = True
        extra = "forbid"
        use_enum_values = False
        arbitrary_types_allowed = True
        allow_population_by_field_name = True
        json_encoders = {
            Enum: lambda x: x.value,
            Path: str,
            np.ndarray: _encode_numpy,
            np.floating: _encode_numpy,
            np.integer: _encode_numpy,
            np.bool_: _encode_numpy,
            pd.DataFrame: lambda x: x.to_dict(orient="records"),
        }

    @classmethod
    def load(cls, filename):
        """Load a data model from a .json or .json5 file."""
        filename = Path(filename)
        if not filename.is_file():
            raise MFCZInvalidFile(f"{filename} is not a file")

        try:
            return cls(**load_data(filename))
        except ValidationError:
            logger.exception("Failed to validate %s", filename)
            raise

    def dict(self, *args, by_alias=True, **kwargs):
        return super().dict(*args, by_alias=by_alias, **self._handle_kwargs(**kwargs))

    def json(self, *args, by_alias=True, **kwargs):
        return super().json(*args, by_alias=by_alias, **self._handle_kwargs(**kwargs))

    @staticmethod
    def _handle_kwargs(**kwargs):
        return {k: v for k, v in kwargs.items() if k not in ("by_alias",)}

    def serialize(self, *args, **kwargs):
        """Return a JSON-compatible dict."""
        return json.loads(self.json(*args, **kwargs))



class EnumValue:
    """Class to define a MFCZEnum value"""

    def __init__(self, value, description, **kwargs):
        self.value = value
        self.description = description
        for kwarg, val in kwargs.items():
            self.__setattr__(kwarg, val)


class MFCZEnum(Enum):
    """mfcz Enum class

    Members are declared as ``value, description`` pairs or as an EnumValue whose extra
    keyword arguments become member attributes.
    """

    def __new__(cls, *args):
        obj = object.__new__(cls)
        if not 1 <= len(args) <= 2:
            raise ValueError(f"{cls.__name__} members take a value and a description")
        if isinstance(args[0], EnumValue):
            obj._value_ = args[0].value
            obj.description = args[0].description
            for attr, val in args[0].__dict__.items():
                if attr not in ("value", "description"):
                    setattr(obj, attr, val)
        else:
            obj._value_ = args[0]
            obj.description = args[1] if len(args) == 2 else None
        return obj

    @classmethod
    def values(cls):
        return [x.value for x in cls]
