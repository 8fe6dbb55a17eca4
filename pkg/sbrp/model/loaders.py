"""
Base loader class and instance format management.

All loaders are subclasses of InstanceLoader and implement load().  Known formats are
represented by the InstanceFormats enum.
"""

import pathlib
from abc import ABC, abstractmethod
from enum import Enum

from .instance import Instance

class InstanceFormats(Enum):
    NATIVE_JSON = "native-json"
    BPS_CSV = "bps-csv"
    EUCLIDEAN_SCHITTEKAT = "euclidean-schittekat"

    @staticmethod
    def is_known(val):
        if isinstance(val, InstanceFormats):
            return True
        if isinstance(val, str):
            return val in InstanceFormats.__members__ or val in (f.value for f in InstanceFormats)
        return False

    @staticmethod
    def normalize(val) -> "InstanceFormats":
        if isinstance(val, InstanceFormats):
            return val
        if val in InstanceFormats.__members__:
            return InstanceFormats[val]
        return InstanceFormats(val)

    @staticmethod
    def infer(path) -> "InstanceFormats":
        """Guess the format from the file suffix."""
        suffix = pathlib.Path(path).suffix.lower()
        if suffix == ".json":
            return InstanceFormats.NATIVE_JSON
        if suffix == ".csv":
            return InstanceFormats.BPS_CSV
        return InstanceFormats.EUCLIDEAN_SCHITTEKAT

class InstanceLoader(ABC):
    required_attributes = ["format_name"]

    def __init__(self, **options) -> None:
        self.options = options

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)

        for attr in cls.required_attributes:
            if not hasattr(cls, attr):
                raise TypeError(f"{cls.__name__} must define '{attr}'")

    @abstractmethod
    def load(self, path) -> Instance:
        """
        Parse and validate the file at path.
        Raises InstanceParseError or InstanceValidationError on failure.
        """
        pass

    def __repr__(self) -> str:
        return f"[{type(self).__name__}]({self.format_name})" # type: ignore
