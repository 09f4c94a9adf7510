from enum import IntEnum
from typing import Any, ClassVar, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from catp.exceptions import InvalidInputError, NonFiniteValueError


class TensorKind(IntEnum):
    """Kind byte of a CATP-ATTN file header."""

    CROSS = 0
    SELF = 1
    EMBEDDING = 2


class TensorModel(BaseModel):
    """
    Immutable container around a float32 numpy array.

    Subclasses declare the kind they serialize as, the number of axes they
    hold and whether negative values are allowed. The array is copied on
    construction and marked read-only, so instances can be shared freely.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    kind: ClassVar[TensorKind]
    ndim: ClassVar[int] = 4
    non_negative: ClassVar[bool] = True

    data: np.ndarray

    @field_validator("data", mode="before")
    @classmethod
    def coerce_data(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=np.float32, order="C")
        if array.ndim != cls.ndim:
            raise InvalidInputError(
                f"{cls.__name__} needs {cls.ndim} axes, got {array.ndim}"
            )
        if any(size < 1 for size in array.shape):
            raise InvalidInputError(
                f"{cls.__name__} dimensions must all be >= 1, got {array.shape}"
            )
        if not np.isfinite(array).all():
            raise NonFiniteValueError(f"{cls.__name__} contains NaN or infinity")
        if cls.non_negative and (array < 0).any():
            raise InvalidInputError(f"{cls.__name__} contains negative values")
        array.flags.writeable = False
        return array

    @property
    def dims(self) -> Tuple[int, int, int, int]:
        """The four header dims of this tensor."""
        return tuple(int(size) for size in self.data.shape)  # type: ignore[return-value]

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        assert isinstance(other, TensorModel)
        return (
            self.data.shape == other.data.shape
            and self.data.tobytes() == other.data.tobytes()
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.data.shape, self.data.tobytes()))
