from typing import Any, List, Literal, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from catp.config import WEIGHT_SUM_TOLERANCE
from catp.exceptions import (
    InvalidInputError,
    LayerOutOfRangeError,
    NegativeScoreError,
    NonFiniteValueError,
    ZeroMassWeightsError,
)


def _frozen_vector(value: Any, dtype: Any, name: str) -> np.ndarray:
    array = np.array(value, dtype=dtype)
    if array.ndim != 1 or array.size < 1:
        raise InvalidInputError(f"{name} must be a non-empty vector, got shape {array.shape}")
    if not np.isfinite(array).all():
        raise NonFiniteValueError(f"{name} contains NaN or infinity")
    array.flags.writeable = False
    return array


class ImportanceVector(BaseModel):
    """
    Per-query-token importance scores.

    Unweighted voting keeps integer scores (int64); weighted voting and the
    baselines produce float64 scores.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    scores: np.ndarray

    @field_validator("scores", mode="before")
    @classmethod
    def coerce_scores(cls, value: Any) -> np.ndarray:
        raw = np.asarray(value)
        dtype = np.int64 if np.issubdtype(raw.dtype, np.integer) else np.float64
        array = _frozen_vector(raw, dtype, "Importance scores")
        if (array < 0).any():
            raise NegativeScoreError("Importance scores must be >= 0")
        return array

    @property
    def n_query(self) -> int:
        return int(self.scores.size)

    @property
    def is_integer(self) -> bool:
        return bool(np.issubdtype(self.scores.dtype, np.integer))

    def to_list(self) -> List[Any]:
        """Plain Python numbers, ints for unweighted votes and floats otherwise."""
        return self.scores.tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImportanceVector):
            return NotImplemented
        return self.scores.dtype == other.scores.dtype and np.array_equal(
            self.scores, other.scores
        )

    def __hash__(self) -> int:
        return hash(self.scores.tobytes())


class VotePoints(BaseModel):
    """Points one image token hands out to the query tokens of one column."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray

    @field_validator("points", mode="before")
    @classmethod
    def must_be_permutation(cls, value: Any) -> np.ndarray:
        array = _frozen_vector(value, np.int64, "Vote points")
        if not np.array_equal(np.sort(array), np.arange(array.size)):
            raise InvalidInputError("Vote points must be a permutation of 0..L0-1")
        return array

    def to_list(self) -> List[int]:
        return self.points.tolist()


class ImageWeights(BaseModel):
    """Normalized voting weights, one per image token."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    weights: np.ndarray

    @field_validator("weights", mode="before")
    @classmethod
    def must_be_distribution(cls, value: Any) -> np.ndarray:
        array = _frozen_vector(value, np.float64, "Image weights")
        if (array < 0).any():
            raise NegativeScoreError("Image weights must be >= 0")
        total = float(array.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise InvalidInputError(f"Image weights must sum to 1, got {total!r}")
        return array

    @classmethod
    def from_raw(cls, raw: Sequence[float] | np.ndarray) -> "ImageWeights":
        """Normalize non-negative raw scores by their sum."""
        array = np.asarray(raw, dtype=np.float64)
        if (array < 0).any():
            raise NegativeScoreError("Raw image-token scores must be >= 0")
        total = array.sum()
        if total <= 0:
            raise ZeroMassWeightsError("Every image token has zero score; cannot normalize")
        return cls(weights=array / total)

    @classmethod
    def uniform(cls, n_image: int) -> "ImageWeights":
        return cls(weights=np.full(n_image, 1.0 / n_image))

    @property
    def n_image(self) -> int:
        return int(self.weights.size)


class LayerSelection(BaseModel):
    """Which layers feed a vote or a baseline: all, first, single:k or subset:a,b,..."""

    model_config = ConfigDict(frozen=True)

    variant: Literal["all", "first", "single", "subset"] = "all"
    indices: Tuple[int, ...] = ()

    @model_validator(mode="after")
    def check_indices(self) -> "LayerSelection":
        if self.variant in ("all", "first") and self.indices:
            raise InvalidInputError(f"Layer selection '{self.variant}' takes no indices")
        if self.variant == "single" and len(self.indices) != 1:
            raise InvalidInputError("Layer selection 'single' takes exactly one index")
        if self.variant == "subset" and not self.indices:
            raise InvalidInputError("Layer selection 'subset' needs at least one index")
        if any(index < 0 for index in self.indices):
            raise LayerOutOfRangeError(f"Layer indices must be >= 0, got {list(self.indices)}")
        if list(self.indices) != sorted(set(self.indices)):
            raise InvalidInputError(
                f"Layer indices must be unique and ascending, got {list(self.indices)}"
            )
        return self

    @classmethod
    def all(cls) -> "LayerSelection":
        return cls(variant="all")

    @classmethod
    def first(cls) -> "LayerSelection":
        return cls(variant="first")

    @classmethod
    def single(cls, index: int) -> "LayerSelection":
        return cls(variant="single", indices=(index,))

    @classmethod
    def subset(cls, indices: Sequence[int]) -> "LayerSelection":
        return cls(variant="subset", indices=tuple(indices))

    @classmethod
    def parse(cls, text: str) -> "LayerSelection":
        """
        Parse the CLI spelling of a layer selection.

        Example:
            >>> LayerSelection.parse("subset:0,5").resolve(6)
            [0, 5]
        """
        name, _, rest = text.strip().lower().partition(":")
        try:
            if name in ("all", "first") and not rest:
                return cls(variant=name)  # type: ignore[arg-type]
            if name == "single":
                return cls.single(int(rest))
            if name == "subset":
                return cls.subset([int(part) for part in rest.split(",")])
        except ValueError:
            pass
        raise InvalidInputError(
            f"Invalid layer selection '{text}'; use all, first, single:K or subset:A,B,..."
        )

    def resolve(self, n_layers: int) -> List[int]:
        """Layer indices this selection picks out of a tensor with n_layers layers."""
        if self.variant == "all":
            return list(range(n_layers))
        if self.variant == "first":
            return [0]
        out_of_range = [index for index in self.indices if index >= n_layers]
        if out_of_range:
            raise LayerOutOfRangeError(
                f"Layer(s) {out_of_range} out of range for a {n_layers}-layer tensor"
            )
        return list(self.indices)

    def describe(self) -> str:
        if self.variant == "single":
            return f"single:{self.indices[0]}"
        if self.variant == "subset":
            return "subset:" + ",".join(str(index) for index in self.indices)
        return self.variant
