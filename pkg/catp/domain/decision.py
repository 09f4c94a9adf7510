from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator

from catp.exceptions import InvalidInputError


class PruneDecision(BaseModel):
    """Kept and pruned query-token ids, plus the ratio that produced them."""

    model_config = ConfigDict(frozen=True)

    kept: List[int] = Field(..., description="Kept token ids, ascending")
    pruned: List[int] = Field(..., description="Pruned token ids, ascending")
    keep_count: int = Field(..., ge=0)
    ratio: float = Field(..., ge=0, le=1, description="Prune ratio p")

    @model_validator(mode="after")
    def check_partition(self) -> "PruneDecision":
        if self.kept != sorted(self.kept) or self.pruned != sorted(self.pruned):
            raise InvalidInputError("Kept and pruned ids must be ascending")
        n_query = len(self.kept) + len(self.pruned)
        if sorted(self.kept + self.pruned) != list(range(n_query)):
            raise InvalidInputError("Kept and pruned ids must partition 0..L0-1")
        if len(self.kept) != self.keep_count:
            raise InvalidInputError(
                f"keep_count {self.keep_count} disagrees with {len(self.kept)} kept ids"
            )
        return self

    @property
    def n_query(self) -> int:
        return len(self.kept) + len(self.pruned)
