from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from catp.config import REPORT_SCHEMA
from catp.exceptions import InvalidInputError

Number = Union[int, float]


class ReportMetadata(BaseModel):
    inputs: Dict[str, str] = Field(default_factory=dict, description="Input name to path")
    seed: Optional[int] = None
    tool_version: str
    proxy: Optional[str] = Field(
        None, description="Set when the report carries proxy observables"
    )


class Report(BaseModel):
    """Importance (and optionally a prune decision) for one method."""

    schema_: str = Field(REPORT_SCHEMA, alias="schema")
    type: Literal["importance", "prune"]
    method: str
    layer_selection: str
    ratio: Optional[float] = None
    keep_count: Optional[int] = None
    importance: List[Number]
    kept: List[int] = Field(default_factory=list)
    pruned: List[int] = Field(default_factory=list)
    metadata: ReportMetadata

    model_config = ConfigDict(populate_by_name=True)

    @model_validator(mode="after")
    def check_decision(self) -> "Report":
        if self.type == "importance":
            if self.kept or self.pruned or self.ratio is not None:
                raise InvalidInputError("Importance reports carry no prune decision")
            return self
        n_query = len(self.importance)
        if sorted(self.kept + self.pruned) != list(range(n_query)):
            raise InvalidInputError("Kept and pruned ids must partition the query tokens")
        if self.keep_count != len(self.kept):
            raise InvalidInputError("keep_count disagrees with the kept ids")
        return self


class ComparisonReport(BaseModel):
    """Kept-set agreement between methods (or layers) at one prune ratio."""

    schema_: str = Field(REPORT_SCHEMA, alias="schema")
    type: Literal["comparison", "sweep"]
    ratio: float
    keep_count: int
    methods: List[str]
    kept_sets: List[List[int]]
    jaccard: List[List[float]]
    retained_mass: List[float]
    mass_reference: Literal["own", "all"] = "own"
    metadata: ReportMetadata

    model_config = ConfigDict(populate_by_name=True)

    @model_validator(mode="after")
    def check_matrix(self) -> "ComparisonReport":
        n = len(self.methods)
        if len(self.kept_sets) != n or len(self.retained_mass) != n:
            raise InvalidInputError("One kept set and one retained mass per method")
        if len(self.jaccard) != n or any(len(row) != n for row in self.jaccard):
            raise InvalidInputError("Jaccard matrix must be square over the methods")
        for i in range(n):
            if self.jaccard[i][i] != 1.0:
                raise InvalidInputError("Jaccard diagonal must be 1")
            for j in range(n):
                if self.jaccard[i][j] != self.jaccard[j][i] or not 0 <= self.jaccard[i][j] <= 1:
                    raise InvalidInputError("Jaccard matrix must be symmetric within [0, 1]")
        if any(not 0 <= mass <= 1 for mass in self.retained_mass):
            raise InvalidInputError("Retained mass must lie in [0, 1]")
        return self


class ValidationReport(BaseModel):
    schema_: str = Field(REPORT_SCHEMA, alias="schema")
    type: Literal["validation"] = "validation"
    tolerance: float
    violation_count: int
    violations: List[Tuple[int, int, int]]
    metadata: ReportMetadata

    model_config = ConfigDict(populate_by_name=True)


class FixtureManifest(BaseModel):
    schema_: str = Field(REPORT_SCHEMA, alias="schema")
    type: Literal["fixture"] = "fixture"
    toy_config: Dict[str, Any]
    paths: Dict[str, str]
    metadata: ReportMetadata

    model_config = ConfigDict(populate_by_name=True)


AnyReport = Union[Report, ComparisonReport, ValidationReport, FixtureManifest]

REPORT_TYPES = {
    "importance": Report,
    "prune": Report,
    "comparison": ComparisonReport,
    "sweep": ComparisonReport,
    "validation": ValidationReport,
    "fixture": FixtureManifest,
}
