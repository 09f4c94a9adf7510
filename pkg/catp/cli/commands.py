"""
Command implementations behind the `catp` CLI.

Each command takes a pydantic input model and returns a report model; the
argument parser in catp.cli.main builds the inputs and prints the reports.
"""

from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator

from catp import attnio, baselines, selection, toymodel, voting
from catp.config import DEFAULT_TOLERANCE, FIXTURE_DIR, PROXY_NOTE, STRICT_VALIDATION
from catp.domain.base import TensorKind
from catp.domain.reports import (
    ComparisonReport,
    FixtureManifest,
    Report,
    ReportMetadata,
    ValidationReport,
)
from catp.domain.scores import ImageWeights, ImportanceVector, LayerSelection
from catp.domain.tensors import AttnTensor, EmbeddingMatrix, SelfAttnTensor
from catp.exceptions import (
    FileOperationError,
    InvalidInputError,
    ShapeMismatchError,
    WeightLengthMismatchError,
)
from catp.utils.version_utils import tool_version

MethodName = Literal["catp", "catp-weighted", "l2", "selfattn"]
RatioValue = Union[Fraction, float]

METHOD_KINDS: Dict[str, TensorKind] = {
    "catp": TensorKind.CROSS,
    "catp-weighted": TensorKind.CROSS,
    "l2": TensorKind.EMBEDDING,
    "selfattn": TensorKind.SELF,
}

FIXTURE_FILES = {
    "cross": "cross.attn",
    "self": "self.attn",
    "emb": "emb.attn",
}


def parse_ratio(value: Union[str, float, int, Fraction]) -> RatioValue:
    """Decimal or fraction strings parse exactly ("1/3", "0.5"); numbers pass through."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidInputError(f"Invalid ratio '{value}'")
    return float(value)


# ============================================================================
# Input models
# ============================================================================


class MethodSpec(BaseModel):
    """One scoring method with its layer selection, spelled METHOD[@LAYERS]."""

    name: MethodName
    layers: LayerSelection = Field(default_factory=LayerSelection.all)

    @classmethod
    def parse(cls, token: str) -> "MethodSpec":
        name, _, layers = token.strip().partition("@")
        if name not in METHOD_KINDS:
            raise InvalidInputError(
                f"Unknown method '{name}'; choose from {', '.join(METHOD_KINDS)}"
            )
        if layers and name == "l2":
            raise InvalidInputError("The l2 method takes no layer selection")
        return cls(
            name=name,  # type: ignore[arg-type]
            layers=LayerSelection.parse(layers) if layers else LayerSelection.all(),
        )

    @property
    def kind(self) -> TensorKind:
        return METHOD_KINDS[self.name]

    def label(self) -> str:
        if self.name == "l2":
            return self.name
        return f"{self.name}@{self.layers.describe()}"

    def layer_description(self) -> str:
        return "n/a" if self.name == "l2" else self.layers.describe()


class InputFiles(BaseModel):
    """Input dumps shared by the scoring commands."""

    cross: Optional[str] = None
    emb: Optional[str] = None
    self_attn: Optional[str] = None
    weights_input: Optional[str] = None
    strict: bool = STRICT_VALIDATION
    tolerance: float = Field(DEFAULT_TOLERANCE, gt=0)

    def _path_for(self, kind: TensorKind) -> str:
        path = {
            TensorKind.CROSS: self.cross,
            TensorKind.EMBEDDING: self.emb,
            TensorKind.SELF: self.self_attn,
        }[kind]
        if not path:
            raise InvalidInputError(f"No {kind.name.lower()} input file was given")
        return path

    def _read(self, path: str, kind: TensorKind):
        tensor = attnio.read_tensor(path, expect=kind)
        if self.strict and kind != TensorKind.EMBEDDING:
            attnio.check_normalization(tensor, self.tolerance)
        return tensor

    def cross_tensor(self) -> AttnTensor:
        return self._read(self._path_for(TensorKind.CROSS), TensorKind.CROSS)

    def embeddings(self) -> EmbeddingMatrix:
        return self._read(self._path_for(TensorKind.EMBEDDING), TensorKind.EMBEDDING)

    def self_attention(self) -> SelfAttnTensor:
        return self._read(self._path_for(TensorKind.SELF), TensorKind.SELF)

    def image_weights(self, n_image: int) -> ImageWeights:
        if not self.weights_input:
            raise InvalidInputError("Weighted voting needs --weights-input")
        sa = self._read(self.weights_input, TensorKind.SELF)
        if sa.n_tokens != n_image:
            raise WeightLengthMismatchError(
                f"Weights come from {sa.n_tokens} image tokens, cross-attention has {n_image}"
            )
        return voting.image_weights_from_self_attention(sa)

    def metadata(self, proxy: bool = False) -> ReportMetadata:
        named = {
            "cross": self.cross,
            "emb": self.emb,
            "self_attn": self.self_attn,
            "weights": self.weights_input,
        }
        return ReportMetadata(
            inputs={name: path for name, path in named.items() if path},
            tool_version=tool_version(),
            proxy=PROXY_NOTE if proxy else None,
        )


class ImportanceInput(BaseModel):
    input: str
    method: Literal["catp", "l2", "selfattn"] = "catp"
    layers: str = "all"
    weighted: bool = False
    weights_input: Optional[str] = None
    strict: bool = STRICT_VALIDATION
    tolerance: float = Field(DEFAULT_TOLERANCE, gt=0)

    def method_spec(self) -> MethodSpec:
        if self.weighted and self.method != "catp":
            raise InvalidInputError("Weighted voting only applies to the catp method")
        name = "catp-weighted" if self.weighted else self.method
        if self.method == "l2":
            if self.layers != "all":
                logger.warning("Ignoring --layers for the l2 method")
            return MethodSpec(name="l2")
        return MethodSpec(name=name, layers=LayerSelection.parse(self.layers))  # type: ignore[arg-type]

    def input_files(self, spec: MethodSpec) -> InputFiles:
        slot = {
            TensorKind.CROSS: "cross",
            TensorKind.EMBEDDING: "emb",
            TensorKind.SELF: "self_attn",
        }[spec.kind]
        return InputFiles(
            **{slot: self.input},
            weights_input=self.weights_input,
            strict=self.strict,
            tolerance=self.tolerance,
        )


class PruneInput(ImportanceInput):
    ratio: RatioValue
    emit_pruned: Optional[str] = None
    emb: Optional[str] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @field_validator("ratio", mode="before")
    @classmethod
    def exact_ratio(cls, value):
        return parse_ratio(value)


class CompareInput(InputFiles):
    methods: List[str] = Field(..., min_length=1)
    ratios: List[RatioValue] = Field(..., min_length=1)

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @field_validator("ratios", mode="before")
    @classmethod
    def exact_ratios(cls, values):
        return [parse_ratio(value) for value in values]


class SweepInput(BaseModel):
    input: str
    ratios: List[RatioValue] = Field(..., min_length=1)
    weighted: bool = False
    weights_input: Optional[str] = None
    strict: bool = STRICT_VALIDATION
    tolerance: float = Field(DEFAULT_TOLERANCE, gt=0)

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @field_validator("ratios", mode="before")
    @classmethod
    def exact_ratios(cls, values):
        return [parse_ratio(value) for value in values]


class ValidateInput(BaseModel):
    input: str
    tolerance: float = Field(DEFAULT_TOLERANCE, gt=0)


class GenFixtureInput(BaseModel):
    toy: toymodel.ToyConfig = Field(default_factory=toymodel.ToyConfig)
    out_dir: str = FIXTURE_DIR


# ============================================================================
# Scoring helpers
# ============================================================================


def compute_importance(spec: MethodSpec, files: InputFiles) -> ImportanceVector:
    """Importance vector for one method over the given inputs."""
    if spec.name == "l2":
        return baselines.l2_importance(files.embeddings())
    if spec.name == "selfattn":
        return baselines.selfattn_importance(files.self_attention(), spec.layers)
    prob = files.cross_tensor()
    weights = files.image_weights(prob.n_image) if spec.name == "catp-weighted" else None
    return voting.importance(prob, spec.layers, weights)


def _agreement(
    kept_sets: List[List[int]],
) -> List[List[float]]:
    return [[selection.jaccard(a, b) for b in kept_sets] for a in kept_sets]


def _common_length(labels: List[str], vectors: List[ImportanceVector]) -> int:
    lengths = {label: vector.n_query for label, vector in zip(labels, vectors)}
    if len(set(lengths.values())) != 1:
        raise ShapeMismatchError(f"Methods score different token counts: {lengths}")
    return vectors[0].n_query


# ============================================================================
# Commands
# ============================================================================


def cmd_gen_fixture(input_data: GenFixtureInput) -> FixtureManifest:
    """Generate cross.attn, self.attn and emb.attn from the toy model."""
    out_dir = Path(input_data.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise FileOperationError(f"Cannot create {out_dir}: {e}") from e

    cross, self_attn, emb = toymodel.generate(input_data.toy)
    paths: Dict[str, str] = {}
    for name, tensor in (("cross", cross), ("self", self_attn), ("emb", emb)):
        path = out_dir / FIXTURE_FILES[name]
        attnio.write_tensor(tensor, path)
        paths[name] = str(path)

    logger.info(f"Wrote toy fixture (seed {input_data.toy.seed}) to {out_dir}")
    return FixtureManifest(
        toy_config=input_data.toy.model_dump(),
        paths=paths,
        metadata=ReportMetadata(seed=input_data.toy.seed, tool_version=tool_version()),
    )


def cmd_importance(input_data: ImportanceInput) -> Report:
    """Importance scores only; kept and pruned stay empty."""
    spec = input_data.method_spec()
    files = input_data.input_files(spec)
    imp = compute_importance(spec, files)
    logger.info(f"Computed {spec.label()} importance for {imp.n_query} query tokens")
    return Report(
        type="importance",
        method=spec.name,
        layer_selection=spec.layer_description(),
        importance=imp.to_list(),
        metadata=files.metadata(),
    )


def cmd_prune(input_data: PruneInput) -> Report:
    """Importance plus the keep/prune decision at the requested ratio."""
    spec = input_data.method_spec()
    files = input_data.input_files(spec)
    imp = compute_importance(spec, files)
    decision = selection.prune(imp, input_data.ratio)

    if input_data.emit_pruned:
        emb_path = input_data.emb or (input_data.input if spec.name == "l2" else None)
        if not emb_path:
            raise InvalidInputError("--emit-pruned needs the query embeddings (--emb)")
        emb = attnio.read_tensor(emb_path, expect=TensorKind.EMBEDDING)
        attnio.write_tensor(selection.apply_decision(emb, decision), input_data.emit_pruned)
        files.emb = emb_path
        logger.info(f"Wrote {decision.keep_count} kept embeddings to {input_data.emit_pruned}")

    return Report(
        type="prune",
        method=spec.name,
        layer_selection=spec.layer_description(),
        ratio=float(input_data.ratio),
        keep_count=decision.keep_count,
        importance=imp.to_list(),
        kept=decision.kept,
        pruned=decision.pruned,
        metadata=files.metadata(),
    )


def cmd_compare(input_data: CompareInput) -> List[ComparisonReport]:
    """Kept-set agreement between methods, one report per ratio; each mass uses its own scores."""
    specs = [MethodSpec.parse(token) for token in input_data.methods]
    labels = [spec.label() for spec in specs]
    vectors = [compute_importance(spec, input_data) for spec in specs]
    n_query = _common_length(labels, vectors)

    reports: List[ComparisonReport] = []
    for ratio in input_data.ratios:
        k = selection.keep_count(n_query, ratio)
        kept_sets = [selection.select_tokens(imp, k).kept for imp in vectors]
        reports.append(
            ComparisonReport(
                type="comparison",
                ratio=float(ratio),
                keep_count=k,
                methods=labels,
                kept_sets=kept_sets,
                jaccard=_agreement(kept_sets),
                retained_mass=[
                    selection.retained_mass(imp, kept) for imp, kept in zip(vectors, kept_sets)
                ],
                mass_reference="own",
                metadata=input_data.metadata(proxy=True),
            )
        )
    return reports


def cmd_sweep(input_data: SweepInput) -> List[ComparisonReport]:
    """
    Vote with each single layer in turn, then with all layers, at every ratio.

    Retained mass is measured against the all-layers importance, so the
    all-layers entry is the reference every single layer is judged by.
    """
    files = InputFiles(
        cross=input_data.input,
        weights_input=input_data.weights_input,
        strict=input_data.strict,
        tolerance=input_data.tolerance,
    )
    prob = files.cross_tensor()
    weights = files.image_weights(prob.n_image) if input_data.weighted else None

    selections = [LayerSelection.single(layer) for layer in range(prob.layers)]
    selections.append(LayerSelection.all())
    vectors = [voting.importance(prob, sel, weights) for sel in selections]
    reference = vectors[-1]

    method = "catp-weighted" if weights is not None else "catp"
    reports: List[ComparisonReport] = []
    for ratio in input_data.ratios:
        k = selection.keep_count(prob.n_query, ratio)
        kept_sets = [selection.select_tokens(imp, k).kept for imp in vectors]
        logger.info(f"Swept {prob.layers} layers at keep_count {k}")
        reports.append(
            ComparisonReport(
                type="sweep",
                ratio=float(ratio),
                keep_count=k,
                methods=[f"{method}@{sel.describe()}" for sel in selections],
                kept_sets=kept_sets,
                jaccard=_agreement(kept_sets),
                retained_mass=[selection.retained_mass(reference, kept) for kept in kept_sets],
                mass_reference="all",
                metadata=files.metadata(proxy=True),
            )
        )
    return reports


def cmd_validate(input_data: ValidateInput) -> ValidationReport:
    """Rows that do not sum to 1; embeddings have no normalized axis."""
    tensor = attnio.read_tensor(input_data.input)
    violations: List[Tuple[int, int, int]] = []
    if isinstance(tensor, (AttnTensor, SelfAttnTensor)):
        violations = attnio.validate_normalization(tensor, input_data.tolerance)
    if violations:
        logger.warning(f"{len(violations)} row(s) in {input_data.input} are not normalized")
    return ValidationReport(
        tolerance=input_data.tolerance,
        violation_count=len(violations),
        violations=violations,
        metadata=ReportMetadata(
            inputs={"input": input_data.input}, tool_version=tool_version()
        ),
    )
