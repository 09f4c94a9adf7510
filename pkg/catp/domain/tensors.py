from typing import ClassVar, Tuple

from pydantic import model_validator

from catp.domain.base import TensorKind, TensorModel
from catp.exceptions import ShapeMismatchError


class AttnTensor(TensorModel):
    """Cross-attention probabilities laid out [layer][head][query][image]."""

    kind: ClassVar[TensorKind] = TensorKind.CROSS

    @property
    def layers(self) -> int:
        return int(self.data.shape[0])

    @property
    def heads(self) -> int:
        return int(self.data.shape[1])

    @property
    def n_query(self) -> int:
        return int(self.data.shape[2])

    @property
    def n_image(self) -> int:
        return int(self.data.shape[3])


class SelfAttnTensor(TensorModel):
    """Self-attention probabilities laid out [layer][head][sender][receiver]."""

    kind: ClassVar[TensorKind] = TensorKind.SELF

    @model_validator(mode="after")
    def square_token_axes(self) -> "SelfAttnTensor":
        senders, receivers = self.data.shape[2], self.data.shape[3]
        if senders != receivers:
            raise ShapeMismatchError(
                f"Self-attention needs matching sender/receiver axes, got {senders}x{receivers}"
            )
        return self

    @property
    def layers(self) -> int:
        return int(self.data.shape[0])

    @property
    def heads(self) -> int:
        return int(self.data.shape[1])

    @property
    def n_tokens(self) -> int:
        return int(self.data.shape[2])


class EmbeddingMatrix(TensorModel):
    """Per-token embedding vectors laid out [token][dim]."""

    kind: ClassVar[TensorKind] = TensorKind.EMBEDDING
    ndim: ClassVar[int] = 2
    non_negative: ClassVar[bool] = False

    @property
    def n_tokens(self) -> int:
        return int(self.data.shape[0])

    @property
    def dim(self) -> int:
        return int(self.data.shape[1])

    @property
    def dims(self) -> Tuple[int, int, int, int]:
        return (1, 1, self.n_tokens, self.dim)


TENSOR_TYPES = {
    TensorKind.CROSS: AttnTensor,
    TensorKind.SELF: SelfAttnTensor,
    TensorKind.EMBEDDING: EmbeddingMatrix,
}
