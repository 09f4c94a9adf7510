from .base import TensorKind, TensorModel
from .decision import PruneDecision
from .scores import ImageWeights, ImportanceVector, LayerSelection, VotePoints
from .tensors import AttnTensor, EmbeddingMatrix, SelfAttnTensor

__all__ = [
    "TensorKind",
    "TensorModel",
    "AttnTensor",
    "SelfAttnTensor",
    "EmbeddingMatrix",
    "ImportanceVector",
    "VotePoints",
    "ImageWeights",
    "LayerSelection",
    "PruneDecision",
]
