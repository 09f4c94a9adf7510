"""
Seeded toy generator for cross-attention, self-attention and embedding dumps.

Every (layer, head) block draws its projections from its own SplitMix64
substream, so blocks are independent of generation order. Math runs in
float64; the containers store float32.
"""

import math
from typing import Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from catp.domain.tensors import AttnTensor, EmbeddingMatrix, SelfAttnTensor
from catp.utils.prng import SplitMix64, derive_seed

# substream tags
EMBEDDING_STREAM = 0
CROSS_STREAM = 1
SELF_STREAM = 2


class ToyConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int = Field(7, ge=0, lt=2**64)
    layers: int = Field(6, ge=1)
    heads: int = Field(2, ge=1)
    n_query: int = Field(8, ge=1)
    n_image: int = Field(16, ge=1)
    dim: int = Field(8, ge=1)
    temperature: float = Field(1.0, gt=0, allow_inf_nan=False)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row softmax over the last axis with max subtraction."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def _attention_block(
    stream: SplitMix64,
    senders: np.ndarray,
    receivers: np.ndarray,
    dim: int,
    temperature: float,
) -> np.ndarray:
    # projections scaled so projected vectors keep unit variance
    w_query = stream.normal((dim, dim)) / math.sqrt(dim)
    w_key = stream.normal((dim, dim)) / math.sqrt(dim)
    logits = (senders @ w_query) @ (receivers @ w_key).T
    # shift before scaling: shifted logits are <= 0, so a tiny temperature
    # can only push them to -inf, never to inf - inf
    shifted = logits - logits.max(axis=-1, keepdims=True)
    with np.errstate(over="ignore"):
        scaled = shifted / (math.sqrt(dim) * temperature)
    return softmax(scaled)


def generate(cfg: ToyConfig) -> Tuple[AttnTensor, SelfAttnTensor, EmbeddingMatrix]:
    """
    Build one synthetic sample.

    Returns:
        (cross-attention [L][h][L0][L1], image self-attention [L][h][L1][L1],
        query embeddings [L0][dim])
    """
    base = SplitMix64(derive_seed(cfg.seed, EMBEDDING_STREAM))
    query_emb = base.normal((cfg.n_query, cfg.dim))
    image_emb = base.normal((cfg.n_image, cfg.dim))

    cross = np.empty((cfg.layers, cfg.heads, cfg.n_query, cfg.n_image))
    self_attn = np.empty((cfg.layers, cfg.heads, cfg.n_image, cfg.n_image))
    for layer in range(cfg.layers):
        for head in range(cfg.heads):
            cross[layer, head] = _attention_block(
                SplitMix64(derive_seed(cfg.seed, CROSS_STREAM, layer, head)),
                query_emb,
                image_emb,
                cfg.dim,
                cfg.temperature,
            )
            self_attn[layer, head] = _attention_block(
                SplitMix64(derive_seed(cfg.seed, SELF_STREAM, layer, head)),
                image_emb,
                image_emb,
                cfg.dim,
                cfg.temperature,
            )

    logger.debug(
        f"Generated toy sample seed={cfg.seed} dims=({cfg.layers},{cfg.heads},{cfg.n_query},{cfg.n_image})"
    )
    return (
        AttnTensor(data=cross),
        SelfAttnTensor(data=self_attn),
        EmbeddingMatrix(data=query_emb),
    )
