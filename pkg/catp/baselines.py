"""
Comparison importance rules: embedding L2 norm and cumulative self-attention
received (the token-importance rule of cascade token pruning, applied once).
"""

from typing import Optional

import numpy as np
from loguru import logger

from catp.attnio import slice_layers
from catp.domain.scores import ImportanceVector, LayerSelection
from catp.domain.tensors import EmbeddingMatrix, SelfAttnTensor
from catp.voting import received_attention


def l2_importance(emb: EmbeddingMatrix) -> ImportanceVector:
    """Euclidean norm of each token's embedding row."""
    norms = np.sqrt(np.square(emb.data.astype(np.float64)).sum(axis=1))
    return ImportanceVector(scores=norms)


def selfattn_importance(
    sa: SelfAttnTensor, sel: Optional[LayerSelection] = None
) -> ImportanceVector:
    """Attention each token receives, summed over selected layers, heads and senders."""
    sel = sel or LayerSelection.all()
    used = slice_layers(sa, sel)
    scores = received_attention(used.data).sum(axis=(0, 1))
    logger.debug(f"Self-attention importance over layers {sel.describe()} for {sa.n_tokens} tokens")
    return ImportanceVector(scores=scores)
