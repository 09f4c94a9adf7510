"""
Rank-based voting over cross-attention probabilities.

Every (layer, head, image token) column is one ballot: the query token with
the n-th largest probability gets L0 - n points (n = 1 for the largest), ties
going to the lower token index. A query token's importance is the sum of its
points over the selected layers, heads and image tokens, optionally scaled
per image token by ImageWeights.
"""

from typing import Optional

import numpy as np
from loguru import logger

from catp.attnio import slice_layers
from catp.domain.scores import ImageWeights, ImportanceVector, LayerSelection, VotePoints
from catp.domain.tensors import AttnTensor, SelfAttnTensor
from catp.exceptions import (
    EmptyColumnError,
    NegativeScoreError,
    NonFiniteValueError,
    WeightLengthMismatchError,
)


def _descending_points(values: np.ndarray, axis: int) -> np.ndarray:
    """Points along `axis`: L0-1 for the largest value down to 0, stable on ties."""
    n = values.shape[axis]
    # stable ascending sort of the negated values = descending with lower index first
    order = np.argsort(-values, axis=axis, kind="stable")
    shape = [1] * values.ndim
    shape[axis] = n
    ladder = np.arange(n - 1, -1, -1, dtype=np.int64).reshape(shape)
    points = np.empty(values.shape, dtype=np.int64)
    np.put_along_axis(points, order, np.broadcast_to(ladder, values.shape), axis=axis)
    return points


def rank_points(column) -> VotePoints:
    """
    Points one image token gives the query tokens of a single column.

    Example:
        >>> rank_points([0.3, 0.3, 0.1]).to_list()
        [2, 1, 0]
    """
    values = np.asarray(column, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise EmptyColumnError("A vote column needs at least one query token")
    if not np.isfinite(values).all():
        raise NonFiniteValueError("Vote column contains NaN or infinity")
    return VotePoints(points=_descending_points(values, axis=0))


def vote_points(prob: AttnTensor) -> np.ndarray:
    """Points for every column at once, shaped like prob.data [L][h][L0][L1]."""
    return _descending_points(prob.data, axis=2)


def importance(
    prob: AttnTensor,
    sel: Optional[LayerSelection] = None,
    weights: Optional[ImageWeights] = None,
) -> ImportanceVector:
    """
    Accumulate vote points into per-query-token importance.

    Unweighted scores are exact int64 sums. Weighted scores first reduce
    points over layers and heads in integers, then add weight[j] * points
    image token by image token in ascending j, so the float result does not
    depend on how the reduction is scheduled.
    """
    sel = sel or LayerSelection.all()
    used = slice_layers(prob, sel)
    if weights is not None and weights.n_image != prob.n_image:
        raise WeightLengthMismatchError(
            f"{weights.n_image} image weights for {prob.n_image} image tokens"
        )

    per_image = vote_points(used).sum(axis=(0, 1))  # [L0][L1], int64
    if weights is None:
        scores = per_image.sum(axis=1)
    else:
        scores = np.zeros(prob.n_query, dtype=np.float64)
        for image_id in range(prob.n_image):
            scores += weights.weights[image_id] * per_image[:, image_id]

    logger.debug(
        f"Voted over layers {sel.describe()} ({used.layers}x{used.heads} maps, "
        f"{prob.n_query} queries, {prob.n_image} images, weighted={weights is not None})"
    )
    return ImportanceVector(scores=scores)


def received_attention(data: np.ndarray) -> np.ndarray:
    """
    Attention each token receives, summed over senders, per [layer][head].

    Each column is sorted before summing, so the result for a token does not
    depend on the order of the senders.
    """
    ordered = np.sort(data.astype(np.float64), axis=-2)
    return ordered.sum(axis=-2)


def image_weights_from_self_attention(sa: SelfAttnTensor) -> ImageWeights:
    """
    Image-token voting weights from the last self-attention layer.

    A token's raw score is the attention it receives, summed over heads and
    senders; weights are raw scores divided by their total.
    """
    raw = received_attention(sa.data[-1]).sum(axis=0)
    if (raw < 0).any():
        raise NegativeScoreError("Self-attention scores must be >= 0")
    return ImageWeights.from_raw(raw)
