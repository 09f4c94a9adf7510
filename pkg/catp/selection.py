"""
Keep/prune decisions from importance scores, and the proxy observables used
to compare them.
"""

import math
from fractions import Fraction
from typing import Iterable, Union

import numpy as np
from loguru import logger

from catp.domain.decision import PruneDecision
from catp.domain.scores import ImportanceVector
from catp.domain.tensors import EmbeddingMatrix
from catp.exceptions import (
    InvalidInputError,
    KOutOfRangeError,
    RatioOutOfRangeError,
    ShapeMismatchError,
)

Ratio = Union[float, Fraction]


def keep_count(n_query: int, p: Ratio) -> int:
    """
    Number of query tokens kept at prune ratio p: L0 - floor(L0 * p).

    Fractions are floored exactly; floats use the float product.
    """
    if n_query < 1:
        raise InvalidInputError(f"n_query must be >= 1, got {n_query}")
    if not 0 <= p <= 1:
        raise RatioOutOfRangeError(f"Prune ratio must be in [0, 1], got {p}")
    return n_query - math.floor(n_query * p)


def select_tokens(imp: ImportanceVector, k: int, ratio: Ratio | None = None) -> PruneDecision:
    """
    Keep the k highest-importance tokens; exact ties keep the lower index.

    Args:
        imp: Importance scores.
        k: Number of tokens to keep.
        ratio: Prune ratio recorded in the decision; defaults to 1 - k / L0.
    """
    n_query = imp.n_query
    if not 0 <= k <= n_query:
        raise KOutOfRangeError(f"k must be in [0, {n_query}], got {k}")
    # lexsort: last key is primary, so score descending then index ascending
    order = np.lexsort((np.arange(n_query), -imp.scores))
    kept = sorted(int(q) for q in order[:k])
    pruned = sorted(int(q) for q in order[k:])
    return PruneDecision(
        kept=kept,
        pruned=pruned,
        keep_count=k,
        ratio=float(ratio) if ratio is not None else 1.0 - k / n_query,
    )


def prune(imp: ImportanceVector, p: Ratio) -> PruneDecision:
    """keep_count followed by select_tokens."""
    k = keep_count(imp.n_query, p)
    decision = select_tokens(imp, k, ratio=p)
    logger.debug(f"Pruning {len(decision.pruned)} of {imp.n_query} query tokens at p={p}")
    return decision


def apply_decision(emb: EmbeddingMatrix, decision: PruneDecision) -> EmbeddingMatrix:
    """Drop the pruned query tokens' rows, keeping the rest in original order."""
    if emb.n_tokens != decision.n_query:
        raise ShapeMismatchError(
            f"Decision covers {decision.n_query} tokens, embeddings have {emb.n_tokens}"
        )
    if not decision.kept:
        raise InvalidInputError("Cannot build an embedding matrix with no kept tokens")
    return EmbeddingMatrix(data=emb.data[decision.kept])


def jaccard(a: Iterable[int], b: Iterable[int]) -> float:
    """|A & B| / |A | B|; two empty sets agree completely."""
    set_a, set_b = set(a), set(b)
    union = set_a | set_b
    if not union:
        return 1.0
    return len(set_a & set_b) / len(union)


def retained_mass(imp: ImportanceVector, kept: Iterable[int]) -> float:
    """Share of total importance that falls on the kept tokens."""
    kept_ids = sorted(set(kept))
    if imp.is_integer:
        total = int(imp.scores.sum())
        part = int(imp.scores[kept_ids].sum()) if kept_ids else 0
    else:
        total = math.fsum(imp.scores.tolist())
        part = math.fsum(imp.scores[kept_ids].tolist())
    if total == 0:
        return 1.0
    return min(part / total, 1.0)
