"""
Unit tests for keep counts, token selection, decision application and the
proxy observables.
"""

from fractions import Fraction

import numpy as np
import pytest

from catp import selection
from catp.domain.decision import PruneDecision
from catp.domain.scores import ImportanceVector
from catp.domain.tensors import EmbeddingMatrix
from catp.exceptions import (
    InvalidInputError,
    KOutOfRangeError,
    RatioOutOfRangeError,
    ShapeMismatchError,
)


def oracle_kept(scores, k):
    order = sorted(range(len(scores)), key=lambda q: (-scores[q], q))
    return sorted(order[:k])


# ============================================================================
# TEST SUITE 1: Keep count
# ============================================================================


class TestKeepCount:
    """Test suite for L0 - floor(L0 * p)."""

    @pytest.mark.parametrize(
        "n_query, p, expected",
        [
            (8, 0.5, 4),
            (8, 0.75, 2),
            (8, 0.875, 1),
            (3, 1 / 3, 2),
            (3, Fraction(1, 3), 2),
            (5, 0, 5),
            (5, 1, 0),
            (7, Fraction(1, 2), 4),
        ],
    )
    def test_values(self, n_query, p, expected):
        """Test keep_count on a table of token counts and ratios."""
        assert selection.keep_count(n_query, p) == expected

    def test_ratio_out_of_range(self):
        """Test that ratios outside [0, 1] are rejected."""
        with pytest.raises(RatioOutOfRangeError):
            selection.keep_count(8, 1.5)
        with pytest.raises(RatioOutOfRangeError):
            selection.keep_count(8, -0.1)

    def test_keeps_at_least_one_below_full_ratio(self):
        """Test that any ratio below 1 keeps at least one token."""
        for n_query in range(1, 40):
            for p in np.linspace(0, 0.999, 25):
                assert selection.keep_count(n_query, float(p)) >= 1


# ============================================================================
# TEST SUITE 2: Token selection
# ============================================================================


class TestSelectTokens:
    """Test suite for deterministic top-k selection."""

    def test_worked_example(self):
        """Test selecting two of the worked example's three tokens."""
        decision = selection.select_tokens(ImportanceVector(scores=[2, 4, 3]), 2)
        assert decision.kept == [1, 2]
        assert decision.pruned == [0]

    def test_all_tied_keeps_lower_indices(self):
        """Test that all-tied scores keep the lowest indices."""
        decision = selection.select_tokens(ImportanceVector(scores=[5, 5, 5]), 2)
        assert decision.kept == [0, 1]

    def test_keep_all(self):
        """Test that k equal to L0 keeps every token."""
        decision = selection.select_tokens(ImportanceVector(scores=[2, 4, 3]), 3)
        assert decision.kept == [0, 1, 2]
        assert decision.pruned == []

    def test_keep_none(self):
        """Test that k of 0 prunes every token."""
        decision = selection.select_tokens(ImportanceVector(scores=[2, 4, 3]), 0)
        assert decision.kept == []
        assert decision.ratio == 1.0

    def test_k_out_of_range(self):
        """Test that k above L0 is rejected."""
        with pytest.raises(KOutOfRangeError):
            selection.select_tokens(ImportanceVector(scores=[2, 4, 3]), 4)

    def test_prune_records_ratio(self):
        """Test that prune stores its ratio on the decision."""
        decision = selection.prune(ImportanceVector(scores=[2, 4, 3]), Fraction(1, 3))
        assert decision.kept == [1, 2]
        assert decision.ratio == pytest.approx(1 / 3)
        assert decision.keep_count == 2

    def test_matches_sort_oracle(self, rng):
        """Test selection against a plain sort over random scores."""
        for _ in range(500):
            n = int(rng.integers(1, 30))
            scores = rng.integers(0, 6, size=n) if rng.random() < 0.5 else rng.random(n)
            k = int(rng.integers(0, n + 1))
            decision = selection.select_tokens(ImportanceVector(scores=scores), k)
            assert decision.kept == oracle_kept(list(scores), k)
            assert sorted(decision.kept + decision.pruned) == list(range(n))
            if decision.kept and decision.pruned:
                assert min(scores[decision.kept]) >= max(scores[decision.pruned])

    def test_nested_in_k(self, rng):
        """Test that a larger k keeps a superset."""
        for _ in range(200):
            n = int(rng.integers(1, 30))
            imp = ImportanceVector(scores=rng.integers(0, 5, size=n))
            previous = set()
            for k in range(n + 1):
                kept = set(selection.select_tokens(imp, k).kept)
                assert previous <= kept
                previous = kept

    def test_monotone_in_ratio(self, rng):
        """Test that a larger ratio never keeps more tokens."""
        for _ in range(200):
            n = int(rng.integers(1, 30))
            imp = ImportanceVector(scores=rng.random(n))
            sizes = [len(selection.prune(imp, float(p)).kept) for p in np.linspace(0, 1, 11)]
            assert sizes == sorted(sizes, reverse=True)

    def test_positive_scale_invariance(self, rng):
        """Test that scaling scores by a positive factor keeps the same set."""
        for _ in range(200):
            n = int(rng.integers(1, 30))
            scores = rng.integers(0, 50, size=n)
            k = int(rng.integers(0, n + 1))
            base = selection.select_tokens(ImportanceVector(scores=scores), k)
            for c in (3, 0.5, 1024.0):
                scaled = selection.select_tokens(ImportanceVector(scores=scores * c), k)
                assert scaled.kept == base.kept


# ============================================================================
# TEST SUITE 3: Decisions and observables
# ============================================================================


class TestDecisionModel:
    """Test suite for PruneDecision invariants and downstream use."""

    def test_rejects_overlap(self):
        """Test that kept and pruned ids may not overlap."""
        with pytest.raises(InvalidInputError):
            PruneDecision(kept=[0, 1], pruned=[1], keep_count=2, ratio=0.5)

    def test_rejects_wrong_keep_count(self):
        """Test that keep_count must match the kept ids."""
        with pytest.raises(InvalidInputError):
            PruneDecision(kept=[0, 1], pruned=[2], keep_count=1, ratio=0.5)

    def test_apply_decision_drops_pruned_rows(self):
        """Test that applying a decision keeps only kept rows in order."""
        emb = EmbeddingMatrix(data=[[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]])
        decision = PruneDecision(kept=[0, 2], pruned=[1], keep_count=2, ratio=1 / 3)
        reduced = selection.apply_decision(emb, decision)
        assert reduced.data[:, 0].tolist() == [1.0, 3.0]

    def test_apply_decision_shape_mismatch(self):
        """Test that a decision for another token count is rejected."""
        emb = EmbeddingMatrix(data=np.ones((4, 2)))
        decision = PruneDecision(kept=[0], pruned=[1, 2], keep_count=1, ratio=0.5)
        with pytest.raises(ShapeMismatchError):
            selection.apply_decision(emb, decision)

    def test_jaccard(self):
        """Test Jaccard similarity including the empty case."""
        assert selection.jaccard([0, 1], [1, 2]) == pytest.approx(1 / 3)
        assert selection.jaccard([0, 1], [0, 1]) == 1.0
        assert selection.jaccard([], []) == 1.0
        assert selection.jaccard([0], [1]) == 0.0

    def test_retained_mass(self):
        """Test the share of importance held by the kept tokens."""
        imp = ImportanceVector(scores=[2, 4, 3])
        assert selection.retained_mass(imp, [1, 2]) == pytest.approx(7 / 9)
        assert selection.retained_mass(imp, []) == 0.0
        assert selection.retained_mass(imp, [0, 1, 2]) == 1.0
        assert selection.retained_mass(ImportanceVector(scores=[0, 0]), [0]) == 1.0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
