"""
Unit tests for the catp.domain models and the CLI input models.

This test suite focuses on validation logic: layer selections, score vectors,
weights and method specifications.
"""

from fractions import Fraction

import numpy as np
import pytest

from catp.cli.commands import MethodSpec, parse_ratio
from catp.domain.scores import ImageWeights, ImportanceVector, LayerSelection, VotePoints
from catp.exceptions import (
    InvalidInputError,
    LayerOutOfRangeError,
    NegativeScoreError,
    NonFiniteValueError,
    ZeroMassWeightsError,
)


# ============================================================================
# TEST SUITE 1: Layer Selection
# ============================================================================


class TestLayerSelection:
    """Test suite for LayerSelection parsing and resolution."""

    @pytest.mark.parametrize(
        "text, resolved",
        [
            ("all", [0, 1, 2, 3, 4, 5]),
            ("first", [0]),
            ("single:3", [3]),
            ("subset:0,5", [0, 5]),
            ("SUBSET:1,2,4", [1, 2, 4]),
        ],
    )
    def test_parse_and_resolve(self, text, resolved):
        """Test that each selection spelling resolves to the expected layers."""
        assert LayerSelection.parse(text).resolve(6) == resolved

    def test_describe_round_trips(self):
        """Test that describe gives back the parsed spelling."""
        for text in ("all", "first", "single:2", "subset:0,3,4"):
            assert LayerSelection.parse(text).describe() == text

    @pytest.mark.parametrize("text", ["", "every", "single:", "single:x", "subset:", "first:1"])
    def test_rejects_malformed(self, text):
        """Test that malformed selection strings are rejected."""
        with pytest.raises(InvalidInputError):
            LayerSelection.parse(text)

    def test_rejects_unsorted_or_duplicate_subset(self):
        """Test that subsets must be ascending and unique."""
        with pytest.raises(InvalidInputError):
            LayerSelection.subset([3, 1])
        with pytest.raises(InvalidInputError):
            LayerSelection.subset([1, 1])

    def test_negative_index(self):
        """Test that negative layer indices are rejected."""
        with pytest.raises(LayerOutOfRangeError):
            LayerSelection.parse("single:-1")

    def test_out_of_range_on_resolve(self):
        """Test that resolving past the layer count is rejected."""
        with pytest.raises(LayerOutOfRangeError):
            LayerSelection.subset([0, 6]).resolve(6)

    def test_selections_are_hashable(self):
        """Test that equal selections hash equal."""
        assert len({LayerSelection.all(), LayerSelection.all(), LayerSelection.first()}) == 2


# ============================================================================
# TEST SUITE 2: Scores and Weights
# ============================================================================


class TestScoreModels:
    """Test suite for ImportanceVector, VotePoints and ImageWeights."""

    def test_integer_scores_keep_integer_dtype(self):
        """Test that unweighted scores stay int64."""
        imp = ImportanceVector(scores=[2, 4, 3])
        assert imp.scores.dtype == np.int64
        assert imp.is_integer
        assert imp.n_query == 3

    def test_integer_and_float_scores_differ(self):
        """Test that integer and float vectors never compare equal."""
        assert ImportanceVector(scores=[1, 2]) != ImportanceVector(scores=[1.0, 2.0])

    def test_scores_are_read_only(self):
        """Test that score arrays cannot be written in place."""
        imp = ImportanceVector(scores=[1, 2])
        with pytest.raises(ValueError):
            imp.scores[0] = 5

    def test_rejects_negative_scores(self):
        """Test that negative scores are rejected."""
        with pytest.raises(NegativeScoreError):
            ImportanceVector(scores=[1.0, -0.5])

    def test_rejects_empty_or_nan(self):
        """Test that empty and NaN score vectors are rejected."""
        with pytest.raises(InvalidInputError):
            ImportanceVector(scores=[])
        with pytest.raises(NonFiniteValueError):
            ImportanceVector(scores=[np.nan])

    def test_vote_points_must_be_permutation(self):
        """Test that vote points must be a permutation of 0..L0-1."""
        assert VotePoints(points=[1, 0, 2]).to_list() == [1, 0, 2]
        with pytest.raises(InvalidInputError):
            VotePoints(points=[2, 2, 0])

    def test_weights_from_raw(self):
        """Test normalizing raw weights."""
        weights = ImageWeights.from_raw([1.5, 0.75, 0.75])
        assert weights.weights.tolist() == [0.5, 0.25, 0.25]

    def test_weights_must_sum_to_one(self):
        """Test that weights off the unit sum are rejected."""
        with pytest.raises(InvalidInputError):
            ImageWeights(weights=[0.5, 0.6])

    def test_weights_from_zero_mass(self):
        """Test that all-zero raw weights are rejected."""
        with pytest.raises(ZeroMassWeightsError):
            ImageWeights.from_raw([0.0, 0.0])

    def test_weights_from_negative_scores(self):
        """Test that negative raw weights are rejected."""
        with pytest.raises(NegativeScoreError):
            ImageWeights.from_raw([1.0, -1.0])

    def test_uniform_weights(self):
        """Test that uniform weights are 1/L1 each."""
        assert ImageWeights.uniform(4).weights.tolist() == [0.25] * 4


# ============================================================================
# TEST SUITE 3: CLI Inputs
# ============================================================================


class TestCommandInputs:
    """Test suite for method tokens and ratio parsing."""

    def test_method_token_defaults_to_all_layers(self):
        """Test that a bare method token selects all layers."""
        spec = MethodSpec.parse("catp")
        assert spec.label() == "catp@all"
        assert spec.layers == LayerSelection.all()

    def test_method_token_with_layers(self):
        """Test parsing METHOD@LAYERS tokens."""
        spec = MethodSpec.parse("selfattn@subset:0,2")
        assert spec.layers.resolve(3) == [0, 2]
        assert spec.label() == "selfattn@subset:0,2"

    def test_l2_takes_no_layers(self):
        """Test that l2 refuses a layer selection."""
        assert MethodSpec.parse("l2").layer_description() == "n/a"
        with pytest.raises(InvalidInputError):
            MethodSpec.parse("l2@first")

    def test_unknown_method(self):
        """Test that an unknown method token is rejected."""
        with pytest.raises(InvalidInputError):
            MethodSpec.parse("random")

    def test_ratio_strings_are_exact(self):
        """Test that ratio strings parse to exact fractions."""
        assert parse_ratio("1/3") == Fraction(1, 3)
        assert parse_ratio("0.1") == Fraction(1, 10)
        assert parse_ratio(0.5) == 0.5

    def test_bad_ratio(self):
        """Test that unparseable ratios are rejected."""
        with pytest.raises(InvalidInputError):
            parse_ratio("half")
        with pytest.raises(InvalidInputError):
            parse_ratio("1/0")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
