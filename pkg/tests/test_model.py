"""Catalog validation and survey aggregation."""
from __future__ import annotations

import numpy as np
import pytest

from dismic import (
    DirectInfluenceMatrix,
    Factor,
    FactorCatalog,
    SurveyMatrix,
    ValidationError,
    aggregate_surveys,
    validate_catalog,
)


def survey(scores, respondent="r", scale_max=4.0):
    return SurveyMatrix(respondent=respondent, scores=scores, scale_max=scale_max)


class TestValidateCatalog:
    def test_reference_catalog_is_valid(self, ref_catalog):
        assert validate_catalog(ref_catalog) == []

    def test_duplicate_code_reported_once(self):
        catalog = FactorCatalog((Factor("x_1"), Factor("x_1")))
        report = validate_catalog(catalog)
        assert len(report) == 1
        assert "duplicate" in report[0] and "x_1" in report[0]

    def test_single_factor_reports_size(self):
        report = validate_catalog(FactorCatalog((Factor("x_1"),)))
        assert len(report) == 1
        assert "at least 2" in report[0]

    def test_empty_code_and_empty_group(self):
        catalog = FactorCatalog(
            (Factor(""), Factor("b", group=""), Factor("c"))
        )
        report = validate_catalog(catalog)
        assert any("empty code" in v for v in report)
        assert any("'b'" in v and "group" in v for v in report)

    def test_does_not_mutate(self):
        factors = (Factor("a"), Factor("b"))
        catalog = FactorCatalog(factors)
        validate_catalog(catalog)
        assert catalog.factors == factors


class TestSurveyMatrix:
    def test_nonzero_diagonal_rejected(self):
        with pytest.raises(ValidationError, match="diagonal"):
            survey([[1.0, 0.0], [0.0, 0.0]])

    def test_out_of_scale_rejected(self):
        with pytest.raises(ValidationError, match="out of scale"):
            survey([[0.0, 5.0], [0.0, 0.0]])

    def test_negative_rejected(self):
        with pytest.raises(ValidationError, match="out of scale"):
            survey([[0.0, -1.0], [0.0, 0.0]])

    def test_non_square_rejected(self):
        with pytest.raises(ValidationError, match="square"):
            survey([[0.0, 1.0, 2.0], [0.0, 0.0, 1.0]])

    def test_scores_frozen(self):
        s = survey([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(ValueError):
            s.scores[0, 1] = 3.0


class TestDirectInfluenceMatrix:
    def test_generated_codes(self):
        m = DirectInfluenceMatrix([[0.0, 1.0], [2.0, 0.0]])
        assert m.codes == ("x_1", "x_2")

    def test_catalog_codes(self):
        catalog = FactorCatalog((Factor("a"), Factor("b")))
        m = DirectInfluenceMatrix([[0.0, 1.0], [2.0, 0.0]], catalog=catalog)
        assert m.codes == ("a", "b")

    def test_catalog_size_mismatch(self):
        catalog = FactorCatalog((Factor("a"), Factor("b"), Factor("c")))
        with pytest.raises(ValidationError, match="catalog"):
            DirectInfluenceMatrix([[0.0, 1.0], [2.0, 0.0]], catalog=catalog)

    def test_all_zero_is_representable(self):
        m = DirectInfluenceMatrix(np.zeros((3, 3)))
        assert m.entries.sum() == 0


class TestAggregateSurveys:
    def test_single_survey_identity(self):
        scores = [[0.0, 2.0], [1.0, 0.0]]
        result = aggregate_surveys([survey(scores)])
        np.testing.assert_array_equal(result.entries, scores)

    def test_entrywise_mean_of_two(self):
        a = survey([[0.0, 2.0], [4.0, 0.0]], respondent="a")
        b = survey([[0.0, 4.0], [0.0, 0.0]], respondent="b")
        result = aggregate_surveys([a, b])
        np.testing.assert_array_equal(result.entries, [[0.0, 3.0], [2.0, 0.0]])

    def test_eight_random_surveys_match_per_cell_oracle(self):
        rng = np.random.default_rng(7)
        surveys = []
        for r in range(8):
            scores = rng.uniform(0.0, 4.0, size=(3, 3))
            np.fill_diagonal(scores, 0.0)
            surveys.append(survey(scores, respondent=f"r{r}"))
        result = aggregate_surveys(surveys)
        # oracle: per-cell Python summation, no numpy reductions
        for i in range(3):
            for j in range(3):
                total = 0.0
                for s in surveys:
                    total += float(s.scores[i, j])
                assert result.entries[i, j] == pytest.approx(total / 8, abs=1e-12)

    def test_empty_list_rejected(self):
        with pytest.raises(ValidationError, match="no surveys"):
            aggregate_surveys([])

    def test_dimension_mismatch_names_respondent(self):
        a = survey([[0.0, 1.0], [1.0, 0.0]], respondent="first")
        b = survey(np.zeros((3, 3)), respondent="odd-one")
        with pytest.raises(ValidationError, match="odd-one"):
            aggregate_surveys([a, b])

    def test_scale_mismatch_names_respondent(self):
        a = survey([[0.0, 1.0], [1.0, 0.0]], respondent="first")
        b = survey([[0.0, 1.0], [1.0, 0.0]], respondent="other", scale_max=10)
        with pytest.raises(ValidationError, match="other"):
            aggregate_surveys([a, b])

    def test_permutation_invariant(self):
        rng = np.random.default_rng(13)
        surveys = []
        for r in range(5):
            scores = rng.uniform(0.0, 4.0, size=(4, 4))
            np.fill_diagonal(scores, 0.0)
            surveys.append(survey(scores, respondent=f"r{r}"))
        forward = aggregate_surveys(surveys)
        backward = aggregate_surveys(list(reversed(surveys)))
        # float summation order differs, so equality only up to roundoff
        np.testing.assert_allclose(forward.entries, backward.entries, atol=1e-12)

    def test_k_copies_reproduce_survey(self):
        scores = [[0.0, 1.5, 0.5], [2.0, 0.0, 0.0], [1.0, 3.0, 0.0]]
        for k in (1, 2, 5):
            result = aggregate_surveys([survey(scores, respondent=str(i)) for i in range(k)])
            np.testing.assert_allclose(result.entries, scores, atol=1e-12)

    def test_mean_within_per_cell_bounds(self):
        rng = np.random.default_rng(21)
        surveys = []
        for r in range(6):
            scores = rng.uniform(0.0, 4.0, size=(5, 5))
            np.fill_diagonal(scores, 0.0)
            surveys.append(survey(scores, respondent=f"r{r}"))
        result = aggregate_surveys(surveys)
        stack = np.stack([s.scores for s in surveys])
        assert np.all(result.entries >= stack.min(axis=0) - 1e-12)
        assert np.all(result.entries <= stack.max(axis=0) + 1e-12)

    def test_zero_diagonal_preserved(self):
        rng = np.random.default_rng(3)
        surveys = []
        for r in range(4):
            scores = rng.uniform(0.0, 4.0, size=(6, 6))
            np.fill_diagonal(scores, 0.0)
            surveys.append(survey(scores, respondent=f"r{r}"))
        result = aggregate_surveys(surveys)
        np.testing.assert_array_equal(np.diagonal(result.entries), np.zeros(6))
