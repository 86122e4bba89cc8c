"""Domain types for factor systems and aggregation of expert surveys.

A structural analysis starts from an ordered catalog of named factors and
one direct-influence score matrix per expert. Averaging the expert
matrices entrywise yields the direct influence matrix that seeds the rest
of the pipeline. Row i of every matrix holds the influence FROM factor i
TO factor j.

All types are immutable value objects; all operations are pure functions,
safe to call from any number of threads.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .validation import (
    as_float_matrix,
    check_non_negative,
    check_within_scale,
    check_zero_diagonal,
    default_codes,
    freeze,
)


@dataclass(frozen=True)
class Factor:
    """One factor of the system under analysis.

    Construction is deliberately permissive (empty codes are representable)
    so that :func:`validate_catalog` can report every violation of a broken
    input file at once instead of failing on the first.
    """

    code: str
    name: str = ""
    group: str = "ungrouped"
    description: str = ""


@dataclass(frozen=True)
class FactorCatalog:
    """Ordered collection of factors.

    The catalog order defines the row/column order of every matrix in the
    pipeline. A valid catalog has at least two factors, pairwise-distinct
    non-empty codes, and non-empty groups; validity is checked explicitly
    via :func:`validate_catalog`.
    """

    factors: tuple[Factor, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(f.code for f in self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def index_of(self, code: str) -> int:
        """Position of ``code`` in the catalog order."""
        try:
            return self.codes.index(code)
        except ValueError:
            raise ValidationError(f"unknown factor code {code!r}") from None

    def __getitem__(self, code: str) -> Factor:
        return self.factors[self.index_of(code)]


@dataclass(frozen=True)
class SurveyMatrix:
    """One expert's pairwise influence scores on a declared scale.

    scores[i, j] is how strongly factor i influences factor j, in
    [0, scale_max]; the diagonal is exactly zero.
    """

    respondent: str
    scores: np.ndarray
    scale_max: float = 4.0

    def __post_init__(self) -> None:
        name = f"survey {self.respondent!r}"
        arr = as_float_matrix(self.scores, name=name)
        check_zero_diagonal(arr, name=name)
        check_within_scale(arr, self.scale_max, name=name)
        object.__setattr__(self, "scores", freeze(arr))
        object.__setattr__(self, "scale_max", float(self.scale_max))

    @property
    def n(self) -> int:
        return self.scores.shape[0]


@dataclass(frozen=True)
class DirectInfluenceMatrix:
    """Aggregated direct influence strengths with a zero diagonal.

    An all-zero matrix is representable here; the normalization stage
    raises "zero normalizer" when it meets one, so degenerate surveys fail
    in the stage that actually divides by the row sum.
    """

    entries: np.ndarray
    catalog: FactorCatalog | None = None

    def __post_init__(self) -> None:
        arr = as_float_matrix(self.entries, name="direct influence matrix")
        check_non_negative(arr, name="direct influence matrix")
        check_zero_diagonal(arr, name="direct influence matrix")
        if self.catalog is not None and len(self.catalog) != arr.shape[0]:
            raise ValidationError(
                f"matrix is {arr.shape[0]}x{arr.shape[0]} but the catalog "
                f"has {len(self.catalog)} factors"
            )
        object.__setattr__(self, "entries", freeze(arr))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def codes(self) -> tuple[str, ...]:
        if self.catalog is not None:
            return self.catalog.codes
        return default_codes(self.n)


def validate_catalog(catalog: FactorCatalog) -> list[str]:
    """Return every violated catalog invariant; an empty list means valid.

    Reported violations: fewer than two factors, empty codes, duplicate
    codes (one entry per duplicated code value), empty groups.
    """
    violations: list[str] = []
    factors = catalog.factors
    if len(factors) < 2:
        violations.append(
            f"catalog has {len(factors)} factor(s); at least 2 are required"
        )
    seen: dict[str, int] = {}
    for position, factor in enumerate(factors):
        if not factor.code:
            violations.append(f"factor at position {position} has an empty code")
            continue
        seen[factor.code] = seen.get(factor.code, 0) + 1
    for code, count in seen.items():
        if count > 1:
            violations.append(f"duplicate code {code!r} ({count} occurrences)")
    for factor in factors:
        if factor.code and not factor.group:
            violations.append(f"factor {factor.code!r} has an empty group")
    return violations


def aggregate_surveys(
    surveys: list[SurveyMatrix] | tuple[SurveyMatrix, ...],
    catalog: FactorCatalog | None = None,
) -> DirectInfluenceMatrix:
    """Average expert surveys entrywise into one direct influence matrix.

    All surveys must share the same dimension and scale; the mean is taken
    per cell, so the result is independent of survey order and aggregating
    k copies of one survey reproduces it.
    """
    surveys = list(surveys)
    if not surveys:
        raise ValidationError("no surveys")
    n = surveys[0].n
    scale = surveys[0].scale_max
    for survey in surveys[1:]:
        if survey.n != n:
            raise ValidationError(
                f"survey {survey.respondent!r} is {survey.n}x{survey.n}, "
                f"expected {n}x{n} (respondent {surveys[0].respondent!r})"
            )
        if survey.scale_max != scale:
            raise ValidationError(
                f"survey {survey.respondent!r} uses scale_max "
                f"{survey.scale_max}, expected {scale}"
            )
    if catalog is not None and len(catalog) != n:
        raise ValidationError(
            f"surveys are {n}x{n} but the catalog has {len(catalog)} factors"
        )
    stacked = np.stack([s.scores for s in surveys])
    return DirectInfluenceMatrix(stacked.mean(axis=0), catalog=catalog)
