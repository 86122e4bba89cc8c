"""Driving/dependence powers and the four-quadrant factor families.

From a reachability matrix, each factor gets a driving power (its row
sum: how many factors it can reach, itself included) and a dependence
power (its column sum: how many factors reach it). Two axis cuts split
the plane into four families:

* driving:    high driving, low dependence (root movers)
* dependent:  low driving, high dependence (outcomes)
* linkage:    high on both (unstable relays)
* autonomous: low on both (weakly coupled)

Values exactly equal to a cut count as high.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array

from .errors import ValidationError
from .ism import AdjacencyMatrix, ReachabilityMatrix, transitive_closure
from .validation import as_binary_matrix, check_codes, default_codes, freeze

QUADRANTS = ("autonomous", "dependent", "linkage", "driving")

THRESHOLD_MODES = ("mean", "midpoint", "explicit")


@dataclass(frozen=True)
class MicmacScores:
    """Integer driving and dependence powers, one per factor."""

    codes: tuple[str, ...]
    driving: np.ndarray
    dependence: np.ndarray

    def __post_init__(self) -> None:
        driving = np.asarray(self.driving, dtype=np.int64).copy()
        dependence = np.asarray(self.dependence, dtype=np.int64).copy()
        if driving.ndim != 1 or dependence.ndim != 1:
            raise ValidationError("powers must be one-dimensional")
        if driving.shape != dependence.shape:
            raise ValidationError("driving and dependence differ in length")
        if np.any(driving < 0) or np.any(dependence < 0):
            raise ValidationError("powers must be non-negative")
        if int(driving.sum()) != int(dependence.sum()):
            raise ValidationError(
                "driving and dependence powers must have equal totals "
                f"({int(driving.sum())} != {int(dependence.sum())})"
            )
        n = driving.shape[0]
        object.__setattr__(self, "codes", check_codes(self.codes, n, name="scores"))
        object.__setattr__(self, "driving", freeze(driving))
        object.__setattr__(self, "dependence", freeze(dependence))

    @property
    def n(self) -> int:
        return self.driving.shape[0]

    def row(self, code: str) -> tuple[int, int]:
        i = self.codes.index(code)
        return int(self.driving[i]), int(self.dependence[i])


@dataclass(frozen=True)
class QuadrantThresholds:
    """Axis cuts separating low from high driving/dependence."""

    driving_cut: float
    dependence_cut: float
    mode: str = "explicit"

    def __post_init__(self) -> None:
        if self.mode not in THRESHOLD_MODES:
            raise ValidationError(
                f"mode must be one of {THRESHOLD_MODES}, got {self.mode!r}"
            )
        if self.driving_cut <= 0 or self.dependence_cut <= 0:
            raise ValidationError("cuts must be positive")
        object.__setattr__(self, "driving_cut", float(self.driving_cut))
        object.__setattr__(self, "dependence_cut", float(self.dependence_cut))


@dataclass(frozen=True)
class MicmacClassification:
    """Scores plus one quadrant label per factor."""

    scores: MicmacScores
    cuts: QuadrantThresholds
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        labels = tuple(str(label) for label in self.labels)
        if len(labels) != self.scores.n:
            raise ValidationError("one label per factor required")
        unknown = set(labels) - set(QUADRANTS)
        if unknown:
            raise ValidationError(f"unknown quadrant labels {sorted(unknown)!r}")
        object.__setattr__(self, "labels", labels)

    @property
    def codes(self) -> tuple[str, ...]:
        return self.scores.codes

    def label_of(self, code: str) -> str:
        return self.labels[self.scores.codes.index(code)]

    def rows(self):
        """Yield (code, driving, dependence, label) in catalog order."""
        for i, code in enumerate(self.scores.codes):
            yield (
                code,
                int(self.scores.driving[i]),
                int(self.scores.dependence[i]),
                self.labels[i],
            )


def micmac_powers(m: ReachabilityMatrix) -> MicmacScores:
    """Row sums are driving powers, column sums dependence powers."""
    return MicmacScores(
        codes=m.codes,
        driving=m.entries.sum(axis=1),
        dependence=m.entries.sum(axis=0),
    )


def thresholds(
    scores: MicmacScores,
    mode: str | tuple[float, float] | list[float] = "mean",
) -> QuadrantThresholds:
    """Axis cuts from a named rule or an explicit (driving, dependence) pair.

    "mean" puts both cuts at the shared average power (the two totals are
    equal, so the average is one number); "midpoint" puts each cut halfway
    between 1 and the observed maximum of its axis.
    """
    if scores.n == 0:
        raise ValidationError("no scores")
    if isinstance(mode, (tuple, list)):
        if len(mode) != 2:
            raise ValidationError(
                f"explicit cuts need exactly two values, got {len(mode)}"
            )
        return QuadrantThresholds(float(mode[0]), float(mode[1]), mode="explicit")
    if mode == "mean":
        cut = float(scores.driving.sum()) / scores.n
        return QuadrantThresholds(cut, cut, mode="mean")
    if mode == "midpoint":
        return QuadrantThresholds(
            (1 + float(scores.driving.max())) / 2,
            (1 + float(scores.dependence.max())) / 2,
            mode="midpoint",
        )
    raise ValidationError(
        f"mode must be 'mean', 'midpoint', or an explicit pair, got {mode!r}"
    )


def classify(
    scores: MicmacScores, cuts: QuadrantThresholds
) -> MicmacClassification:
    """Assign each factor to exactly one quadrant family."""
    high_driving = scores.driving >= cuts.driving_cut
    high_dependence = scores.dependence >= cuts.dependence_cut
    labels = []
    for hd, hr in zip(high_driving, high_dependence):
        if hd and hr:
            labels.append("linkage")
        elif hd:
            labels.append("driving")
        elif hr:
            labels.append("dependent")
        else:
            labels.append("autonomous")
    return MicmacClassification(scores=scores, cuts=cuts, labels=tuple(labels))


class Micmac(ClusterMixin, BaseEstimator):
    """Estimator wrapper: binary influence matrix in, quadrant labels out.

    X is a square 0/1 matrix. A reachability closure is used as-is; any
    other binary relation is closed (reflexively and transitively) first,
    so ``fit(adjacency)`` and ``fit(closure)`` agree.

    ``cuts`` is "mean", "midpoint", or an explicit (driving, dependence)
    pair. Attributes after fit: ``driving_``, ``dependence_``,
    ``driving_cut_``, ``dependence_cut_``, ``labels_``, ``n_features_in_``.
    """

    def __init__(self, cuts: str | tuple[float, float] = "mean"):
        self.cuts = cuts

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        codes = default_codes(X.shape[0])
        entries = as_binary_matrix(X, name="X")
        try:
            closure = ReachabilityMatrix(entries, codes=codes)
        except ValidationError:
            off_diagonal = entries.copy()
            np.fill_diagonal(off_diagonal, 0)
            closure = transitive_closure(
                AdjacencyMatrix(off_diagonal, codes=codes)
            )
        scores = micmac_powers(closure)
        resolved = thresholds(scores, self.cuts)
        classification = classify(scores, resolved)
        self.driving_ = scores.driving
        self.dependence_ = scores.dependence
        self.driving_cut_ = resolved.driving_cut
        self.dependence_cut_ = resolved.dependence_cut
        self.labels_ = np.array(classification.labels, dtype=object)
        self.n_features_in_ = X.shape[0]
        return self
