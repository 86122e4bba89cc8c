"""Total influence computation and per-factor influence scores.

Given a direct influence matrix A, the stage normalizes it by its largest
row sum (G = A / max_i sum_j a_ij), accumulates every direct and indirect
influence chain into the total influence matrix T = G (I - G)^(-1), and
reduces T to four per-factor scores:

* influence  F_i = row sum of T (how strongly i acts on the system)
* influenced E_i = column sum of T (how strongly the system acts on i)
* centrality M_i = F_i + E_i (importance)
* causality  N_i = F_i - E_i (positive: cause factor; negative: effect)

T is computed by a dense LU solve with partial pivoting, never by series
truncation; the geometric series interpretation only justifies why
(I - G) is invertible when the spectral radius of G is below one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import NumericalError, ValidationError
from .model import DirectInfluenceMatrix
from .validation import as_float_matrix, check_codes, default_codes, freeze

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class NormalizedMatrix:
    """Direct influence matrix scaled into [0, 1] by its max row sum."""

    entries: np.ndarray
    normalizer: float
    codes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        arr = as_float_matrix(self.entries, name="normalized matrix")
        if np.any(arr < 0) or np.any(arr > 1):
            raise ValidationError("normalized entries must lie in [0, 1]")
        if np.any(np.diagonal(arr) != 0):
            raise ValidationError("normalized matrix must have a zero diagonal")
        codes = self.codes or default_codes(arr.shape[0])
        object.__setattr__(self, "entries", freeze(arr))
        object.__setattr__(self, "normalizer", float(self.normalizer))
        object.__setattr__(self, "codes", check_codes(codes, arr.shape[0]))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class TotalInfluenceMatrix:
    """Sum of all direct and indirect influence chains.

    ``residual`` records ||G + G T - T||_max from the defining identity
    T = G + G T; ``converged`` records that the solve passed its checks.
    """

    entries: np.ndarray
    residual: float = 0.0
    converged: bool = True
    codes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        arr = as_float_matrix(self.entries, name="total influence matrix")
        if np.any(arr < 0):
            raise ValidationError("total influence entries must be >= 0")
        codes = self.codes or default_codes(arr.shape[0])
        object.__setattr__(self, "entries", freeze(arr))
        object.__setattr__(self, "residual", float(self.residual))
        object.__setattr__(self, "codes", check_codes(codes, arr.shape[0]))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DematelScores:
    """Per-factor influence (F), influenced (E), centrality (M), causality (N)."""

    codes: tuple[str, ...]
    influence: np.ndarray
    influenced: np.ndarray
    centrality: np.ndarray
    causality: np.ndarray

    def __post_init__(self) -> None:
        arrays = {}
        for fieldname in ("influence", "influenced", "centrality", "causality"):
            arr = np.asarray(getattr(self, fieldname), dtype=float).copy()
            if arr.ndim != 1:
                raise ValidationError(f"{fieldname} must be one-dimensional")
            arrays[fieldname] = arr
        lengths = {a.shape[0] for a in arrays.values()}
        if len(lengths) != 1:
            raise ValidationError("score vectors differ in length")
        n = lengths.pop()
        object.__setattr__(self, "codes", check_codes(self.codes, n, name="scores"))
        for fieldname, arr in arrays.items():
            object.__setattr__(self, fieldname, freeze(arr))

    @property
    def is_cause(self) -> np.ndarray:
        """Boolean mask: causality strictly above zero."""
        return self.causality > 0

    def row(self, code: str) -> tuple[float, float, float, float]:
        """(influence, influenced, centrality, causality) for one factor."""
        i = self.codes.index(code)
        return (
            float(self.influence[i]),
            float(self.influenced[i]),
            float(self.centrality[i]),
            float(self.causality[i]),
        )


def normalize(a: DirectInfluenceMatrix) -> NormalizedMatrix:
    """Scale the direct influence matrix by its maximum row sum."""
    row_sums = a.entries.sum(axis=1)
    normalizer = float(row_sums.max())
    if normalizer <= 0:
        raise NumericalError("zero normalizer")
    return NormalizedMatrix(a.entries / normalizer, normalizer, codes=a.codes)


def total_influence(
    g: NormalizedMatrix, tol: float = DEFAULT_TOL
) -> TotalInfluenceMatrix:
    """Solve T = G (I - G)^(-1) by dense LU with partial pivoting.

    Raises "singular (I - G)" when a pivot falls below ``tol`` and
    "non-convergent total influence" when the result fails the defining
    identity beyond 10*tol or carries negative influence mass (both signal
    a spectral radius at or above one, where the influence-chain series
    diverges).
    """
    if tol <= 0:
        raise ValidationError(f"tol must be positive, got {tol}")
    n = g.n
    identity = np.eye(n)
    try:
        lu, piv = lu_factor(identity - g.entries)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - scipy raises rarely
        raise NumericalError(f"singular (I - G): {exc}") from exc
    if np.min(np.abs(np.diagonal(lu))) < tol:
        raise NumericalError("singular (I - G)")
    # T (I - G) = G  <=>  (I - G)^T T^T = G^T, hence the transposed solve.
    t = lu_solve((lu, piv), g.entries.T, trans=1).T
    residual = float(np.max(np.abs(g.entries + g.entries @ t - t)))
    if residual > 10 * tol:
        raise NumericalError("non-convergent total influence")
    if float(t.min()) < -10 * tol:
        raise NumericalError("non-convergent total influence")
    t = np.maximum(t, 0.0)  # clamp roundoff fuzz just below zero
    return TotalInfluenceMatrix(t, residual=residual, converged=True, codes=g.codes)


def dematel_scores(t: TotalInfluenceMatrix) -> DematelScores:
    """Reduce the total influence matrix to the four per-factor scores."""
    influence = t.entries.sum(axis=1)
    influenced = t.entries.sum(axis=0)
    return DematelScores(
        codes=t.codes,
        influence=influence,
        influenced=influenced,
        centrality=influence + influenced,
        causality=influence - influenced,
    )


class Dematel(TransformerMixin, BaseEstimator):
    """Estimator wrapper around the normalize / total-influence / score chain.

    X is the square direct influence matrix (non-negative, zero diagonal);
    there is no training/inference split, so ``fit`` simply runs the
    decomposition and exposes the results as fitted attributes, while
    ``transform`` maps a matrix to its total influence matrix.

    Attributes after fit: ``normalizer_``, ``normalized_``,
    ``total_influence_``, ``residual_``, ``influence_``, ``influenced_``,
    ``centrality_``, ``causality_``, ``n_features_in_``.
    """

    def __init__(self, tol: float = DEFAULT_TOL):
        self.tol = tol

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        direct = DirectInfluenceMatrix(X)
        normalized = normalize(direct)
        total = total_influence(normalized, tol=self.tol)
        scores = dematel_scores(total)
        self.normalizer_ = normalized.normalizer
        self.normalized_ = normalized.entries
        self.total_influence_ = total.entries
        self.residual_ = total.residual
        self.influence_ = scores.influence
        self.influenced_ = scores.influenced
        self.centrality_ = scores.centrality
        self.causality_ = scores.causality
        self.n_features_in_ = direct.n
        return self

    def transform(self, X):
        """Total influence matrix of X (stateless apart from ``tol``)."""
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        direct = DirectInfluenceMatrix(X)
        if direct.n != self.n_features_in_:
            raise ValidationError(
                f"X has {direct.n} factors, expected {self.n_features_in_}"
            )
        return total_influence(normalize(direct), tol=self.tol).entries
