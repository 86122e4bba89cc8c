"""Array-shape and value checks shared by the domain types and estimators.

All helpers raise :class:`~dismic.errors.ValidationError` (a ValueError
subclass) so they slot into sklearn-style input validation.
"""
from __future__ import annotations

import numpy as np

from .errors import ValidationError


def as_float_matrix(values, *, name: str = "matrix") -> np.ndarray:
    """Coerce ``values`` to a square, finite, float ndarray (copied)."""
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} is not numeric: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValidationError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def as_binary_matrix(values, *, name: str = "matrix") -> np.ndarray:
    """Coerce to a square 0/1 integer ndarray (copied)."""
    arr = as_float_matrix(values, name=name)
    if not np.all((arr == 0) | (arr == 1)):
        raise ValidationError(f"{name} must contain only 0 and 1")
    return arr.astype(np.int64)


def check_non_negative(arr: np.ndarray, *, name: str = "matrix") -> None:
    if np.any(arr < 0):
        i, j = np.argwhere(arr < 0)[0]
        raise ValidationError(f"{name} has a negative entry at ({i}, {j})")


def check_zero_diagonal(arr: np.ndarray, *, name: str = "matrix",
                        codes: tuple[str, ...] | None = None) -> None:
    bad = np.flatnonzero(np.diagonal(arr))
    if bad.size:
        where = codes[bad[0]] if codes is not None else f"index {bad[0]}"
        raise ValidationError(f"nonzero diagonal at {where} in {name}")


def check_within_scale(arr: np.ndarray, scale_max: float, *,
                       name: str = "matrix") -> None:
    if scale_max <= 0:
        raise ValidationError(f"scale_max must be positive, got {scale_max}")
    if np.any(arr < 0) or np.any(arr > scale_max):
        mask = (arr < 0) | (arr > scale_max)
        i, j = np.argwhere(mask)[0]
        raise ValidationError(
            f"value {arr[i, j]} out of scale [0, {scale_max}] "
            f"at ({i}, {j}) in {name}"
        )


def default_codes(n: int) -> tuple[str, ...]:
    """Generated factor codes used when no catalog is attached."""
    return tuple(f"x_{i}" for i in range(1, n + 1))


def check_codes(codes, n: int, *, name: str = "matrix") -> tuple[str, ...]:
    codes = tuple(str(c) for c in codes)
    if len(codes) != n:
        raise ValidationError(
            f"{name} has {n} rows but {len(codes)} codes"
        )
    if len(set(codes)) != len(codes):
        raise ValidationError(f"{name} has duplicate codes")
    return codes


def freeze(arr: np.ndarray) -> np.ndarray:
    """Mark an array read-only; value objects hand these out safely."""
    arr.flags.writeable = False
    return arr
