"""Hierarchy extraction from a binary influence relation.

The stage bridges from real-valued total influence to a binary adjacency
(entry 1 iff the influence of i on j clears a threshold), closes it into
the reflexive-transitive reachability matrix by Boolean matrix powers,
reads off per-factor reachable/antecedent sets, peels the factors into
levels (surface level first), and reduces the closure to the minimal
skeleton digraph that a hierarchy diagram draws.

Cycles are handled by condensing mutually reachable factors into one
node; the bundled reference system is acyclic, but general inputs need
not be.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array

from .dematel import TotalInfluenceMatrix
from .errors import ValidationError
from .validation import as_binary_matrix, check_codes, default_codes, freeze


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Binary direct-influence relation; entry (i, j) = 1 iff i influences j."""

    entries: np.ndarray
    threshold: float | None = None
    codes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        arr = as_binary_matrix(self.entries, name="adjacency matrix")
        if np.any(np.diagonal(arr) != 0):
            raise ValidationError("adjacency matrix must have a zero diagonal")
        codes = self.codes or default_codes(arr.shape[0])
        object.__setattr__(self, "entries", freeze(arr))
        object.__setattr__(self, "codes", check_codes(codes, arr.shape[0]))
        if self.threshold is not None:
            object.__setattr__(self, "threshold", float(self.threshold))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ReachabilityMatrix:
    """Reflexive-transitive Boolean closure of an adjacency matrix.

    ``exponent`` is the least k at which the Boolean power (A + I)^k
    reaches its fixed point; None when the matrix was loaded directly
    rather than computed.
    """

    entries: np.ndarray
    exponent: int | None = None
    codes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        arr = as_binary_matrix(self.entries, name="reachability matrix")
        if np.any(np.diagonal(arr) != 1):
            raise ValidationError("reachability matrix must be reflexive")
        if not np.array_equal(_bool_square(arr), arr):
            raise ValidationError("reachability matrix must be transitive")
        codes = self.codes or default_codes(arr.shape[0])
        object.__setattr__(self, "entries", freeze(arr))
        object.__setattr__(self, "codes", check_codes(codes, arr.shape[0]))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ReachabilitySets:
    """Per-factor reachable set R, antecedent set Q, intersection N = R & Q.

    Construction checks self-membership and the intersection identity.
    The duality j in R(i) <=> i in Q(j) holds for any instance derived
    from a reachability matrix but is not enforced here, so inconsistent
    hand-built instances remain representable (and the level partition
    guards against them at run time).
    """

    codes: tuple[str, ...]
    reachable: Mapping[str, frozenset[str]]
    antecedent: Mapping[str, frozenset[str]]
    intersection: Mapping[str, frozenset[str]]

    def __post_init__(self) -> None:
        codes = tuple(self.codes)
        object.__setattr__(self, "codes", check_codes(codes, len(codes), name="sets"))
        mappings = {}
        for fieldname in ("reachable", "antecedent", "intersection"):
            raw = dict(getattr(self, fieldname))
            if set(raw) != set(codes):
                raise ValidationError(f"{fieldname} keys must match the codes")
            mappings[fieldname] = {c: frozenset(raw[c]) for c in codes}
        for code in codes:
            if code not in mappings["reachable"][code]:
                raise ValidationError(f"{code} missing from its reachable set")
            if code not in mappings["antecedent"][code]:
                raise ValidationError(f"{code} missing from its antecedent set")
            expected = mappings["reachable"][code] & mappings["antecedent"][code]
            if mappings["intersection"][code] != expected:
                raise ValidationError(
                    f"intersection set of {code} is not R & Q"
                )
        for fieldname, mapping in mappings.items():
            object.__setattr__(self, fieldname, MappingProxyType(mapping))


@dataclass(frozen=True)
class LevelPartition:
    """Ordered levels L_1..L_m; L_1 is the surface (most-effect) level."""

    levels: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        levels = tuple(tuple(level) for level in self.levels)
        seen: set[str] = set()
        for index, level in enumerate(levels, start=1):
            if not level:
                raise ValidationError(f"level {index} is empty")
            overlap = seen.intersection(level)
            if overlap:
                raise ValidationError(
                    f"levels are not disjoint: {sorted(overlap)!r} repeats"
                )
            seen.update(level)
        object.__setattr__(self, "levels", levels)

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(code for level in self.levels for code in level)

    def __len__(self) -> int:
        return len(self.levels)

    def level_of(self, code: str) -> int:
        """1-based level index of a factor; 1 is the surface."""
        for index, level in enumerate(self.levels, start=1):
            if code in level:
                return index
        raise ValidationError(f"unknown factor code {code!r}")


@dataclass(frozen=True)
class SkeletonDigraph:
    """Minimal digraph whose closure reproduces the reachability matrix.

    ``nodes`` holds one representative per condensed component, grouped by
    level (surface level first); ``edges`` are (source, target) pairs in
    influence direction, so targets sit nearer the surface; ``groups``
    maps a representative to all members of its mutually-reachable
    component (only components with two or more members appear).
    """

    nodes: tuple[tuple[str, ...], ...]
    edges: tuple[tuple[str, str], ...]
    groups: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        nodes = tuple(tuple(level) for level in self.nodes)
        edges = tuple((str(a), str(b)) for a, b in self.edges)
        for a, b in edges:
            if a == b:
                raise ValidationError(f"self-loop on {a!r}")
        groups = MappingProxyType(
            {str(k): tuple(v) for k, v in dict(self.groups).items()}
        )
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "groups", groups)


def _bool_square(arr: np.ndarray) -> np.ndarray:
    return ((arr @ arr) > 0).astype(np.int64)


def _bool_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return ((a @ b) > 0).astype(np.int64)


def derive_adjacency(
    t: TotalInfluenceMatrix, threshold: float
) -> AdjacencyMatrix:
    """Binarize total influence: entry 1 iff i != j and t_ij >= threshold."""
    if threshold < 0:
        raise ValidationError(f"threshold must be >= 0, got {threshold}")
    entries = (t.entries >= threshold).astype(np.int64)
    np.fill_diagonal(entries, 0)
    return AdjacencyMatrix(entries, threshold=float(threshold), codes=t.codes)


def auto_threshold(t: TotalInfluenceMatrix) -> float:
    """Default bridge threshold: mean plus population std over all cells."""
    return float(t.entries.mean() + t.entries.std())


def transitive_closure(a: AdjacencyMatrix) -> ReachabilityMatrix:
    """Reflexive-transitive closure by repeated Boolean squaring.

    The closure is the fixed point of squaring (A + I); the recorded
    exponent is the least k with (A + I)^k = (A + I)^(k + 1), found by
    walking plain powers once the fixed point is known (k <= n - 1).
    """
    base = a.entries.copy()
    np.fill_diagonal(base, 1)
    closure = base
    while True:
        squared = _bool_square(closure)
        if np.array_equal(squared, closure):
            break
        closure = squared
    exponent = 1
    power = base
    while not np.array_equal(power, closure):
        power = _bool_product(power, base)
        exponent += 1
    return ReachabilityMatrix(closure, exponent=exponent, codes=a.codes)


def warshall_closure(a: AdjacencyMatrix) -> ReachabilityMatrix:
    """Same closure via in-place single-pivot sweeps; cross-check for
    :func:`transitive_closure` (the two must agree on every input)."""
    reach = a.entries.astype(bool)
    np.fill_diagonal(reach, True)
    for via in range(a.n):
        reach |= np.outer(reach[:, via], reach[via, :])
    return ReachabilityMatrix(reach.astype(np.int64), exponent=None, codes=a.codes)


def reachability_sets(m: ReachabilityMatrix) -> ReachabilitySets:
    """Read off reachable rows, antecedent columns, and their intersection."""
    codes = m.codes
    arr = m.entries
    reachable = {
        codes[i]: frozenset(codes[j] for j in np.flatnonzero(arr[i]))
        for i in range(m.n)
    }
    antecedent = {
        codes[i]: frozenset(codes[j] for j in np.flatnonzero(arr[:, i]))
        for i in range(m.n)
    }
    intersection = {c: reachable[c] & antecedent[c] for c in codes}
    return ReachabilitySets(
        codes=codes,
        reachable=reachable,
        antecedent=antecedent,
        intersection=intersection,
    )


def partition_levels(sets: ReachabilitySets) -> LevelPartition:
    """Iteratively peel factors whose remaining reachable set equals R & Q.

    A factor whose reachable set (within the remaining subsystem) is fully
    mutual belongs to the current level; the surface level L_1 is peeled
    first. Any valid closure partitions completely; the stall guard only
    fires on inconsistent hand-built inputs.
    """
    remaining = list(sets.codes)
    levels: list[tuple[str, ...]] = []
    while remaining:
        pool = set(remaining)
        level = tuple(
            code
            for code in remaining
            if sets.reachable[code] & pool
            == sets.reachable[code] & sets.antecedent[code] & pool
        )
        if not level:
            raise ValidationError("partition stalled")
        levels.append(level)
        remaining = [code for code in remaining if code not in level]
    return LevelPartition(tuple(levels))


def skeleton(m: ReachabilityMatrix, levels: LevelPartition) -> SkeletonDigraph:
    """Condense cycles and transitively reduce the reachability order.

    Mutually reachable factors collapse into one node represented by their
    first member in catalog order; the edge set is the unique transitive
    reduction of the condensed strict order, so re-closing the skeleton
    (with each group expanded to a complete subdigraph) reproduces the
    reachability matrix exactly.
    """
    codes = m.codes
    if set(levels.codes) != set(codes):
        raise ValidationError("level partition does not cover the matrix factors")
    arr = m.entries
    n = m.n
    mutual = (arr & arr.T).astype(bool)
    component_of: dict[int, int] = {}
    representatives: list[int] = []
    members: dict[int, list[int]] = {}
    for i in range(n):
        if i in component_of:
            continue
        group = [j for j in range(i, n) if mutual[i, j]]
        for j in group:
            component_of[j] = i
        representatives.append(i)
        members[i] = group
    reps = np.array(representatives)
    condensed = (arr[np.ix_(reps, reps)] > 0).astype(np.int64)
    np.fill_diagonal(condensed, 0)
    implied = _bool_product(condensed, condensed)
    reduced = condensed & (1 - implied)
    edges = tuple(
        (codes[reps[i]], codes[reps[j]])
        for i, j in np.argwhere(reduced)
    )
    index = {code: i for i, code in enumerate(codes)}
    nodes = tuple(
        tuple(code for code in level if component_of[index[code]] == index[code])
        for level in levels.levels
    )
    groups = {
        codes[rep]: tuple(codes[j] for j in group)
        for rep, group in members.items()
        if len(group) > 1
    }
    return SkeletonDigraph(nodes=nodes, edges=edges, groups=groups)


def regions(a: AdjacencyMatrix | ReachabilityMatrix) -> tuple[tuple[str, ...], ...]:
    """Weakly connected components of the influence relation.

    Each region is listed in catalog order; regions are ordered by their
    first member. Interaction never crosses a region boundary, so each
    region is an independent subsystem.
    """
    arr = a.entries
    n = arr.shape[0]
    undirected = ((arr + arr.T) > 0).astype(bool)
    np.fill_diagonal(undirected, False)
    unassigned = set(range(n))
    components: list[tuple[str, ...]] = []
    while unassigned:
        start = min(unassigned)
        stack = [start]
        seen = {start}
        while stack:
            node = stack.pop()
            for neighbor in np.flatnonzero(undirected[node]):
                if neighbor in unassigned and neighbor not in seen:
                    seen.add(int(neighbor))
                    stack.append(int(neighbor))
        unassigned -= seen
        components.append(tuple(a.codes[i] for i in sorted(seen)))
    return tuple(components)


class IsmHierarchy(ClusterMixin, BaseEstimator):
    """Estimator wrapper: influence matrix in, level assignment out.

    X is a square matrix. With ``threshold=None`` it must already be a
    binary adjacency; a float binarizes a real-valued matrix (entry 1 iff
    off-diagonal and >= threshold); ``"auto"`` uses the mean-plus-std rule.

    Attributes after fit: ``threshold_`` (resolved value or None),
    ``adjacency_``, ``reachability_``, ``exponent_``, ``labels_``
    (1-based level per factor, 1 = surface), ``levels_`` (tuple of index
    tuples), ``edges_`` (skeleton edges as index pairs), ``groups_``
    (condensed components with 2+ members, as index tuples),
    ``n_features_in_``.
    """

    def __init__(self, threshold: float | str | None = None):
        self.threshold = threshold

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        codes = default_codes(X.shape[0])
        if self.threshold is None:
            adjacency = AdjacencyMatrix(X, codes=codes)
            resolved = None
        else:
            total = TotalInfluenceMatrix(X, codes=codes)
            if isinstance(self.threshold, str):
                if self.threshold != "auto":
                    raise ValidationError(
                        f"threshold must be a number, 'auto', or None, "
                        f"got {self.threshold!r}"
                    )
                resolved = auto_threshold(total)
            else:
                resolved = float(self.threshold)
            adjacency = derive_adjacency(total, resolved)
        closure = transitive_closure(adjacency)
        sets = reachability_sets(closure)
        partition = partition_levels(sets)
        graph = skeleton(closure, partition)
        index = {code: i for i, code in enumerate(codes)}
        self.threshold_ = resolved
        self.adjacency_ = adjacency.entries
        self.reachability_ = closure.entries
        self.exponent_ = closure.exponent
        self.labels_ = np.array(
            [partition.level_of(code) for code in codes], dtype=np.int64
        )
        self.levels_ = tuple(
            tuple(index[code] for code in level) for level in partition.levels
        )
        self.edges_ = tuple((index[a], index[b]) for a, b in graph.edges)
        self.groups_ = tuple(
            tuple(index[code] for code in group)
            for group in graph.groups.values()
        )
        self.n_features_in_ = X.shape[0]
        return self
