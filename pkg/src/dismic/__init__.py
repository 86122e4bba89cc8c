"""Structural analysis of factor-influence systems.

Three chained methods over one factor catalog:

* total influence scoring (normalize a direct influence matrix, invert
  out the indirect chains, score each factor's influence, exposure,
  centrality, and causality),
* hierarchy extraction (threshold to a binary relation, close it, peel
  reachability levels, reduce to the skeleton digraph),
* driving/dependence classification (row and column sums of the closure,
  split into autonomous, dependent, linkage, and driving families).

The functional core lives in :mod:`dismic.model`, :mod:`dismic.dematel`,
:mod:`dismic.ism`, and :mod:`dismic.micmac`; estimator-style wrappers
(:class:`Dematel`, :class:`IsmHierarchy`, :class:`Micmac`) follow sklearn
conventions; :mod:`dismic.report_cli` adds file loading, the end-to-end
pipeline, and the ``dismic`` command line.
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("dismic")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0+unknown"

from .errors import DismicError, NumericalError, ValidationError
from .model import (
    DirectInfluenceMatrix,
    Factor,
    FactorCatalog,
    SurveyMatrix,
    aggregate_surveys,
    validate_catalog,
)
from .dematel import (
    Dematel,
    DematelScores,
    NormalizedMatrix,
    TotalInfluenceMatrix,
    dematel_scores,
    normalize,
    total_influence,
)
from .ism import (
    AdjacencyMatrix,
    IsmHierarchy,
    LevelPartition,
    ReachabilityMatrix,
    ReachabilitySets,
    SkeletonDigraph,
    auto_threshold,
    derive_adjacency,
    partition_levels,
    reachability_sets,
    regions,
    skeleton,
    transitive_closure,
    warshall_closure,
)
from .micmac import (
    Micmac,
    MicmacClassification,
    MicmacScores,
    QuadrantThresholds,
    classify,
    micmac_powers,
    thresholds,
)
from . import datasets

__all__ = [
    "__version__",
    "DismicError",
    "NumericalError",
    "ValidationError",
    "Factor",
    "FactorCatalog",
    "SurveyMatrix",
    "DirectInfluenceMatrix",
    "validate_catalog",
    "aggregate_surveys",
    "NormalizedMatrix",
    "TotalInfluenceMatrix",
    "DematelScores",
    "normalize",
    "total_influence",
    "dematel_scores",
    "Dematel",
    "AdjacencyMatrix",
    "ReachabilityMatrix",
    "ReachabilitySets",
    "LevelPartition",
    "SkeletonDigraph",
    "derive_adjacency",
    "auto_threshold",
    "transitive_closure",
    "warshall_closure",
    "reachability_sets",
    "partition_levels",
    "skeleton",
    "regions",
    "IsmHierarchy",
    "MicmacScores",
    "QuadrantThresholds",
    "MicmacClassification",
    "micmac_powers",
    "thresholds",
    "classify",
    "Micmac",
    "datasets",
]
