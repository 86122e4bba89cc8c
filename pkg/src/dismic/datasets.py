"""Access to the bundled reference dataset.

The package ships a 26-factor financial-management risk system (codes
x_1..x_26 in four groups) together with its reachability matrix and its
influence-score table. The trio drives the regression and acceptance
tests and doubles as a worked example for the CLI.
"""
from __future__ import annotations

import csv
from importlib.resources import files
from pathlib import Path

import numpy as np

from .dematel import DematelScores
from .errors import ValidationError
from .ism import ReachabilityMatrix
from .model import FactorCatalog
from .report_cli import load_factor_catalog, load_reachability

FACTORS_FILE = "factors_table1.csv"
REACHABILITY_FILE = "reachability_table3.csv"
SCORES_FILE = "dematel_table2.csv"


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled data file."""
    path = Path(str(files("dismic").joinpath("data", name)))
    if not path.is_file():
        raise ValidationError(f"no bundled file named {name!r}")
    return path


def load_reference_catalog() -> FactorCatalog:
    """The 26-factor reference catalog."""
    return load_factor_catalog(fixture_path(FACTORS_FILE))


def load_reference_reachability() -> ReachabilityMatrix:
    """The reference system's reachability matrix (loaded, so exponent is
    None)."""
    return load_reachability(
        fixture_path(REACHABILITY_FILE), load_reference_catalog()
    )


def load_reference_scores() -> DematelScores:
    """The reference system's influence scores, at the published 3-decimal
    rounding (useful for identity regression, not exact arithmetic)."""
    with open(fixture_path(SCORES_FILE), encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValidationError(f"{SCORES_FILE} is empty")
    return DematelScores(
        codes=tuple(row["code"] for row in rows),
        influence=np.array([float(row["influence"]) for row in rows]),
        influenced=np.array([float(row["influenced"]) for row in rows]),
        centrality=np.array([float(row["centrality"]) for row in rows]),
        causality=np.array([float(row["causality"]) for row in rows]),
    )
