"""Shared fixtures and independent test oracles.

The oracle helpers deliberately avoid the package's own algorithms:
closure by per-source breadth-first search, aggregation by per-cell
Python loops, and file writers built on the csv module only.
"""
from __future__ import annotations

import csv

import numpy as np
import pytest

from dismic import datasets


@pytest.fixture(scope="session")
def ref_catalog():
    return datasets.load_reference_catalog()


@pytest.fixture(scope="session")
def ref_reachability():
    return datasets.load_reference_reachability()


@pytest.fixture(scope="session")
def ref_scores():
    return datasets.load_reference_scores()


def bfs_closure(adjacency: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure by breadth-first search from each node."""
    n = adjacency.shape[0]
    closure = np.zeros((n, n), dtype=np.int64)
    for source in range(n):
        seen = {source}
        queue = [source]
        while queue:
            node = queue.pop(0)
            for neighbor in range(n):
                if adjacency[node, neighbor] and neighbor not in seen:
                    seen.add(neighbor)
                    queue.append(neighbor)
        for node in seen:
            closure[source, node] = 1
    return closure


def random_digraph(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random binary adjacency with zero diagonal and varied density."""
    density = rng.uniform(0.05, 0.6)
    adjacency = (rng.random((n, n)) < density).astype(np.int64)
    np.fill_diagonal(adjacency, 0)
    return adjacency


def write_matrix_csv(path, codes, matrix, corner="code") -> None:
    """Write a code-labeled square matrix the way the loaders expect it."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([corner, *codes])
        for code, row in zip(codes, matrix):
            writer.writerow([code, *row])


def write_factors_csv(path, rows) -> None:
    """Write a catalog CSV from (code, name, group, description) rows."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["code", "name", "group", "description"])
        writer.writerows(rows)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Repeat the acceptance-criterion verdicts where capture can't hide them."""
    try:
        from test_acceptance import RESULTS
    except ImportError:  # collection may exclude the acceptance gate
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, summary, status in sorted(RESULTS):
        terminalreporter.write_line(f"[{status}] criterion {number}: {summary}")
