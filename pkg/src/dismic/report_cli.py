"""File ingestion, pipeline orchestration, and report emission.

The pipeline runs aggregate -> normalize -> total influence -> scores ->
threshold -> closure -> sets -> levels -> skeleton -> powers -> quadrants
end to end, or enters partway when the caller already has a binary
adjacency or reachability matrix. Every stage failure is re-raised with
the stage name attached.

Emission is byte-deterministic: fixed column orders, "\\n" line endings,
UTF-8, half-to-even rounding at the configured precision, and a
provenance block that echoes every tunable without any timestamps.

CSV conventions: matrix files carry factor codes as the first row and
first column (the corner cell is ignored); row order may be any
permutation of the catalog, and files are realigned on load.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dematel import (
    DematelScores,
    NormalizedMatrix,
    TotalInfluenceMatrix,
    dematel_scores,
    normalize,
    total_influence,
)
from .errors import DismicError, NumericalError, ValidationError
from .ism import (
    AdjacencyMatrix,
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
)
from .micmac import MicmacClassification, classify, micmac_powers, thresholds
from .model import (
    DirectInfluenceMatrix,
    Factor,
    FactorCatalog,
    SurveyMatrix,
    aggregate_surveys,
    validate_catalog,
)

CATALOG_COLUMNS = ("code", "name", "group", "description")

OUTPUT_FILES = (
    "dematel.csv",
    "total_influence.csv",
    "adjacency.csv",
    "reachability.csv",
    "levels.json",
    "micmac.csv",
    "hierarchy.dot",
    "dematel_scatter.csv",
    "micmac_scatter.csv",
    "provenance.json",
)


@dataclass(frozen=True)
class AnalysisConfig:
    """Everything a pipeline run depends on besides the input bytes."""

    factors_path: Path
    survey_paths: tuple[Path, ...] = ()
    adjacency_path: Path | None = None
    reachability_path: Path | None = None
    threshold: float | str = "auto"
    micmac_mode: str | tuple[float, float] = "mean"
    tol: float = 1e-9
    precision: int = 3
    scale_max: float = 4.0
    out_dir: Path | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors_path", Path(self.factors_path))
        object.__setattr__(
            self, "survey_paths", tuple(Path(p) for p in self.survey_paths)
        )
        for name in ("adjacency_path", "reachability_path"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, Path(value))
        if self.out_dir is not None:
            object.__setattr__(self, "out_dir", Path(self.out_dir))
        modes = [
            bool(self.survey_paths),
            self.adjacency_path is not None,
            self.reachability_path is not None,
        ]
        if sum(modes) != 1:
            raise ValidationError(
                "exactly one of surveys, adjacency, or reachability must drive "
                "the run"
            )
        if isinstance(self.threshold, str):
            if self.threshold != "auto":
                raise ValidationError(
                    f"lambda must be a number or 'auto', got {self.threshold!r}"
                )
        else:
            object.__setattr__(self, "threshold", float(self.threshold))
        if isinstance(self.micmac_mode, (tuple, list)):
            if len(self.micmac_mode) != 2:
                raise ValidationError("explicit cuts need exactly two values")
            object.__setattr__(
                self,
                "micmac_mode",
                (float(self.micmac_mode[0]), float(self.micmac_mode[1])),
            )
        elif self.micmac_mode not in ("mean", "midpoint"):
            raise ValidationError(
                "micmac cuts must be 'mean', 'midpoint', or an explicit pair, "
                f"got {self.micmac_mode!r}"
            )
        if not isinstance(self.precision, int) or self.precision < 0:
            raise ValidationError(
                f"precision must be a non-negative integer, got {self.precision!r}"
            )
        if self.tol <= 0:
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if self.scale_max <= 0:
            raise ValidationError(
                f"scale_max must be positive, got {self.scale_max}"
            )

    @property
    def input_mode(self) -> str:
        if self.survey_paths:
            return "surveys"
        if self.adjacency_path is not None:
            return "adjacency"
        return "reachability"


@dataclass(frozen=True)
class AnalysisReport:
    """All stage outputs of one run; DEMATEL fields are None when the run
    entered at the adjacency or reachability stage."""

    catalog: FactorCatalog
    reachability: ReachabilityMatrix
    sets: ReachabilitySets
    levels: LevelPartition
    skeleton: SkeletonDigraph
    regions: tuple[tuple[str, ...], ...]
    micmac: MicmacClassification
    provenance: dict
    direct: DirectInfluenceMatrix | None = None
    normalized: NormalizedMatrix | None = None
    total: TotalInfluenceMatrix | None = None
    scores: DematelScores | None = None
    adjacency: AdjacencyMatrix | None = None


@contextmanager
def _stage(name: str):
    """Attach the failing stage's name to any pipeline error."""
    try:
        yield
    except DismicError as exc:
        raise type(exc)(f"{name}: {exc}") from exc


def _read_rows(path: Path) -> list[list[str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ValidationError(f"{path} is not UTF-8: {exc}") from exc
    return [row for row in csv.reader(io.StringIO(text)) if row]


def load_factor_catalog(path: Path) -> FactorCatalog:
    """Parse a catalog CSV (columns code, name, group, description) and
    require it to be valid."""
    path = Path(path)
    rows = _read_rows(path)
    if not rows:
        raise ValidationError(f"no factors in {path}")
    header = [cell.strip() for cell in rows[0]]
    missing = [col for col in CATALOG_COLUMNS if col not in header]
    if missing:
        raise ValidationError(
            f"{path}: line 1: missing column(s) {', '.join(missing)}"
        )
    positions = {col: header.index(col) for col in CATALOG_COLUMNS}
    factors = []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) < len(header):
            raise ValidationError(
                f"{path}: line {line}: expected {len(header)} fields, "
                f"got {len(row)}"
            )
        factors.append(
            Factor(
                code=row[positions["code"]].strip(),
                name=row[positions["name"]].strip(),
                group=row[positions["group"]].strip(),
                description=row[positions["description"]].strip(),
            )
        )
    if not factors:
        raise ValidationError(f"no factors in {path}")
    catalog = FactorCatalog(tuple(factors))
    violations = validate_catalog(catalog)
    if violations:
        raise ValidationError(
            f"invalid factor catalog in {path}: " + "; ".join(violations)
        )
    return catalog


def _load_matrix(path: Path, catalog: FactorCatalog) -> np.ndarray:
    """Read a code-labeled square CSV and realign it to catalog order."""
    path = Path(path)
    codes = catalog.codes
    n = len(codes)
    rows = _read_rows(path)
    if not rows:
        raise ValidationError(f"{path} is empty")
    header = [cell.strip() for cell in rows[0][1:]]
    if sorted(header) != sorted(codes):
        missing = sorted(set(codes) - set(header))
        extra = sorted(set(header) - set(codes))
        raise ValidationError(
            f"{path}: header codes do not match the catalog "
            f"(missing: {missing}, unexpected: {extra})"
        )
    if len(rows) != n + 1:
        raise ValidationError(
            f"{path}: expected {n} data rows, got {len(rows) - 1}"
        )
    raw = np.zeros((n, n))
    row_labels: list[str] = []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != n + 1:
            raise ValidationError(
                f"{path}: line {line}: expected {n + 1} fields, got {len(row)}"
            )
        label = row[0].strip()
        if label not in codes:
            raise ValidationError(
                f"{path}: line {line}: unknown row code {label!r}"
            )
        if label in row_labels:
            raise ValidationError(
                f"{path}: line {line}: duplicate row code {label!r}"
            )
        row_labels.append(label)
        for position, cell in enumerate(row[1:]):
            try:
                raw[line - 2, position] = float(cell)
            except ValueError:
                raise ValidationError(
                    f"non-numeric value {cell.strip()!r} at "
                    f"({label}, {header[position]}) in {path}"
                ) from None
    row_index = [row_labels.index(code) for code in codes]
    col_index = [header.index(code) for code in codes]
    return raw[np.ix_(row_index, col_index)]


def load_surveys(
    paths, catalog: FactorCatalog, scale_max: float = 4.0
) -> list[SurveyMatrix]:
    """Load one survey per file; respondent ids are the file stems."""
    surveys = []
    for path in paths:
        path = Path(path)
        arr = _load_matrix(path, catalog)
        codes = catalog.codes
        for i, code in enumerate(codes):
            if arr[i, i] != 0:
                raise ValidationError(f"nonzero diagonal at {code} in {path}")
        bad = np.argwhere((arr < 0) | (arr > scale_max))
        if bad.size:
            i, j = bad[0]
            raise ValidationError(
                f"value {arr[i, j]} out of scale [0, {scale_max}] at "
                f"({codes[i]}, {codes[j]}) in {path}"
            )
        surveys.append(
            SurveyMatrix(respondent=path.stem, scores=arr, scale_max=scale_max)
        )
    return surveys


def _check_binary_cells(arr: np.ndarray, codes, path: Path) -> None:
    bad = np.argwhere((arr != 0) & (arr != 1))
    if bad.size:
        i, j = bad[0]
        raise ValidationError(
            f"entry {arr[i, j]} at ({codes[i]}, {codes[j]}) in {path} "
            f"must be 0 or 1"
        )


def load_adjacency(path: Path, catalog: FactorCatalog) -> AdjacencyMatrix:
    """Load a binary adjacency matrix aligned to the catalog."""
    path = Path(path)
    arr = _load_matrix(path, catalog)
    codes = catalog.codes
    _check_binary_cells(arr, codes, path)
    for i, code in enumerate(codes):
        if arr[i, i] != 0:
            raise ValidationError(f"nonzero diagonal at {code} in {path}")
    return AdjacencyMatrix(arr.astype(np.int64), threshold=None, codes=codes)


def load_reachability(path: Path, catalog: FactorCatalog) -> ReachabilityMatrix:
    """Load a reachability matrix; it must already be reflexive and
    transitive (files produced by this tool always are)."""
    path = Path(path)
    arr = _load_matrix(path, catalog)
    codes = catalog.codes
    _check_binary_cells(arr, codes, path)
    try:
        return ReachabilityMatrix(
            arr.astype(np.int64), exponent=None, codes=codes
        )
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_pipeline(config: AnalysisConfig) -> AnalysisReport:
    """Execute every stage the configured input mode supports."""
    with _stage("load factors"):
        catalog = load_factor_catalog(config.factors_path)
    inputs: dict = {
        "factors": {
            "path": str(config.factors_path),
            "sha256": _sha256(config.factors_path),
        }
    }
    direct = normalized = total = scores = adjacency = None
    resolved_threshold: float | None = None
    threshold_mode: str | None = None

    if config.input_mode == "surveys":
        with _stage("load surveys"):
            surveys = load_surveys(
                config.survey_paths, catalog, scale_max=config.scale_max
            )
        inputs["surveys"] = [
            {"path": str(p), "sha256": _sha256(p)} for p in config.survey_paths
        ]
        with _stage("aggregate"):
            direct = aggregate_surveys(surveys, catalog)
        with _stage("normalize"):
            normalized = normalize(direct)
        with _stage("total influence"):
            total = total_influence(normalized, tol=config.tol)
        with _stage("dematel scores"):
            scores = dematel_scores(total)
        if config.threshold == "auto":
            resolved_threshold = auto_threshold(total)
            threshold_mode = "auto"
        else:
            resolved_threshold = float(config.threshold)
            threshold_mode = "explicit"
        with _stage("derive adjacency"):
            adjacency = derive_adjacency(total, resolved_threshold)
    elif config.input_mode == "adjacency":
        with _stage("load adjacency"):
            adjacency = load_adjacency(config.adjacency_path, catalog)
        inputs["adjacency"] = {
            "path": str(config.adjacency_path),
            "sha256": _sha256(config.adjacency_path),
        }

    if adjacency is not None:
        with _stage("transitive closure"):
            reachability = transitive_closure(adjacency)
    else:
        with _stage("load reachability"):
            reachability = load_reachability(config.reachability_path, catalog)
        inputs["reachability"] = {
            "path": str(config.reachability_path),
            "sha256": _sha256(config.reachability_path),
        }

    with _stage("reachability sets"):
        sets = reachability_sets(reachability)
    with _stage("partition levels"):
        levels = partition_levels(sets)
    with _stage("skeleton"):
        graph = skeleton(reachability, levels)
    with _stage("regions"):
        region_partition = regions(
            adjacency if adjacency is not None else reachability
        )
    with _stage("micmac powers"):
        powers = micmac_powers(reachability)
    with _stage("thresholds"):
        cuts = thresholds(powers, config.micmac_mode)
    with _stage("classify"):
        classification = classify(powers, cuts)

    provenance = {
        "version": _package_version(),
        "config": {
            "input_mode": config.input_mode,
            "lambda": resolved_threshold,
            "lambda_mode": threshold_mode,
            "micmac_mode": cuts.mode,
            "driving_cut": cuts.driving_cut,
            "dependence_cut": cuts.dependence_cut,
            "tol": config.tol,
            "precision": config.precision,
            "scale_max": config.scale_max,
        },
        "inputs": inputs,
        "results": {
            "factor_count": len(catalog),
            "level_count": len(levels),
            "exponent": reachability.exponent,
            "normalizer": None if normalized is None else normalized.normalizer,
            "residual": None if total is None else total.residual,
        },
    }
    return AnalysisReport(
        catalog=catalog,
        reachability=reachability,
        sets=sets,
        levels=levels,
        skeleton=graph,
        regions=region_partition,
        micmac=classification,
        provenance=provenance,
        direct=direct,
        normalized=normalized,
        total=total,
        scores=scores,
        adjacency=adjacency,
    )


def _package_version() -> str:
    from dismic import __version__

    return __version__


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _matrix_rows(codes, entries, fmt):
    yield ["code", *codes]
    for code, row in zip(codes, entries):
        yield [code, *(fmt(value) for value in row)]


def _dot_quote(name: str) -> str:
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _hierarchy_dot(graph: SkeletonDigraph) -> str:
    lines = [
        "digraph hierarchy {",
        "  rankdir=BT;",
        "  node [shape=box];",
    ]
    for index, level_nodes in enumerate(graph.nodes, start=1):
        declarations = []
        for code in level_nodes:
            members = graph.groups.get(code)
            if members:
                label = _dot_quote(", ".join(members))
                declarations.append(f"{_dot_quote(code)} [label={label}];")
            else:
                declarations.append(f"{_dot_quote(code)};")
        body = " ".join(declarations)
        lines.append(f"  subgraph level_{index} {{ rank=same; {body} }}")
    for source, target in graph.edges:
        lines.append(f"  {_dot_quote(source)} -> {_dot_quote(target)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_report(report: AnalysisReport, config: AnalysisConfig) -> list[Path]:
    """Write every output file whose stage ran; returns the written paths."""
    if config.out_dir is None:
        raise ValidationError("no output directory configured")
    out = Path(config.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ValidationError(f"cannot create {out}: {exc}") from exc
    precision = config.precision

    def fmt(value) -> str:
        return f"{value:.{precision}f}"

    written: list[Path] = []

    def emit(name: str, writer) -> None:
        path = out / name
        try:
            writer(path)
        except OSError as exc:
            raise ValidationError(f"cannot write {path}: {exc}") from exc
        written.append(path)

    codes = report.catalog.codes
    if report.scores is not None:
        scores = report.scores
        score_rows = [
            ["code", "influence", "influenced", "centrality", "causality"]
        ] + [
            [
                code,
                fmt(scores.influence[i]),
                fmt(scores.influenced[i]),
                fmt(scores.centrality[i]),
                fmt(scores.causality[i]),
            ]
            for i, code in enumerate(codes)
        ]
        emit("dematel.csv", lambda p: _write_csv(p, score_rows))
        emit("dematel_scatter.csv", lambda p: _write_csv(p, score_rows))
    if report.total is not None:
        emit(
            "total_influence.csv",
            lambda p: _write_csv(
                p, _matrix_rows(codes, report.total.entries, fmt)
            ),
        )
    if report.adjacency is not None:
        emit(
            "adjacency.csv",
            lambda p: _write_csv(
                p, _matrix_rows(codes, report.adjacency.entries, str)
            ),
        )
    emit(
        "reachability.csv",
        lambda p: _write_csv(
            p, _matrix_rows(codes, report.reachability.entries, str)
        ),
    )
    levels_payload = {
        "levels": [list(level) for level in report.levels.levels],
        "regions": [list(region) for region in report.regions],
        "cycle_groups": [list(group) for group in report.skeleton.groups.values()],
    }
    emit(
        "levels.json",
        lambda p: _write_text(
            p, json.dumps(levels_payload, indent=2, sort_keys=True) + "\n"
        ),
    )
    micmac_rows = [["code", "driving", "dependence", "quadrant"]] + [
        [code, str(driving), str(dependence), label]
        for code, driving, dependence, label in report.micmac.rows()
    ]
    emit("micmac.csv", lambda p: _write_csv(p, micmac_rows))
    emit("micmac_scatter.csv", lambda p: _write_csv(p, micmac_rows))
    emit(
        "hierarchy.dot",
        lambda p: _write_text(p, _hierarchy_dot(report.skeleton)),
    )
    emit(
        "provenance.json",
        lambda p: _write_text(
            p, json.dumps(report.provenance, indent=2, sort_keys=True) + "\n"
        ),
    )
    return written


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors raise instead of exiting with 2;
    exit code 2 is reserved for numerical failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _add_input_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--factors", required=True, type=Path, help="factor catalog CSV"
    )
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--surveys",
        nargs="+",
        type=Path,
        metavar="CSV",
        help="one or more expert survey matrices",
    )
    group.add_argument(
        "--adjacency", type=Path, help="binary adjacency matrix CSV"
    )
    group.add_argument(
        "--reachability", type=Path, help="reachability matrix CSV"
    )
    parser.add_argument(
        "--scale-max",
        type=float,
        default=4.0,
        help="survey score scale upper bound (default 4)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dismic",
        description=(
            "Structural analysis of factor-influence systems: total "
            "influence scores, hierarchy levels, and driving/dependence "
            "quadrants."
        ),
    )
    commands = parser.add_subparsers(dest="command", required=True)
    analyze = commands.add_parser(
        "analyze", help="run the full pipeline and write the report files"
    )
    _add_input_arguments(analyze)
    analyze.add_argument(
        "--lambda",
        dest="threshold",
        default="auto",
        metavar="X|auto",
        help="influence threshold for the adjacency bridge (default auto = "
        "mean + std of the total influence matrix)",
    )
    analyze.add_argument(
        "--micmac-cuts",
        default="mean",
        metavar="mean|midpoint|D,R",
        help="axis cut rule for the quadrant classification (default mean)",
    )
    analyze.add_argument(
        "--tol", type=float, default=1e-9, help="numerical tolerance"
    )
    analyze.add_argument(
        "--precision",
        type=int,
        default=3,
        help="decimal places in emitted tables (default 3)",
    )
    analyze.add_argument(
        "--out", required=True, type=Path, help="output directory"
    )
    validate = commands.add_parser(
        "validate", help="run the loaders only and report what they find"
    )
    _add_input_arguments(validate)
    return parser


def _parse_micmac_cuts(text: str) -> str | tuple[float, float]:
    if text in ("mean", "midpoint"):
        return text
    parts = text.split(",")
    if len(parts) == 2:
        try:
            return float(parts[0]), float(parts[1])
        except ValueError:
            pass
    raise ValidationError(
        f"--micmac-cuts must be 'mean', 'midpoint', or '<d>,<r>', got {text!r}"
    )


def _parse_threshold(text) -> float | str:
    if isinstance(text, (int, float)):
        return float(text)
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise ValidationError(
            f"--lambda must be a number or 'auto', got {text!r}"
        ) from None


def _config_from_args(args: argparse.Namespace) -> AnalysisConfig:
    return AnalysisConfig(
        factors_path=args.factors,
        survey_paths=tuple(args.surveys or ()),
        adjacency_path=args.adjacency,
        reachability_path=args.reachability,
        threshold=_parse_threshold(getattr(args, "threshold", "auto")),
        micmac_mode=_parse_micmac_cuts(getattr(args, "micmac_cuts", "mean")),
        tol=getattr(args, "tol", 1e-9),
        precision=getattr(args, "precision", 3),
        scale_max=args.scale_max,
        out_dir=getattr(args, "out", None),
    )


def _run_validate(config: AnalysisConfig) -> int:
    catalog = load_factor_catalog(config.factors_path)
    print(f"ok: factors {config.factors_path} ({len(catalog)} factors)")
    if config.input_mode == "surveys":
        surveys = load_surveys(
            config.survey_paths, catalog, scale_max=config.scale_max
        )
        for path, survey in zip(config.survey_paths, surveys):
            print(f"ok: survey {path} (respondent {survey.respondent})")
    elif config.input_mode == "adjacency":
        load_adjacency(config.adjacency_path, catalog)
        print(f"ok: adjacency {config.adjacency_path}")
    else:
        load_reachability(config.reachability_path, catalog)
        print(f"ok: reachability {config.reachability_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config_from_args(args)
        if args.command == "validate":
            return _run_validate(config)
        report = run_pipeline(config)
        files = emit_report(report, config)
        print(f"wrote {len(files)} files to {config.out_dir}")
        return 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
