"""Read and write numeric matrices and result tables."""

import io
import logging
import re
from pathlib import Path
from typing import Optional, Union

import numpy as np
import numpy.typing as npt
import pandas as pd

from fishersep.errors import DegenerateDataError, InvalidInputError, ParseError
from fishersep.models import DataMatrix, Delimiter, MatrixFile, MutationSummary, PointsIn, SeparabilityProfile

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


def _read_cells(f: MatrixFile) -> pd.DataFrame:
    path = Path(f.path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not text.strip():
        raise ParseError(f"{path} is empty", line=1)
    try:
        return pd.read_csv(
            io.StringIO(text.rstrip() + "\n"),
            sep=f.delimiter.char,
            header=0 if f.header else None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
        )
    except pd.errors.ParserError as exc:
        found = re.search(r"line (\d+)", str(exc))
        line = int(found.group(1)) if found else None
        raise ParseError(f"ragged row in {f.delimiter.value}-separated file: {exc}", line=line) from exc
    except pd.errors.EmptyDataError as exc:
        raise ParseError(f"{path} has no data rows", line=2 if f.header else 1) from exc


def load_matrix(f: MatrixFile) -> DataMatrix:
    """Parse a delimited file into a points×features matrix.

    Every cell must be a finite number. Error line numbers are 1-based file lines.
    """
    cells = _read_cells(f)
    first_line = 2 if f.header else 1
    if cells.empty:
        raise ParseError("file has no data rows", line=first_line)

    values = np.empty(cells.shape, dtype=np.float64)
    for i, row in enumerate(cells.itertuples(index=False, name=None)):
        line = first_line + i
        if any(not isinstance(cell, str) or not cell.strip() for cell in row):
            raise ParseError(f"expected {cells.shape[1]} fields, found a short or empty one", line=line)
        try:
            values[i] = [float(cell) for cell in row]
        except ValueError as exc:
            raise ParseError(f"non-numeric cell ({exc})", line=line) from exc
        if not np.all(np.isfinite(values[i])):
            raise ParseError("NaN or infinite cell", line=line)

    if f.points_in is PointsIn.columns:
        values = values.T
    logger.info("loaded %s: %d points x %d features", f.path, *values.shape)
    return np.ascontiguousarray(values)


def save_matrix(x: npt.ArrayLike, path: PathLike, delimiter: Delimiter = Delimiter.comma) -> Path:
    """Write a matrix with 17 significant digits so it reads back bit-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(np.asarray(x, dtype=np.float64))
    frame.to_csv(path, sep=delimiter.char, header=False, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def normalize_with_summary(x: npt.ArrayLike, min_count: int = 5) -> tuple[DataMatrix, MutationSummary]:
    """Genes are points (rows), tumors are features (columns).

    Drops genes mutated in fewer than ``min_count`` tumors, then divides every tumor
    column by that tumor's total mutation count over the full input.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise InvalidInputError(f"expected a genes x tumors matrix, got {x.ndim} dimensions")
    if np.any(x < 0):
        raise InvalidInputError("mutation counts must be nonnegative")
    if not np.any(x):
        raise DegenerateDataError("mutation matrix is all zeros")

    totals = x.sum(axis=0)
    keep_genes = np.count_nonzero(x, axis=1) >= min_count
    keep_tumors = totals > 0
    if not keep_tumors.all():
        logger.warning("dropping %d tumor(s) without any mutation", int(np.count_nonzero(~keep_tumors)))
    if not keep_genes.any():
        raise DegenerateDataError(f"no gene is mutated in at least {min_count} tumors")

    normalized = x[keep_genes][:, keep_tumors] / totals[keep_tumors]
    summary = MutationSummary(
        min_count=min_count,
        genes_before=x.shape[0],
        genes_after=int(keep_genes.sum()),
        tumors_before=x.shape[1],
        tumors_after=int(keep_tumors.sum()),
    )
    logger.info("mutation filter kept %d of %d genes", summary.genes_after, summary.genes_before)
    return normalized, summary


def sweep_frame(profiles: list[SeparabilityProfile]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "alpha": [p.alpha for p in profiles],
            "mean_prob": [p.mean_prob for p in profiles],
            "dimension": [p.dimension for p in profiles],
        }
    )


def write_sweep_table(profiles: list[SeparabilityProfile], path: PathLike) -> Path:
    path = Path(path)
    sweep_frame(profiles).to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    return path


def write_point_table(profile: SeparabilityProfile, path: PathLike) -> Path:
    """One row per point: index and p_α at the profile's α."""
    path = Path(path)
    frame = pd.DataFrame({"point": np.arange(profile.point_probs.size), "p_alpha": profile.point_probs})
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_table(rows: list[dict], path: PathLike, columns: Optional[list[str]] = None) -> Path:
    path = Path(path)
    pd.DataFrame(rows, columns=columns).to_csv(
        path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n"
    )
    return path


def normalize_mutation_matrix(x: npt.ArrayLike, min_count: int = 5) -> DataMatrix:
    return normalize_with_summary(x, min_count)[0]
