"""Ingestion, validation, description and standardization of the input table.

The on-disk layout is one row per region: a `region_id` column followed by one
numeric column per attribute. In memory the table is transposed to an N x R
matrix (attribute i, region j), which is the orientation every downstream
stage works in.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats as spstats

from .errors import (
    DegenerateDataError,
    ParseError,
    SchemaError,
    ZeroVarianceError,
)

MISSING_POLICIES = ("reject", "drop-region", "impute-median")


@dataclass(frozen=True)
class IngestionConfig:
    """Missing-value handling for :func:`load_table`.

    `reject` fails on the first unparseable cell, `drop-region` removes the
    affected region rows, `impute-median` fills cells with the attribute
    median over the remaining regions. Every intervention is recorded as a
    `<region_id>,<attribute>,<action>` provenance line.
    """

    missing_policy: str = "reject"

    def __post_init__(self):
        if self.missing_policy not in MISSING_POLICIES:
            raise SchemaError(
                f"unknown missing policy {self.missing_policy!r}; "
                f"expected one of {MISSING_POLICIES}"
            )


@dataclass(frozen=True)
class AttributeTable:
    """Validated N x R region-by-attribute observations."""

    attribute_names: tuple[str, ...]
    region_ids: tuple[str, ...]
    values: np.ndarray
    units: tuple[str, ...] | None = None
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        n, r = values.shape
        if n != len(self.attribute_names) or r != len(self.region_ids):
            raise SchemaError("value matrix shape does not match the name lists")
        if len(set(self.attribute_names)) != n:
            raise SchemaError("duplicate attribute names")
        if len(set(self.region_ids)) != r:
            raise SchemaError("duplicate region ids")
        if n < 2:
            raise DegenerateDataError(f"need at least 2 attributes, got {n}")
        if r < n + 1:
            raise DegenerateDataError(
                f"need at least N+1={n + 1} regions for {n} attributes, got {r}"
            )
        if not np.all(np.isfinite(values)):
            raise SchemaError("non-finite values after ingestion")
        values.setflags(write=False)

    @property
    def n_attributes(self) -> int:
        return self.values.shape[0]

    @property
    def n_regions(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class DescriptiveStats:
    """Per-attribute moments in raw attribute units."""

    attribute_names: tuple[str, ...]
    count: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    min: np.ndarray
    median: np.ndarray
    max: np.ndarray
    skewness: np.ndarray
    kurtosis: np.ndarray
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class StandardizedMatrix:
    """Row-wise z-scored attribute matrix (mean 0, sample std 1 per row)."""

    values: np.ndarray
    attribute_names: tuple[str, ...]
    region_ids: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        values.setflags(write=False)

    @property
    def n_attributes(self) -> int:
        return self.values.shape[0]

    @property
    def n_regions(self) -> int:
        return self.values.shape[1]


def _parse_cell(text: str) -> float | None:
    """A cell parses to a finite float or counts as missing."""
    try:
        value = float(text)
    except (TypeError, ValueError):
        return None
    return value if np.isfinite(value) else None


def load_table(path, schema: IngestionConfig = IngestionConfig()) -> AttributeTable:
    """Read and validate a region-by-attribute CSV.

    Leading lines starting with `#` are treated as comments (the synthetic
    data generator documents its planted structure this way). The first data
    row must be the header `region_id,<attr>,...`.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc

    rows = [
        row
        for row in csv.reader(raw.splitlines())
        if row and not row[0].lstrip().startswith("#")
    ]
    if not rows:
        raise ParseError(f"{path}: no rows found")
    header = [cell.strip() for cell in rows[0]]
    if header[0] != "region_id":
        raise SchemaError(f"{path}: first column must be 'region_id', got {header[0]!r}")
    attribute_names = tuple(header[1:])
    if not attribute_names:
        raise ParseError(f"{path}: no attribute columns")
    if len(set(attribute_names)) != len(attribute_names):
        dupes = sorted({a for a in attribute_names if attribute_names.count(a) > 1})
        raise SchemaError(f"{path}: duplicate attribute columns {dupes}")

    n = len(attribute_names)
    region_ids: list[str] = []
    cells: list[list[float | None]] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != n + 1:
            raise ParseError(
                f"{path}: line {lineno} has {len(row)} fields, expected {n + 1}"
            )
        rid = row[0].strip()
        if not rid:
            raise SchemaError(f"{path}: line {lineno} has an empty region_id")
        parsed = []
        for name, cell in zip(attribute_names, row[1:]):
            value = _parse_cell(cell)
            if value is None and schema.missing_policy == "reject":
                raise SchemaError(
                    f"{path}: non-numeric cell for region {rid!r}, "
                    f"attribute {name!r}: {cell!r}"
                )
            parsed.append(value)
        region_ids.append(rid)
        cells.append(parsed)

    if len(set(region_ids)) != len(region_ids):
        dupes = sorted({r for r in region_ids if region_ids.count(r) > 1})
        raise SchemaError(f"{path}: duplicate region ids {dupes}")

    provenance: list[str] = []
    if schema.missing_policy == "drop-region":
        kept_ids, kept_cells = [], []
        for rid, parsed in zip(region_ids, cells):
            missing = [name for name, v in zip(attribute_names, parsed) if v is None]
            if missing:
                provenance.extend(f"{rid},{name},drop-region" for name in missing)
            else:
                kept_ids.append(rid)
                kept_cells.append(parsed)
        region_ids, cells = kept_ids, kept_cells

    matrix = np.full((n, len(region_ids)), np.nan)
    for j, parsed in enumerate(cells):
        for i, value in enumerate(parsed):
            if value is not None:
                matrix[i, j] = value

    if schema.missing_policy == "impute-median":
        for i, name in enumerate(attribute_names):
            row = matrix[i]
            missing = np.isnan(row)
            if not missing.any():
                continue
            if missing.all():
                raise SchemaError(f"{path}: attribute {name!r} has no numeric values")
            fill = float(np.median(row[~missing]))
            for j in np.flatnonzero(missing):
                provenance.append(f"{region_ids[j]},{name},impute-median")
            row[missing] = fill

    if len(region_ids) < n + 1:
        raise DegenerateDataError(
            f"{path}: {len(region_ids)} regions remain after ingestion, "
            f"need at least {n + 1}"
        )
    return AttributeTable(
        attribute_names=attribute_names,
        region_ids=tuple(region_ids),
        values=matrix,
        provenance=tuple(provenance),
    )


def describe(table: AttributeTable) -> DescriptiveStats:
    """Per-attribute moments.

    Skewness is the adjusted Fisher-Pearson estimator and kurtosis the
    bias-adjusted excess form, so normal samples trend toward 0 for both.
    Constant attributes get NaN for both with a warning; the small-sample
    floors (3 observations for skewness, 4 for kurtosis) are handled the
    same way.
    """
    values = table.values
    n_regions = table.n_regions
    count = np.full(table.n_attributes, n_regions, dtype=int)
    mean = values.mean(axis=1)
    std = values.std(axis=1, ddof=1)
    skew = np.empty(table.n_attributes)
    kurt = np.empty(table.n_attributes)
    warnings: list[str] = []
    for i, name in enumerate(table.attribute_names):
        row = values[i]
        if std[i] == 0.0:
            skew[i] = np.nan
            kurt[i] = np.nan
            warnings.append(
                f"moment: attribute {name!r} is constant; skewness/kurtosis undefined"
            )
            continue
        if n_regions >= 3:
            skew[i] = spstats.skew(row, bias=False)
        else:
            skew[i] = np.nan
            warnings.append(f"moment: attribute {name!r} needs >=3 regions for skewness")
        if n_regions >= 4:
            kurt[i] = spstats.kurtosis(row, fisher=True, bias=False)
        else:
            kurt[i] = np.nan
            warnings.append(f"moment: attribute {name!r} needs >=4 regions for kurtosis")
    return DescriptiveStats(
        attribute_names=table.attribute_names,
        count=count,
        mean=mean,
        std=std,
        min=values.min(axis=1),
        median=np.median(values, axis=1),
        max=values.max(axis=1),
        skewness=skew,
        kurtosis=kurt,
        warnings=tuple(warnings),
    )


def standardize(table: AttributeTable) -> StandardizedMatrix:
    """Z-score each attribute row with the sample standard deviation (R-1)."""
    values = table.values
    std = values.std(axis=1, ddof=1)
    for i, s in enumerate(std):
        if s == 0.0:
            raise ZeroVarianceError(
                f"attribute {table.attribute_names[i]!r} has zero variance"
            )
    standardized = (values - values.mean(axis=1, keepdims=True)) / std[:, None]
    return StandardizedMatrix(
        values=standardized,
        attribute_names=table.attribute_names,
        region_ids=table.region_ids,
    )
