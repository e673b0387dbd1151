"""CSV and JSON artifact emission and ingestion.

All tables are plain CSV with units in the column names, decimal points
(never commas) and 12 significant digits so values survive a round trip
to 1e-9 relative. Output is bit-stable for identical input.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .errors import EmptyInput, IoError, ParseError, ValidationError, ZeroValidRows
from .geometry import WaferSite
from .stats import MeasurementRecord
from .wafer import CorrectionRow, CorrectionTable, SiteResult

PathLike = Union[str, Path]

SITE_MAP_HEADER = [
    "x_mm",
    "y_mm",
    "theta_bottom_deg",
    "theta_top_deg",
    "t_prime_nm",
    "w_bottom_nm",
    "w_top_nm",
    "area_um2",
    "bias_bottom_nm",
    "bias_top_nm",
]

CORRECTIONS_HEADER = [
    "x_mm",
    "y_mm",
    "drawn_w_bottom_nm",
    "drawn_w_top_nm",
    "predicted_area_um2",
    "residual_area_rel",
]

MEASUREMENT_HEADER = [
    "wafer_id",
    "chip_id",
    "x_mm",
    "y_mm",
    "area_class_um2",
    "run_id",
    "rn_ohm",
]
#: Optional trailing column carrying a reported critical-current density,
#: needed only for gap fitting.
MEASUREMENT_JC_COLUMN = "jc_ua_um2"


def fmt(value: float) -> str:
    """12 significant digits, plain decimal point."""
    return format(value, ".12g")


def write_rows(path: PathLike, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def export_site_map(results: Sequence[SiteResult], path: PathLike) -> None:
    """Write a simulated site map; refuses to create a file for an
    empty result list."""
    if not results:
        raise EmptyInput("no site results to export")
    rows = [
        [
            fmt(r.site.x_mm),
            fmt(r.site.y_mm),
            fmt(math.degrees(r.theta_bottom_rad)),
            fmt(math.degrees(r.theta_top_rad)),
            fmt(r.t_prime_nm),
            fmt(r.w_bottom_nm),
            fmt(r.w_top_nm),
            fmt(r.area_um2),
            fmt(r.bias_bottom_nm),
            fmt(r.bias_top_nm),
        ]
        for r in results
    ]
    write_rows(path, SITE_MAP_HEADER, rows)


@dataclass(frozen=True)
class SiteMapRow:
    """One re-imported site-map row (angles back in radians)."""

    x_mm: float
    y_mm: float
    theta_bottom_rad: float
    theta_top_rad: float
    t_prime_nm: float
    w_bottom_nm: float
    w_top_nm: float
    area_um2: float
    bias_bottom_nm: float
    bias_top_nm: float


def import_site_map(path: PathLike) -> list[SiteMapRow]:
    """Read back an exported site map."""
    rows = _read_csv(path, SITE_MAP_HEADER)
    out = []
    for lineno, rec in rows:
        try:
            vals = [float(v) for v in rec]
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        out.append(
            SiteMapRow(
                x_mm=vals[0],
                y_mm=vals[1],
                theta_bottom_rad=math.radians(vals[2]),
                theta_top_rad=math.radians(vals[3]),
                t_prime_nm=vals[4],
                w_bottom_nm=vals[5],
                w_top_nm=vals[6],
                area_um2=vals[7],
                bias_bottom_nm=vals[8],
                bias_top_nm=vals[9],
            )
        )
    if not out:
        raise ZeroValidRows(f"{path}: no data rows")
    return out


def export_corrections(table: CorrectionTable, path: PathLike) -> None:
    if not table.rows:
        raise EmptyInput("no correction rows to export")
    rows = [
        [
            fmt(r.site.x_mm),
            fmt(r.site.y_mm),
            fmt(r.drawn_w_bottom_nm),
            fmt(r.drawn_w_top_nm),
            fmt(r.predicted_area_um2),
            fmt(r.residual_area_rel),
        ]
        for r in table.rows
    ]
    write_rows(path, CORRECTIONS_HEADER, rows)


def import_corrections(path: PathLike) -> list[CorrectionRow]:
    rows = _read_csv(path, CORRECTIONS_HEADER)
    out = []
    for lineno, rec in rows:
        try:
            vals = [float(v) for v in rec]
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        out.append(
            CorrectionRow(
                site=WaferSite(vals[0], vals[1]),
                drawn_w_bottom_nm=vals[2],
                drawn_w_top_nm=vals[3],
                predicted_area_um2=vals[4],
                residual_area_rel=vals[5],
            )
        )
    if not out:
        raise ZeroValidRows(f"{path}: no data rows")
    return out


def _read_csv(
    path: PathLike, expected_header: Sequence[str], allow_extra: Sequence[str] = ()
) -> list[tuple[int, list[str]]]:
    """Rows with line numbers after a strict header check."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ParseError(f"{path}: empty file") from None
            base = list(expected_header)
            if header != base and header != base + list(allow_extra):
                raise ParseError(
                    f"{path}: unexpected header {header}; expected {base}"
                    + (f" optionally followed by {list(allow_extra)}" if allow_extra else "")
                )
            return [(i, row) for i, row in enumerate(reader, start=2) if row]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def import_measurements(
    path: PathLike,
) -> tuple[list[MeasurementRecord], list[str]]:
    """Parse a measurement CSV into records plus per-row diagnostics.

    Invalid rows are skipped and reported with their line numbers, never
    silently dropped; a file with zero valid rows raises ZeroValidRows.
    """
    raw = _read_csv(path, MEASUREMENT_HEADER, allow_extra=[MEASUREMENT_JC_COLUMN])
    records: list[MeasurementRecord] = []
    diagnostics: list[str] = []
    for lineno, row in raw:
        if len(row) not in (7, 8):
            diagnostics.append(f"line {lineno}: expected 7 or 8 columns, got {len(row)}")
            continue
        try:
            jc: Optional[float] = None
            if len(row) == 8 and row[7].strip() != "":
                jc = float(row[7])
            records.append(
                MeasurementRecord(
                    wafer_id=row[0],
                    chip_id=row[1],
                    x_mm=float(row[2]),
                    y_mm=float(row[3]),
                    area_class_um2=float(row[4]),
                    run_id=row[5],
                    rn_ohm=float(row[6]),
                    jc_ua_um2=jc,
                )
            )
        except (ValueError, ValidationError) as exc:
            diagnostics.append(f"line {lineno}: {exc}")
    if not records:
        raise ZeroValidRows(f"{path}: no valid measurement rows")
    return records, diagnostics


def export_measurements(records: Sequence[MeasurementRecord], path: PathLike) -> None:
    if not records:
        raise EmptyInput("no measurement records to export")
    with_jc = any(r.jc_ua_um2 is not None for r in records)
    header = MEASUREMENT_HEADER + ([MEASUREMENT_JC_COLUMN] if with_jc else [])
    rows = []
    for r in records:
        row = [
            r.wafer_id,
            r.chip_id,
            fmt(r.x_mm),
            fmt(r.y_mm),
            fmt(r.area_class_um2),
            r.run_id,
            fmt(r.rn_ohm),
        ]
        if with_jc:
            row.append("" if r.jc_ua_um2 is None else fmt(r.jc_ua_um2))
        rows.append(row)
    write_rows(path, header, rows)


def write_json_report(report: dict, path: PathLike) -> None:
    """Deterministic JSON: sorted keys, two-space indent, newline EOF."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
