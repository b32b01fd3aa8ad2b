"""Raw-count table formats, the bundled dataset, and report serialization.

Two delimited wire formats carry coincidence counts, one row per source
setting:

* schema ``A1``: zero-angle acquisitions in the rectilinear and diagonal
  polarization bases (columns n_hh..n_vv and n_pp..n_mm);
* schema ``A2``: the four standard contexts at each setting's optimized
  analyzer angle (columns n_00..n_11, n_0a..n_1b, n_a0..n_b1, n_aa..n_bb).

``analyze`` reduces a pair of such tables to visibilities, the entanglement
witness, suppressed probabilities, the accidental floor, and the contrast
ratio.  Reports serialize to JSON ({"meta": ..., "rows": [...]}) or CSV.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .metrics import (
    ContextCounts,
    Estimate,
    ProbabilityEstimate,
    contrast_k,
    error_floor,
    inequality_margin,
    probability_estimate,
    record_from_counts,
    VisibilityRecord,
)
from .optics import Angle, MeasurementContext

A1_COLUMNS = ("n_hh", "n_hv", "n_vh", "n_vv", "n_pp", "n_pm", "n_mp", "n_mm")
A2_COLUMNS = (
    "n_00", "n_01", "n_10", "n_11",
    "n_0a", "n_0b", "n_1a", "n_1b",
    "n_a0", "n_a1", "n_b0", "n_b1",
    "n_aa", "n_ab", "n_ba", "n_bb",
)
SCHEMAS = {"A1": A1_COLUMNS, "A2": A2_COLUMNS}

_BUNDLED_NAMES = {"A1": "raw_counts_a1.csv", "A2": "raw_counts_a2.csv"}


class ParseError(ValueError):
    """A raw-count table does not conform to its schema."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}" if line else "header"
        if column:
            where += f", field {column}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class RawCountsRow:
    """One source setting's counts, keyed by schema column name."""

    phi_s_deg: float
    counts: dict

    def __getitem__(self, column: str) -> int:
        return self.counts[column]

    def total(self, columns) -> int:
        return sum(self.counts[c] for c in columns)


@dataclass(frozen=True)
class RawCountsFile:
    """A parsed raw-count table with a fixed schema."""

    schema: str
    rows: tuple

    def __post_init__(self):
        if self.schema not in SCHEMAS:
            raise ValueError(f"unknown schema {self.schema!r}")
        columns = set(SCHEMAS[self.schema])
        seen = set()
        for row in self.rows:
            if set(row.counts) != columns:
                raise ValueError("row columns do not match the schema")
            for name, value in row.counts.items():
                if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                    raise ValueError(f"count {name} must be a non-negative integer")
            if row.phi_s_deg in seen:
                raise ValueError(f"duplicate source setting {row.phi_s_deg}")
            seen.add(row.phi_s_deg)

    def phi_values(self) -> tuple:
        return tuple(row.phi_s_deg for row in self.rows)

    def row_for(self, phi_s_deg: float) -> RawCountsRow:
        for row in self.rows:
            if row.phi_s_deg == phi_s_deg:
                return row
        raise KeyError(f"no row for source setting {phi_s_deg}")


def parse_raw_counts(text: str, schema: str) -> RawCountsFile:
    """Parse a delimited raw-count table, validating against the schema."""
    if schema not in SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}")
    columns = SCHEMAS[schema]
    expected_header = ",".join(("phi_s_deg",) + columns)
    lines = [(i + 1, line) for i, line in enumerate(text.splitlines()) if line.strip()]
    if not lines:
        raise ParseError("missing header")
    header_no, header = lines[0]
    if header.strip() != expected_header:
        raise ParseError(f"expected header {expected_header!r}", line=header_no)
    rows = []
    seen = set()
    for line_no, line in lines[1:]:
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != len(columns) + 1:
            raise ParseError(
                f"expected {len(columns) + 1} fields, got {len(fields)}", line=line_no
            )
        try:
            phi = float(fields[0])
        except ValueError:
            raise ParseError(f"bad angle {fields[0]!r}", line=line_no, column=1) from None
        if not (phi == phi and abs(phi) != float("inf")):
            raise ParseError(f"bad angle {fields[0]!r}", line=line_no, column=1)
        if phi in seen:
            raise ParseError(f"duplicate source setting {fields[0]}", line=line_no, column=1)
        seen.add(phi)
        counts = {}
        for j, name in enumerate(columns):
            cell = fields[j + 1]
            try:
                value = int(cell)
            except ValueError:
                raise ParseError(
                    f"bad count {cell!r} for {name}", line=line_no, column=j + 2
                ) from None
            if value < 0:
                raise ParseError(
                    f"negative count {cell} for {name}", line=line_no, column=j + 2
                )
            counts[name] = value
        rows.append(RawCountsRow(phi, counts))
    return RawCountsFile(schema, tuple(rows))


def serialize_raw_counts(table: RawCountsFile) -> str:
    columns = SCHEMAS[table.schema]
    lines = [",".join(("phi_s_deg",) + columns)]
    for row in table.rows:
        cells = [format(row.phi_s_deg, ".10g")]
        cells += [str(row.counts[c]) for c in columns]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def load_raw_counts(path, schema: str) -> RawCountsFile:
    return parse_raw_counts(Path(path).read_text(encoding="utf-8"), schema)


def load_bundled() -> tuple:
    """The package's bundled measured dataset as (A1, A2) tables."""
    tables = []
    for schema in ("A1", "A2"):
        name = _BUNDLED_NAMES[schema]
        text = resources.files(__package__).joinpath("data").joinpath(name).read_text(
            encoding="utf-8"
        )
        tables.append(parse_raw_counts(text, schema))
    return tuple(tables)


@dataclass(frozen=True)
class AnalysisRow:
    """Reduced quantities for one source setting."""

    phi_s: Angle
    visibilities: VisibilityRecord
    floor: Estimate
    p_00: ProbabilityEstimate
    p_0a: ProbabilityEstimate
    p_a0: ProbabilityEstimate
    p_11: ProbabilityEstimate
    p_aa: ProbabilityEstimate
    k: Estimate

    COLUMNS = (
        "phi_s_deg",
        "c_hv", "c_hv_err", "c_pm", "c_pm_err", "v_hv", "v_hv_err",
        "w_e", "w_e_err", "purity", "purity_err", "floor", "floor_err",
        "p_00", "p_00_err", "p_0a", "p_0a_err", "p_a0", "p_a0_err",
        "p_11", "p_11_err", "p_aa", "p_aa_err", "k", "k_err", "margin",
    )

    def margin(self) -> float:
        return inequality_margin(
            self.p_aa.value, self.p_0a.value, self.p_a0.value, self.p_11.value
        )

    def to_dict(self) -> dict:
        vis = self.visibilities
        return {
            "phi_s_deg": self.phi_s.degrees,
            "c_hv": vis.c_hv.value, "c_hv_err": vis.c_hv.stderr,
            "c_pm": vis.c_pm.value, "c_pm_err": vis.c_pm.stderr,
            "v_hv": vis.v_hv.value, "v_hv_err": vis.v_hv.stderr,
            "w_e": vis.w_e.value, "w_e_err": vis.w_e.stderr,
            "purity": vis.purity_length.value, "purity_err": vis.purity_length.stderr,
            "floor": self.floor.value, "floor_err": self.floor.stderr,
            "p_00": self.p_00.value, "p_00_err": self.p_00.stderr,
            "p_0a": self.p_0a.value, "p_0a_err": self.p_0a.stderr,
            "p_a0": self.p_a0.value, "p_a0_err": self.p_a0.stderr,
            "p_11": self.p_11.value, "p_11_err": self.p_11.stderr,
            "p_aa": self.p_aa.value, "p_aa_err": self.p_aa.stderr,
            "k": self.k.value, "k_err": self.k.stderr,
            "margin": self.margin(),
        }


@dataclass(frozen=True)
class AnalysisReport:
    """Reduction of a raw-count table pair, one row per source setting."""

    rows: tuple
    meta: dict

    COLUMNS = AnalysisRow.COLUMNS

    def to_rows(self) -> list:
        return [row.to_dict() for row in self.rows]


def _context_counts(row: RawCountsRow, side1: str, side2: str, prefix_map: dict,
                    duration_s: float) -> ContextCounts:
    context = MeasurementContext(side1, side2, None)
    n = {pair: row.counts[prefix_map[pair]] for pair in prefix_map}
    return ContextCounts(context, n, duration_s)


def analyze(a1: RawCountsFile, a2: RawCountsFile, duration_s: float = 10.0) -> AnalysisReport:
    """Reduce a raw-count table pair to visibilities and probabilities.

    The two tables must cover exactly the same source settings.  Zero-angle
    counts (A1) give the visibility record and the accidental floor; the
    optimized-context counts (A2) give the constrained and target
    probabilities and the contrast ratio.
    """
    if a1.schema != "A1" or a2.schema != "A2":
        raise ValueError("analyze expects tables with schemas A1 and A2")
    if set(a1.phi_values()) != set(a2.phi_values()):
        raise ValueError("the two tables cover different source settings")
    rows = []
    for raw1 in a1.rows:
        raw2 = a2.row_for(raw1.phi_s_deg)
        record = record_from_counts(
            (raw1["n_hh"], raw1["n_hv"], raw1["n_vh"], raw1["n_vv"]),
            (raw1["n_pp"], raw1["n_pm"], raw1["n_mp"], raw1["n_mm"]),
        )
        floor = Estimate(error_floor(record.c_hv.value), record.c_hv.stderr / 4.0)
        ff = _context_counts(raw2, "F", "F", {
            ("0", "0"): "n_00", ("0", "1"): "n_01",
            ("1", "0"): "n_10", ("1", "1"): "n_11",
        }, duration_s)
        fw = _context_counts(raw2, "F", "W", {
            ("0", "a"): "n_0a", ("0", "b"): "n_0b",
            ("1", "a"): "n_1a", ("1", "b"): "n_1b",
        }, duration_s)
        wf = _context_counts(raw2, "W", "F", {
            ("a", "0"): "n_a0", ("a", "1"): "n_a1",
            ("b", "0"): "n_b0", ("b", "1"): "n_b1",
        }, duration_s)
        ww = _context_counts(raw2, "W", "W", {
            ("a", "a"): "n_aa", ("a", "b"): "n_ab",
            ("b", "a"): "n_ba", ("b", "b"): "n_bb",
        }, duration_s)
        p_00 = probability_estimate(ff, ("0", "0"))
        p_11 = probability_estimate(ff, ("1", "1"))
        p_0a = probability_estimate(fw, ("0", "a"))
        p_a0 = probability_estimate(wf, ("a", "0"))
        p_aa = probability_estimate(ww, ("a", "a"))
        k = contrast_k(p_aa, p_0a, p_a0, p_11)
        rows.append(AnalysisRow(
            Angle(raw1.phi_s_deg), record, floor,
            p_00, p_0a, p_a0, p_11, p_aa, k,
        ))
    meta = {
        "inputs": {"settings": len(rows), "schemas": ["A1", "A2"]},
        "duration_s": duration_s,
        "version": _version(),
    }
    return AnalysisReport(tuple(rows), meta)


def _format_cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def emit_report(report, fmt: str = "json") -> bytes:
    """Serialize a report (anything with meta, COLUMNS and to_rows())."""
    if fmt == "json":
        payload = {"meta": report.meta, "rows": report.to_rows()}
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(report.COLUMNS)
        for row in report.to_rows():
            writer.writerow([_format_cell(row[c]) for c in report.COLUMNS])
        return buffer.getvalue().encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def write_report(report, path, fmt: str | None = None) -> Path:
    """Write a report to disk, inferring the format from the suffix."""
    path = Path(path)
    if fmt is None:
        suffix = path.suffix.lower().lstrip(".")
        fmt = suffix if suffix in ("json", "csv") else "json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(emit_report(report, fmt))
    return path


def _version() -> str:
    from . import __version__

    return __version__
