"""Loading raw series from disk and writing reports atomically.

Floats are written with Python's shortest round-trip ``repr`` so that a
load -> write -> load cycle reproduces every value bit for bit.
"""

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptySeries, ParseError, ReportWriteError


@dataclass(frozen=True)
class TimeSeries:
    """An ordered sequence of finite measurements.

    Attributes
    ----------
    values : numpy.ndarray
        1-D float64 array, every entry finite.
    source : str
        Where the values came from (``path`` or ``path:column``).
    metadata : dict
        Free-form provenance, e.g. implant offsets of a synthetic series.
    """

    values: np.ndarray
    source: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("a time series must be one-dimensional")
        if values.size == 0:
            raise EmptySeries(f"no values in series {self.source!r}")
        if not np.all(np.isfinite(values)):
            raise ParseError("series contains NaN or infinite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size


def _parse_number(token, line):
    # float() also accepts "nan", "inf" and digit separators; refuse all three
    if "_" in token:
        raise ParseError(f"not a number: {token!r}", line)
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", line) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {token!r}", line)
    return value


def _load_plain(text):
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        for token in line.split():
            values.append(_parse_number(token, lineno))
    return values


def _load_csv(text, column, delimiter):
    values = []
    first_row = True
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split(delimiter)
        if column >= len(fields):
            raise ParseError(
                f"column {column} out of range for row with {len(fields)} fields", lineno
            )
        token = fields[column].strip()
        if first_row:
            first_row = False
            try:
                values.append(_parse_number(token, lineno))
            except ParseError:
                continue  # header row
            continue
        values.append(_parse_number(token, lineno))
    return values


def load_series(path, format="plain", column=None, delimiter=None):
    """Read a univariate series from a text file.

    Parameters
    ----------
    path : str or Path
        File to read.
    format : {"plain", "csv"}
        ``plain`` holds whitespace separated numbers, any number per line.
        ``csv`` holds delimited rows; a first row whose selected field is not
        numeric is treated as a header.
    column : int, optional
        Zero-based column for ``csv`` input. Defaults to 0.
    delimiter : str, optional
        Field separator for ``csv`` input. Defaults to ``","``.

    Returns
    -------
    TimeSeries
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")  # FileNotFoundError propagates
    if format == "plain":
        values = _load_plain(text)
        source = str(path)
    elif format == "csv":
        column = 0 if column is None else int(column)
        if column < 0:
            raise ValueError("column index must be non-negative")
        values = _load_csv(text, column, delimiter or ",")
        source = f"{path}:{column}"
    else:
        raise ValueError(f"unknown series format {format!r}")
    if not values:
        raise EmptySeries(f"no values parsed from {path}")
    return TimeSeries(np.array(values, dtype=np.float64), source=source)


def format_float(value):
    return repr(float(value))


def _atomic_write(path, text):
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    except OSError as exc:
        raise ReportWriteError(f"cannot write {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise ReportWriteError(f"cannot write {path}: {exc}") from exc


def write_series(series, path):
    """Write a series in ``plain`` format, one value per line."""
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series)
    _atomic_write(path, "".join(format_float(v) + "\n" for v in values))


def _report_dict(report):
    return report.to_dict() if hasattr(report, "to_dict") else dict(report)


def report_to_json(report):
    return json.dumps(_report_dict(report), indent=2, allow_nan=False) + "\n"


def motifs_csv_path(path):
    path = Path(path)
    return path.with_name(f"{path.stem}.motifs{path.suffix or '.csv'}")


def write_report(report, path, format="json"):
    """Write a discovery report.

    ``json`` writes a single document. ``csv`` writes a
    ``method,motif_index,frequency`` table to `path` and the motif values,
    one motif per row, to a sibling ``<stem>.motifs.csv`` file. Every file is
    written to a temporary name and renamed into place.
    """
    data = _report_dict(report)
    if format == "json":
        _atomic_write(path, report_to_json(data))
        return
    if format != "csv":
        raise ValueError(f"unknown report format {format!r}")

    table = io.StringIO()
    writer = csv.writer(table, lineterminator="\n")
    writer.writerow(["method", "motif_index", "frequency"])
    motifs = io.StringIO()
    mwriter = csv.writer(motifs, lineterminator="\n")
    length = data["config"].get("length", 0)
    mwriter.writerow(["method", "motif_index"] + [f"v{i}" for i in range(length)])
    for method in data["methods"]:
        for k, freq in enumerate(method["frequencies"]):
            writer.writerow([method["name"], k, freq])
        for k, motif in enumerate(method["motifs"]):
            mwriter.writerow([method["name"], k] + [format_float(v) for v in motif])
    _atomic_write(motifs_csv_path(path), motifs.getvalue())
    _atomic_write(path, table.getvalue())
