"""CSV emission and parsing.

Files are UTF-8 with LF line endings.  Optional ``#`` comment lines at the
top echo the resolved configuration; then comes one header line and the
records.  Floats are written with 17 significant digits so a parse gives
back the identical double.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import FilmsimError

GROWTH_COLUMNS = ("k", "re_lambda_1", "re_lambda_2", "re_lambda_3",
                  "im_lambda_1", "im_lambda_2", "im_lambda_3")
SPECTRUM_COLUMNS = ("re_lambda", "im_lambda", "class")
FULL_SNAPSHOT_COLUMNS = ("t", "x", "field_type", "value")
PATCH_SNAPSHOT_COLUMNS = ("t", "patch", "x", "field", "value")
COMPARISON_COLUMNS = ("t", "linf_h", "rel_l2_h", "max_dev_full", "max_dev_gaptooth",
                      "mass_drift_full")


class CsvError(FilmsimError, OSError):
    """An output or input file could not be written or read."""


def format_field(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    text = str(value)
    if any(ch in text for ch in ",\n\r\""):
        raise ValueError(f"field {text!r} contains a delimiter")
    return text


def emit_csv(records, path, columns, comments=None) -> Path:
    """Write ``records`` (sequences in ``columns`` order) to ``path``.

    Parameters
    ----------
    records : iterable of sequences
        One row per record.
    path : str or Path
        Output file.
    columns : sequence of str
        Header names; every record must have the same length.
    comments : iterable of str, optional
        Lines written first, each prefixed with ``# ``.
    """
    path = Path(path)
    lines = [f"# {c}" for c in (comments or ())]
    lines.append(",".join(columns))
    for rec in records:
        rec = tuple(rec)
        if len(rec) != len(columns):
            raise ValueError(f"record has {len(rec)} fields, expected {len(columns)}")
        lines.append(",".join(format_field(v) for v in rec))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise CsvError(f"cannot write {path}: {exc}") from exc
    return path


def _parse_field(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path):
    """Parse a file written by :func:`emit_csv`.

    Returns
    -------
    columns : tuple of str
    rows : list of tuple
        Numeric fields come back as floats, others as strings.
    comments : list of str
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CsvError(f"cannot read {path}: {exc}") from exc
    comments, body = [], []
    for line in text.split("\n"):
        if not line:
            continue
        if line.startswith("#") and not body:
            comments.append(line[1:].strip())
        else:
            body.append(line)
    if not body:
        raise CsvError(f"{path} has no header line")
    columns = tuple(body[0].split(","))
    rows = [tuple(_parse_field(f) for f in line.split(",")) for line in body[1:]]
    return columns, rows, comments


def growth_records(rates):
    """Rows of the growth-rate table from a list of :class:`GrowthRates`."""
    for g in rates:
        lam = np.asarray(g.lambdas)
        yield (g.k, *lam.real, *lam.imag)


def spectrum_records(spectrum):
    for lam, cls in zip(spectrum.eigenvalues, spectrum.classes):
        yield (lam.real, lam.imag, cls)
