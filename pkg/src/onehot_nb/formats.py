"""CSV and manifest file formats.

All CSVs are written with a header row, LF line endings and ``repr`` floats
(shortest text that parses back to the same double), and land on disk via
write-then-rename.

Params file
    ``kind,feature,class,v0,v1,...``.  One ``prior`` row (feature and class
    blank, ``v0..v{C-1}`` hold the prior), then one ``table`` row per
    (feature, class) with ``v0..v{K_f-1}``.  Unused trailing cells are blank.

Dataset file
    ``x0,...,x{F-1},label`` with 0-based integer value indices.

Encoded dataset file
    ``x{f}_{j}`` bit columns (feature ``f``, value ``j``) followed by ``label``.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import re
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import OneHotNBError
from .models import NBParams
from .simplex import make_prob_vector


class FormatError(OneHotNBError):
    """A file could not be parsed; the message names the offending field."""


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    atomic_write(path, render_csv(header, rows))


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    if not rows:
        raise FormatError(f"{path}: file is empty (no header row)")
    return [h.strip() for h in rows[0]], [r for r in rows[1:] if any(cell.strip() for cell in r)]


# --------------------------------------------------------------------------
# Params
# --------------------------------------------------------------------------


def params_to_csv(params: NBParams) -> str:
    width = max(params.n_classes, *params.n_values)
    header = ["kind", "feature", "class"] + [f"v{i}" for i in range(width)]

    def pad(values):
        cells = [fmt(float(v)) for v in values]
        return cells + [""] * (width - len(cells))

    rows = [["prior", "", ""] + pad(params.prior.values)]
    for f, table in enumerate(params.tables):
        for i, row in enumerate(table):
            rows.append(["table", str(f), str(i)] + pad(row))
    return render_csv(header, rows)


def _parse_float(cell: str, where: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise FormatError(f"{where}: {cell!r} is not a number") from None


def _parse_int(cell: str, where: str) -> int:
    try:
        return int(cell)
    except ValueError:
        raise FormatError(f"{where}: {cell!r} is not an integer") from None


def read_params(path: Path) -> NBParams:
    header, rows = read_csv(path)
    if header[:3] != ["kind", "feature", "class"]:
        raise FormatError(f"{path}: header must start with kind,feature,class")
    value_cols = header[3:]
    if value_cols != [f"v{i}" for i in range(len(value_cols))]:
        raise FormatError(f"{path}: value columns must be v0, v1, ...")
    prior = None
    entries: dict[tuple[int, int], list[float]] = {}
    for n, row in enumerate(rows, start=2):
        where = f"{path}:{n}"
        kind = row[0].strip()
        values = [_parse_float(c, f"{where} column {header[3 + i]}") for i, c in enumerate(row[3:]) if c.strip()]
        if kind == "prior":
            if prior is not None:
                raise FormatError(f"{where}: duplicate prior row")
            prior = values
        elif kind == "table":
            key = (_parse_int(row[1], f"{where} column feature"), _parse_int(row[2], f"{where} column class"))
            if key in entries:
                raise FormatError(f"{where}: duplicate table row for feature {key[0]}, class {key[1]}")
            entries[key] = values
        else:
            raise FormatError(f"{where} column kind: expected 'prior' or 'table', got {kind!r}")
    if prior is None:
        raise FormatError(f"{path}: missing prior row")
    try:
        prior_vec = make_prob_vector(prior)
    except OneHotNBError as exc:
        raise FormatError(f"{path} prior: {exc}") from None
    n_classes = len(prior_vec)
    n_features = 1 + max((f for f, _ in entries), default=-1)
    if n_features == 0:
        raise FormatError(f"{path}: no table rows")
    tables = []
    for f in range(n_features):
        rows_f = []
        for i in range(n_classes):
            if (f, i) not in entries:
                raise FormatError(f"{path}: missing table row for feature {f}, class {i}")
            rows_f.append(entries[(f, i)])
        if len({len(r) for r in rows_f}) != 1:
            raise FormatError(f"{path}: feature {f} rows have differing numbers of values")
        tables.append(np.array(rows_f))
    extra = [k for k in entries if k[0] < 0 or not 0 <= k[1] < n_classes]
    if extra:
        raise FormatError(f"{path}: table row for feature {extra[0][0]}, class {extra[0][1]} out of range")
    try:
        return NBParams(prior_vec, tuple(tables))
    except OneHotNBError as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_params(path: Path, params: NBParams) -> None:
    atomic_write(path, params_to_csv(params))


# --------------------------------------------------------------------------
# Datasets
# --------------------------------------------------------------------------

_ORDINAL_COL = re.compile(r"^x(\d+)$")
_BIT_COL = re.compile(r"^x(\d+)_(\d+)$")


def write_dataset(path: Path, obs: np.ndarray, labels: np.ndarray) -> None:
    header = [f"x{f}" for f in range(obs.shape[1])] + ["label"]
    write_csv(path, header, (list(map(int, o)) + [int(y)] for o, y in zip(obs, labels)))


def write_encoded_dataset(path: Path, bits: np.ndarray, labels: np.ndarray, n_values: Sequence[int]) -> None:
    header = [f"x{f}_{j}" for f, k in enumerate(n_values) for j in range(k)] + ["label"]
    write_csv(path, header, (list(map(int, b)) + [int(y)] for b, y in zip(bits, labels)))


def _int_matrix(path: Path, header: list[str], rows: list[list[str]]) -> np.ndarray:
    out = np.empty((len(rows), len(header)), dtype=np.int64)
    for n, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise FormatError(f"{path}:{n}: expected {len(header)} fields, got {len(row)}")
        for c, cell in enumerate(row):
            out[n - 2, c] = _parse_int(cell.strip(), f"{path}:{n} column {header[c]}")
    return out


def read_dataset(path: Path, label_column: str = "label"):
    """Read an ordinal or encoded dataset.

    Returns ``(kind, values, labels, group_sizes)`` where ``kind`` is
    ``"ordinal"`` or ``"encoded"``; ``group_sizes`` is ``None`` for ordinal
    data.
    """
    header, rows = read_csv(path)
    if label_column not in header:
        raise FormatError(f"{path}: missing {label_column!r} column")
    if not rows:
        raise FormatError(f"{path}: dataset has no rows")
    data = _int_matrix(path, header, rows)
    li = header.index(label_column)
    labels = data[:, li]
    cols = [h for i, h in enumerate(header) if i != li]
    values = np.delete(data, li, axis=1)
    if cols and all(_ORDINAL_COL.match(c) for c in cols):
        if [int(_ORDINAL_COL.match(c).group(1)) for c in cols] != list(range(len(cols))):
            raise FormatError(f"{path}: feature columns must be x0, x1, ... in order")
        return "ordinal", values, labels, None
    if cols and all(_BIT_COL.match(c) for c in cols):
        keys = [tuple(map(int, _BIT_COL.match(c).groups())) for c in cols]
        sizes: list[int] = []
        for f, j in keys:
            if f == len(sizes) and j == 0:
                sizes.append(1)
            elif f == len(sizes) - 1 and j == sizes[-1]:
                sizes[-1] += 1
            else:
                raise FormatError(f"{path}: bit column x{f}_{j} out of order")
        if np.any((values != 0) & (values != 1)):
            raise FormatError(f"{path}: bit columns must hold 0 or 1")
        return "encoded", values, labels, sizes
    raise FormatError(f"{path}: feature columns must be all x<f> or all x<f>_<j>")


def read_bit_matrix(path: Path, label_column: str = "label") -> tuple[list[str], np.ndarray]:
    """Every column except ``label_column`` as a 0/1 matrix, with its column names."""
    header, rows = read_csv(path)
    if not rows:
        raise FormatError(f"{path}: dataset has no rows")
    data = _int_matrix(path, header, rows)
    keep = [i for i, h in enumerate(header) if h != label_column]
    bits = data[:, keep]
    if np.any((bits != 0) & (bits != 1)):
        bad = next(header[keep[c]] for c in range(bits.shape[1]) if np.any((bits[:, c] != 0) & (bits[:, c] != 1)))
        raise FormatError(f"{path} column {bad}: entries must be 0 or 1")
    return [header[i] for i in keep], bits


# --------------------------------------------------------------------------
# Run manifest
# --------------------------------------------------------------------------


def sha256_of(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir: Path, command: str, argv: Sequence[str], config: dict, master_seed, files: Sequence[str]) -> Path:
    from . import __version__

    manifest = {
        "command": command,
        "argv": list(argv),
        "config": config,
        "master_seed": master_seed,
        "files": {name: sha256_of(out_dir / name) for name in files},
        "version": __version__,
    }
    path = Path(out_dir) / "manifest.json"
    atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(path: Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc.msg})") from exc
