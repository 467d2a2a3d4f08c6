"""CSV formats: point clouds, SPD stacks, distance matrices, depth
grids, and depth-feature exports.

Writers emit optional '#' comment lines, then a header row, then data.
Readers skip comments, accept a missing header on purely numeric files,
and raise :class:`CsvFormatError` with a line/column diagnostic on
malformed input. Numeric output uses repr round-trip precision.
"""

import csv
import io as _io
import numpy as np


class CsvFormatError(ValueError):
    """Malformed CSV input, with a 1-based line (and column) location."""

    def __init__(self, path, line, message, column=None):
        self.path = str(path)
        self.line = line
        self.column = column
        where = f"{self.path}:{line}"
        if column is not None:
            where += f":{column}"
        super().__init__(f"{where}: {message}")


def _fmt(v):
    return repr(float(v))


def _open_out(path):
    if hasattr(path, "write"):
        return path, False
    return open(path, "w", newline=""), True


def _write_rows(path, comments, header, rows):
    fh, owned = _open_out(path)
    try:
        for c in comments:
            fh.write(f"# {c}\n")
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        w.writerows(rows)
    finally:
        if owned:
            fh.close()


def _scan(path):
    """Yield (line_number, fields) for non-comment rows; collect comments."""
    comments = []
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for fields in reader:
            if not fields or (len(fields) == 1 and not fields[0].strip()):
                continue
            if fields[0].lstrip().startswith("#"):
                comments.append(",".join(fields).lstrip().lstrip("#").strip())
                continue
            rows.append((reader.line_num, [f.strip() for f in fields]))
    return comments, rows


def _is_float(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


def _parse_float(path, line, col, tok):
    try:
        return float(tok)
    except ValueError:
        raise CsvFormatError(path, line, f"expected a number, got {tok!r}", col + 1)


def _maybe_int_labels(labels):
    try:
        return np.array([int(v) for v in labels])
    except ValueError:
        return np.array(labels)


def _split_header(rows, path):
    """Detect an optional header row; returns (header or None, data rows)."""
    if not rows:
        return None, rows
    line, fields = rows[0]
    if all(_is_float(f) for f in fields):
        return None, rows
    return fields, rows[1:]


def _parse_table(path, rows, expected_width=None):
    data = []
    for line, fields in rows:
        if expected_width is not None and len(fields) != expected_width:
            raise CsvFormatError(
                path, line,
                f"expected {expected_width} fields, got {len(fields)}",
            )
        data.append([_parse_float(path, line, c, tok) for c, tok in enumerate(fields)])
    return data


# --- point clouds -----------------------------------------------------------

def write_points_csv(path, points, labels=None, comments=()):
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    header = [f"x{i}" for i in range(points.shape[1])]
    rows = [[_fmt(v) for v in row] for row in points]
    if labels is not None:
        header.append("label")
        for row, lab in zip(rows, labels):
            row.append(str(lab))
    _write_rows(path, comments, header, rows)


def read_points_csv(path):
    """Read a point cloud; returns (points, labels or None)."""
    _, rows = _scan(path)
    if not rows:
        raise CsvFormatError(path, 1, "no data rows")
    header, data_rows = _split_header(rows, path)
    labeled = header is not None and header[-1].lower() == "label"
    width = len(rows[0][1]) if header is None else len(header)
    labels = None
    if labeled:
        labels = _maybe_int_labels([fields[-1] for _, fields in data_rows])
        data_rows = [(line, fields[:-1]) for line, fields in data_rows]
        width -= 1
    if not data_rows:
        raise CsvFormatError(path, rows[0][0], "header but no data rows")
    pts = np.array(_parse_table(path, data_rows, width))
    return pts, labels


# --- SPD stacks ---------------------------------------------------------------

def write_spd_csv(path, mats, labels=None, comments=()):
    mats = np.asarray(mats, dtype=np.float64)
    k = mats.shape[1]
    all_comments = [f"spd k={k}", *comments]
    header = [f"e{i}{j}" for i in range(k) for j in range(k)]
    rows = [[_fmt(v) for v in m.ravel()] for m in mats]
    if labels is not None:
        header.append("label")
        for row, lab in zip(rows, labels):
            row.append(str(lab))
    _write_rows(path, all_comments, header, rows)


def read_spd_csv(path):
    """Read an SPD stack; k comes from the '# spd k=<k>' comment."""
    comments, rows = _scan(path)
    k = None
    for c in comments:
        if c.startswith("spd"):
            for part in c.split():
                if part.startswith("k="):
                    k = int(part[2:])
    if k is None:
        raise CsvFormatError(path, 1, "missing '# spd k=<k>' header comment")
    header, data_rows = _split_header(rows, path)
    labeled = header is not None and header[-1].lower() == "label"
    labels = None
    if labeled:
        labels = _maybe_int_labels([fields[-1] for _, fields in data_rows])
        data_rows = [(line, fields[:-1]) for line, fields in data_rows]
    if not data_rows:
        raise CsvFormatError(path, 1, "no data rows")
    flat = np.array(_parse_table(path, data_rows, k * k))
    return flat.reshape(-1, k, k), labels


# --- distance matrices --------------------------------------------------------

def write_distance_matrix_csv(path, matrix):
    matrix = np.asarray(matrix, dtype=np.float64)
    _write_rows(path, (), None, [[_fmt(v) for v in row] for row in matrix])


def read_distance_matrix_csv(path):
    """Read an n x n matrix of reals (no header)."""
    _, rows = _scan(path)
    if not rows:
        raise CsvFormatError(path, 1, "no data rows")
    n = len(rows)
    data = _parse_table(path, rows, None)
    for (line, fields), row in zip(rows, data):
        if len(row) != n:
            raise CsvFormatError(
                path, line, f"matrix must be square: {n} rows but {len(row)} columns"
            )
    return np.array(data)


# --- depth outputs --------------------------------------------------------------

def write_depth_csv(path, values, ties, comments=()):
    rows = [[_fmt(v), str(int(t))] for v, t in zip(values, ties)]
    _write_rows(path, comments, ["depth", "ties"], rows)


def write_levelset_csv(path, grid, comments=()):
    rows = [[_fmt(x), _fmt(y), _fmt(v)] for x, y, v in grid.rows()]
    _write_rows(path, comments, ["x", "y", "depth"], rows)


# --- depth features ---------------------------------------------------------------

def write_features_csv(path, features, labels=None, comments=()):
    header = list(features.column_names())
    rows = [[_fmt(v) for v in row] for row in features.matrix]
    if labels is not None:
        header.append("label")
        for row, lab in zip(rows, labels):
            row.append(str(lab))
    _write_rows(path, comments, header, rows)


def read_features_csv(path):
    """Read a feature export; returns (matrix, column names, labels or None)."""
    _, rows = _scan(path)
    if not rows:
        raise CsvFormatError(path, 1, "no data rows")
    header, data_rows = _split_header(rows, path)
    if header is None:
        raise CsvFormatError(path, rows[0][0], "feature files require a header row")
    labeled = header[-1].lower() == "label"
    labels = None
    names = header
    if labeled:
        names = header[:-1]
        labels = _maybe_int_labels([fields[-1] for _, fields in data_rows])
        data_rows = [(line, fields[:-1]) for line, fields in data_rows]
    matrix = np.array(_parse_table(path, data_rows, len(names)))
    matrix = matrix.reshape(-1, len(names))
    return matrix, names, labels


def features_to_string(features, labels=None):
    buf = _io.StringIO()
    write_features_csv(buf, features, labels)
    return buf.getvalue()
