"""On-disk formats: JSON problem descriptions, CSV/JSON trajectories.

Every reader validates against the documented schemas (see
``docs/formats.md``) and raises :class:`~delaymat.errors.SchemaError`
with a location — ``path:line:col`` for malformed JSON, ``path: /json/
pointer`` for a well-formed document with a bad shape — so the
command-line front end can print one anchored message and exit 2.

Numbers are written with :func:`repr`, which in Python produces the
shortest string that parses back to the identical float; trajectory
files therefore round-trip bit-identically (integer-valued data reads
back as exact integers).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .ppoly import MatrixPolynomial, PiecewiseMatrixPolynomial
from .system import DelaySystem, ForcingSpec, HistorySpec, TrajectoryTable

__all__ = [
    "load_json",
    "load_system",
    "load_history",
    "load_forcing",
    "ppoly_from_node",
    "ppoly_to_node",
    "qtable_to_node",
    "trajectory_to_node",
    "trajectory_from_node",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_json",
]


# ---------------------------------------------------------------------------
# Generic JSON plumbing
# ---------------------------------------------------------------------------


def load_json(path):
    """Parse a JSON file; malformed input fails with ``path:line:col``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read file: {exc}", location=str(path)) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"invalid JSON: {exc.msg}", location=f"{path}:{exc.lineno}:{exc.colno}"
        ) from exc


def write_json(node, path):
    Path(path).write_text(json.dumps(node, indent=2) + "\n")


def _fail(msg, path, ptr):
    raise SchemaError(msg, location=f"{path}: {ptr or '/'}")


def _get(doc, key, path, ptr):
    if not isinstance(doc, dict):
        _fail(f"expected a JSON object, got {type(doc).__name__}", path, ptr)
    if key not in doc:
        _fail(f"missing required key {key!r}", path, ptr)
    return doc[key]


def _as_number(node, path, ptr):
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        _fail(f"expected a number, got {type(node).__name__}", path, ptr)
    return float(node)


def _as_int(node, path, ptr):
    if isinstance(node, bool) or not isinstance(node, int):
        _fail(f"expected an integer, got {type(node).__name__}", path, ptr)
    return int(node)


def _as_matrix(node, d, path, ptr):
    if not isinstance(node, list) or len(node) != d:
        _fail(f"expected a {d}x{d} matrix (list of {d} rows)", path, ptr)
    out = np.empty((d, d))
    for i, row in enumerate(node):
        if not isinstance(row, list) or len(row) != d:
            _fail(f"expected a row of {d} numbers", path, f"{ptr}/{i}")
        for j, val in enumerate(row):
            out[i, j] = _as_number(val, path, f"{ptr}/{i}/{j}")
    if not np.all(np.isfinite(out)):
        _fail("matrix entries must be finite", path, ptr)
    return out


def _as_matrix_stack(node, d, path, ptr, what="matrices"):
    if not isinstance(node, list) or not node:
        _fail(f"expected a non-empty list of {what}", path, ptr)
    return np.stack(
        [_as_matrix(mat, d, path, f"{ptr}/{k}") for k, mat in enumerate(node)]
    )


# ---------------------------------------------------------------------------
# Problem data
# ---------------------------------------------------------------------------


def load_system(path):
    """Read a system file::

        { "d": 2, "A0": [[...]], "A1": [[...]],
          "kind": "continuous" | "discrete", "delay": number }
    """
    doc = load_json(path)
    d = _as_int(_get(doc, "d", path, ""), path, "/d")
    if d < 1:
        _fail(f"d must be >= 1, got {d}", path, "/d")
    kind = _get(doc, "kind", path, "")
    if kind not in ("continuous", "discrete"):
        _fail(f"kind must be 'continuous' or 'discrete', got {kind!r}", path, "/kind")
    delay = _as_number(_get(doc, "delay", path, ""), path, "/delay")
    a0 = _as_matrix(_get(doc, "A0", path, ""), d, path, "/A0")
    a1 = _as_matrix(_get(doc, "A1", path, ""), d, path, "/A1")
    try:
        return DelaySystem(a0=a0, a1=a1, delay=delay, kind=kind)
    except ValueError as exc:
        _fail(str(exc), path, "/delay")


def ppoly_from_node(node, d, path, ptr=""):
    """Read a piecewise-polynomial payload::

        { "kind": "ppoly", "breakpoints": [t0, ..., tK],
          "pieces": [ [ [[...]], ... ], ... ],   # pieces[k][j]: coeff of t**j
          "left_value": [[...]],                  # optional, default zero
          "right_extension": bool }               # optional, default false
    """
    bks = _get(node, "breakpoints", path, ptr)
    if not isinstance(bks, list) or len(bks) < 2:
        _fail("breakpoints must list at least two numbers", path, f"{ptr}/breakpoints")
    breakpoints = [
        _as_number(b, path, f"{ptr}/breakpoints/{k}") for k, b in enumerate(bks)
    ]
    pieces_node = _get(node, "pieces", path, ptr)
    if not isinstance(pieces_node, list) or len(pieces_node) != len(breakpoints) - 1:
        _fail(
            f"pieces must list {len(breakpoints) - 1} segment polynomials",
            path,
            f"{ptr}/pieces",
        )
    pieces = []
    for k, coeffs in enumerate(pieces_node):
        stack = _as_matrix_stack(
            coeffs, d, path, f"{ptr}/pieces/{k}", what="coefficient matrices"
        )
        pieces.append(MatrixPolynomial(stack))
    left_value = None
    if "left_value" in node:
        left_value = _as_matrix(node["left_value"], d, path, f"{ptr}/left_value")
    right_extension = node.get("right_extension", False)
    if not isinstance(right_extension, bool):
        _fail("right_extension must be a boolean", path, f"{ptr}/right_extension")
    try:
        return PiecewiseMatrixPolynomial(
            breakpoints, pieces, left_value=left_value, right_extension=right_extension
        )
    except ValueError as exc:
        _fail(str(exc), path, f"{ptr}/breakpoints")


def _payload_kind(doc, path):
    kind = _get(doc, "kind", path, "")
    if kind not in ("ppoly", "table"):
        _fail(f"kind must be 'ppoly' or 'table', got {kind!r}", path, "/kind")
    return kind


def load_history(path, sys):
    """Read a history file: a ``ppoly`` payload for continuous systems,
    a ``table`` payload ``{"kind": "table", "values": [...]}`` with
    ``m + 1`` matrices (``u = -m .. 0``) for discrete systems."""
    doc = load_json(path)
    kind = _payload_kind(doc, path)
    if sys.is_continuous:
        if kind != "ppoly":
            _fail("continuous history must be a 'ppoly' payload", path, "/kind")
        ppoly = ppoly_from_node(doc, sys.dim, path)
        try:
            return HistorySpec.from_ppoly(ppoly)
        except ValueError as exc:
            _fail(str(exc), path, "/pieces")
    if kind != "table":
        _fail("discrete history must be a 'table' payload", path, "/kind")
    values = _as_matrix_stack(
        _get(doc, "values", path, ""), sys.dim, path, "/values"
    )
    if values.shape[0] != sys.m + 1:
        _fail(
            f"discrete history needs m + 1 = {sys.m + 1} matrices "
            f"(u = -{sys.m} .. 0), got {values.shape[0]}",
            path,
            "/values",
        )
    return HistorySpec.from_values(values)


def load_forcing(path, sys):
    """Read a forcing file: a ``ppoly`` payload (continuous) or a
    ``table`` payload with matrices for ``u = 0, 1, ...`` (discrete)."""
    doc = load_json(path)
    kind = _payload_kind(doc, path)
    if sys.is_continuous:
        if kind != "ppoly":
            _fail("continuous forcing must be a 'ppoly' payload", path, "/kind")
        return ForcingSpec.from_ppoly(ppoly_from_node(doc, sys.dim, path))
    if kind != "table":
        _fail("discrete forcing must be a 'table' payload", path, "/kind")
    values = _as_matrix_stack(_get(doc, "values", path, ""), sys.dim, path, "/values")
    return ForcingSpec.from_values(values)


# ---------------------------------------------------------------------------
# Writers / dump payloads
# ---------------------------------------------------------------------------


def ppoly_to_node(ppoly):
    """Piecewise polynomial as a ``ppoly`` payload (inverse of
    :func:`ppoly_from_node`)."""
    return {
        "kind": "ppoly",
        "breakpoints": [float(b) for b in ppoly.breakpoints],
        "pieces": [p.coeffs.tolist() for p in ppoly.pieces],
        "left_value": ppoly.left_value.tolist(),
        "right_extension": ppoly.right_extension,
    }


def qtable_to_node(qtable):
    """Batched-coefficient table as ``{"kind": "qtable", "mats": [...]}``."""
    return {"kind": "qtable", "mats": [m.tolist() for m in qtable.mats]}


def trajectory_to_node(table):
    return {
        "kind": "trajectory",
        "trajectory_kind": table.kind,
        "times": [float(t) for t in table.times],
        "values": table.values.tolist(),
    }


def trajectory_from_node(doc, path="<node>"):
    if _get(doc, "kind", path, "") != "trajectory":
        _fail("expected kind 'trajectory'", path, "/kind")
    tkind = _get(doc, "trajectory_kind", path, "")
    if tkind not in ("continuous", "discrete"):
        _fail("trajectory_kind must be 'continuous' or 'discrete'", path, "/trajectory_kind")
    times_node = _get(doc, "times", path, "")
    if not isinstance(times_node, list) or not times_node:
        _fail("times must be a non-empty list", path, "/times")
    times = np.array(
        [_as_number(t, path, f"/times/{k}") for k, t in enumerate(times_node)]
    )
    values_node = _get(doc, "values", path, "")
    if not isinstance(values_node, list) or len(values_node) != times.size:
        _fail(f"values must list {times.size} matrices", path, "/values")
    first = values_node[0]
    if not isinstance(first, list) or not first:
        _fail("values entries must be matrices", path, "/values/0")
    d = len(first)
    values = _as_matrix_stack(values_node, d, path, "/values")
    return TrajectoryTable(kind=tkind, times=times, values=values)


def write_trajectory_csv(table, fh):
    """Write ``t, x11, x12, ..., xdd`` rows (row-major entries) to an
    open text file; floats use shortest round-trip formatting."""
    d = table.dim
    header = ["t"] + [f"x{i + 1}{j + 1}" for i in range(d) for j in range(d)]
    fh.write(",".join(header) + "\n")
    for t, mat in zip(table.times, table.values):
        row = [repr(float(t))] + [repr(float(v)) for v in mat.ravel()]
        fh.write(",".join(row) + "\n")


def read_trajectory_csv(path, kind=None):
    """Read a trajectory CSV back into a table (column count fixes
    the matrix dimension; ``kind`` defaults to discrete when every time
    is an exact integer)."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise SchemaError(f"cannot read file: {exc}", location=str(path)) from exc
    if not lines:
        raise SchemaError("empty CSV file", location=f"{path}:1:1")
    ncols = len(lines[0].split(","))
    d = round((ncols - 1) ** 0.5)
    if ncols < 2 or d * d != ncols - 1:
        raise SchemaError(
            f"need 1 + d*d columns, got {ncols}", location=f"{path}:1:1"
        )
    times = []
    values = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != ncols:
            raise SchemaError(
                f"expected {ncols} cells, got {len(cells)}",
                location=f"{path}:{lineno}:1",
            )
        try:
            nums = [float(c) for c in cells]
        except ValueError as exc:
            raise SchemaError(
                f"non-numeric cell: {exc}", location=f"{path}:{lineno}:1"
            ) from exc
        times.append(nums[0])
        values.append(np.array(nums[1:]).reshape(d, d))
    if not times:
        raise SchemaError("CSV has a header but no rows", location=f"{path}:2:1")
    times = np.array(times)
    if kind is None:
        kind = "discrete" if np.all(times == np.round(times)) else "continuous"
    return TrajectoryTable(kind=kind, times=times, values=np.stack(values))
