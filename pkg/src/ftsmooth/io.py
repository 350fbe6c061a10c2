"""CSV/JSON serialization for series, estimates and result tables.

Floats are written with 17 significant digits, which round-trips 64-bit
values exactly. Files are written atomically (temp file + rename) and
carry a provenance comment (command line, seed, library version) so a
rerun with identical flags is byte-identical.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from . import __version__
from .series import FunctionalSeries, ValueGrid

__all__ = ["MalformedInput", "fmt", "write_text_atomic",
           "read_series_csv", "write_series_csv",
           "write_matrix_csv", "write_results_csv"]


class MalformedInput(ValueError):
    """Input file cannot be parsed into a series."""


def fmt(x: float) -> str:
    return f"{x:.17g}"


def provenance(command: str | None, seed=None) -> str:
    parts = [f"version {__version__}"]
    if command:
        parts.insert(0, command)
    if seed is not None:
        parts.append(f"seed {seed}")
    return "# " + " | ".join(parts) + "\n"


def write_text_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_series_csv(path: str, meta_path: str | None = None) -> FunctionalSeries:
    """Read a series file: rows are time points, first column the stamp.

    An optional header row `t,x0,x1,...` and comment lines are skipped.
    A sidecar JSON (default: <path>.meta.json) may supply d, m and norm.
    """
    rows = []
    header = None
    try:
        with open(path) as f:
            for line in f:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                cells = line.split(",")
                if cells[0] in ("t", "time"):
                    header = cells
                    continue
                try:
                    rows.append([float(c) for c in cells])
                except ValueError as exc:
                    raise MalformedInput(f"{path}: non-numeric cell: {exc}")
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}")
    if len(rows) < 2:
        raise MalformedInput(f"{path}: need at least 2 data rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows) or width < 2:
        raise MalformedInput(f"{path}: rows must all have >= 2 columns")
    arr = np.array(rows)
    if header is not None:
        if len(header) != width:
            raise MalformedInput(f"{path}: header/row width mismatch")
        keep = [j for j, name in enumerate(header)
                if j == 0 or name.startswith("x")]
        arr = arr[:, keep]
        width = len(keep)
    if not np.all(np.isfinite(arr)):
        raise MalformedInput(f"{path}: non-finite values")

    meta = {}
    if meta_path is None and os.path.exists(path + ".meta.json"):
        meta_path = path + ".meta.json"
    if meta_path is not None:
        try:
            with open(meta_path) as f:
                meta = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInput(f"cannot read sidecar {meta_path}: {exc}")
        unknown = set(meta) - {"d", "m", "norm"}
        if unknown:
            raise MalformedInput(f"{meta_path}: unknown keys {sorted(unknown)}")

    p = width - 1
    d = int(meta.get("d", 1))
    m = int(meta.get("m", p // max(d, 1)))
    norm = meta.get("norm", "l2")
    try:
        return FunctionalSeries(arr[:, 0], arr[:, 1:], ValueGrid(d, m), norm)
    except ValueError as exc:
        raise MalformedInput(f"{path}: {exc}")


def _csv(header: list[str], rows, command=None, seed=None) -> str:
    out = [provenance(command, seed), ",".join(header) + "\n"]
    for row in rows:
        out.append(",".join(fmt(c) if isinstance(c, float) else str(c)
                            for c in row) + "\n")
    return "".join(out)


def write_series_csv(path: str, times: np.ndarray, values: np.ndarray,
                     command=None, seed=None,
                     extra_cols: dict[str, np.ndarray] | None = None) -> None:
    values = np.atleast_2d(values)
    header = ["t"] + [f"x{j}" for j in range(values.shape[1])]
    extra_cols = extra_cols or {}
    header += list(extra_cols)
    rows = []
    for i, t in enumerate(times):
        row = [float(t)] + [float(v) for v in values[i]]
        row += [int(col[i]) if np.issubdtype(np.asarray(col).dtype, np.bool_)
                else float(col[i]) for col in extra_cols.values()]
        rows.append(row)
    write_text_atomic(path, _csv(header, rows, command, seed))


def write_matrix_csv(path: str, header: list[str], rows,
                     command=None, seed=None) -> None:
    write_text_atomic(path, _csv(header, rows, command, seed))


def write_results_csv(path: str, table, command=None, seed=None) -> None:
    # Wall-clock fit times are deliberately left out: simulate result
    # files must be byte-identical across reruns with the same seed.
    header = ["estimator", "target", "n", "m", "reps",
              "mean_mse", "sd_mse", "mean_mae", "sd_mae"]
    rows = [[r.estimator, r.target, r.n, r.m, r.reps,
             r.mean_mse, r.sd_mse, r.mean_mae, r.sd_mae]
            for r in table.rows]
    write_matrix_csv(path, header, rows, command, seed)


def write_timings_csv(path: str, table, command=None, seed=None) -> None:
    header = ["estimator", "n", "m", "reps", "mean_fit_ms"]
    rows = [[r.estimator, r.n, r.m, r.reps, r.mean_fit_ms]
            for r in table.rows if r.target == "mu"]
    write_matrix_csv(path, header, rows, command, seed)


def write_json_atomic(path: str, obj) -> None:
    write_text_atomic(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")
