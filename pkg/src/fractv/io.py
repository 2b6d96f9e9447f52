"""File formats: signal/coordinate/edge/coefficient CSVs, reports and manifests."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError, ParseError
from .graph import Graph
from .pipeline import DenoiseReport, ExperimentConfig
from .transforms import TimeVertexSignal
from .wiener import FilterCoefficients


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_float(cell: str, row: int, col: int, path) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise ParseError(f"{path}: row {row}, column {col}: not a number: {cell!r}") from None
    if not math.isfinite(v):
        raise ParseError(f"{path}: row {row}, column {col}: non-finite value {cell!r}")
    return v


def load_signal(path) -> TimeVertexSignal:
    """Read an N x T signal: one row per vertex, comma-separated, no header."""
    path = Path(path)
    rows = []
    with path.open(newline="") as fh:
        for i, rec in enumerate(csv.reader(fh), start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            rows.append([_parse_float(c, i, j, path) for j, c in enumerate(rec, start=1)])
            if len(rows[-1]) != len(rows[0]):
                raise ParseError(f"{path}: row {i} has {len(rows[-1])} values, expected {len(rows[0])}")
    if not rows:
        raise ParseError(f"{path}: file is empty")
    return TimeVertexSignal(np.array(rows, dtype=np.float64))


def write_signal(path, X) -> None:
    X = np.asarray(X, dtype=np.float64)
    with Path(path).open("w", newline="") as fh:
        for row in X:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def load_coordinates(path) -> np.ndarray:
    """Read ``id,lat,lon`` rows (ids 0..N-1 in order) into an (N, 2) array."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: file is empty")
        if [h.strip() for h in header] != ["id", "lat", "lon"]:
            raise ParseError(f"{path}: expected header 'id,lat,lon', got {','.join(header)!r}")
        out = []
        for i, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 3:
                raise ParseError(f"{path}: row {i} has {len(rec)} fields, expected 3")
            if rec[0].strip() != str(len(out)):
                raise ParseError(f"{path}: row {i}: expected id {len(out)}, got {rec[0]!r}")
            out.append([_parse_float(rec[1], i, 2, path), _parse_float(rec[2], i, 3, path)])
    if not out:
        raise ParseError(f"{path}: no coordinates")
    return np.array(out)


def write_coordinates(path, coords) -> None:
    with Path(path).open("w", newline="") as fh:
        fh.write("id,lat,lon\n")
        for i, (lat, lon) in enumerate(np.asarray(coords)):
            fh.write(f"{i},{fmt(lat)},{fmt(lon)}\n")


def write_edge_list(path, g: Graph) -> None:
    with Path(path).open("w", newline="") as fh:
        fh.write("src,dst,weight\n")
        for s, d, w in g.edges():
            fh.write(f"{s},{d},{fmt(w)}\n")


def load_edge_list(path, n: int) -> Graph:
    path = Path(path)
    A = np.zeros((n, n))
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["src", "dst", "weight"]:
            raise ParseError(f"{path}: expected header 'src,dst,weight'")
        for i, rec in enumerate(reader, start=2):
            if not rec:
                continue
            try:
                s, d = int(rec[0]), int(rec[1])
            except (ValueError, IndexError):
                raise ParseError(f"{path}: row {i}: bad vertex ids") from None
            w = _parse_float(rec[2], i, 3, path)
            A[s, d] = A[d, s] = w
    return Graph(A)


def write_coefficients(path, c: FilterCoefficients) -> None:
    with Path(path).open("w", newline="") as fh:
        fh.write("p,q,re,im\n")
        for p in range(c.P):
            for q in range(c.Q):
                v = complex(c[p, q])
                fh.write(f"{p},{q},{fmt(v.real)},{fmt(v.imag)}\n")


def load_coefficients(path) -> FilterCoefficients:
    path = Path(path)
    entries = {}
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["p", "q", "re", "im"]:
            raise ParseError(f"{path}: expected header 'p,q,re,im'")
        for i, rec in enumerate(reader, start=2):
            entries[int(rec["p"]), int(rec["q"])] = complex(_parse_float(rec["re"], i, 3, path),
                                                           _parse_float(rec["im"], i, 4, path))
    if not entries:
        raise ParseError(f"{path}: no coefficients")
    P = max(p for p, _ in entries) + 1
    Q = max(q for _, q in entries) + 1
    grid = np.zeros((Q, P), dtype=np.complex128)
    for (p, q), v in entries.items():
        grid[q, p] = v
    return FilterCoefficients(grid)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidParameterError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidParameterError(f"{path}: config must be a JSON object")
    try:
        return ExperimentConfig.from_dict(data)
    except TypeError as exc:
        raise InvalidParameterError(f"{path}: {exc}") from None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_report(path, report: DenoiseReport) -> None:
    Path(path).write_text(dumps(report.to_dict()))


def write_surface(path, report: DenoiseReport) -> None:
    """``a,b,<metric>,is_max`` rows; the metric is snr_db or residual."""
    key = "snr_db" if report.ranking == "snr" else "residual"
    best = tuple(report.best_orders)
    with Path(path).open("w", newline="") as fh:
        fh.write(f"a,b,{key},is_max\n")
        for a, b, v in report.surface:
            fh.write(f"{fmt(a)},{fmt(b)},{fmt(v)},{int((a, b) == best)}\n")


def read_surface(path):
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        key = reader.fieldnames[2]
        return [(float(r["a"]), float(r["b"]), float(r[key]), int(r["is_max"])) for r in reader]


def sha256(path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    """Everything needed to re-run a command and reproduce its numeric outputs."""

    command: list
    config: dict
    inputs: dict
    seed: int | None
    version: str
    created_at: str = ""
    environment: dict = field(default_factory=dict)

    @classmethod
    def create(cls, command, config: dict, inputs: dict, seed=None) -> "RunManifest":
        from . import __version__, kernels
        hashes = {name: {"path": str(p), "sha256": sha256(p)} for name, p in inputs.items() if p is not None}
        env = {"python": platform.python_version(), "numpy": np.__version__, "kernels": kernels.BACKEND}
        return cls(list(command), config, hashes, seed, __version__,
                   datetime.now(timezone.utc).isoformat(timespec="seconds"), env)

    def write(self, path) -> None:
        Path(path).write_text(dumps(asdict(self)))
