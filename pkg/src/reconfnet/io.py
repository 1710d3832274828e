"""CSV and JSON serialization for traffic, topologies, routings, networks and reports."""

import csv
import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from .classes import Network, Routing, SolveReport, Topology, TrafficMatrix
from .exceptions import FormatError, ValidationError

MATRIX_HEADER = ["i", "j", "value"]
ROUTING_HEADER = ["i", "j", "k", "value"]


def _write_rows(path: str | Path, header: list[str], rows: Iterable[tuple]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)


def _read_rows(path: str | Path, header: list[str]):
    """Yield (line number, indices, value) for every data row."""
    width = len(header)
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        first = next(reader, None)
        if first is None or [c.strip() for c in first] != header:
            raise FormatError(402, path=path, expected=",".join(header))
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != width:
                raise FormatError(
                    path=path, line=line, reason=f"expected {width} fields, got {len(row)}"
                )
            try:
                indices = tuple(int(c) for c in row[:-1])
                value = float(row[-1])
            except ValueError:
                raise FormatError(path=path, line=line, reason="not a number")
            if any(x < 0 for x in indices):
                raise FormatError(path=path, line=line, reason="negative index")
            if not math.isfinite(value) or value < 0:
                raise FormatError(path=path, line=line, reason="negative or non-finite value")
            yield line, indices, value


def _load_dense(path, header: list[str], n_pods: int | None) -> np.ndarray:
    rows = list(_read_rows(path, header))
    if n_pods is None:
        if not rows:
            raise FormatError(
                path=path, line=1, reason="cannot infer the PoD count from an empty file"
            )
        n_pods = max(max(idx) for _, idx, _ in rows) + 1
    dims = len(header) - 1
    dense = np.zeros((n_pods,) * dims)
    seen = set()
    for line, idx, value in rows:
        if max(idx) >= n_pods:
            raise FormatError(
                path=path, line=line, reason=f"index out of range for {n_pods} PoDs"
            )
        if idx in seen:
            raise FormatError(path=path, line=line, reason="duplicate entry")
        # relay rows are checked by Routing itself
        if dims == 2 and idx[0] == idx[1] and value != 0:
            raise ValidationError(203, what=str(path), pod=idx[0])
        seen.add(idx)
        dense[idx] = value
    return dense


def _matrix_rows(matrix: np.ndarray, fmt) -> list[tuple]:
    n = matrix.shape[0]
    rows = [(int(i), int(j), fmt(matrix[i, j])) for i, j in np.argwhere(matrix != 0)]
    if not any(n - 1 in (i, j) for i, j, _ in rows):
        rows.append((n - 1, 0, fmt(0)))  # pins the PoD count
    return rows


def save_traffic_csv(matrix: TrafficMatrix, path: str | Path):
    _write_rows(path, MATRIX_HEADER, _matrix_rows(matrix.demand, lambda v: repr(float(v))))


def load_traffic_csv(path: str | Path, n_pods: int | None = None) -> TrafficMatrix:
    return TrafficMatrix(_load_dense(path, MATRIX_HEADER, n_pods))


def save_topology_csv(topo: Topology, path: str | Path):
    _write_rows(path, MATRIX_HEADER, _matrix_rows(topo.links, int))


def load_topology_csv(path: str | Path, n_pods: int | None = None) -> Topology:
    return Topology(_load_dense(path, MATRIX_HEADER, n_pods))


def save_routing_csv(routing: Routing, path: str | Path):
    splits = routing.splits
    n = routing.n_pods
    rows = [
        (int(i), int(j), int(k), repr(float(splits[i, j, k])))
        for i, j, k in np.argwhere(splits != 0)
    ]
    if not any(n - 1 in r[:3] for r in rows):
        rows.append((n - 1, 0, 0, "0.0"))
    _write_rows(path, ROUTING_HEADER, rows)


def load_routing_csv(path: str | Path, n_pods: int | None = None) -> Routing:
    return Routing(_load_dense(path, ROUTING_HEADER, n_pods))


def read_json(path: str | Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FormatError(404, path=path, reason=str(e))


def _write_json(path: str | Path, data: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(data + "\n", encoding="utf-8")


def save_network_json(net: Network, path: str | Path):
    _write_json(path, json.dumps(net.to_dict(), indent=2))


def load_network_json(path: str | Path) -> Network:
    data = read_json(path)
    try:
        return Network.from_dict(data)
    except (KeyError, TypeError) as e:
        raise FormatError(404, path=path, reason=f"missing or invalid field {e}")


def save_report_json(report: SolveReport, path: str | Path):
    _write_json(path, report.to_json())


def load_report_json(path: str | Path) -> SolveReport:
    data = read_json(path)
    try:
        return SolveReport.from_dict(data)
    except TypeError as e:
        raise FormatError(404, path=path, reason=str(e))
