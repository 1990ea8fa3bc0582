"""CSV, edge-list and JSON readers and writers.

Floats are written with ``repr`` (shortest round-trip form) so every file
reads back to the identical value; infinities are written as ``inf``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .embeddings import Graph
from .errors import ConfigError, ToporegError
from .optimizer import LossTrace
from .persistence import Persistence, PersistenceDiagram, PersistencePair
from .topoloss import TopoLossSpec


def fmt(x) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _write(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read(path, header=None) -> Tuple[List[str], List[List[str]]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as err:
        raise ToporegError(f"cannot read {path}: {err.strerror}") from None
    if not rows:
        raise ToporegError(f"{path} is empty")
    if header is not None and rows[0] != list(header):
        raise ToporegError(f"{path}: expected header {','.join(header)}, got {','.join(rows[0])}")
    return rows[0], rows[1:]


# points / embeddings

def write_points(path, points, ids: Optional[Sequence[str]] = None):
    pts = np.asarray(points, dtype=float)
    ids = [str(i) for i in range(len(pts))] if ids is None else list(ids)
    _write(path, ["id", "x", "y"], [[i, fmt(x), fmt(y)] for i, (x, y) in zip(ids, pts)])


def read_points(path) -> Tuple[List[str], np.ndarray]:
    _, rows = _read(path, ["id", "x", "y"])
    return [r[0] for r in rows], np.array([[float(r[1]), float(r[2])] for r in rows]).reshape(-1, 2)


# data matrices

def write_matrix(path, X, names: Optional[Sequence[str]] = None):
    X = np.asarray(X, dtype=float)
    names = [f"f{k}" for k in range(X.shape[1])] if names is None else list(names)
    _write(path, names, [[fmt(v) for v in row] for row in X])


def read_matrix(path) -> Tuple[List[str], np.ndarray]:
    names, rows = _read(path)
    try:
        X = np.array([[float(v) for v in r] for r in rows])
    except ValueError as err:
        raise ToporegError(f"{path}: {err}") from None
    if X.ndim != 2 or X.shape[1] != len(names):
        raise ToporegError(f"{path}: ragged rows")
    return names, X


# labels

def write_labels(path, labels, ids: Optional[Sequence[str]] = None):
    ids = [str(i) for i in range(len(labels))] if ids is None else list(ids)
    _write(path, ["id", "label"], [[i, str(l)] for i, l in zip(ids, labels)])


def read_labels(path) -> Tuple[List[str], List[str]]:
    _, rows = _read(path, ["id", "label"])
    return [r[0] for r in rows], [r[1] for r in rows]


def write_angles(path, angles, ids: Optional[Sequence[str]] = None):
    ids = [str(i) for i in range(len(angles))] if ids is None else list(ids)
    _write(path, ["id", "angle"], [[i, fmt(a)] for i, a in zip(ids, angles)])


def read_angles(path) -> Tuple[List[str], np.ndarray]:
    _, rows = _read(path, ["id", "angle"])
    return [r[0] for r in rows], np.array([float(r[1]) for r in rows])


# graphs

def write_edge_list(path, graph: Graph):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{graph.nodes[u]} {graph.nodes[v]}\n" for u, v in graph.edges))


def read_edge_list(path) -> Graph:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as err:
        raise ToporegError(f"cannot read {path}: {err.strerror}") from None
    pairs = []
    for k, line in enumerate(lines, 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ToporegError(f"{path}:{k}: expected 'u v'")
        pairs.append((parts[0], parts[1]))
    return Graph.from_pairs(pairs)


# persistence diagrams

DIAGRAM_HEADER = ["dim", "birth", "death", "birth_simplex", "death_simplex"]


def write_diagram(path, persistence):
    diagrams = persistence.diagrams if isinstance(persistence, Persistence) else persistence
    rows = []
    for diagram in diagrams:
        for p in diagram:
            rows.append([p.dimension, fmt(p.birth), fmt(p.death), p.birth_simplex,
                         "" if p.death_simplex is None else p.death_simplex])
    _write(path, DIAGRAM_HEADER, rows)


def read_diagram(path) -> Tuple[PersistenceDiagram, ...]:
    _, rows = _read(path, DIAGRAM_HEADER)
    per_dim = {}
    for r in rows:
        pair = PersistencePair(int(r[0]), float(r[1]), float(r[2]), int(r[3]),
                               None if r[4] == "" else int(r[4]))
        per_dim.setdefault(pair.dimension, []).append(pair)
    top = max(per_dim, default=-1)
    return tuple(PersistenceDiagram(d, tuple(per_dim.get(d, ()))) for d in range(top + 1))


# loss traces

TRACE_HEADER = ["epoch", "emb_loss", "topo_loss", "total_loss", "seconds"]


def write_trace(path, trace: LossTrace, timing: bool = True):
    rows = [[e, fmt(a), fmt(b), fmt(c), fmt(s if timing else 0.0)] for e, a, b, c, s in trace.rows()]
    _write(path, TRACE_HEADER, rows)


def read_trace(path) -> LossTrace:
    _, rows = _read(path, TRACE_HEADER)
    trace = LossTrace()
    for r in rows:
        trace.append(int(r[0]), float(r[1]), float(r[2]), float(r[3]), float(r[4]))
    return trace


# pseudotime

PSEUDOTIME_HEADER = ["id", "pseudotime", "segment", "arc_position"]


def write_pseudotime(path, projection, ids: Optional[Sequence[str]] = None):
    n = len(projection.segment)
    ids = [str(i) for i in range(n)] if ids is None else list(ids)
    rows = [[i, fmt(t), int(k), fmt(a)] for i, t, k, a in
            zip(ids, projection.pseudotime, projection.segment, projection.arc_position)]
    _write(path, PSEUDOTIME_HEADER, rows)


def read_pseudotime(path):
    _, rows = _read(path, PSEUDOTIME_HEADER)
    ids = [r[0] for r in rows]
    return (ids, np.array([float(r[1]) for r in rows]), np.array([int(r[2]) for r in rows], dtype=int),
            np.array([float(r[3]) for r in rows]))


# loss specs and reports

def read_spec(path) -> TopoLossSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}: invalid JSON ({err.msg})") from None
    return TopoLossSpec.from_dict(doc)


def write_spec(path, spec: TopoLossSpec):
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2, sort_keys=True) + "\n")


REPORT_HEADER = ["experiment", "variant", "emb_loss", "topo_loss"]


def write_report(path, rows):
    _write(path, REPORT_HEADER, [[e, v, fmt(a), fmt(b)] for e, v, a, b in rows])


def read_report(path):
    _, rows = _read(path, REPORT_HEADER)
    return [(r[0], r[1], float(r[2]), float(r[3])) for r in rows]
