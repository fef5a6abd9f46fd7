"""Edge-list / node-list CSV files and their JSON metadata sidecar.

Edge file: header ``i,j,length`` (the length column may be omitted or left
blank when a node file supplies coordinates).  Node file: header
``id,x,y`` with an optional ``z``.  Metadata: ``<edges>.json`` holding at
least ``length_unit``; units are recorded, never converted.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DataError
from .generator import Graph, SummaryStats, summary_stats
from .geometry import Metric, pair_distance


def meta_path_for(edge_path) -> Path:
    p = Path(edge_path)
    return p.with_suffix(p.suffix + ".json") if p.suffix != ".json" else p


def write_graph(graph: Graph, edge_path, node_path=None, length_unit: str = "region-unit",
                extra_meta: Optional[dict] = None) -> Path:
    """Write edges (and optionally nodes) plus a metadata sidecar; returns the sidecar path."""
    edge_path = Path(edge_path)
    with edge_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "length"])
        for i, j, d in graph.edges():
            w.writerow([i, j, repr(d)])
    if node_path is not None:
        if graph.coords is None:
            raise DataError("graph has no coordinates to write")
        dim = graph.coords.shape[1]
        cols = ["id", "x", "y", "z"][: 1 + max(dim, 2)]
        with Path(node_path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for k, row in enumerate(graph.coords):
                vals = list(row) + [0.0] * (len(cols) - 1 - dim)
                w.writerow([k] + [repr(float(v)) for v in vals])
    meta = {**graph.meta, "n": graph.n, "e": graph.e, "length_unit": length_unit}
    if node_path is not None:
        meta["node_file"] = Path(node_path).name
    meta.update(extra_meta or {})
    mp = meta_path_for(edge_path)
    mp.write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
    return mp


def _read_rows(path, required):
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip().lower() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file")
        missing = [c for c in required if c not in header]
        if missing:
            raise DataError(f"{path}:1: header lacks column(s) {missing}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) > len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            row = row + [""] * (len(header) - len(row))
            yield lineno, dict(zip(header, (c.strip() for c in row)))


def _float(val, path, lineno, col):
    try:
        x = float(val)
    except ValueError:
        raise DataError(f"{path}:{lineno}: column {col!r} is not a number: {val!r}")
    if not math.isfinite(x):
        raise DataError(f"{path}:{lineno}: column {col!r} is not finite")
    return x


def read_nodes(node_path):
    ids, coords = [], []
    dim = None
    for lineno, row in _read_rows(node_path, ("id", "x", "y")):
        c = [_float(row["x"], node_path, lineno, "x"), _float(row["y"], node_path, lineno, "y")]
        if row.get("z", ""):
            c.append(_float(row["z"], node_path, lineno, "z"))
        if dim is None:
            dim = len(c)
        elif len(c) != dim:
            raise DataError(f"{node_path}:{lineno}: mixed 2-D and 3-D coordinates")
        ids.append(row["id"])
        coords.append(c)
    if len(set(ids)) != len(ids):
        raise DataError(f"{node_path}: duplicate node ids")
    return ids, np.array(coords, dtype=float)


def ingest(edge_path, node_path=None, metric: Optional[str] = None,
           length_unit: Optional[str] = None, n: Optional[int] = None):
    """Load a graph from CSV and return ``(Graph, SummaryStats)``.

    Lengths come from the edge file when present; otherwise they are computed
    from node coordinates with ``metric``.  ``length_unit`` must be given
    here or in the metadata sidecar.  ``n`` defaults to the sidecar value,
    then to the node count, then to the number of distinct edge endpoints.
    """
    edge_path = Path(edge_path)
    meta = {}
    mp = meta_path_for(edge_path)
    if mp.exists() and mp != edge_path:
        meta = json.loads(mp.read_text())
    unit = length_unit or meta.get("length_unit")
    if not unit:
        raise DataError("length_unit must be stated explicitly (argument or metadata)")
    if length_unit and meta.get("length_unit") and meta["length_unit"] != length_unit:
        raise DataError(
            f"length_unit {length_unit!r} contradicts metadata {meta['length_unit']!r}"
        )
    if node_path is None and meta.get("node_file"):
        cand = edge_path.parent / meta["node_file"]
        node_path = cand if cand.exists() else None

    index = {}
    coords = None
    if node_path is not None:
        ids, coords = read_nodes(node_path)
        index = {k: t for t, k in enumerate(ids)}

    def node(label, lineno):
        if label == "":
            raise DataError(f"{edge_path}:{lineno}: empty node id")
        if node_path is not None:
            if label not in index:
                raise DataError(f"{edge_path}:{lineno}: unknown node id {label!r}")
            return index[label]
        return index.setdefault(label, len(index))

    ii, jj, ll = [], [], []
    need = []
    seen = set()
    for lineno, row in _read_rows(edge_path, ("i", "j")):
        a, b = node(row["i"], lineno), node(row["j"], lineno)
        if a == b:
            raise DataError(f"{edge_path}:{lineno}: self-loop on node {row['i']!r}")
        a, b = min(a, b), max(a, b)
        if (a, b) in seen:
            raise DataError(f"{edge_path}:{lineno}: duplicate edge {row['i']}-{row['j']}")
        seen.add((a, b))
        ii.append(a)
        jj.append(b)
        raw = row.get("length", "")
        if raw:
            d = _float(raw, edge_path, lineno, "length")
            if d < 0:
                raise DataError(f"{edge_path}:{lineno}: negative length")
            ll.append(d)
        else:
            ll.append(math.nan)
            need.append((len(ll) - 1, lineno))
    if need:
        if coords is None:
            line = need[0][1]
            raise DataError(f"{edge_path}:{line}: no length and no node coordinates")
        m = Metric(metric or meta.get("metric", "euclidean"))
        radius = float(np.linalg.norm(coords[0])) if m is Metric.GREAT_CIRCLE else 1.0
        for k, _ in need:
            ll[k] = float(pair_distance(coords[ii[k]], coords[jj[k]], m, radius))

    if n is None:
        n = meta.get("n")
    if n is None:
        n = len(coords) if coords is not None else len(index)
    graph = Graph(int(n), np.array(ii, dtype=np.int64), np.array(jj, dtype=np.int64),
                  np.array(ll, dtype=float), coords, meta.get("model", "observed"),
                  {**meta, "length_unit": unit, "source": str(edge_path)})
    return graph, summary_stats(graph)


def stats_dict(stats: SummaryStats, unit: Optional[str] = None) -> dict:
    d = {"n": stats.n, "e": stats.e, "d_bar": stats.d_bar}
    if unit:
        d["length_unit"] = unit
    return d
