"""Plain-text instance files.

Three formats, chosen by suffix (``.matrix``, ``.points``, ``.graph``) or an
explicit ``fmt`` argument:

* matrix: line 1 ``n``, then n rows of n reals
* points: line 1 ``n D``, then n rows of D reals
* graph:  line 1 ``n m``, then m rows ``u v`` (1-indexed, undirected)
"""
from __future__ import annotations

from pathlib import Path
from typing import Optional, TextIO, Union

import numpy as np

from .metrics import (
    Discrete,
    EuclideanPoints,
    ExplicitMatrix,
    Graph,
    MetricError,
    MetricInstance,
)

FORMATS = ("matrix", "points", "graph")


class ParseError(ValueError):
    pass


def _tokens(text: str) -> list[list[str]]:
    return [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _reals(row: list[str], lineno: int) -> list[float]:
    try:
        vals = [float(t) for t in row]
    except ValueError as exc:
        raise ParseError(f"line {lineno}: {exc}") from None
    for v in vals:
        if np.isnan(v) or np.isinf(v):
            raise ParseError(f"line {lineno}: non-finite value")
    return vals


def _header(rows: list[list[str]], width: int) -> list[int]:
    if not rows or len(rows[0]) != width:
        raise ParseError(f"header must hold {width} integer(s)")
    try:
        return [int(t) for t in rows[0]]
    except ValueError:
        raise ParseError("header must hold integers") from None


def parse_matrix(text: str) -> ExplicitMatrix:
    rows = _tokens(text)
    (n,) = _header(rows, 1)
    if n < 1 or len(rows) - 1 != n:
        raise ParseError(f"expected {n} matrix rows, got {len(rows) - 1}")
    m = []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != n:
            raise ParseError(f"line {k}: expected {n} values, got {len(row)}")
        vals = _reals(row, k)
        if min(vals) < 0:
            raise ParseError(f"line {k}: negative distance")
        m.append(vals)
    try:
        return ExplicitMatrix(m)
    except MetricError as exc:
        raise ParseError(str(exc)) from None


def parse_points(text: str, norm=2) -> EuclideanPoints:
    rows = _tokens(text)
    n, dim = _header(rows, 2)
    if n < 1 or dim < 1 or len(rows) - 1 != n:
        raise ParseError(f"expected {n} point rows, got {len(rows) - 1}")
    pts = []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != dim:
            raise ParseError(f"line {k}: expected {dim} coordinates, got {len(row)}")
        pts.append(_reals(row, k))
    try:
        return EuclideanPoints(pts, norm=norm)
    except MetricError as exc:
        raise ParseError(str(exc)) from None


def parse_graph(text: str) -> Graph:
    rows = _tokens(text)
    n, m = _header(rows, 2)
    if len(rows) - 1 != m:
        raise ParseError(f"expected {m} edge rows, got {len(rows) - 1}")
    edges = []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ParseError(f"line {k}: expected 'u v'")
        try:
            edges.append((int(row[0]), int(row[1])))
        except ValueError:
            raise ParseError(f"line {k}: vertex ids must be integers") from None
    try:
        return Graph(n, edges)
    except MetricError as exc:
        raise ParseError(str(exc)) from None


def _fmt_for(path: Path, fmt: Optional[str]) -> str:
    fmt = fmt or path.suffix.lstrip(".")
    if fmt not in FORMATS:
        raise ParseError(f"cannot tell the format of {path}; use a .matrix/.points/.graph suffix")
    return fmt


def load(path: Union[str, Path], fmt: Optional[str] = None, norm=2) -> MetricInstance:
    path = Path(path)
    fmt = _fmt_for(path, fmt)
    text = path.read_text()
    if fmt == "matrix":
        return parse_matrix(text)
    if fmt == "points":
        return parse_points(text, norm=norm)
    return parse_graph(text)


def _num(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def dump(instance: MetricInstance, out: TextIO) -> str:
    """Write ``instance`` in its natural format and return that format's name.

    Discrete instances are written as matrices.
    """
    if isinstance(instance, Graph):
        out.write(f"{instance.n} {len(instance.edges)}\n")
        for u, v in instance.edges.tolist():
            out.write(f"{u} {v}\n")
        return "graph"
    if isinstance(instance, EuclideanPoints):
        n, dim = instance.points.shape
        out.write(f"{n} {dim}\n")
        for row in instance.points:
            out.write(" ".join(repr(float(c)) for c in row) + "\n")
        return "points"
    if isinstance(instance, (ExplicitMatrix, Discrete)):
        m = instance.to_matrix()
        out.write(f"{instance.n}\n")
        for row in m:
            out.write(" ".join(_num(v) for v in row) + "\n")
        return "matrix"
    raise TypeError(f"cannot serialize {instance!r}")


def suffix_for(instance: MetricInstance) -> str:
    if isinstance(instance, Graph):
        return "graph"
    if isinstance(instance, EuclideanPoints):
        return "points"
    return "matrix"
