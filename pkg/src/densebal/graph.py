"""Finite simple undirected graphs with oriented-edge indexing.

Vertices are dense integers 0..n-1.  Undirected edge number e with endpoints
(a, b) owns the two oriented slots 2e = (a -> b) and 2e + 1 = (b -> a), so the
reversal of an oriented index q is q ^ 1.  Graphs are immutable after
construction and safe for shared concurrent reads.

The text interchange format is one "u v" pair per line, "#"-prefixed comments,
and an optional "# n=<int>" header for isolated trailing vertices (they carry
load 0 and matter for load distributions).
"""

from __future__ import annotations

import io
import os
import re
from typing import Iterable, Sequence

import numpy as np

_HEADER_RE = re.compile(r"^#\s*n\s*=\s*(\d+)\s*$")


class EdgeListError(ValueError):
    """Malformed edge-list input; carries the offending 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class Graph:
    """Simple undirected graph on vertices 0..n-1.

    Attributes
    ----------
    n : int
        Vertex count.
    edges : (m, 2) int64 array
        Endpoint pairs as given (no self-loops, no duplicates).
    degrees : (n,) int64 array
    """

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        edges = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                           dtype=np.int64)
        if edges.size == 0:
            edges = edges.reshape(0, 2)
        if edges.ndim != 2 or edges.shape[1] != 2:
            raise ValueError("edges must be a sequence of vertex pairs")
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        if edges.shape[0]:
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loop")
            key = np.minimum(edges[:, 0], edges[:, 1]) * n + np.maximum(edges[:, 0], edges[:, 1])
            if len(np.unique(key)) != len(key):
                raise ValueError("duplicate edge")
        self.n = int(n)
        self.edges = edges
        self.edges.setflags(write=False)
        self.degrees = (np.bincount(edges[:, 0], minlength=n)
                        + np.bincount(edges[:, 1], minlength=n)).astype(np.int64)
        self.degrees.setflags(write=False)
        # oriented slot q: osrc[q] -> odst[q]; q = 2e is edges[e][0] -> edges[e][1]
        self.osrc = np.empty(2 * self.m, dtype=np.int64)
        self.odst = np.empty(2 * self.m, dtype=np.int64)
        self.osrc[0::2] = edges[:, 0]
        self.odst[0::2] = edges[:, 1]
        self.osrc[1::2] = edges[:, 1]
        self.odst[1::2] = edges[:, 0]
        self.osrc.setflags(write=False)
        self.odst.setflags(write=False)
        # incoming adjacency in CSR form: for vertex v, oriented indices q with
        # odst[q] == v, i.e. the slots summed by the load at v.
        order = np.argsort(self.odst, kind="stable")
        self._in_q = order
        self._in_ptr = np.concatenate(
            ([0], np.cumsum(np.bincount(self.odst, minlength=n)))
        ).astype(np.int64)

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def neighbors(self, v: int):
        """Pairs (u, q) over neighbors u of v, q the oriented index of u -> v."""
        qs = self._in_q[self._in_ptr[v]:self._in_ptr[v + 1]]
        return [(int(self.osrc[q]), int(q)) for q in qs]

    def incoming(self, v: int) -> np.ndarray:
        """Oriented indices q with destination v."""
        return self._in_q[self._in_ptr[v]:self._in_ptr[v + 1]]

    def edge_set(self) -> set:
        return {(min(a, b), max(a, b)) for a, b in self.edges.tolist()}

    def truncate(self, delta: int) -> "Graph":
        """Drop every edge with an endpoint of degree exceeding delta.

        Degrees are measured in self; the vertex set is unchanged, so the
        result's maximum degree is at most delta.
        """
        if delta < 0:
            raise ValueError("delta must be non-negative")
        if self.m == 0:
            return Graph(self.n, self.edges)
        ok = (self.degrees[self.edges[:, 0]] <= delta) & (self.degrees[self.edges[:, 1]] <= delta)
        return Graph(self.n, self.edges[ok])

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for u, _ in self.neighbors(v):
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        return bool(seen.all())

    def is_tree(self) -> bool:
        return self.m == self.n - 1 and self.is_connected()

    def write_edge_list(self, target) -> None:
        """Write the interchange format; always emits the "# n=" header so that
        isolated trailing vertices survive a round trip."""
        own = False
        if isinstance(target, (str, bytes)):
            target = open(target, "w", encoding="utf-8")
            own = True
        try:
            target.write(f"# n={self.n}\n")
            for a, b in self.edges.tolist():
                target.write(f"{a} {b}\n")
        finally:
            if own:
                target.close()

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def load_edge_list(source) -> Graph:
    """Parse the edge-list interchange format into a Graph.

    `source` is a path, a text stream, or a string containing the data.
    Raises EdgeListError with a line number on malformed rows, self-loops and
    duplicate undirected edges.
    """
    if isinstance(source, str):
        if "\n" not in source and os.path.exists(source):
            stream = open(source, "r", encoding="utf-8")
        else:
            stream = io.StringIO(source)
    else:
        stream = source

    edges = []
    seen = set()
    header_n = None
    max_vertex = -1
    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                mobj = _HEADER_RE.match(line)
                if mobj:
                    header_n = int(mobj.group(1))
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListError(f"expected 'u v', got {line!r}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListError(f"non-integer vertex id in {line!r}", lineno) from None
            if u < 0 or v < 0:
                raise EdgeListError("negative vertex id", lineno)
            if u == v:
                raise EdgeListError(f"self-loop at vertex {u}", lineno)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise EdgeListError(f"duplicate edge {{{key[0]},{key[1]}}}", lineno)
            seen.add(key)
            edges.append((u, v))
            max_vertex = max(max_vertex, u, v)
    finally:
        if hasattr(stream, "close") and stream is not source:
            stream.close()

    n = max_vertex + 1
    if header_n is not None:
        if header_n < n:
            raise EdgeListError(f"header n={header_n} smaller than max vertex id {max_vertex}")
        n = header_n
    return Graph(n, edges)
