"""Exact rainbow reachability on edge-colored graphs.

A rainbow path uses each color at most once. Distances are found by a
breadth-first search over ``(vertex, used colors)`` states: a vertex may be
passed through again with a different color set, because its first-arrival
colors can block the only continuation. Subset dominance keeps the per-vertex
state lists small without changing any distance.
"""

import dataclasses
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .graphs import EdgeColoredGraph, GraphFamily, GraphLayer, union_graph
from .validation import MAX_COLORS, check_color_count, check_int, check_vertex

@dataclasses.dataclass(frozen=True)
class ColorSet:
    """An immutable set of color ids below 64, stored as a bit mask."""

    bits: int = 0

    def __post_init__(self):
        if not 0 <= self.bits < (1 << MAX_COLORS):
            raise ValueError("ColorSet holds colors 0..63 only")

    @classmethod
    def of(cls, colors):
        bits = 0
        for c in colors:
            c = check_int(c, "color", min_value=0, max_value=MAX_COLORS - 1)
            bits |= 1 << c
        return cls(bits)

    @classmethod
    def full(cls, s):
        s = check_color_count(s)
        return cls((1 << s) - 1)

    def __contains__(self, color):
        return 0 <= color < MAX_COLORS and bool(self.bits >> color & 1)

    def __iter__(self):
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __len__(self):
        return bin(self.bits).count("1")

    def __or__(self, other):
        return ColorSet(self.bits | other.bits)

    def __and__(self, other):
        return ColorSet(self.bits & other.bits)

    def __sub__(self, other):
        return ColorSet(self.bits & ~other.bits)

    def __le__(self, other):
        return self.bits & ~other.bits == 0

    def __repr__(self):
        return f"ColorSet({sorted(self)})"


@dataclasses.dataclass(frozen=True)
class SphereResult:
    """``layers[t]`` holds the vertices at rainbow distance exactly ``t`` from ``source``."""

    source: int
    allowed: ColorSet
    layers: tuple

    def reached(self):
        return frozenset().union(*self.layers)

    def sizes(self):
        return [len(layer) for layer in self.layers]


class Connectivity(NamedTuple):
    """Outcome of :func:`is_rainbow_connected`; truthy iff connected."""

    connected: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.connected


def _colored(graph):
    if not isinstance(graph, (GraphFamily, EdgeColoredGraph)):
        raise TypeError(f"expected GraphFamily or EdgeColoredGraph, got {type(graph).__name__}")
    check_color_count(graph.s)
    indptr, nbr, col = graph.colored_csr
    return indptr, nbr, np.left_shift(np.uint64(1), col.astype(np.uint64))


def _run(graph, source, allowed_bits, max_t, target=-1, prune=True):
    indptr, nbr, cbit = _colored(graph)
    ws = _kernels.Workspace(graph.n)
    while True:
        status, _ = _kernels.forward(
            indptr, nbr, cbit, source, np.uint64(allowed_bits), max_t, target,
            ws.need, -1, prune, ws.dist, _kernels._BIG, *ws.arrays(),
        )
        if status != _kernels.OUT_OF_SPACE:
            return ws.dist.copy()
        ws.grow()


def rainbow_distances(graph, source, allowed=None, *, max_t=None, prune=True):
    """Rainbow distance from ``source`` to every vertex, ``-1`` where unreachable."""
    source = check_vertex(source, graph.n, "source")
    allowed = ColorSet.full(graph.s) if allowed is None else allowed
    allowed = allowed & ColorSet.full(graph.s)
    if max_t is None:
        max_t = len(allowed)
    return _run(graph, source, allowed.bits, max_t, prune=prune)


def rainbow_spheres(graph, source, allowed=None, max_t=None, *, prune=True):
    """Spheres around ``source`` using only colors in ``allowed``.

    ``layers[t]`` is the set of vertices reachable by a rainbow path of
    length ``t`` and by none shorter. ``max_t`` defaults to ``|allowed|``,
    the longest possible rainbow path; the result always has ``max_t + 1``
    layers, trailing ones possibly empty.

    >>> from rainbowlab.graphs import GraphFamily, GraphLayer
    >>> g = GraphFamily((GraphLayer(3, [0], [1]), GraphLayer(3, [1], [2])))
    >>> rainbow_spheres(g, 0).layers
    (frozenset({0}), frozenset({1}), frozenset({2}))
    """
    check_color_count(graph.s)
    allowed = ColorSet.full(graph.s) if allowed is None else allowed
    if allowed.bits >> graph.s:
        raise ValueError(f"allowed colors must lie in 0..{graph.s - 1}")
    if max_t is None:
        max_t = len(allowed)
    max_t = check_int(max_t, "max_t", min_value=0, max_value=len(allowed))
    dist = rainbow_distances(graph, source, allowed, max_t=max_t, prune=prune)
    layers = tuple(frozenset(np.flatnonzero(dist == t).tolist()) for t in range(max_t + 1))
    return SphereResult(source=int(source), allowed=allowed, layers=layers)


def rainbow_distance(graph, u, v):
    """Length of a shortest rainbow ``u``-``v`` path over all ``s`` colors, or ``None``."""
    u = check_vertex(u, graph.n, "u")
    v = check_vertex(v, graph.n, "v")
    if u == v:
        return 0
    dist = _run(graph, u, (1 << graph.s) - 1, graph.s, target=v)
    return int(dist[v]) if dist[v] >= 0 else None


def is_rainbow_connected(graph, *, frontier_budget=None):
    """Decide whether every vertex pair is joined by a rainbow path.

    Sources are tried in ascending order and each only has to reach the
    higher-numbered vertices. The witness is the first failing pair
    ``(source, target)`` with ``source < target``, except that an isolated
    vertex ``v`` is reported first, paired with vertex 0 (or 1 when ``v`` is 0).

    ``frontier_budget`` caps the width of a forward search layer before the
    remaining targets are settled from their own side (default ``n // 4``). It
    affects speed only, never the answer.
    """
    indptr, nbr, cbit = _colored(graph)
    n = graph.n
    budget = max(64, n // 4) if frontier_budget is None else check_int(frontier_budget, "frontier_budget", min_value=0)
    isolated = np.flatnonzero(np.diff(indptr) == 0)
    if isolated.size and n >= 2:
        v = int(isolated[0])
        return Connectivity(False, (0, v) if v else (0, 1))
    allowed = np.uint64((1 << graph.s) - 1)
    ws = _kernels.Workspace(n)
    start = 0
    while True:
        source, target = _kernels.connectivity_scan(
            indptr, nbr, cbit, allowed, graph.s, budget, start,
            ws.need, ws.dist, ws.common, *ws.arrays(),
        )
        if target == -2:
            ws.grow()
            start = source
            continue
        if source < 0:
            return Connectivity(True)
        return Connectivity(False, (int(source), int(target)))


def bfs_distances(layer, source):
    """Hop distances in a plain graph; ``-1`` marks unreachable vertices."""
    source = check_vertex(source, layer.n, "source")
    dist = np.full(layer.n, -1, dtype=np.int64)
    _kernels.bfs_distances(layer.indptr, layer.indices, source, dist, np.empty(layer.n, dtype=np.int64))
    return dist


def is_connected(layer):
    if layer.n <= 1:
        return True
    return bool(np.all(bfs_distances(layer, 0) >= 0))


def bfs_diameter(layer):
    """Diameter of a plain graph by BFS from every vertex; ``None`` if disconnected."""
    if not isinstance(layer, GraphLayer):
        layer = union_graph(layer)
    d = int(_kernels.diameter(layer.indptr, layer.indices))
    return None if d < 0 else d


def max_layer_degree(graph):
    """Largest single-color degree over all colors and vertices."""
    if isinstance(graph, GraphFamily):
        return max(int(layer.degrees().max(initial=0)) for layer in graph.layers)
    endpoints = np.concatenate([graph.edge_u, graph.edge_v])
    colors = np.concatenate([graph.edge_color, graph.edge_color])
    if endpoints.size == 0:
        return 0
    return int(np.bincount(endpoints * graph.s + colors).max())
