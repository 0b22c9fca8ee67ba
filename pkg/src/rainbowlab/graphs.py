"""Random edge-colored graph models, seeded sampling and the colored-edge-list format.

Two models share one vertex set ``0..n-1`` and a palette ``0..s-1``:

* ``FAMILY``: ``s`` independent G(n, p) layers with ``p = c ln(n) / (s n)``;
  layer ``i`` carries color ``i`` and a pair may be an edge in several layers.
* ``UNIFORM``: one G(n, p) graph with ``p = c ln(n) / n`` whose edges each get
  a single color drawn uniformly from the palette.
"""

import dataclasses
import enum
import math
import os
from functools import cached_property

import numpy as np

from .exceptions import DomainError, GraphFormatError
from .validation import check_int, check_real

_U64 = (1 << 64) - 1


class Model(str, enum.Enum):
    FAMILY = "family"
    UNIFORM = "uniform"


@dataclasses.dataclass(frozen=True)
class ModelParams:
    """Parameters of one random model instance.

    ``c`` is kept for reporting; ``p`` is what the samplers use. Tests and
    degenerate experiments may force ``p`` through :meth:`with_p`.
    """

    n: int
    s: int
    c: float
    p: float
    model: Model = Model.FAMILY

    def __post_init__(self):
        check_int(self.n, "n", min_value=2)
        check_int(self.s, "s", min_value=1)
        object.__setattr__(self, "model", Model(self.model))
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"edge probability p={self.p} is outside [0, 1]")

    def with_p(self, p):
        """Copy with the edge probability forced to ``p``."""
        return dataclasses.replace(self, p=float(p))


def derive_params(n, s, c, model=Model.FAMILY):
    """Build :class:`ModelParams` with the model's edge probability.

    >>> round(derive_params(100, 5, 2).p, 8)
    0.01842068
    """
    model = Model(model)
    try:
        n = check_int(n, "n", min_value=2)
        s = check_int(s, "s", min_value=1)
        c = check_real(c, "c", gt=1)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    if model is Model.FAMILY:
        p = c * math.log(n) / (s * n)
    else:
        p = c * math.log(n) / n
    if p > 1.0:
        raise DomainError(f"p = {p:.6g} > 1 for n={n}, s={s}, c={c}: model undefined")
    return ModelParams(n=n, s=s, c=float(c), p=p, model=model)


@dataclasses.dataclass(frozen=True)
class SeedPlan:
    """Deterministic per-trial random streams.

    The stream for trial ``i`` is keyed by ``(master_seed, *substream, i)``
    through :class:`numpy.random.SeedSequence`, so it never depends on which
    other trials ran, in what order, or on how many workers.
    """

    master_seed: int
    substream: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & _U64)
        object.__setattr__(self, "substream", tuple(int(k) for k in self.substream))

    def child(self, *keys):
        return SeedPlan(self.master_seed, self.substream + tuple(int(k) for k in keys))

    def seed_sequence(self, trial_index):
        return np.random.SeedSequence([self.master_seed, *self.substream, int(trial_index)])

    def rng(self, trial_index):
        return np.random.default_rng(self.seed_sequence(trial_index))


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def _pair_count(n):
    return n * (n - 1) // 2


def _decode_pairs(n, index):
    """Map lexicographic pair indices ``k`` to ``(u, v)`` with ``u < v``."""
    index = np.asarray(index, dtype=np.int64)
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(np.maximum(b * b - 8.0 * index, 0.0))) / 2).astype(np.int64)
    u = np.clip(u, 0, n - 2)
    # float rounding can land one row off in either direction
    start = u * (b - u) // 2
    u = np.where(start > index, u - 1, u)
    start = u * (b - u) // 2
    nxt = (u + 1) * (b - u - 1) // 2
    u = np.where(nxt <= index, u + 1, u)
    start = u * (b - u) // 2
    v = index - start + u + 1
    return u, v


def _sample_pair_indices(rng, n, p):
    """Indices of the pairs kept by a G(n, p) draw, via geometric skips.

    Pairs are enumerated lexicographically; gaps between kept pairs are
    Geometric(p), so the draw costs O(p N) rather than O(N).
    """
    total = _pair_count(n)
    if p <= 0.0 or total == 0:
        return np.empty(0, dtype=np.int64)
    chunks = []
    pos = -1
    expected = total * p
    batch = int(expected + 4.0 * math.sqrt(expected * (1.0 - p)) + 16)
    while True:
        # clamp so tiny p cannot overflow the running sum; any gap past the end stops us
        gaps = np.minimum(rng.geometric(p, size=batch), total + 1)
        idx = pos + np.cumsum(gaps)
        if idx[-1] >= total:
            chunks.append(idx[idx < total])
            break
        chunks.append(idx)
        pos = int(idx[-1])
        batch = max(16, batch // 4)
    return np.concatenate(chunks)


def _csr(n, u, v, *payload):
    """Symmetric CSR arrays, neighbors sorted within each row."""
    src = np.concatenate([u, v])
    dst = np.concatenate([v, u])
    extra = [np.concatenate([a, a]) for a in payload]
    order = np.lexsort((*[e for e in reversed(extra)], dst, src))
    src, dst = src[order], dst[order]
    extra = [e[order] for e in extra]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return (indptr, dst.astype(np.int64), *extra)


class GraphLayer:
    """A simple undirected graph on ``0..n-1`` in CSR form.

    ``edge_u``/``edge_v`` hold each edge once with ``u < v``, sorted
    lexicographically; ``indptr``/``indices`` give sorted neighbor rows.
    All arrays are read-only.
    """

    __slots__ = ("n", "edge_u", "edge_v", "indptr", "indices")

    def __init__(self, n, edge_u, edge_v, *, _trusted=False):
        self.n = check_int(n, "n", min_value=1)
        u = np.asarray(edge_u, dtype=np.int64).copy()
        v = np.asarray(edge_v, dtype=np.int64).copy()
        if u.shape != v.shape or u.ndim != 1:
            raise ValueError("edge arrays must be one-dimensional and equally long")
        if not _trusted:
            if u.size and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
                raise ValueError("edge endpoint out of range")
            if np.any(u == v):
                raise ValueError("self-loops are not allowed")
            lo, hi = np.minimum(u, v), np.maximum(u, v)
            order = np.lexsort((hi, lo))
            u, v = lo[order], hi[order]
            if u.size > 1 and np.any((u[1:] == u[:-1]) & (v[1:] == v[:-1])):
                raise ValueError("duplicate edge")
        self.edge_u, self.edge_v = u, v
        self.indptr, self.indices = _csr(self.n, u, v)
        _freeze(self.edge_u, self.edge_v, self.indptr, self.indices)

    @classmethod
    def empty(cls, n):
        return cls(n, [], [], _trusted=True)

    @property
    def num_edges(self):
        return int(self.edge_u.size)

    def neighbors(self, v):
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degrees(self):
        return np.diff(self.indptr)

    def edges(self):
        """Edges as a list of ``(u, v)`` tuples with ``u < v``."""
        return list(zip(self.edge_u.tolist(), self.edge_v.tolist()))

    def has_edge(self, u, v):
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < row.size and row[i] == v)

    def __eq__(self, other):
        if not isinstance(other, GraphLayer):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.edge_u, other.edge_u)
            and np.array_equal(self.edge_v, other.edge_v)
        )

    __hash__ = None

    def __repr__(self):
        return f"GraphLayer(n={self.n}, edges={self.num_edges})"


@dataclasses.dataclass(frozen=True, eq=False)
class GraphFamily:
    """``s`` graph layers on a common vertex set; layer ``i`` is color ``i``."""

    layers: tuple
    params: ModelParams = dataclasses.field(default=None, compare=False)

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("a family needs at least one layer")
        if len({layer.n for layer in layers}) != 1:
            raise ValueError("all layers must share the same vertex count")
        object.__setattr__(self, "layers", layers)
        if self.params is not None and (self.params.n, self.params.s) != (self.n, self.s):
            raise ValueError("params do not match the layers' n and s")

    @property
    def n(self):
        return self.layers[0].n

    @property
    def s(self):
        return len(self.layers)

    @cached_property
    def colored_csr(self):
        """``(indptr, neighbor, color)`` over all layers, for the rainbow engine."""
        u = np.concatenate([layer.edge_u for layer in self.layers])
        v = np.concatenate([layer.edge_v for layer in self.layers])
        color = np.concatenate(
            [np.full(layer.num_edges, i, dtype=np.int64) for i, layer in enumerate(self.layers)]
        )
        arrays = _csr(self.n, u, v, color)
        _freeze(*arrays)
        return arrays

    def __eq__(self, other):
        if not isinstance(other, GraphFamily):
            return NotImplemented
        return self.layers == other.layers

    __hash__ = None


class EdgeColoredGraph:
    """A simple graph whose every edge carries exactly one color in ``0..s-1``."""

    def __init__(self, n, s, edge_u, edge_v, edge_color, params=None, *, _trusted=False):
        self.n = check_int(n, "n", min_value=1)
        self.s = check_int(s, "s", min_value=1)
        self.params = params
        u = np.asarray(edge_u, dtype=np.int64).copy()
        v = np.asarray(edge_v, dtype=np.int64).copy()
        col = np.asarray(edge_color, dtype=np.int64).copy()
        if not (u.shape == v.shape == col.shape) or u.ndim != 1:
            raise ValueError("edge arrays must be one-dimensional and equally long")
        if not _trusted:
            if col.size and (col.min() < 0 or col.max() >= s):
                raise ValueError("edge color out of range")
            layer = GraphLayer(n, u, v)  # validates simplicity and range
            lo, hi = np.minimum(u, v), np.maximum(u, v)
            order = np.lexsort((hi, lo))
            u, v, col = layer.edge_u.copy(), layer.edge_v.copy(), col[order]
        self.edge_u, self.edge_v, self.edge_color = u, v, col
        _freeze(u, v, col)

    @property
    def num_edges(self):
        return int(self.edge_u.size)

    def edges(self):
        """Edges as ``(u, v, color)`` tuples with ``u < v``."""
        return list(zip(self.edge_u.tolist(), self.edge_v.tolist(), self.edge_color.tolist()))

    def color_counts(self):
        return np.bincount(self.edge_color, minlength=self.s)

    @cached_property
    def colored_csr(self):
        arrays = _csr(self.n, self.edge_u, self.edge_v, self.edge_color)
        _freeze(*arrays)
        return arrays

    @cached_property
    def underlying(self):
        """The uncolored graph as a :class:`GraphLayer`."""
        return GraphLayer(self.n, self.edge_u, self.edge_v, _trusted=True)

    def color_class(self, color):
        mask = self.edge_color == color
        return GraphLayer(self.n, self.edge_u[mask], self.edge_v[mask], _trusted=True)

    def __eq__(self, other):
        if not isinstance(other, EdgeColoredGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.s == other.s
            and np.array_equal(self.edge_u, other.edge_u)
            and np.array_equal(self.edge_v, other.edge_v)
            and np.array_equal(self.edge_color, other.edge_color)
        )

    __hash__ = None

    def __repr__(self):
        return f"EdgeColoredGraph(n={self.n}, s={self.s}, edges={self.num_edges})"


def _gnp_layer(rng, n, p):
    u, v = _decode_pairs(n, _sample_pair_indices(rng, n, p))
    return GraphLayer(n, u, v, _trusted=True)


def sample_family(params, seed_plan, trial_index):
    """Draw the ``s`` independent G(n, p) layers of the family model.

    Layer ``i`` uses the ``i``-th child of the trial's seed sequence.
    """
    if params.model is not Model.FAMILY:
        raise ValueError("sample_family needs FAMILY-model params")
    children = seed_plan.seed_sequence(trial_index).spawn(params.s)
    layers = tuple(_gnp_layer(np.random.default_rng(ss), params.n, params.p) for ss in children)
    return GraphFamily(layers, params)


def sample_uniform(params, seed_plan, trial_index):
    """Draw G(n, p) and color each edge uniformly from ``0..s-1``."""
    if params.model is not Model.UNIFORM:
        raise ValueError("sample_uniform needs UNIFORM-model params")
    rng = seed_plan.rng(trial_index)
    u, v = _decode_pairs(params.n, _sample_pair_indices(rng, params.n, params.p))
    color = rng.integers(0, params.s, size=u.size, dtype=np.int64)
    return EdgeColoredGraph(params.n, params.s, u, v, color, params, _trusted=True)


def sample(params, seed_plan, trial_index):
    """Dispatch to the sampler for ``params.model``."""
    if params.model is Model.FAMILY:
        return sample_family(params, seed_plan, trial_index)
    return sample_uniform(params, seed_plan, trial_index)


def union_graph(graph):
    """Simple graph with an edge wherever any color has one."""
    if isinstance(graph, EdgeColoredGraph):
        return graph.underlying
    if len(graph.layers) == 1:
        return graph.layers[0]
    n = graph.n
    key = np.concatenate([layer.edge_u * n + layer.edge_v for layer in graph.layers])
    key = np.unique(key)
    return GraphLayer(n, key // n, key % n, _trusted=True)


def validate(graph):
    """Re-check every structural invariant; raises ``ValueError`` on the first failure."""
    if isinstance(graph, GraphFamily):
        for layer in graph.layers:
            validate(layer)
        return
    if isinstance(graph, EdgeColoredGraph):
        validate(graph.underlying)
        if graph.num_edges and not 0 <= graph.edge_color.min() <= graph.edge_color.max() < graph.s:
            raise ValueError("color out of range")
        return
    n, indptr, idx = graph.n, graph.indptr, graph.indices
    if indptr[0] != 0 or indptr[-1] != idx.size or np.any(np.diff(indptr) < 0):
        raise ValueError("corrupt CSR row pointers")
    for w in range(n):
        row = idx[indptr[w] : indptr[w + 1]]
        if row.size and (row[0] < 0 or row[-1] >= n):
            raise ValueError(f"neighbor of {w} out of range")
        if np.any(np.diff(row) <= 0):
            raise ValueError(f"neighbors of {w} not strictly increasing")
        if np.any(row == w):
            raise ValueError(f"self-loop at {w}")
        for x in row:
            if not graph.has_edge(int(x), w):
                raise ValueError(f"asymmetric adjacency {w}-{x}")
    if np.any(graph.edge_u >= graph.edge_v):
        raise ValueError("edge list not in u < v form")


# --- colored edge list text format -------------------------------------------


def _parse_header(line, lineno):
    fields = {}
    for token in line.split():
        key, sep, value = token.partition("=")
        if not sep:
            raise GraphFormatError("MALFORMED_LINE", f"bad header token {token!r}", lineno)
        fields[key] = value
    if set(fields) != {"n", "s", "model"}:
        raise GraphFormatError("MALFORMED_LINE", "header needs exactly n=, s= and model=", lineno)
    try:
        n, s = int(fields["n"]), int(fields["s"])
        model = Model(fields["model"])
    except ValueError:
        raise GraphFormatError("MALFORMED_LINE", f"bad header {line!r}", lineno) from None
    if n < 1 or s < 1:
        raise GraphFormatError("OUT_OF_RANGE", "n and s must be positive", lineno)
    return n, s, model


def parse_graph(lines):
    """Parse colored-edge-list text (an iterable of lines)."""
    header = None
    edges = []
    seen = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            header = _parse_header(line, lineno)
            n, s, model = header
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphFormatError("MALFORMED_LINE", f"expected 'u v color', got {line!r}", lineno)
        try:
            u, v, col = (int(x, 10) for x in parts)
        except ValueError:
            raise GraphFormatError("MALFORMED_LINE", f"non-integer field in {line!r}", lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError("OUT_OF_RANGE", f"vertex id outside 0..{n - 1}", lineno)
        if not 0 <= col < s:
            raise GraphFormatError("OUT_OF_RANGE", f"color outside 0..{s - 1}", lineno)
        if u == v:
            raise GraphFormatError("SELF_LOOP", f"self-loop at vertex {u}", lineno)
        pair = (min(u, v), max(u, v))
        if model is Model.FAMILY:
            key = (*pair, col)
            if key in seen:
                raise GraphFormatError("DUPLICATE_EDGE_COLOR", f"edge {pair} repeated in color {col}", lineno)
            seen[key] = lineno
        else:
            if pair in seen:
                code = "DUPLICATE_EDGE_COLOR" if seen[pair] == col else "DUPLICATE_EDGE"
                raise GraphFormatError(code, f"edge {pair} listed twice", lineno)
            seen[pair] = col
        edges.append((*pair, col))
    if header is None:
        raise GraphFormatError("MALFORMED_LINE", "missing header line")
    arr = np.array(edges, dtype=np.int64).reshape(-1, 3)
    if model is Model.UNIFORM:
        return EdgeColoredGraph(n, s, arr[:, 0], arr[:, 1], arr[:, 2])
    layers = tuple(
        GraphLayer(n, arr[arr[:, 2] == i, 0], arr[arr[:, 2] == i, 1]) for i in range(s)
    )
    return GraphFamily(layers)


def format_graph(graph):
    """Render a family or edge-colored graph as colored-edge-list text."""
    if isinstance(graph, GraphFamily):
        out = [f"n={graph.n} s={graph.s} model=family"]
        for color, layer in enumerate(graph.layers):
            out.extend(f"{u} {v} {color}" for u, v in layer.edges())
    else:
        out = [f"n={graph.n} s={graph.s} model=uniform"]
        out.extend(f"{u} {v} {c}" for u, v, c in graph.edges())
    params = getattr(graph, "params", None)
    if params is not None:
        out.insert(1, f"# c={params.c!r} p={params.p!r}")
    return "\n".join(out) + "\n"


def read_graph(path):
    with open(os.fspath(path), encoding="utf-8") as fh:
        return parse_graph(fh)


def write_graph(graph, path):
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        fh.write(format_graph(graph))
