"""Undirected simple graphs on vertices 0..n-1 stored as packed bitset rows.

Row ``u`` of ``Graph.adj`` is a little-endian bitset of length ``n`` packed
into uint64 words: bit ``v % 64`` of word ``v // 64`` is set iff ``{u, v}``
is an edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numba
import numpy as np

from .rng import GAMMA, TAG_G1, TAG_G2, SplitMix64

_WORD = 64


def n_words(n: int) -> int:
    return max(1, (n + _WORD - 1) // _WORD)


class GraphFormatError(ValueError):
    """Malformed graph text; the message names the offending line."""

    def __init__(self, lineno: int, reason: str):
        super().__init__(f"{reason} at line {lineno}")
        self.lineno = lineno
        self.reason = reason


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    adj: np.ndarray  # (n, n_words(n)) uint64, read-only

    def __post_init__(self):
        if self.adj.shape != (self.n, n_words(self.n)) or self.adj.dtype != np.uint64:
            raise ValueError("adjacency must be an (n, words) uint64 array")
        self.adj.setflags(write=False)

    # construction ---------------------------------------------------------

    @classmethod
    def from_dense(cls, matrix) -> "Graph":
        """Build from a symmetric 0/1 matrix (diagonal must be zero)."""
        d = np.asarray(matrix, dtype=bool)
        n = d.shape[0]
        if d.shape != (n, n):
            raise ValueError("matrix must be square")
        if n and (d.diagonal().any() or not np.array_equal(d, d.T)):
            raise ValueError("matrix must be symmetric with zero diagonal")
        return cls(n, _pack_rows(d))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        d = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"bad edge ({u}, {v}) for n={n}")
            d[u, v] = d[v, u] = True
        return cls.from_dense(d)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, np.zeros((n, n_words(n)), dtype=np.uint64))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        d = np.ones((n, n), dtype=bool)
        np.fill_diagonal(d, False)
        return cls.from_dense(d)

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    # queries --------------------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        return bool((int(self.adj[u, v >> 6]) >> (v & 63)) & 1)

    def row(self, u: int) -> np.ndarray:
        """Neighbourhood of ``u`` as a length-n bool array."""
        raw = np.unpackbits(self.adj[u].view(np.uint8), bitorder="little")
        return raw[: self.n].astype(bool)

    def to_dense(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros((0, 0), dtype=bool)
        raw = np.unpackbits(self.adj.view(np.uint8), axis=1, bitorder="little")
        return raw[:, : self.n].astype(bool)

    def neighbors(self, u: int) -> list[int]:
        return np.flatnonzero(self.row(u)).tolist()

    def degree(self, u: int) -> int:
        return int(sum(int(w).bit_count() for w in self.adj[u]))

    def edge_count(self) -> int:
        if self.n == 0:
            return 0
        counts = np.unpackbits(self.adj.view(np.uint8)).sum()
        return int(counts) // 2

    def edges(self) -> list[tuple[int, int]]:
        d = self.to_dense()
        us, vs = np.nonzero(np.triu(d, 1))
        return list(zip(us.tolist(), vs.tolist()))

    def induced(self, vertices) -> "Graph":
        """Induced subgraph, relabelled positionally (vertices[i] -> i)."""
        idx = np.asarray(list(vertices), dtype=np.intp)
        return Graph.from_dense(self.to_dense()[np.ix_(idx, idx)])

    def check_invariants(self) -> None:
        """Raise AssertionError unless symmetric, loop-free and in range."""
        d = self.to_dense()
        assert not d.diagonal().any(), "self-loop"
        assert np.array_equal(d, d.T), "asymmetric adjacency"
        if self.n % _WORD:
            tail = self.adj[:, -1] >> np.uint64(self.n % _WORD)
            assert not tail.any(), "bit beyond n"

    # value semantics ------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.n, self.adj.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.edge_count()})"


@dataclass(frozen=True)
class GraphPair:
    g1: Graph
    g2: Graph

    def __post_init__(self):
        if self.g1.n != self.g2.n:
            raise ValueError(f"graphs differ in size: {self.g1.n} != {self.g2.n}")

    @property
    def n(self) -> int:
        return self.g1.n

    def __iter__(self):
        return iter((self.g1, self.g2))

    def __getitem__(self, j: int) -> Graph:
        return (self.g1, self.g2)[j]


def _pack_rows(d: np.ndarray) -> np.ndarray:
    n = d.shape[0]
    w = n_words(n)
    packed = np.packbits(d, axis=1, bitorder="little")
    out = np.zeros((n, w * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view("<u8").astype(np.uint64).reshape(n, w)


# sampling -------------------------------------------------------------------


@numba.njit(cache=True)
def _upper_bits(n, seed):
    # Sequential splitmix64 stream over pairs (0,1),(0,2),...,(n-2,n-1).
    d = np.zeros((n, n), dtype=np.uint8)
    x = np.uint64(seed)
    g = np.uint64(GAMMA)
    for u in range(n):
        for v in range(u + 1, n):
            x += g
            z = x
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z ^= z >> np.uint64(31)
            d[u, v] = z & np.uint64(1)
    return d


@numba.njit(cache=True)
def _mirror(d):
    # Tiled copy of the upper triangle into the lower one.
    n = d.shape[0]
    b = 64
    for bu in range(0, n, b):
        for bv in range(bu, n, b):
            for u in range(bu, min(bu + b, n)):
                for v in range(max(bv, u + 1), min(bv + b, n)):
                    d[v, u] = d[u, v]


def sample_er(n: int, seed: int) -> Graph:
    """Sample G(n, 1/2) deterministically from a 64-bit seed.

    Pairs are visited in lexicographic order and each consumes one output of
    the splitmix64 stream seeded with ``seed``; its lowest bit decides the edge.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Graph.empty(0)
    d = _upper_bits(n, np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    _mirror(d)
    return Graph(n, _pack_rows(d.view(bool)))


def pair_seeds(seed: int) -> tuple[int, int]:
    """Per-graph seeds of ``sample_pair``.

    Graph j is sampled with the first splitmix64 output of ``seed ^ TAG_Gj``.
    """
    return SplitMix64(seed ^ TAG_G1).next(), SplitMix64(seed ^ TAG_G2).next()


def sample_pair(n: int, seed: int) -> GraphPair:
    s1, s2 = pair_seeds(seed)
    return GraphPair(sample_er(n, s1), sample_er(n, s2))


# text I/O -------------------------------------------------------------------


def write_graph(g: Graph) -> str:
    """Serialize as ``n`` followed by one sorted ``u v`` line per edge (u < v)."""
    lines = [str(g.n)]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_graph(text: str) -> Graph:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise GraphFormatError(1, "missing vertex count")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise GraphFormatError(1, "malformed vertex count") from None
    if n < 0:
        raise GraphFormatError(1, "negative vertex count")
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(lineno, "malformed line")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(lineno, "malformed line") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(lineno, "vertex out of range")
        if u >= v:
            raise GraphFormatError(lineno, "u ≥ v")
        if (u, v) in seen:
            raise GraphFormatError(lineno, "duplicate edge")
        seen.add((u, v))
    return Graph.from_edges(n, seen)


def load_graph(path) -> Graph:
    with open(path) as fh:
        return read_graph(fh.read())


def save_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(write_graph(g))
