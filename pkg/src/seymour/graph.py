"""Directed graphs on packed bitset rows and the per-graph computations.

Vertices are 0-indexed.  A graph is immutable once built; every function here
is a pure read and may be called concurrently on a shared instance.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import _kernels as K

#: distance reported for vertices that cannot be reached
UNREACHABLE = np.iinfo(np.int64).max


class Digraph:
    """A loopless digraph with ``n`` vertices stored as bitset rows.

    Bit ``v`` of ``rows[u]`` is set iff the arc ``u -> v`` exists.
    """

    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: np.ndarray):
        n = int(n)
        if n < 1:
            raise ValueError(f"a digraph needs at least one vertex, got n={n}")
        rows = np.ascontiguousarray(rows, dtype=np.uint64)
        if rows.shape != (n, K.n_words(n)):
            raise ValueError(f"rows must have shape {(n, K.n_words(n))}, got {rows.shape}")
        if np.any(rows & ~K.full_mask(n)):
            raise ValueError("rows address vertices beyond n")
        idx = np.arange(n)
        if np.any((rows[idx, idx >> 6] >> (idx & 63).astype(np.uint64)) & np.uint64(1)):
            raise ValueError("self-loops are not allowed")
        rows.flags.writeable = False
        self.n = n
        self.rows = rows

    @classmethod
    def _trusted(cls, n, rows):
        # skips validation for kernel-built rows
        g = object.__new__(cls)
        rows.flags.writeable = False
        g.n = n
        g.rows = rows
        return g

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[tuple[int, int]]) -> "Digraph":
        rows = np.zeros((n, K.n_words(n)), dtype=np.uint64)
        for u, v in arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"arc {(u, v)} out of range for n={n}")
            if u == v:
                raise ValueError("self-loops are not allowed")
            rows[u, v >> 6] |= np.uint64(1) << np.uint64(v & 63)
        return cls(n, rows)

    @classmethod
    def from_matrix(cls, matrix) -> "Digraph":
        m = np.asarray(matrix, dtype=bool)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("adjacency matrix must be square")
        n = m.shape[0]
        width = K.n_words(n) * 64
        padded = np.zeros((n, width), dtype=bool)
        padded[:, :n] = m
        packed = np.packbits(padded, axis=1, bitorder="little")
        rows = packed.view("<u8").astype(np.uint64)
        return cls(n, rows)

    @classmethod
    def from_text(cls, text: str) -> "Digraph":
        """Parse the fixture format: a line with ``n`` then ``n`` rows of 0/1."""
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty graph text")
        try:
            n = int(lines[0])
        except ValueError:
            raise ValueError(f"first line must be the vertex count, got {lines[0]!r}") from None
        body = lines[1:]
        if len(body) != n:
            raise ValueError(f"expected {n} adjacency rows, got {len(body)}")
        for i, ln in enumerate(body):
            if len(ln) != n or set(ln) - {"0", "1"}:
                raise ValueError(f"row {i} must be {n} characters of 0/1")
        return cls.from_matrix([[c == "1" for c in ln] for ln in body])

    def to_text(self) -> str:
        m = self.to_matrix()
        out = [str(self.n)]
        out.extend("".join("1" if b else "0" for b in row) for row in m)
        return "\n".join(out) + "\n"

    def to_matrix(self) -> np.ndarray:
        bits = np.unpackbits(self.rows.astype("<u8").view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.n].astype(bool)

    def has_arc(self, u: int, v: int) -> bool:
        return bool((int(self.rows[u, v >> 6]) >> (v & 63)) & 1)

    def out_degrees(self) -> np.ndarray:
        return K.out_degrees(self.rows, self.n)

    def in_degrees(self) -> np.ndarray:
        return K.in_degrees(self.rows, self.n)

    def arc_count(self) -> int:
        return int(self.out_degrees().sum())

    def has_antiparallel(self) -> bool:
        m = self.to_matrix()
        return bool(np.any(m & m.T))

    def _check_vertex(self, v):
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
            raise ValueError(f"vertex {v!r} out of range for n={self.n}")

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash((self.n, self.rows.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, arcs={self.arc_count()})"


class Tournament(Digraph):
    """A digraph with exactly one arc between every pair of vertices."""

    __slots__ = ()

    def __init__(self, n: int, rows: np.ndarray):
        super().__init__(n, rows)
        m = self.to_matrix()
        if not np.array_equal(m ^ m.T, ~np.eye(self.n, dtype=bool)):
            raise ValueError("not a tournament: some pair has zero or two arcs")

    @classmethod
    def from_digraph(cls, g: Digraph) -> "Tournament":
        return cls(g.n, g.rows.copy())


@dataclass(frozen=True)
class NeighborhoodProfile:
    vertex: int
    n1: int
    n2: int
    indeg: int
    outdeg: int
    is_seymour: bool


class Triangle(NamedTuple):
    a: int
    b: int
    c: int


@dataclass(frozen=True)
class TriangleAbsence:
    """Returned when no arc from N1(v) into N-1(v) exists for the chosen v.

    Under the degree precondition this cannot happen, so an instance is a
    witness against the argument and carries the sizes needed to inspect it.
    """

    vertex: int
    n1: int
    n2: int
    n_in: int
    n_none: int


def _indices(words: np.ndarray, n: int) -> frozenset[int]:
    bits = np.unpackbits(words.astype("<u8").view(np.uint8), bitorder="little")[:n]
    return frozenset(np.flatnonzero(bits).tolist())


def first_neighborhood(g: Digraph, v: int) -> frozenset[int]:
    g._check_vertex(v)
    return _indices(g.rows[v], g.n)


def second_neighborhood(g: Digraph, v: int) -> frozenset[int]:
    """Vertices at distance exactly two from ``v``, via a row union mask."""
    g._check_vertex(v)
    out = first_neighborhood(g, v)
    if not out:
        return frozenset()
    acc = np.bitwise_or.reduce(g.rows[sorted(out)], axis=0)
    acc &= ~g.rows[v]
    acc[v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
    return _indices(acc, g.n)


def in_neighborhood(g: Digraph, v: int) -> frozenset[int]:
    g._check_vertex(v)
    col = (g.rows[:, v >> 6] >> np.uint64(v & 63)) & np.uint64(1)
    return frozenset(np.flatnonzero(col).tolist())


def distances_from(g: Digraph, v: int) -> np.ndarray:
    """Breadth-first distances from ``v``; unreachable vertices get UNREACHABLE."""
    g._check_vertex(v)
    adj = [np.flatnonzero(row).tolist() for row in g.to_matrix()]
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    dist[v] = 0
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] == UNREACHABLE:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def seymour_set(g: Digraph) -> frozenset[int]:
    n1, n2 = K.first_second_counts(g.rows, g.n)
    return frozenset(np.flatnonzero(n2 >= n1).tolist())


def seymour_set_degree_criterion(t: Tournament) -> frozenset[int]:
    """Seymour vertices of ``t`` read off the degrees as outdeg <= indeg.

    Only valid when every vertex has eccentricity at most 2; that is NOT
    checked here.  Call :func:`eccentricity_at_most_2` first and fall back to
    :func:`seymour_set` when it fails.
    """
    out = t.out_degrees()
    return frozenset(np.flatnonzero(out <= t.in_degrees()).tolist())


def eccentricity_at_most_2(g: Digraph) -> bool:
    return bool(K.eccentricity_at_most_2(g.rows, g.n))


def neighborhood_profiles(g: Digraph) -> list[NeighborhoodProfile]:
    n1, n2 = K.first_second_counts(g.rows, g.n)
    indeg = g.in_degrees()
    return [
        NeighborhoodProfile(v, int(n1[v]), int(n2[v]), int(indeg[v]), int(n1[v]), bool(n2[v] >= n1[v]))
        for v in range(g.n)
    ]


def find_triangle_via_seymour(g: Digraph) -> Triangle | TriangleAbsence:
    """Directed triangle through a Seymour vertex in a balanced digraph.

    Requires ``3 | n`` and minimum in- and out-degree at least ``n / 3``.
    Takes the smallest Seymour vertex ``v`` and returns ``(v, u, w)`` for the
    first ``u`` in N1(v) (ascending) that has an arc into N-1(v), with ``w``
    the smallest such in-neighbour.
    """
    n = g.n
    if n % 3:
        raise ValueError(f"n must be divisible by 3, got n={n}")
    d = n // 3
    out, indeg = g.out_degrees(), g.in_degrees()
    if out.min() < d or indeg.min() < d:
        raise ValueError(
            f"degree condition unmet: min outdeg {out.min()}, min indeg {indeg.min()}, need {d}"
        )
    s = seymour_set(g)
    if not s:
        raise ValueError("no Seymour vertex found")
    v = min(s)
    in_mask = np.zeros(K.n_words(n), dtype=np.uint64)
    for w in in_neighborhood(g, v):
        in_mask[w >> 6] |= np.uint64(1) << np.uint64(w & 63)
    n1 = sorted(first_neighborhood(g, v))
    for u in n1:
        hit = g.rows[u] & in_mask
        if hit.any():
            return Triangle(v, u, min(_indices(hit, n)))
    n_in = len(in_neighborhood(g, v))
    return TriangleAbsence(v, len(n1), len(second_neighborhood(g, v)), n_in, n - 1 - len(n1) - n_in)


def is_directed_triangle(g: Digraph, tri) -> bool:
    a, b, c = tri
    return len({a, b, c}) == 3 and g.has_arc(a, b) and g.has_arc(b, c) and g.has_arc(c, a)
