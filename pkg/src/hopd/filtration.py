"""Clique filtration of weighted graphs and H0/H1 persistence.

Vertices enter at value 0, an edge at its (optionally normalized) weight,
and a triangle when its heaviest edge enters, so every face precedes its
cofaces.  H1 pairs come from GF(2) column reduction of the triangle
boundary matrix restricted to cycle-creating edges; a full reduction of the
whole boundary matrix (no clearing, no restriction) is kept alongside as an
independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .core import Atom, Diagram, diagram, interval

INF = math.inf


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        seen = set()
        for u, v, w in self.edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError("vertex out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            if not math.isfinite(w):
                raise ValueError("edge weights must be finite")

    def edge_count(self) -> int:
        return len(self.edges)


def weighted_graph(n: int, edges: Iterable[tuple[int, int, float]]) -> WeightedGraph:
    canon = tuple(
        (min(u, v), max(u, v), float(w)) for u, v, w in edges
    )
    return WeightedGraph(n, tuple(sorted(canon)))


def write_edge_list(g: WeightedGraph) -> str:
    lines = [f"{g.n} {len(g.edges)}"]
    lines += [f"{u} {v} {w!r}" for u, v, w in g.edges]
    return "\n".join(lines) + "\n"


def read_edge_list(text: str) -> WeightedGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, m = (int(tok) for tok in lines[0].split())
    edges = []
    for ln in lines[1 : m + 1]:
        u, v, w = ln.split()
        edges.append((int(u), int(v), float(w)))
    return weighted_graph(n, edges)


@dataclass(frozen=True)
class Filtration:
    """Simplices up to dimension 2 sorted by (value, dim, vertices)."""

    simplices: tuple[tuple[float, int, tuple[int, ...]], ...]
    n_vertices: int
    normalized: bool
    max_value: float

    def cap_value(self) -> float:
        return 1.0 if self.normalized else self.max_value


def build_clique_filtration(g: WeightedGraph, normalize: bool = True) -> Filtration:
    scale = max((w for _, _, w in g.edges), default=1.0)
    if normalize and scale > 0:
        edges = [(u, v, w / scale) for u, v, w in g.edges]
    else:
        edges = list(g.edges)
    adj: dict[int, set[int]] = {v: set() for v in range(g.n)}
    value = {}
    for u, v, w in edges:
        adj[u].add(v)
        adj[v].add(u)
        value[(u, v)] = w
    simplices = [(0.0, 0, (v,)) for v in range(g.n)]
    simplices += [(w, 1, (u, v)) for u, v, w in edges]
    for u, v, w in edges:
        for k in sorted(adj[u] & adj[v]):
            if k > v:
                tw = max(w, value[(min(u, k), max(u, k))], value[(v, k)])
                simplices.append((tw, 2, (u, v, k)))
    simplices.sort(key=lambda s: (s[0], s[1], s[2]))
    max_value = max((w for _, _, w in edges), default=1.0)
    return Filtration(tuple(simplices), g.n, normalize and scale > 0, max_value)


def _check_sorted(f: Filtration):
    for a, b in zip(f.simplices, f.simplices[1:]):
        if (a[0], a[1], a[2]) > (b[0], b[1], b[2]):
            raise ValueError("filtration is not sorted")


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def _essential_death(f: Filtration, policy: str, delta: float) -> float:
    if policy == "infinite":
        return INF
    return f.cap_value() + delta


def persistence_h0(
    f: Filtration, essential: str = "cap", cap_delta: float = 0.0
) -> Diagram:
    """Components are born at 0 and die at their merging edge."""
    _check_sorted(f)
    uf = _UnionFind(f.n_vertices)
    pairs: list[tuple[float, float]] = []
    components = f.n_vertices
    for value, dim, verts in f.simplices:
        if dim != 1:
            continue
        if uf.union(verts[0], verts[1]):
            pairs.append((0.0, value))
            components -= 1
    death = _essential_death(f, essential, cap_delta)
    pairs.extend((0.0, death) for _ in range(components))
    atoms: dict[Atom, int] = {}
    for b, d in pairs:
        if b == d:
            continue
        a = interval(b, d)
        atoms[a] = atoms.get(a, 0) + 1
    return diagram(atoms, level=1)


def persistence_h1(
    f: Filtration, essential: str = "cap", cap_delta: float = 0.0
) -> Diagram:
    """Cycle persistence by GF(2) reduction of the triangle boundary columns.

    Edges that do not merge components create cycles; triangles kill them.
    Unpaired cycles receive the cap death (or +inf under the "infinite"
    policy) and zero-persistence pairs are dropped as diagonal.
    """
    _check_sorted(f)
    edge_order: dict[tuple[int, int], int] = {}
    edge_value: list[float] = []
    positive: list[bool] = []
    uf = _UnionFind(f.n_vertices)
    triangles: list[tuple[float, tuple[int, int, int]]] = []
    for value, dim, verts in f.simplices:
        if dim == 1:
            idx = len(edge_value)
            edge_order[verts] = idx
            edge_value.append(value)
            positive.append(not uf.union(verts[0], verts[1]))
        elif dim == 2:
            triangles.append((value, verts))

    # columns over positive edges only; negative edges never pair with triangles
    low_owner: dict[int, list[int]] = {}
    pairs: list[tuple[float, float]] = []
    paired_edges: set[int] = set()
    for value, (a, b, c) in triangles:
        col = []
        for e in ((a, b), (a, c), (b, c)):
            idx = edge_order[e]
            if positive[idx]:
                col.append(idx)
        col = sorted(set(col))
        while col:
            low = col[-1]
            other = low_owner.get(low)
            if other is None:
                break
            col = sorted(set(col) ^ set(other))
        if col:
            low = col[-1]
            low_owner[low] = col
            paired_edges.add(low)
            pairs.append((edge_value[low], value))
    death = _essential_death(f, essential, cap_delta)
    for idx, is_pos in enumerate(positive):
        if is_pos and idx not in paired_edges:
            pairs.append((edge_value[idx], death))
    atoms: dict[Atom, int] = {}
    for b, d in pairs:
        if b == d:
            continue
        a = interval(b, d)
        atoms[a] = atoms.get(a, 0) + 1
    return diagram(atoms, level=1)


# ---------------------------------------------------------------------------
# Full-reduction oracle (standard persistence algorithm, no shortcuts)


def full_reduction_pairs(f: Filtration):
    """Column-reduce the whole boundary matrix; returns (pairs, essential).

    pairs: list of (birth simplex index, death simplex index).
    essential: simplex indices whose reduced column is zero and that are
    never a pivot row.
    """
    _check_sorted(f)
    index_of = {verts: i for i, (_, _, verts) in enumerate(f.simplices)}
    columns: list[set[int]] = []
    for _, dim, verts in f.simplices:
        if dim == 0:
            columns.append(set())
        elif dim == 1:
            columns.append({index_of[(verts[0],)], index_of[(verts[1],)]})
        else:
            a, b, c = verts
            columns.append(
                {index_of[(a, b)], index_of[(a, c)], index_of[(b, c)]}
            )
    low_owner: dict[int, int] = {}
    pairs = []
    for j, col in enumerate(columns):
        while col:
            low = max(col)
            owner = low_owner.get(low)
            if owner is None:
                break
            col ^= columns[owner]
        if col:
            low = max(col)
            low_owner[low] = j
            pairs.append((low, j))
    dead = {i for i, _ in pairs} | {j for _, j in pairs}
    essential = [i for i in range(len(columns)) if i not in dead]
    return pairs, essential


def persistence_oracle(
    f: Filtration, dim: int, essential: str = "cap", cap_delta: float = 0.0
) -> Diagram:
    """Degree-`dim` diagram read off the full reduction."""
    pairs, essentials = full_reduction_pairs(f)
    death_cap = _essential_death(f, essential, cap_delta)
    out: list[tuple[float, float]] = []
    for i, j in pairs:
        if f.simplices[i][1] == dim:
            out.append((f.simplices[i][0], f.simplices[j][0]))
    for i in essentials:
        if f.simplices[i][1] == dim:
            out.append((f.simplices[i][0], death_cap))
    atoms: dict[Atom, int] = {}
    for b, d in out:
        if b == d:
            continue
        a = interval(b, d)
        atoms[a] = atoms.get(a, 0) + 1
    return diagram(atoms, level=1)


def triangle_count(g: WeightedGraph) -> int:
    adj: dict[int, set[int]] = {v: set() for v in range(g.n)}
    for u, v, _ in g.edges:
        adj[u].add(v)
        adj[v].add(u)
    count = 0
    for u, v, _ in g.edges:
        count += sum(1 for k in adj[u] & adj[v] if k > v)
    return count


__all__ = [
    "Filtration",
    "WeightedGraph",
    "build_clique_filtration",
    "full_reduction_pairs",
    "persistence_h0",
    "persistence_h1",
    "persistence_oracle",
    "read_edge_list",
    "triangle_count",
    "weighted_graph",
    "write_edge_list",
]
