"""Random graph generators for the aggregation benchmarks.

Ten models over 50 vertices with fixed parameters; every sample is fully
determined by (model, seed).  Randomness comes from PCG64 streams split per
purpose (topology vs. edge marks), so regenerating with the same seed gives
a bit-identical edge list.  Geometric models (ksw, girg, hrg) use their
underlying distances as edge weights; all other models draw independent
uniform(0,1) marks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .filtration import WeightedGraph, weighted_graph

MODELS = ("er", "ws", "ba", "cm", "sbm", "chunglu", "ksw", "girg", "hrg", "ergm")

_DEFAULT_PARAMS: dict[str, dict[str, float]] = {
    "er": {"p": 0.10},
    "ws": {"degree": 4, "rewire": 0.1},
    "ba": {"m": 2},
    "cm": {"degree": 4},
    "sbm": {"blocks": 2, "within": 0.22, "between": 0.04},
    "chunglu": {"avg_degree": 4.0, "exponent": 2.5},
    "ksw": {"rows": 5, "cols": 10, "long_range": 1, "alpha": 2.0},
    "girg": {"tau": 2.5, "alpha": 2.0, "dim": 2},
    "hrg": {"temperature": 0.5, "curvature": 1.0},
    "ergm": {"edge": -1.5, "triangle": 0.1, "steps": 3000, "init_p": 0.10},
}


@dataclass(frozen=True)
class ModelSpec:
    model: str
    n: int = 50
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.n < 2:
            raise ValueError("need at least two vertices")

    def param(self, name: str) -> float:
        return self.params.get(name, _DEFAULT_PARAMS[self.model][name])


def model_spec(model: str, n: int = 50, **params) -> ModelSpec:
    return ModelSpec(model, n, dict(params))


def model_index(model: str) -> int:
    return MODELS.index(model)


def seed_for(model_index: int, sample_index: int) -> int:
    """Deterministic per-sample seed schedule."""
    if model_index < 0 or sample_index < 0:
        raise ValueError("indices must be nonnegative")
    return 14 + 1000003 * (model_index + 1) + 9176 * (sample_index + 1)


@dataclass(frozen=True)
class GraphSample:
    graph: WeightedGraph
    metadata: Mapping[str, object]


def metadata_block(meta: Mapping[str, object]) -> str:
    return "".join(f"{k}={meta[k]}\n" for k in sorted(meta))


def _streams(seed: int):
    topo, marks = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(topo)), np.random.Generator(
        np.random.PCG64(marks)
    )


def _uniform_marks(edges, rng) -> list[tuple[int, int, float]]:
    ws = rng.random(len(edges))
    return [(u, v, float(w)) for (u, v), w in zip(edges, ws)]


def generate(spec: ModelSpec, seed: int) -> GraphSample:
    topo_rng, mark_rng = _streams(seed)
    builder = _BUILDERS[spec.model]
    edges, meta = builder(spec, topo_rng)
    meta = dict(meta)
    meta.update(model=spec.model, n=spec.n, seed=seed)
    if spec.model in ("ksw", "girg", "hrg"):
        meta["weight_policy"] = "geometric-distance"
        weighted = edges
    else:
        meta["weight_policy"] = "uniform-marks"
        weighted = _uniform_marks(edges, mark_rng)
    graph = weighted_graph(spec.n, weighted)
    return GraphSample(graph, meta)


def _gen_er(spec, rng):
    n, p = spec.n, spec.param("p")
    if not 0 <= p <= 1:
        raise ValueError("edge probability out of range")
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    mask = rng.random(len(pairs)) < p
    return [pairs[k] for k in np.flatnonzero(mask)], {"p": p}


def _gen_ws(spec, rng):
    n, degree, beta = spec.n, int(spec.param("degree")), spec.param("rewire")
    if degree % 2 or degree >= n:
        raise ValueError("ring degree must be even and < n")
    edges = set()
    for u in range(n):
        for j in range(1, degree // 2 + 1):
            edges.add((min(u, (u + j) % n), max(u, (u + j) % n)))
    edges = sorted(edges)
    out = set(edges)
    for u, v in edges:
        if rng.random() < beta:
            out.discard((u, v))
            while True:
                w = int(rng.integers(0, n))
                cand = (min(u, w), max(u, w))
                if w != u and cand not in out:
                    out.add(cand)
                    break
    return sorted(out), {"degree": degree, "rewire": beta}


def _gen_ba(spec, rng):
    n, m = spec.n, int(spec.param("m"))
    if m < 1 or m >= n:
        raise ValueError("attachment parameter out of range")
    # seed graph: m vertices spanned by a path, then preferential attachment
    edges = [(i, i + 1) for i in range(m - 1)] if m > 1 else []
    repeated = [v for e in edges for v in e] or [0]
    targets = set()
    for v in range(m, n):
        targets.clear()
        while len(targets) < m:
            pick = repeated[int(rng.integers(0, len(repeated)))]
            targets.add(pick)
        for t in sorted(targets):
            edges.append((t, v))
            repeated.extend((t, v))
    return sorted(set(edges)), {"m": m}


def _gen_cm(spec, rng):
    n, degree = spec.n, int(spec.param("degree"))
    if (n * degree) % 2:
        raise ValueError("degree sum must be even")
    stubs = np.repeat(np.arange(n), degree)
    rng.shuffle(stubs)
    loops = 0
    multi = 0
    seen = set()
    for a, b in zip(stubs[0::2], stubs[1::2]):
        a, b = int(a), int(b)
        if a == b:
            loops += 1
            continue
        key = (min(a, b), max(a, b))
        if key in seen:
            multi += 1
            continue
        seen.add(key)
    return sorted(seen), {
        "degree": degree,
        "loops_removed": loops,
        "multi_edges_removed": multi,
        "simplified": True,
    }


def _gen_sbm(spec, rng):
    n = spec.n
    blocks = int(spec.param("blocks"))
    within, between = spec.param("within"), spec.param("between")
    membership = [v * blocks // n for v in range(n)]
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            p = within if membership[u] == membership[v] else between
            if rng.random() < p:
                edges.append((u, v))
    return edges, {"blocks": blocks, "within": within, "between": between}


def _gen_chunglu(spec, rng):
    n = spec.n
    avg, tau = spec.param("avg_degree"), spec.param("exponent")
    raw = np.array([(i + 1.0) ** (-1.0 / (tau - 1.0)) for i in range(n)])
    w = raw * (avg / raw.mean())
    total = w.sum()
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < min(1.0, w[u] * w[v] / total):
                edges.append((u, v))
    return edges, {"avg_degree": avg, "exponent": tau, "weights": "power-law"}


def _grid_coords(rows, cols):
    return [(r, c) for r in range(rows) for c in range(cols)]


def _gen_ksw(spec, rng):
    rows, cols = int(spec.param("rows")), int(spec.param("cols"))
    q, alpha = int(spec.param("long_range")), spec.param("alpha")
    n = rows * cols
    if n != spec.n:
        raise ValueError("grid size must match vertex count")
    coords = _grid_coords(rows, cols)

    def dist(a, b):
        return abs(coords[a][0] - coords[b][0]) + abs(coords[a][1] - coords[b][1])

    edges = {}
    for u in range(n):
        r, c = coords[u]
        if c + 1 < cols:
            edges[(u, u + 1)] = 1.0
        if r + 1 < rows:
            edges[(u, u + cols)] = 1.0
    for u in range(n):
        others = [v for v in range(n) if v != u]
        weights = np.array([dist(u, v) ** (-alpha) for v in others])
        weights /= weights.sum()
        for _ in range(q):
            v = others[int(rng.choice(len(others), p=weights))]
            key = (min(u, v), max(u, v))
            edges.setdefault(key, float(dist(u, v)))
    out = sorted((u, v, w) for (u, v), w in edges.items())
    return out, {"rows": rows, "cols": cols, "long_range": q, "alpha": alpha}


def _gen_girg(spec, rng):
    n = spec.n
    tau, alpha, dim = spec.param("tau"), spec.param("alpha"), int(spec.param("dim"))
    weights = (1.0 - rng.random(n)) ** (-1.0 / (tau - 1.0))
    pos = rng.random((n, dim))
    total = weights.sum()
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            delta = np.abs(pos[u] - pos[v])
            delta = np.minimum(delta, 1.0 - delta)  # torus
            dist = float(np.max(delta))
            if dist == 0.0:
                p = 1.0
            else:
                p = min(1.0, (weights[u] * weights[v] / (total * dist**dim)) ** alpha)
            if rng.random() < p:
                edges.append((u, v, max(dist, 1e-12)))
    return edges, {"tau": tau, "alpha": alpha, "dim": dim}


def _gen_hrg(spec, rng):
    n = spec.n
    T = spec.param("temperature")
    ah = spec.param("curvature")
    R = 2.0 * math.log(n)
    theta = rng.random(n) * 2.0 * math.pi
    u = rng.random(n)
    radii = np.arccosh(1.0 + u * (math.cosh(ah * R) - 1.0)) / ah
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            dt = math.pi - abs(math.pi - abs(theta[a] - theta[b]))
            ch = math.cosh(radii[a]) * math.cosh(radii[b]) - math.sinh(
                radii[a]
            ) * math.sinh(radii[b]) * math.cos(dt)
            d = math.acosh(max(1.0, ch))
            p = 1.0 / (1.0 + math.exp((d - R) / (2.0 * T)))
            if rng.random() < p:
                edges.append((a, b, max(d, 1e-12)))
    return edges, {"temperature": T, "curvature": ah, "radius": R}


def _gen_ergm(spec, rng):
    n = spec.n
    te, tt = spec.param("edge"), spec.param("triangle")
    steps = int(spec.param("steps"))
    init_p = spec.param("init_p")
    adj = np.zeros((n, n), dtype=bool)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < init_p:
                adj[u, v] = adj[v, u] = True
    for _ in range(steps):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u == v:
            continue
        common = int(np.count_nonzero(adj[u] & adj[v]))
        if adj[u, v]:
            delta = -te - tt * common
        else:
            delta = te + tt * common
        if delta >= 0 or rng.random() < math.exp(delta):
            adj[u, v] = adj[v, u] = not adj[u, v]
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if adj[u, v]]
    return edges, {"edge": te, "triangle": tt, "steps": steps, "init_p": init_p}


_BUILDERS = {
    "er": _gen_er,
    "ws": _gen_ws,
    "ba": _gen_ba,
    "cm": _gen_cm,
    "sbm": _gen_sbm,
    "chunglu": _gen_chunglu,
    "ksw": _gen_ksw,
    "girg": _gen_girg,
    "hrg": _gen_hrg,
    "ergm": _gen_ergm,
}


__all__ = [
    "MODELS",
    "GraphSample",
    "ModelSpec",
    "generate",
    "metadata_block",
    "model_index",
    "model_spec",
    "seed_for",
]
