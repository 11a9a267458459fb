"""Characters on signed diagrams and fast coboundary evaluation.

A character assigns an angle to every atom class and evaluates a signed
diagram as a phase; aggregation then shows up as a quadratic phase over
preorder-compatible pairs.  Coboundary characters (angles psi(v) - psi(u))
reduce that phase to two dominance sums over principal order ideals, which
is where the near-linear evaluation comes from: the aggregate itself is
never materialized.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ._fenwick import FenwickTree
from .aggregation import (
    AggregateOptions,
    DEFAULT_OPTIONS,
    PairAggregate,
    level1_arrays,
    pair_class,
    pair_is_diagonal,
)
from .core import (
    Atom,
    DEFAULT_PREORDER,
    LevelMismatch,
    LinearDiagram,
    PreorderSpec,
    PreorderUnavailable,
    VirtualDiagram,
    atom_leq,
    psi_golden,
)

TWO_PI = 2.0 * math.pi


class MissingAngle(KeyError):
    """The character has no angle for an atom in the evaluated support."""


def wrap_angle(x: float) -> float:
    return float(x) % TWO_PI


def angles_close(a: float, b: float, tol: float = 1e-9) -> bool:
    """Equality of phases mod 2*pi."""
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d) <= tol


@dataclass(frozen=True)
class Character:
    """Total angle assignment on level-`level` atom classes; basepoint angle 0."""

    level: int
    angles: Mapping[Atom, float]

    def angle_of(self, a: Atom) -> float:
        if a.level != self.level:
            raise LevelMismatch("character level mismatch")
        try:
            return wrap_angle(self.angles[a])
        except KeyError:
            raise MissingAngle(f"character has no angle for {a!r}") from None


@dataclass(frozen=True)
class CoboundaryCharacter:
    """Potential psi on level-n atoms inducing pair angles psi(v) - psi(u).

    The induced angle vanishes on diagonal classes by construction.  ``psi``
    may be a mapping (total on the support in use) or any callable on atoms;
    the default benchmark potential hashes intern ids by the golden ratio.
    """

    level: int
    psi: Mapping[Atom, float] | Callable[[Atom], float] = field(default=psi_golden)

    def psi_of(self, a: Atom) -> float:
        if a.level != self.level:
            raise LevelMismatch("potential level mismatch")
        if callable(self.psi):
            return wrap_angle(self.psi(a))
        try:
            return wrap_angle(self.psi[a])
        except KeyError:
            raise MissingAngle(f"potential has no value for {a!r}") from None

    def pair_angle(self, u: Atom, v: Atom) -> float:
        return wrap_angle(self.psi_of(v) - self.psi_of(u))

    def induced_angle(self, pair_atom: Atom) -> float:
        """Angle of a level-(n+1) class with singleton-diagram endpoints."""
        if pair_atom.level != self.level + 1:
            raise LevelMismatch("class level mismatch")
        minus, plus = pair_atom.minus, pair_atom.plus
        if len(minus.entries) != 1 or len(plus.entries) != 1:
            raise MissingAngle("coboundary angles need singleton endpoints")
        return self.pair_angle(minus.entries[0][0], plus.entries[0][0])


def _angle_lookup(chi, a: Atom) -> float:
    if isinstance(chi, CoboundaryCharacter):
        return chi.induced_angle(a)
    return chi.angle_of(a)


def evaluate_character(chi, xi) -> float:
    """Phase of a signed diagram: sum of coefficient * angle, mod 2*pi."""
    if isinstance(xi, PairAggregate):
        return _evaluate_on_pairs(chi, xi)
    expected = chi.level + 1 if isinstance(chi, CoboundaryCharacter) else chi.level
    if xi.level != expected:
        raise LevelMismatch("character level mismatch")
    total = 0.0
    for a, c in xi.entries:
        total += float(c) * _angle_lookup(chi, a)
    return wrap_angle(total)


def coboundary_net_multiplicities(aggregate, base_atoms) -> np.ndarray:
    """Exact per-atom net multiplicity of a pair aggregate.

    For each base atom a, sums the coefficients of classes having a as plus
    endpoint minus those having a as minus endpoint; this is the integer
    that multiplies psi(a) in any coboundary evaluation.  Collecting it
    before touching floats keeps both evaluation routes bit-identical.
    """
    n = len(base_atoms)
    if isinstance(aggregate, PairAggregate):
        w = aggregate.coeff.astype(np.float64)  # exact below 2^53
        plus = np.bincount(aggregate.j, weights=w, minlength=n)
        minus = np.bincount(aggregate.i, weights=w, minlength=n)
        net = plus - minus
        return net.astype(np.int64)
    index = {a.uid: k for k, a in enumerate(base_atoms)}
    net = [0] * n
    for cls, c in aggregate.entries:
        minus, plus = cls.minus, cls.plus
        if len(minus.entries) != 1 or len(plus.entries) != 1:
            raise MissingAngle("coboundary collection needs singleton endpoints")
        net[index[plus.entries[0][0].uid]] += c
        net[index[minus.entries[0][0].uid]] -= c
    return np.array(net, dtype=np.int64)


def coboundary_phase_raw(aggregate, psi: CoboundaryCharacter, base_atoms) -> float:
    """Unwrapped coboundary phase of an explicit pair aggregate."""
    psi_vec = psi_vector(psi, list(base_atoms))
    net = coboundary_net_multiplicities(aggregate, base_atoms)
    return float(np.dot(psi_vec, net.astype(np.float64)))


def _evaluate_on_pairs(chi, agg: PairAggregate) -> float:
    if isinstance(chi, CoboundaryCharacter):
        if chi.level + 1 != agg.level:
            raise LevelMismatch("character level mismatch")
        return wrap_angle(coboundary_phase_raw(agg, chi, agg.base))
    total = 0.0
    for i, j, c in zip(agg.i, agg.j, agg.coeff):
        total += float(c) * chi.angle_of(pair_class(agg.base[i], agg.base[j]))
    return wrap_angle(total)


def quadratic_phase(
    xi: VirtualDiagram,
    theta,
    options: AggregateOptions = DEFAULT_OPTIONS,
    spec: PreorderSpec = DEFAULT_PREORDER,
) -> float:
    """Slow oracle: the double sum over preorder-compatible support pairs.

    Equals ``evaluate_character(theta, naive_self_aggregate(xi))`` exactly.
    """
    total = 0.0
    for u, cu in xi.entries:
        for v, cv in xi.entries:
            if not atom_leq(u, v, spec):
                continue
            if options.drop_diagonal_classes and pair_is_diagonal(u, v, spec):
                continue
            total += float(cu * cv) * _angle_lookup(theta, pair_class(u, v))
    return wrap_angle(total)


# ---------------------------------------------------------------------------
# Dominance sums (zeta transforms over coordinatewise preorders)


@dataclass(frozen=True)
class DominanceInput:
    """Coordinate points with signed integer coefficients and caller ids."""

    points: tuple[tuple[tuple[float, ...], int, object], ...]

    @staticmethod
    def from_arrays(coords, coeffs, ids=None) -> "DominanceInput":
        n = len(coeffs)
        if ids is None:
            ids = range(n)
        pts = tuple(
            (tuple(float(x) for x in coords[k]), int(coeffs[k]), ids[k])
            for k in range(n)
        )
        return DominanceInput(pts)


def dominance_sums(
    inp: DominanceInput, direction: str = "down", engine: str = "auto"
) -> dict:
    """Inclusive coordinatewise dominance sums.

    down: Z-(v) = sum of coefficients of points <= v (v included).
    up:   Z+(u) = sum over points >= u, computed by coordinate negation
    through the same code path.
    """
    if direction not in ("down", "up"):
        raise ValueError("direction must be 'down' or 'up'")
    pts = inp.points
    if not pts:
        return {}
    coords = [p[0] for p in pts]
    if direction == "up":
        coords = [tuple(-x for x in c) for c in coords]
    weights = [p[1] for p in pts]
    z = _dominance_down(coords, weights, engine)
    return {pts[k][2]: z[k] for k in range(len(pts))}


def _dominance_down(coords, weights, engine="auto"):
    n = len(coords)
    r = len(coords[0])
    if engine == "auto":
        if r == 2 and n > 1024:
            engine = "vector"
        elif r == 2 and n > 192:
            engine = "sweep"
        else:
            engine = "cdq"
    if engine == "vector":
        if r != 2:
            raise ValueError("vector engine handles two coordinates only")
        xy = np.asarray(coords, dtype=np.float64)
        w = np.asarray(weights, dtype=np.int64)
        return list(_zeta2_vector(xy[:, 0], xy[:, 1], w))
    if engine == "sweep":
        if r != 2:
            raise ValueError("sweep engine handles two coordinates only")
        return _zeta2_sweep(coords, weights)
    if engine == "cdq":
        return _zeta_cdq(coords, weights)
    raise ValueError(f"unknown engine {engine!r}")


def _coalesce(coords, weights):
    """Group identical coordinate tuples; equal points dominate mutually."""
    groups: dict[tuple, int] = {}
    members: dict[tuple, list[int]] = {}
    for k, c in enumerate(coords):
        groups[c] = groups.get(c, 0) + weights[k]
        members.setdefault(c, []).append(k)
    keys = sorted(groups)
    return keys, [groups[k] for k in keys], members


def _zeta_cdq(coords, weights):
    """Merge-style divide and conquer over the first coordinate.

    Cross contributions left -> right recurse over remaining coordinates,
    with a Fenwick tree over the last-coordinate ranks handling the final
    two dimensions; one remaining coordinate degenerates to sorted prefix
    sums.  Comparisons are inclusive throughout.
    """
    keys, w, members = _coalesce(coords, weights)
    m = len(keys)
    r = len(coords[0])
    z = list(w)

    last_rank = {}
    for v in sorted({k[-1] for k in keys}):
        last_rank[v] = len(last_rank)
    ranks = [last_rank[k[-1]] for k in keys]
    fen = FenwickTree(len(last_rank))

    def join(src, tgt, dim):
        # every src already <= every tgt on coords [0, dim)
        if not src or not tgt:
            return
        if dim >= r:
            total = sum(w[s] for s in src)
            for t in tgt:
                z[t] += total
            return
        if dim == r - 1:
            src_sorted = sorted(src, key=lambda s: keys[s][dim])
            tgt_sorted = sorted(tgt, key=lambda t: keys[t][dim])
            run = 0
            si = 0
            for t in tgt_sorted:
                limit = keys[t][dim]
                while si < len(src_sorted) and keys[src_sorted[si]][dim] <= limit:
                    run += w[src_sorted[si]]
                    si += 1
                z[t] += run
            return
        if dim == r - 2:
            # one sorted pass over this coordinate, prefix-sum tree on the last
            order = sorted(
                [(keys[s][dim], 0, s) for s in src] + [(keys[t][dim], 1, t) for t in tgt]
            )
            for _, is_tgt, k in order:
                if is_tgt:
                    z[k] += fen.prefix(ranks[k])
                else:
                    fen.add(ranks[k], w[k])
            fen.reset()
            return
        order = sorted(
            [(keys[s][dim], 0, s) for s in src] + [(keys[t][dim], 1, t) for t in tgt]
        )

        def rec(items):
            if len(items) <= 1:
                return
            mid = len(items) // 2
            left, right = items[:mid], items[mid:]
            rec(left)
            rec(right)
            join(
                [k for _, is_tgt, k in left if not is_tgt],
                [k for _, is_tgt, k in right if is_tgt],
                dim + 1,
            )

        rec(order)

    def solve(lo, hi):
        if hi - lo <= 1:
            return
        mid = (lo + hi) // 2
        solve(lo, mid)
        solve(mid, hi)
        join(list(range(lo, mid)), list(range(mid, hi)), 0)

    # keys are in lexicographic order, so any left-half point is <= any
    # right-half point on the first coordinate (inclusive on ties)
    solve(0, m)
    pos = {key: i for i, key in enumerate(keys)}
    out = [0] * len(coords)
    for key, idxs in members.items():
        zv = z[pos[key]]
        for k in idxs:
            out[k] = zv
    return out


def _zeta2_sweep(coords, weights):
    """Single x-sorted pass with a Fenwick tree over y-ranks (two coordinates)."""
    keys, w, members = _coalesce(coords, weights)
    m = len(keys)
    ys = sorted({k[1] for k in keys})
    yrank = {v: i for i, v in enumerate(ys)}
    fen = FenwickTree(len(ys))
    z = [0] * m
    i = 0
    while i < m:
        j = i
        while j < m and keys[j][0] == keys[i][0]:
            j += 1
        run = 0
        for t in range(i, j):  # same x, ascending y; in-group prefix inclusive
            run += w[t]
            z[t] = run + fen.prefix(yrank[keys[t][1]])
        for t in range(i, j):
            fen.add(yrank[keys[t][1]], w[t])
        i = j
    pos = {key: i for i, key in enumerate(keys)}
    out = [0] * len(coords)
    for key, idxs in members.items():
        for k in idxs:
            out[k] = z[pos[key]]
    return out


def _zeta2_both(x, y, w):
    """Down and up dominance sums in one bottom-up pass (two coordinates).

    Points are coalesced and laid out in lexicographic order, so at each
    merge level every left-half point precedes its sibling right half on the
    first coordinate (ties included).  One radix sort per level orders each
    half-block by second-coordinate rank; prefix sums over the sibling block
    then serve the down sums (right targets) and up sums (left targets)
    simultaneously.  Exact in integers throughout.
    """
    key = x + 1j * y  # np.unique on complex sorts by (real, imag)
    uniq, inv = np.unique(key, return_inverse=True)
    m = uniq.size
    W = np.zeros(m, dtype=np.int64)
    np.add.at(W, inv, w.astype(np.int64))
    Y = uniq.imag
    yr = np.searchsorted(np.unique(Y), Y).astype(np.int64)  # dense ranks
    z_down = W.copy()
    z_up = W.copy()
    pos = np.arange(m, dtype=np.int64)
    bits = max(1, int(m).bit_length())
    level = 0
    while (1 << level) < m:
        half = pos >> level
        sib = half ^ 1
        hkey = (half << bits) | yr
        order = np.argsort(hkey, kind="stable")
        sk = hkey[order]
        cw = np.concatenate(([0], np.cumsum(W[order])))
        counts = np.bincount(half, minlength=int(half[-1]) + 2)
        starts = np.concatenate(([0], np.cumsum(counts)))
        qk = (sib << bits) | yr
        below = np.searchsorted(sk, qk, side="right")  # sibling entries with y <= yr
        at_or_above = np.searchsorted(sk, qk, side="left")
        s_start = starts[sib]
        s_end = starts[np.minimum(sib + 1, starts.size - 1)]
        right_side = (half & 1) == 1
        z_down += np.where(right_side, cw[below] - cw[s_start], 0)
        z_up += np.where(right_side, 0, cw[s_end] - cw[at_or_above])
        level += 1
    return z_down[inv], z_up[inv]


def _zeta2_vector(x, y, w, direction: str = "down"):
    down, up = _zeta2_both(np.asarray(x), np.asarray(y), np.asarray(w))
    return down if direction == "down" else up


# ---------------------------------------------------------------------------
# Harmonic evaluation


def psi_vector(psi: CoboundaryCharacter, atoms) -> np.ndarray:
    """Potential values over a list of atoms; the default golden-ratio
    potential is evaluated vectorized over intern ids."""
    if psi.psi is psi_golden:
        uids = np.fromiter((a.uid for a in atoms), dtype=np.int64, count=len(atoms))
        return TWO_PI * ((uids * 0.6180339887498949) % 1.0)
    return np.array([psi.psi_of(a) for a in atoms], dtype=np.float64)


def harmonic_eval_raw(
    xi: VirtualDiagram, psi: CoboundaryCharacter, engine: str = "auto"
) -> float:
    """Unwrapped coboundary phase of the self-aggregate via dominance sums.

    S = sum_v psi(v) xi_v Z-(v) - sum_u psi(u) xi_u Z+(u).  The per-atom
    weight xi_a * (Z-(a) - Z+(a)) is collected exactly in integers; psi
    enters through a single double-precision dot product.
    """
    if psi.level != xi.level:
        raise LevelMismatch("potential level mismatch")
    if xi.level != 1:
        raise PreorderUnavailable(
            "no coordinate representation at this level; use quadratic_phase"
        )
    if not xi.entries:
        return 0.0
    phi, coeff = level1_arrays(xi)
    psi_vec = psi_vector(psi, [a for a, _ in xi.entries])
    if phi.shape[1] == 2:
        x, y = phi[:, 0], phi[:, 1]
        if engine == "auto":
            engine = "vector"
        if engine == "vector":
            z_down, z_up = _zeta2_both(x, y, coeff)
        else:
            coords = [tuple(row) for row in phi]
            z_down = np.array(_dominance_down(coords, list(coeff), engine), dtype=np.int64)
            neg = [tuple(-v for v in row) for row in coords]
            z_up = np.array(_dominance_down(neg, list(coeff), engine), dtype=np.int64)
    else:
        coords = [tuple(row) for row in phi]
        z_down = np.array(_dominance_down(coords, list(coeff), "cdq"), dtype=np.int64)
        neg = [tuple(-v for v in row) for row in coords]
        z_up = np.array(_dominance_down(neg, list(coeff), "cdq"), dtype=np.int64)
    net = coeff * (z_down - z_up)
    return float(np.dot(psi_vec, net.astype(np.float64)))


def harmonic_eval(
    xi: VirtualDiagram, psi: CoboundaryCharacter, engine: str = "auto"
) -> float:
    """Coboundary phase of the self-aggregate, reduced mod 2*pi."""
    return wrap_angle(harmonic_eval_raw(xi, psi, engine))


def iterated_character_phase(
    xi: VirtualDiagram,
    s: int,
    theta,
    options: AggregateOptions = DEFAULT_OPTIONS,
    spec: PreorderSpec = DEFAULT_PREORDER,
    guard: int = 1_000_000,
) -> float:
    """Depth-s labeled-tree phase; equals the character of the iterated aggregate."""
    if s < 1:
        raise ValueError("s must be >= 1")
    supp = [a for a, _ in xi.entries]
    coeffs = {a: c for a, c in xi.entries}
    if len(supp) ** (2**s) > guard:
        raise ValueError(f"{len(supp)}^{2 ** s} labelings exceed guard {guard}")
    total = 0.0
    for labeling in itertools.product(supp, repeat=2**s):
        weight = 1
        for leaf in labeling:
            weight *= coeffs[leaf]
        nodes = list(labeling)
        ok = True
        while len(nodes) > 1 and ok:
            nxt = []
            for left, right in zip(nodes[::2], nodes[1::2]):
                if not atom_leq(left, right, spec) or (
                    options.drop_diagonal_classes and pair_is_diagonal(left, right, spec)
                ):
                    ok = False
                    break
                nxt.append(pair_class(left, right))
            nodes = nxt
        if ok:
            total += float(weight) * _angle_lookup(theta, nodes[0])
    return wrap_angle(total)


__all__ = [
    "Character",
    "CoboundaryCharacter",
    "DominanceInput",
    "MissingAngle",
    "angles_close",
    "coboundary_net_multiplicities",
    "coboundary_phase_raw",
    "dominance_sums",
    "evaluate_character",
    "harmonic_eval",
    "harmonic_eval_raw",
    "iterated_character_phase",
    "quadratic_phase",
    "wrap_angle",
]
