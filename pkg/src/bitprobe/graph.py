"""Left-regular bipartite graphs, seeded (functional) and explicit.

A seeded graph never materializes its edge set: the i-th neighbor of left
vertex v is the low log2(s) bits of the seed polynomial evaluated at the
edge index v*d + i.  Explicit graphs store an (m, d) adjacency table and
exist for small instances and oracle checks.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bits import Bitmap
from .gf import GF2_64, FieldSpec, PolySeed, poly_eval, poly_eval_block

DEFAULT_MATERIALIZE_BUDGET = 1 << 22

# Keeps eval+lookup chunks cache-resident on big scans.
SCAN_CHUNK_POINTS = 1 << 18


@dataclass(frozen=True)
class GraphParams:
    """Graph shape: universe m, set capacity n_cap, right part s = 2^log2_s,
    left degree d, error budget eps (exact rational)."""

    m: int
    n_cap: int
    s: int
    log2_s: int
    d: int
    eps: Fraction

    def __post_init__(self):
        if self.n_cap < 1 or self.m < self.n_cap:
            raise ValueError("need m >= n_cap >= 1")
        if self.d < 1:
            raise ValueError("degree must be >= 1")
        if self.log2_s < 0 or self.s != 1 << self.log2_s:
            raise ValueError("s must be the power of two 2^log2_s")
        if not 0 < self.eps < 1:
            raise ValueError("eps must be in (0, 1)")


def derive_params(universe_bits: int, n_cap: int, eps,
                  field: FieldSpec = GF2_64) -> GraphParams:
    """Size a graph for a 2^universe_bits universe and sets of <= n_cap.

    d = ceil(2u / eps); s = the smallest power of two >= 2 d^2 n_cap, so
    rounding never more than doubles the right part.
    """
    if universe_bits < 1:
        raise ValueError("universe_bits must be >= 1")
    if n_cap < 1:
        raise ValueError("n_cap must be >= 1")
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    m = 1 << universe_bits
    if n_cap > m:
        raise ValueError("n_cap exceeds universe size")
    d = math.ceil(Fraction(2 * universe_bits) / eps)
    if m * d > 1 << field.width_bits:
        raise ValueError(
            f"m*d = {m * d} edge indices do not fit in the "
            f"{field.width_bits}-bit field"
        )
    s_raw = 2 * d * d * n_cap
    log2_s = max(0, (s_raw - 1).bit_length())
    return GraphParams(m=m, n_cap=n_cap, s=1 << log2_s, log2_s=log2_s, d=d, eps=eps)


@dataclass(frozen=True)
class SeededGraph:
    """Graph defined functionally by (params, seed); immutable."""

    params: GraphParams
    seed: PolySeed

    def __post_init__(self):
        w = self.seed.field.width_bits
        if self.params.log2_s > w:
            raise ValueError(f"log2_s={self.params.log2_s} exceeds field width {w}")
        if self.params.m * self.params.d > 1 << w:
            raise ValueError("m*d edge indices do not fit in the seed's field")


@dataclass(frozen=True, eq=False)
class ExplicitGraph:
    """Graph with a stored (m, d) adjacency table; oracle substrate."""

    params: GraphParams
    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=np.int64)
        if adj.shape != (self.params.m, self.params.d):
            raise ValueError(f"adjacency must have shape {(self.params.m, self.params.d)}")
        if adj.size and (adj.min() < 0 or adj.max() >= self.params.s):
            raise ValueError("adjacency entry out of range [0, s)")
        object.__setattr__(self, "adjacency", adj)


Graph = SeededGraph | ExplicitGraph


def neighbor(g: Graph, v: int, i: int) -> int:
    """The i-th neighbor of left vertex v; one polynomial evaluation."""
    p = g.params
    if not 0 <= v < p.m:
        raise ValueError(f"left vertex {v} out of range [0, {p.m})")
    if not 0 <= i < p.d:
        raise ValueError(f"probe index {i} out of range [0, {p.d})")
    if isinstance(g, ExplicitGraph):
        return int(g.adjacency[v, i])
    return poly_eval(g.seed, v * p.d + i) & (p.s - 1)


def edge_targets(g: Graph, vs=None) -> np.ndarray:
    """Neighbor table for the given left vertices (all of L by default).

    Returns an int64 array of shape (len(vs), d); row order follows vs.
    """
    p = g.params
    if vs is None:
        vs = np.arange(p.m, dtype=np.int64)
    else:
        vs = np.asarray(vs, dtype=np.int64)
        if vs.size and (vs.min() < 0 or vs.max() >= p.m):
            raise ValueError("left vertex out of range")
    if isinstance(g, ExplicitGraph):
        return g.adjacency[vs]
    out = np.empty((len(vs), p.d), dtype=np.int64)
    pts = (vs[:, None].astype(np.uint64) * np.uint64(p.d)
           + np.arange(p.d, dtype=np.uint64)).ravel()
    smask = np.uint64(p.s - 1)
    flat = out.reshape(-1)
    for lo in range(0, len(pts), SCAN_CHUNK_POINTS):
        hi = min(len(pts), lo + SCAN_CHUNK_POINTS)
        flat[lo:hi] = (poly_eval_block(g.seed, pts[lo:hi]) & smask).astype(np.int64)
    return out


def marked_neighbors(g: Graph, A) -> np.ndarray:
    """Boolean indicator of Gamma(A) over [0, s)."""
    p = g.params
    flags = np.zeros(p.s, dtype=bool)
    vs = np.asarray(sorted(A), dtype=np.int64)
    if vs.size:
        flags[edge_targets(g, vs).ravel()] = True
    return flags


def neighborhood_bitmap(g: Graph, A) -> Bitmap:
    """The stored string: bit w set iff some probe slot of A lands on w."""
    return Bitmap.from_bool_array(marked_neighbors(g, A))


def materialize(g: SeededGraph, budget: int = DEFAULT_MATERIALIZE_BUDGET) -> ExplicitGraph:
    """Expand a seeded graph into an explicit one (small instances only)."""
    p = g.params
    if p.m * p.d > budget:
        raise ValueError(f"materialization budget exceeded: m*d = {p.m * p.d} > {budget}")
    return ExplicitGraph(p, edge_targets(g))
