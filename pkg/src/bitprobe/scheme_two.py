"""Two-probe scheme with the efficient-encoding structure.

Stage one draws a graph until the misclassified set W (outside vertices
breaking strong reduction) has at most |A|/2 members.  Stage two draws a
second graph checked only on W, which costs O(|W| d) per candidate instead
of a full left scan.  A query ANDs one bit from each stage's bitmap: for
x outside A at least one of the two marginal read-1 probabilities is below
eps, so the product is too.

The stage-one decoder here is a brute-force left scan standing in for an
explicit expander's list decoder, so encoding is polynomial in m rather
than in (n, log m); the interface is the misclassified-set contract, so a
decodable graph could be dropped in.
"""

import random
from dataclasses import dataclass
from fractions import Fraction

from .bits import Bitmap
from .gf import GF2_64, FieldSpec, PolySeed, default_indep_k, draw_seed
from .graph import (
    Graph,
    GraphParams,
    SeededGraph,
    derive_params,
    neighbor,
    neighborhood_bitmap,
)
from .reduction import check_strong_reduction, probe_overlap
from .scheme_one import DEFAULT_MAX_RETRIES, RetriesExhausted, resolve_probe


def compute_misclassified(g1: Graph, A, eps) -> list:
    """W: outside vertices with >= ceil(eps*d) probe slots in Gamma(A)."""
    return list(check_strong_reduction(g1, A, eps, scope=None).violating)


@dataclass(frozen=True)
class TwoProbeScheme:
    params: GraphParams
    seed1: PolySeed
    bitmap1: Bitmap
    seed2: PolySeed
    bitmap2: Bitmap
    w_size: int
    retries_stage1: int
    retries_stage2: int
    master_seed: int = 0

    @property
    def g1(self) -> SeededGraph:
        return SeededGraph(self.params, self.seed1)

    @property
    def g2(self) -> SeededGraph:
        return SeededGraph(self.params, self.seed2)

    @property
    def eps(self) -> Fraction:
        return self.params.eps


def encode_with_params(A, params: GraphParams, *, indep_k: int,
                       master_seed: int = 0,
                       max_retries: int = DEFAULT_MAX_RETRIES,
                       field: FieldSpec = GF2_64) -> TwoProbeScheme:
    A = sorted(set(A))
    if A and (A[0] < 0 or A[-1] >= params.m):
        raise ValueError("element out of range [0, m)")
    if len(A) > params.n_cap:
        raise ValueError(f"|A| = {len(A)} exceeds n_cap = {params.n_cap}")
    rng = random.Random(master_seed)

    g1 = w = None
    retries1 = 0
    for attempt in range(1, max_retries + 1):
        seed1 = draw_seed(rng, indep_k, field)
        cand = SeededGraph(params, seed1)
        cand_w = compute_misclassified(cand, A, params.eps)
        if len(cand_w) <= len(A) // 2:
            g1, w, retries1 = cand, cand_w, attempt
            break
    if g1 is None:
        raise RetriesExhausted(max_retries, "stage 1: |W| bound failed for every seed")

    for attempt in range(1, max_retries + 1):
        seed2 = draw_seed(rng, indep_k, field)
        g2 = SeededGraph(params, seed2)
        if check_strong_reduction(g2, A, params.eps, scope=w).holds:
            return TwoProbeScheme(params, g1.seed, neighborhood_bitmap(g1, A),
                                  seed2, neighborhood_bitmap(g2, A),
                                  len(w), retries1, attempt, master_seed)
    raise RetriesExhausted(max_retries,
                           "stage 2: restricted reduction failed for every seed")


def encode(A, universe_bits: int, eps, *, n_cap: int | None = None,
           indep_k: int | None = None, master_seed: int = 0,
           max_retries: int = DEFAULT_MAX_RETRIES,
           field: FieldSpec = GF2_64) -> TwoProbeScheme:
    A = sorted(set(A))
    if n_cap is None:
        n_cap = max(len(A), 1)
    params = derive_params(universe_bits, n_cap, Fraction(eps), field)
    if indep_k is None:
        indep_k = default_indep_k(universe_bits)
    return encode_with_params(A, params, indep_k=indep_k, master_seed=master_seed,
                              max_retries=max_retries, field=field)


def _resolve_pair(probe_src, d: int):
    if isinstance(probe_src, tuple):
        i1, i2 = probe_src
        return resolve_probe(i1, d), resolve_probe(i2, d)
    return probe_src.randrange(d), probe_src.randrange(d)


def query(sch: TwoProbeScheme, x: int, probe_src, short_circuit: bool = True) -> bool:
    """AND of one bit from each stage; at most two reads, one if the first
    bit is 0 and short-circuiting is on.  Both probe indices are drawn up
    front either way (the pair is non-adaptive)."""
    if not 0 <= x < sch.params.m:
        raise ValueError(f"element {x} out of range [0, {sch.params.m})")
    i1, i2 = _resolve_pair(probe_src, sch.params.d)
    first = sch.bitmap1.get(neighbor(sch.g1, x, i1))
    if short_circuit and not first:
        return False
    second = sch.bitmap2.get(neighbor(sch.g2, x, i2))
    return bool(first and second)


def exact_error(sch: TwoProbeScheme, x: int) -> Fraction:
    """Exact probability that query(x) answers true over uniform probes."""
    d = sch.params.d
    p1 = Fraction(probe_overlap(sch.g1, x, sch.bitmap1), d)
    p2 = Fraction(probe_overlap(sch.g2, x, sch.bitmap2), d)
    return p1 * p2
