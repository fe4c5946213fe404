"""Greedy alternating relabeling: the one-probe two-sided-error baseline.

Start by labeling Gamma(A) with ones.  Then alternate sides: find every
outside vertex with too many 1-labeled slots and clear all its neighbors;
find every member with too many 0-labeled slots and set all its neighbors;
repeat until the current side is clean.  On a good expander the erroneous
set halves each round, so the loop ends within O(log m) rounds.  A vertex
counts as erroneous when >= ceil(eps*d) of its slots disagree with its
membership, matching the reduction checkers' tie rule.
"""

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bits import Bitmap
from .gf import GF2_64, FieldSpec, PolySeed, default_indep_k, draw_seed
from .graph import Graph, GraphParams, SeededGraph, derive_params, edge_targets, neighbor
from .reduction import overlap_threshold
from .scheme_one import RetriesExhausted, resolve_probe


class NonConvergence(Exception):
    """Relabeling still had erroneous vertices after the iteration cap."""

    def __init__(self, iterations: int, trace: tuple, pending: int):
        self.iterations = iterations
        self.trace = trace
        self.pending = pending
        super().__init__(
            f"labeling not converged after {iterations} rounds "
            f"(pending erroneous: {pending}, trace: {list(trace)})"
        )


@dataclass(frozen=True)
class Labeling:
    """bits over [0, s); iterations = relabeling rounds performed (the
    initial Gamma(A) marking counts as round 1 when A is nonempty); trace =
    erroneous-set size per subsequent round."""

    bits: Bitmap
    iterations: int
    trace: tuple
    rounds: tuple | None = None


def default_max_iters(m: int) -> int:
    return 2 * math.ceil(math.log2(max(m, 2))) + 2


def greedy_label(g: Graph, A, eps, max_iters: int | None = None,
                 record_rounds: bool = False) -> Labeling:
    """Run the alternating relabeling for A; raises NonConvergence at the cap."""
    p = g.params
    eps = Fraction(eps)
    threshold = overlap_threshold(p.d, eps)
    if max_iters is None:
        max_iters = default_max_iters(p.m)
    A = sorted(set(A))
    if A and (A[0] < 0 or A[-1] >= p.m):
        raise ValueError("element out of range [0, m)")
    if len(A) > p.n_cap:
        raise ValueError(f"|A| = {len(A)} exceeds n_cap = {p.n_cap}")

    targets = edge_targets(g)
    member = np.zeros(p.m, dtype=bool)
    member[A] = True
    labels = np.zeros(p.s, dtype=bool)
    labels[targets[A].ravel()] = True

    iterations = 1 if A else 0
    trace = []
    rounds = [] if record_rounds else None
    outside_turn = True
    while True:
        ones = labels[targets].sum(axis=1)
        if outside_turn:
            erroneous = np.flatnonzero(~member & (ones >= threshold))
        else:
            erroneous = np.flatnonzero(member & (p.d - ones >= threshold))
        if not erroneous.size:
            break
        if iterations >= max_iters:
            raise NonConvergence(iterations, tuple(trace), int(erroneous.size))
        touched = np.unique(targets[erroneous].ravel())
        if record_rounds:
            changed = touched[labels[touched] == outside_turn]
            rounds.append((iterations + 1,
                           "clear" if outside_turn else "set",
                           tuple(int(v) for v in erroneous),
                           tuple(int(w) for w in changed)))
        labels[touched] = not outside_turn
        iterations += 1
        trace.append(int(erroneous.size))
        outside_turn = not outside_turn

    return Labeling(Bitmap.from_bool_array(labels), iterations, tuple(trace),
                    tuple(rounds) if record_rounds else None)


@dataclass(frozen=True)
class LabelingReport:
    max_member_error: Fraction
    max_nonmember_error: Fraction
    eps: Fraction
    passed: bool


def verify_labeling(g: Graph, A, eps, lab: Labeling | Bitmap) -> LabelingReport:
    """Worst wrong-slot fraction per side; passes iff both are <= eps."""
    p = g.params
    eps = Fraction(eps)
    bits = lab.bits if isinstance(lab, Labeling) else lab
    labels = bits.as_bool_array()
    targets = edge_targets(g)
    ones = labels[targets].sum(axis=1)
    member = np.zeros(p.m, dtype=bool)
    idx = sorted(set(A))
    member[idx] = True
    member_err = Fraction(int((p.d - ones[member]).max()), p.d) if idx else Fraction(0)
    outside = ones[~member]
    nonmember_err = Fraction(int(outside.max()), p.d) if outside.size else Fraction(0)
    return LabelingReport(member_err, nonmember_err, eps,
                          member_err <= eps and nonmember_err <= eps)


@dataclass(frozen=True)
class BmrvScheme:
    """A converged labeling over a seeded graph, ready to answer queries."""

    params: GraphParams
    seed: PolySeed
    bits: Bitmap
    retries_used: int
    master_seed: int = 0

    @property
    def graph(self) -> SeededGraph:
        return SeededGraph(self.params, self.seed)


def encode(A, universe_bits: int, eps, *, n_cap: int | None = None,
           indep_k: int | None = None, master_seed: int = 0,
           max_retries: int = 64, field: FieldSpec = GF2_64,
           max_iters: int | None = None) -> BmrvScheme:
    """Draw seeds until the greedy relabeling converges for A."""
    A = sorted(set(A))
    eps = Fraction(eps)
    if n_cap is None:
        n_cap = max(len(A), 1)
    params = derive_params(universe_bits, n_cap, eps, field)
    if indep_k is None:
        indep_k = default_indep_k(universe_bits)
    rng = random.Random(master_seed)
    for attempt in range(1, max_retries + 1):
        seed = draw_seed(rng, indep_k, field)
        g = SeededGraph(params, seed)
        try:
            lab = greedy_label(g, A, eps, max_iters)
        except NonConvergence:
            continue
        return BmrvScheme(params, seed, lab.bits, attempt, master_seed)
    raise RetriesExhausted(max_retries, "no seed produced a converged labeling")


def query(sch: BmrvScheme, x: int, probe_src) -> bool:
    """Read the label of one random (or chosen) neighbor of x."""
    i = resolve_probe(probe_src, sch.params.d)
    return bool(sch.bits.get(neighbor(sch.graph, x, i)))
