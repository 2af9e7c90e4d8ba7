"""Best-first branch and bound over suffixes, with greedy descent.

Nodes are suffixes grown right to left by prepending characters. Each popped
node is followed greedily through its best child down to a leaf, pushing the
remaining children on the frontier, so complete strings are found early and
the search can stop anytime with a valid incumbent. With ``top_k > 1`` the
k-th best leaf value gates both pushing and termination.
"""

from __future__ import annotations

import heapq
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bound import Bounder, SuffixState
from .preimage_dp import all_kmers, argmax_linear, build_tables

log = logging.getLogger(__name__)


@dataclass
class SearchStats:
    expanded: int = 0
    pruned: int = 0
    leaves: int = 0
    queue_peak: int = 0
    max_pruned_bound: float = -math.inf
    elapsed: float = 0.0

    def as_dict(self, timing: bool = False) -> dict:
        d = {
            "expanded": self.expanded,
            "pruned": self.pruned,
            "leaves": self.leaves,
            "queue_peak": self.queue_peak,
            "max_pruned_bound": self.max_pruned_bound,
        }
        if timing:
            d["elapsed"] = self.elapsed
        return d


@dataclass
class SearchResult:
    """Ranked (sequence, value) pairs, best first.

    ``bounds`` holds the branch-and-bound value of each leaf; ``optimal`` is
    False when a budget stopped the search before the frontier was exhausted.
    """

    sequences: list
    bounds: list
    optimal: bool
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def best(self):
        return self.sequences[0] if self.sequences else None


class _Incumbents:
    def __init__(self, size: int):
        self.size = size
        self.items: list[tuple[float, tuple]] = []

    @property
    def gate(self) -> float:
        return self.items[-1][0] if len(self.items) == self.size else -math.inf

    def add(self, value: float, seq: tuple):
        self.items.append((value, seq))
        self.items.sort(key=lambda it: (-it[0], it[1]))
        del self.items[self.size :]


def _key(state: SuffixState):
    return (-state.F, -len(state.suffix), state.suffix)


def branch_and_bound(bounder: Bounder, top_k: int = 1, max_nodes: int | None = None,
                     max_seconds: float | None = None) -> SearchResult:
    """Run the search for an already configured ``Bounder``.

    ``max_nodes`` caps node expansions (evaluations of all children of a
    node); ``max_seconds`` caps wall-clock time. Whichever hits first stops
    the search with ``optimal=False``. Budgets are only checked once a first
    leaf is held, so a truncated run still returns a complete sequence.
    """
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if bounder.n_sym < 1:
        raise ValueError("empty alphabet")
    start = time.perf_counter()
    stats = SearchStats()
    best = _Incumbents(top_k)
    frontier: list = []

    def push(state):
        heapq.heappush(frontier, (_key(state), state))
        stats.queue_peak = max(stats.queue_peak, len(frontier))

    def prune(bound):
        stats.pruned += 1
        stats.max_pruned_bound = max(stats.max_pruned_bound, bound)

    def out_of_budget():
        if not best.items:
            return False
        if max_nodes is not None and stats.expanded >= max_nodes:
            return True
        return max_seconds is not None and time.perf_counter() - start >= max_seconds

    for kmer in all_kmers(bounder.k, bounder.n_sym):
        push(bounder.root(kmer))

    optimal = True
    while frontier:
        _, node = heapq.heappop(frontier)
        if node.F <= best.gate:
            prune(node.F)
            for _, rest in frontier:
                prune(rest.F)
            frontier.clear()
            break

        current = node
        while current is not None and not current.is_leaf and current.F > best.gate:
            if out_of_budget():
                optimal = False
                break
            stats.expanded += 1
            best_child = None
            for child in bounder.children(current):
                if child.F <= best.gate:
                    prune(child.F)
                elif best_child is None or child.F > best_child.F:
                    if best_child is not None:
                        push(best_child)
                    best_child = child
                else:
                    push(child)
            current = best_child
        if not optimal:
            break

        if current is not None and current.is_leaf:
            stats.leaves += 1
            if current.F > best.gate:
                best.add(current.F, current.suffix)
            else:
                prune(current.F)

    stats.elapsed = time.perf_counter() - start
    log.debug("search finished: %s optimal=%s", stats.as_dict(), optimal)
    ranked = [(seq, value) for value, seq in best.items]
    return SearchResult(ranked, [value for value, _ in best.items], optimal, stats)


def design(model, l: int, top_k: int = 1, max_nodes: int | None = None,
           max_seconds: float | None = None, mode: str = "auto", tables=None) -> SearchResult:
    """Top-``top_k`` length-``l`` sequences under the normalized predictor."""
    if not model.normalized:
        raise ValueError("design needs a normalized model; use design_unnormalized")
    if l < model.params.k:
        raise ValueError(f"target length {l} is shorter than k = {model.params.k}")
    tables = tables if tables is not None else build_tables(model, l)
    bounder = Bounder(tables, model.params, model.table, normalized=True, mode=mode)
    return branch_and_bound(bounder, top_k, max_nodes, max_seconds)


def design_unnormalized(model, l: int, top_k: int = 1, max_nodes: int | None = None,
                        max_seconds: float | None = None, tables=None) -> SearchResult:
    """Top-``top_k`` sequences under the unnormalized predictor.

    A single best sequence comes straight from the dynamic program; longer
    lists run the same search with the exact suffix value as the bound.
    """
    if model.normalized:
        raise ValueError("design_unnormalized needs an unnormalized model")
    if l < model.params.k:
        raise ValueError(f"target length {l} is shorter than k = {model.params.k}")
    tables = tables if tables is not None else build_tables(model, l)
    if top_k == 1:
        t0 = time.perf_counter()
        seq, value = argmax_linear(tables)
        stats = SearchStats(elapsed=time.perf_counter() - t0)
        return SearchResult([(seq, value)], [value], True, stats)
    bounder = Bounder(tables, model.params, model.table, normalized=False)
    return branch_and_bound(bounder, top_k, max_nodes, max_seconds)


def compare_rankings(a, b):
    """Overlap fraction and Pearson correlation of ranks on shared items.

    Returns ``(overlap, pcc)``; ``pcc`` is None when fewer than two items are
    shared.
    """
    a = [x if isinstance(x, str) else tuple(x) for x in a]
    b = [x if isinstance(x, str) else tuple(x) for x in b]
    for name, lst in (("first", a), ("second", b)):
        if len(set(lst)) != len(lst):
            raise ValueError(f"{name} ranking contains duplicate sequences")
    if not a and not b:
        return 0.0, None
    rank_b = {x: r for r, x in enumerate(b)}
    shared = [(r, rank_b[x]) for r, x in enumerate(a) if x in rank_b]
    overlap = len(shared) / max(len(a), len(b))
    if len(shared) < 2:
        return overlap, None
    ra, rb = np.array(shared, dtype=np.float64).T
    return overlap, float(np.corrcoef(ra, rb)[0, 1])
