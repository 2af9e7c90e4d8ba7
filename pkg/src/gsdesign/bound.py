"""Upper bound on the normalized predictor over strings with a fixed suffix.

A search node fixes the last ``s`` characters of a length-``l`` string; the
first ``n = l - s`` positions are free. For every completion ``x``::

    h*(x) = L(x) / sqrt(K(x, x)) <= g / sqrt(f)

where ``g`` is the best linear value over completions (exact, read from the
DP table) and ``f`` lower-bounds ``K(x, x)``. ``f`` splits the self-kernel by
where each substring starts: both in the suffix (computed exactly), one in
the free region (cross term, counted twice) and both in the free region. A
substring starting in the free region may run into the suffix; its known
characters contribute exact distances. When ``g < 0`` dividing by a lower
bound would undershoot, so an upper bound on ``K(x, x)`` is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .encoding import DescriptorTable
from .kernel import GSParams, gs, position_factor, position_matrix, similarity_from_sq
from .preimage_dp import DPTables, ResourceError, kmer_index, suffix_value

MODES = ("auto", "exact", "fast")
DEFAULT_ENUM_CAP = 100_000


class BoundInvariantError(RuntimeError):
    pass


def _layout(suffix, l: int) -> np.ndarray:
    """Absolute positions 0..l-1; free positions are marked -1."""
    s = len(suffix)
    if s > l:
        raise ValueError(f"suffix of length {s} longer than target length {l}")
    x = np.full(l, -1, dtype=np.intp)
    x[l - s :] = suffix
    return x


def _position_distances(x: np.ndarray, table: DescriptorTable, worst: bool) -> np.ndarray:
    """Per-position squared distances, with free positions at their worst
    (``worst=True``) or best (``worst=False``) case. The diagonal is 0."""
    free = x < 0
    safe = np.where(free, 0, x)
    D = table.sq_dist[np.ix_(safe, safe)].copy()
    if worst:
        to = table.max_sq_dist_to[safe]
        D[np.ix_(free, ~free)] = to[None, ~free]
        D[np.ix_(~free, free)] = to[~free, None]
        D[np.ix_(free, free)] = table.max_sq_dist
    else:
        D[free, :] = 0.0
        D[:, free] = 0.0
    np.fill_diagonal(D, 0.0)
    return D


def _block_sum(D: np.ndarray, params: GSParams, rows: range, cols: range,
               lengths=None) -> float:
    """Sum over substring pairs whose start offsets lie in ``rows`` x ``cols``.

    ``D`` is an l x l matrix of per-position squared distances; each pair
    contributes position_factor x similarity of its summed aligned distances.
    Only substring lengths in ``lengths`` are counted (default 1..k).
    """
    l = D.shape[0]
    P = position_matrix(l, l, params.sigma_p)
    total = 0.0
    S = None
    for p in range(1, params.k + 1):
        r = l - p + 1
        if r <= 0:
            break
        S = D.copy() if S is None else S[:r, :r] + D[p - 1 :, p - 1 :]
        if lengths is not None and p not in lengths:
            continue
        r_lo, r_hi = rows.start, min(rows.stop, r)
        c_lo, c_hi = cols.start, min(cols.stop, r)
        if r_hi <= r_lo or c_hi <= c_lo:
            continue
        block = S[r_lo:r_hi, c_lo:c_hi]
        total += float((P[r_lo:r_hi, c_lo:c_hi] * similarity_from_sq(block, params.sigma_c)).sum())
    return total


def self_kernel_suffix(suffix, params: GSParams, table: DescriptorTable) -> float:
    """Self-kernel of the substrings lying entirely in the fixed suffix.

    Position factors only depend on offset differences, so this is just the
    GS self-kernel of the suffix on its own.
    """
    return gs(suffix, suffix, params, table)


def _exact_p(mode: str, p: int) -> bool:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    return mode == "exact" or (mode == "auto" and p <= 2)


def cross_lower_bound(suffix, l: int, params: GSParams, table: DescriptorTable,
                      mode: str = "auto", enum_cap: int = DEFAULT_ENUM_CAP) -> float:
    """Lower bound on the cross term between free-start and suffix-start substrings.

    ``fast`` takes each free character at its worst case for every pair
    independently. ``exact`` minimizes over joint assignments of the free
    characters covered by one free-start substring, which is tighter.
    ``auto`` uses ``exact`` for p <= 2.
    """
    x = _layout(suffix, l)
    n = l - len(suffix)
    if n == 0:
        return 0.0
    total = 0.0
    worst = None
    for p in range(1, params.k + 1):
        if not _exact_p(mode, p):
            if worst is None:
                worst = _position_distances(x, table, worst=True)
            continue
        J = np.arange(n, l - p + 1)
        if len(J) == 0:
            continue
        for i in range(0, min(n, l - p + 1)):
            u = min(p, n - i)
            if table.size ** u > enum_cap:
                raise ResourceError(
                    f"exact minimization over {table.size}^{u} assignments exceeds "
                    f"the cap of {enum_cap}; use fast mode"
                )
            known = np.zeros(len(J))
            for q in range(u, p):
                known += table.sq_dist[x[i + q], x[J + q]]
            free = np.zeros((1, len(J)))
            for q in range(u):
                free = (free[:, None, :] + table.sq_dist[:, x[J + q]][None, :, :]).reshape(-1, len(J))
            pos = position_factor(i, J, params.sigma_p)
            vals = (pos[None, :] * similarity_from_sq(known[None, :] + free, params.sigma_c)).sum(axis=1)
            total += float(vals.min())
    if worst is not None:
        fast = {p for p in range(1, params.k + 1) if not _exact_p(mode, p)}
        total += _block_sum(worst, params, range(0, n), range(n, l), fast)
    return total


def prefix_lower_bound(suffix, l: int, params: GSParams, table: DescriptorTable) -> float:
    """Lower bound on the term between pairs of free-start substrings.

    Aligned positions at equal offsets contribute 0, two free positions the
    alphabet's largest squared distance, one free position the largest
    distance to the known character, and two known positions their exact
    distance.
    """
    n = l - len(suffix)
    if n == 0:
        return 0.0
    D = _position_distances(_layout(suffix, l), table, worst=True)
    return _block_sum(D, params, range(0, n), range(0, n))


def f_lower_bound(suffix, l: int, params: GSParams, table: DescriptorTable,
                  mode: str = "auto", enum_cap: int = DEFAULT_ENUM_CAP) -> float:
    """Lower bound on gs(x, x) over every completion x of ``suffix``."""
    if len(suffix) < 1:
        raise ValueError("suffix must be non-empty")
    return (self_kernel_suffix(suffix, params, table)
            + 2.0 * cross_lower_bound(suffix, l, params, table, mode, enum_cap)
            + prefix_lower_bound(suffix, l, params, table))


def f_upper_bound(suffix, l: int, params: GSParams, table: DescriptorTable) -> float:
    """Upper bound on gs(x, x) over every completion x of ``suffix``."""
    n = l - len(suffix)
    own = self_kernel_suffix(suffix, params, table)
    if n == 0:
        return own
    D = _position_distances(_layout(suffix, l), table, worst=False)
    return (own + 2.0 * _block_sum(D, params, range(0, n), range(n, l))
            + _block_sum(D, params, range(0, n), range(0, n)))


@dataclass(frozen=True)
class SuffixState:
    suffix: tuple
    l: int
    j_star: int
    v_star: int
    interior_sum: float
    g: float
    f: float
    F: float

    @property
    def is_leaf(self) -> bool:
        return len(self.suffix) == self.l


class Bounder:
    """Evaluates suffix states for one model and one target length.

    With ``normalized=False`` the objective is the linear part itself and
    ``F = g`` (f is fixed to 1).
    """

    def __init__(self, tables: DPTables, params: GSParams, table: DescriptorTable,
                 normalized: bool = True, mode: str = "auto",
                 enum_cap: int = DEFAULT_ENUM_CAP):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
        self.tables = tables
        self.params = params
        self.table = table
        self.normalized = normalized
        self.mode = mode
        self.enum_cap = enum_cap
        self.l = tables.l
        self.k = tables.k
        self.n_sym = tables.n_sym

    def _finish(self, suffix, j_star, v_star, inner) -> SuffixState:
        g = suffix_value(self.tables, j_star, v_star, inner)
        if not self.normalized:
            return SuffixState(suffix, self.l, j_star, v_star, inner, g, 1.0, g)
        f = f_lower_bound(suffix, self.l, self.params, self.table, self.mode, self.enum_cap)
        if not f > 0:
            raise BoundInvariantError(f"self-kernel lower bound {f} is not positive")
        if g >= 0:
            F = g / math.sqrt(f)
        else:
            F = g / math.sqrt(f_upper_bound(suffix, self.l, self.params, self.table))
        return SuffixState(suffix, self.l, j_star, v_star, inner, g, f, F)

    def root(self, kmer) -> SuffixState:
        kmer = tuple(int(c) for c in kmer)
        if len(kmer) != self.k:
            raise ValueError("root states hold exactly one k-mer")
        return self._finish(kmer, self.l - self.k, kmer_index(kmer, self.n_sym), 0.0)

    def extend(self, state: SuffixState, a: int) -> SuffixState:
        """Child state with ``a`` prepended; g is updated incrementally."""
        if state.is_leaf:
            raise ValueError("cannot extend a full-length suffix")
        j = state.j_star - 1
        v = int(a) * self.n_sym ** (self.k - 1) + state.v_star // self.n_sym
        inner = state.interior_sum + float(self.tables.W[state.j_star, state.v_star])
        return self._finish((int(a),) + state.suffix, j, v, inner)

    def evaluate(self, suffix) -> SuffixState:
        """State for an arbitrary suffix, computed from scratch."""
        suffix = tuple(int(c) for c in suffix)
        if not self.k <= len(suffix) <= self.l:
            raise ValueError(f"suffix length must lie in {self.k}..{self.l}")
        j_star = self.l - len(suffix)
        inner = float(sum(
            self.tables.W[j_star + t, kmer_index(suffix[t : t + self.k], self.n_sym)]
            for t in range(1, len(suffix) - self.k + 1)
        ))
        return self._finish(suffix, j_star, kmer_index(suffix[: self.k], self.n_sym), inner)

    def children(self, state: SuffixState):
        return [self.extend(state, a) for a in range(self.n_sym)]


def bound_F(state: SuffixState) -> float:
    return state.F
