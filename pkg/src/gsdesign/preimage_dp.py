"""Exact maximization of a GS-kernel expansion over strings of fixed length.

For weights ``w`` and training strings ``x_i`` the linear objective
``L(x) = sum_i w_i GS(x_i, x)`` decomposes over the substrings of ``x``.
Grouping every substring by the k-mer that starts at the same offset turns
``L`` into a sum of node weights along a path of overlapping k-mers (a de
Bruijn graph unrolled over positions), which is maximized by dynamic
programming.

k-mers are indexed in base ``|A|`` with the first character most
significant, so index order is lexicographic order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .encoding import DescriptorTable
from .kernel import GSParams, position_factor, similarity_from_sq

DEFAULT_MAX_CELLS = 50_000_000
_CHUNK = 512


class ResourceError(RuntimeError):
    pass


def kmer_index(kmer, n_sym: int) -> int:
    idx = 0
    for c in kmer:
        idx = idx * n_sym + int(c)
    return idx


def index_kmer(idx: int, k: int, n_sym: int) -> tuple:
    out = [0] * k
    for q in range(k - 1, -1, -1):
        idx, out[q] = divmod(idx, n_sym)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class DPTables:
    """Weights and prefix values of the unrolled de Bruijn graph.

    ``omega[p - 1][j, t]``: weighted affinity of placing p-mer ``t`` at
    offset ``j``. ``W[j, v]``: weight of k-mer ``v`` starting at ``j`` (the
    node at ``l - k`` also carries every shorter substring that starts after
    it). ``T[j, v]``: best total weight of a string of length ``j + k``
    ending with ``v``; ``back[j, v]`` is the first character of the best
    predecessor k-mer.
    """

    l: int
    k: int
    n_sym: int
    omega: tuple
    W: np.ndarray
    T: np.ndarray
    back: np.ndarray

    @property
    def n_kmers(self) -> int:
        return self.n_sym ** self.k


def _pmer_sq_to_all(U: np.ndarray, sq_dist: np.ndarray) -> np.ndarray:
    """Summed squared distance from each row of U to every p-mer, (N, |A|^p)."""
    acc = np.zeros((U.shape[0], 1))
    for q in range(U.shape[1]):
        acc = (acc[:, :, None] + sq_dist[U[:, q]][:, None, :]).reshape(U.shape[0], -1)
    return acc


def compute_omega(sequences, weights, params: GSParams, table: DescriptorTable, l: int, p: int):
    n_sym = table.size
    rows, w, starts = [], [], []
    for seq, wi in zip(sequences, weights):
        if wi == 0:
            continue
        for s in range(len(seq) - p + 1):
            rows.append(seq[s : s + p])
            w.append(wi)
            starts.append(s)
    out = np.zeros((l - p + 1, n_sym ** p))
    if not rows:
        return out
    U = np.asarray(rows, dtype=np.intp)
    w = np.asarray(w, dtype=np.float64)
    starts = np.asarray(starts)
    positions = np.arange(l - p + 1)
    for lo in range(0, len(U), _CHUNK):
        sl = slice(lo, lo + _CHUNK)
        sim = similarity_from_sq(_pmer_sq_to_all(U[sl], table.sq_dist), params.sigma_c)
        coef = w[sl, None] * position_factor(starts[sl, None], positions[None, :], params.sigma_p)
        out += coef.T @ np.atleast_2d(sim)
    return out


def build_tables_from(sequences, weights, params: GSParams, table: DescriptorTable, l: int,
                      max_cells: int = DEFAULT_MAX_CELLS) -> DPTables:
    k, n_sym = params.k, table.size
    if l < k:
        raise ValueError(f"target length {l} is shorter than k = {k}")
    n_kmers = n_sym ** k
    if n_kmers * (l - k + 1) > max_cells:
        raise ResourceError(
            f"{n_kmers} k-mers x {l - k + 1} positions exceeds the cap of {max_cells} cells"
        )

    omega = tuple(compute_omega(sequences, weights, params, table, l, p) for p in range(1, k + 1))

    v = np.arange(n_kmers)
    W = np.empty((l - k + 1, n_kmers))
    for j in range(l - k + 1):
        W[j] = sum(omega[p - 1][j][v // n_sym ** (k - p)] for p in range(1, k + 1))
    last = l - k
    for q in range(1, k):
        for p in range(1, k - q + 1):
            W[last] += omega[p - 1][last + q][(v // n_sym ** (k - q - p)) % n_sym ** p]

    T = np.empty_like(W)
    back = np.full(W.shape, -1, dtype=np.intp)
    T[0] = W[0]
    for j in range(1, l - k + 1):
        prev = T[j - 1].reshape(n_sym, n_kmers // n_sym)
        T[j] = W[j] + prev.max(axis=0)[v // n_sym]
        back[j] = prev.argmax(axis=0)[v // n_sym]
    for arr in (W, T, back, *omega):
        arr.setflags(write=False)
    return DPTables(l, k, n_sym, omega, W, T, back)


def build_tables(model, l: int, max_cells: int = DEFAULT_MAX_CELLS) -> DPTables:
    """Tables for the linear part of ``model`` (beta if normalized, else alpha)."""
    return build_tables_from(model.sequences, model.weights, model.params, model.table, l,
                             max_cells=max_cells)


def path_score(tables: DPTables, x) -> float:
    """Sum of node weights along the k-mers of a full-length string."""
    k, n_sym = tables.k, tables.n_sym
    return float(sum(tables.W[j, kmer_index(x[j : j + k], n_sym)]
                     for j in range(tables.l - k + 1)))


def argmax_linear(tables: DPTables):
    """Best full-length string and its value; ties go to the smallest string.

    Runs a right-to-left pass so the reconstruction can commit characters
    left to right, which is what lexicographic tie-breaking needs.
    """
    l, k, n_sym = tables.l, tables.k, tables.n_sym
    n_kmers = tables.n_kmers
    v = np.arange(n_kmers)
    R = np.empty_like(tables.W)
    R[-1] = tables.W[-1]
    for j in range(l - k - 1, -1, -1):
        nxt = R[j + 1].reshape(n_kmers // n_sym, n_sym)
        R[j] = tables.W[j] + nxt.max(axis=1)[v % (n_kmers // n_sym)]

    cur = int(np.argmax(R[0]))
    out = list(index_kmer(cur, k, n_sym))
    for j in range(1, l - k + 1):
        base = (cur % (n_kmers // n_sym)) * n_sym
        a = int(np.argmax(R[j][base : base + n_sym]))
        out.append(a)
        cur = base + a
    return tuple(out), float(R[0].max())


def suffix_value(tables: DPTables, j_star: int, v_star: int, interior_sum: float) -> float:
    """Best linear value over all strings sharing a fixed suffix.

    ``v_star`` is the index of the suffix's first k-mer, which starts at
    offset ``j_star``; ``interior_sum`` is the node weight of the suffix's
    later k-mers.
    """
    if not 0 <= j_star <= tables.l - tables.k:
        raise ValueError(f"node position {j_star} outside 0..{tables.l - tables.k}")
    return float(tables.T[j_star, v_star]) + interior_sum


def interior_sum(tables: DPTables, suffix) -> float:
    """Node weight of every k-mer of ``suffix`` except the first."""
    k, n_sym = tables.k, tables.n_sym
    j_star = tables.l - len(suffix)
    return float(sum(tables.W[j_star + t, kmer_index(suffix[t : t + k], n_sym)]
                     for t in range(1, len(suffix) - k + 1)))


def best_completion(tables: DPTables, suffix) -> tuple:
    """The full-length string attaining ``suffix_value`` for ``suffix``."""
    k, n_sym = tables.k, tables.n_sym
    j_star = tables.l - len(suffix)
    cur = kmer_index(suffix[:k], n_sym)
    prefix = []
    for j in range(j_star, 0, -1):
        a = int(tables.back[j, cur])
        prefix.append(a)
        cur = a * n_sym ** (k - 1) + cur // n_sym
    return tuple(reversed(prefix)) + tuple(suffix)


def all_kmers(k: int, n_sym: int):
    return itertools.product(range(n_sym), repeat=k)
