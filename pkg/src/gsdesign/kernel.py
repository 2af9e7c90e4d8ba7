"""Generic String (GS) kernel.

The kernel compares every pair of substrings of length 1..k of two strings,
weighting each pair by a Gaussian in the difference of their start offsets
(``sigma_p``) and a Gaussian in the squared distance between their
descriptor encodings (``sigma_c``). Offsets are 0-based. ``sigma = 0`` and
``sigma = inf`` are limit values: 0 turns a factor into an exact-match
indicator and inf turns it into the constant 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .encoding import DescriptorTable, Sequence

INF = math.inf


def parse_sigma(value) -> float:
    """Accept a float, or the literal ``"inf"``."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity"):
            return INF
        value = float(text)
    value = float(value)
    if math.isnan(value) or value < 0:
        raise ValueError(f"sigma must be >= 0 or 'inf', got {value!r}")
    return value


def format_sigma(value: float):
    return "inf" if math.isinf(value) else float(value)


@dataclass(frozen=True)
class GSParams:
    k: int
    sigma_p: float
    sigma_c: float

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "sigma_p", parse_sigma(self.sigma_p))
        object.__setattr__(self, "sigma_c", parse_sigma(self.sigma_c))

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "sigma_p": format_sigma(self.sigma_p),
            "sigma_c": format_sigma(self.sigma_c),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GSParams":
        return cls(int(d["k"]), d["sigma_p"], d["sigma_c"])


def position_factor(i, j, sigma_p: float):
    """exp(-(i - j)^2 / (2 sigma_p^2)), elementwise over array arguments."""
    delta = np.subtract(i, j, dtype=np.float64)
    if math.isinf(sigma_p):
        return np.ones_like(delta)[()]
    if sigma_p == 0:
        return (delta == 0).astype(np.float64)[()]
    return np.exp(-(delta * delta) / (2.0 * sigma_p * sigma_p))[()]


def similarity_from_sq(total_sq, sigma_c: float):
    """Map summed squared descriptor distances to a similarity in [0, 1]."""
    total_sq = np.asarray(total_sq, dtype=np.float64)
    if math.isinf(sigma_c):
        return np.ones_like(total_sq)[()]
    if sigma_c == 0:
        return (total_sq == 0).astype(np.float64)[()]
    return np.exp(-total_sq / (2.0 * sigma_c * sigma_c))[()]


def pmer_similarity(s, t, table: DescriptorTable, sigma_c: float) -> float:
    if len(s) != len(t) or len(s) == 0:
        raise ValueError("p-mers must be non-empty and of equal length")
    total = float(sum(table.sq_dist[a, b] for a, b in zip(s, t)))
    return float(similarity_from_sq(total, sigma_c))


def position_matrix(n1: int, n2: int, sigma_p: float, offset1: int = 0, offset2: int = 0):
    return position_factor(
        np.arange(n1)[:, None] + offset1, np.arange(n2)[None, :] + offset2, sigma_p
    )


def _partials_from_sq(D: np.ndarray, params: GSParams) -> np.ndarray:
    """Per-length partial kernel sums from an aligned squared-distance array.

    ``D[..., i, j]`` holds ``sq_dist[x[i], y[j]]``; the result has shape
    ``D.shape[:-2] + (k,)``. The summed distance of each p-mer pair is kept
    as a running diagonal sum so every length costs one array addition.
    """
    n1, n2 = D.shape[-2:]
    out = np.zeros(D.shape[:-2] + (params.k,))
    if n1 == 0 or n2 == 0:
        return out
    P = position_matrix(n1, n2, params.sigma_p)
    S = None
    for p in range(1, params.k + 1):
        r1, r2 = n1 - p + 1, n2 - p + 1
        if r1 <= 0 or r2 <= 0:
            break
        tail = D[..., p - 1 :, p - 1 :]
        S = tail.copy() if S is None else S[..., :r1, :r2] + tail
        out[..., p - 1] = (P[:r1, :r2] * similarity_from_sq(S, params.sigma_c)).sum(
            axis=(-2, -1)
        )
    return out


def gs_partials(x: Sequence, y: Sequence, params: GSParams, table: DescriptorTable) -> np.ndarray:
    """Contribution of each substring length p = 1..k to gs(x, y)."""
    if tuple(y) < tuple(x):
        x, y = y, x
    D = table.sq_dist[np.ix_(np.asarray(x, dtype=np.intp), np.asarray(y, dtype=np.intp))]
    return _partials_from_sq(D, params)


def gs(x: Sequence, y: Sequence, params: GSParams, table: DescriptorTable) -> float:
    """GS kernel value; exactly symmetric and 0 when either string is empty."""
    if len(x) == 0 or len(y) == 0:
        return 0.0
    return float(gs_partials(x, y, params, table).sum())


def gs_rowwise(X, Y, params: GSParams, table: DescriptorTable) -> np.ndarray:
    """gs(X[n], Y[n]) for every row of two integer arrays.

    ``X`` has shape (N, L1) and ``Y`` shape (N, L2) or (1, L2); rows within
    each array share one length.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.intp))
    Y = np.atleast_2d(np.asarray(Y, dtype=np.intp))
    D = table.sq_dist[X[:, :, None], Y[:, None, :]]
    return _partials_from_sq(D, params).sum(axis=-1)


class KernelError(ArithmeticError):
    pass


def normalized_kernel(x: Sequence, y: Sequence, params: GSParams, table: DescriptorTable) -> float:
    if len(x) == 0 or len(y) == 0:
        raise ValueError("normalized kernel needs non-empty sequences")
    kxx = gs(x, x, params, table)
    kyy = gs(y, y, params, table)
    if kxx <= 0 or kyy <= 0:
        raise KernelError("self-kernel is zero; cannot normalize")
    if tuple(x) == tuple(y):
        return 1.0
    return gs(x, y, params, table) / math.sqrt(kxx * kyy)


def gram_matrix(seqs, params: GSParams, table: DescriptorTable, normalized: bool = False) -> np.ndarray:
    m = len(seqs)
    if any(len(s) == 0 for s in seqs):
        raise ValueError("Gram matrix needs non-empty sequences")
    G = np.empty((m, m))
    for a in range(m):
        for b in range(a, m):
            G[a, b] = G[b, a] = gs(seqs[a], seqs[b], params, table)
    if normalized:
        norms = np.sqrt(np.diag(G).copy())
        G = G / np.outer(norms, norms)
        np.fill_diagonal(G, 1.0)
    return G
