"""Exhaustive enumeration over fixed-length strings.

These routines score every candidate with direct kernel evaluations and
share nothing with the dynamic program, the bound or the search beyond the
kernel primitives. They exist to certify those components on small
instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .kernel import gs_rowwise, normalized_kernel

DEFAULT_CAP = 10**6
OBJECTIVES = ("h", "h_star", "h_star_alpha", "linear")


class OracleCapError(RuntimeError):
    pass


@dataclass(frozen=True)
class EnumerationSpec:
    n_sym: int
    length: int
    suffix: tuple = ()
    cap: int = DEFAULT_CAP

    @property
    def free(self) -> int:
        return self.length - len(self.suffix)

    def check(self):
        if self.free < 0:
            raise ValueError("suffix longer than the enumerated length")
        if self.n_sym ** self.free > self.cap:
            raise OracleCapError(
                f"{self.n_sym}^{self.free} candidates exceed the cap of {self.cap}"
            )

    def candidates(self) -> np.ndarray:
        """All completions in lexicographic order, one per row."""
        self.check()
        rows = [pre + tuple(self.suffix)
                for pre in itertools.product(range(self.n_sym), repeat=self.free)]
        return np.array(rows, dtype=np.intp).reshape(len(rows), self.length)


def _linear_scores(model, X: np.ndarray, weights) -> np.ndarray:
    out = np.zeros(len(X))
    for w, seq in zip(weights, model.sequences):
        if w != 0:
            out += w * gs_rowwise(X, [seq], model.params, model.table)
    return out


def objective_values(model, X: np.ndarray, objective: str) -> np.ndarray:
    """Score every row of ``X``.

    ``h``: sum alpha_i K(x_i, x). ``linear``: the expansion the model's
    predictor maximizes (beta for normalized models, alpha otherwise).
    ``h_star``: beta expansion over sqrt(K(x, x)). ``h_star_alpha``: alpha
    with the normalized kernel, computed one pair at a time.
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")
    if objective == "h":
        return _linear_scores(model, X, model.alpha)
    if objective == "linear":
        return _linear_scores(model, X, model.beta if model.normalized else model.alpha)
    if objective == "h_star":
        self_k = gs_rowwise(X, X, model.params, model.table)
        return _linear_scores(model, X, model.beta) / np.sqrt(self_k)
    return np.array([
        sum(a * normalized_kernel(s, tuple(x), model.params, model.table)
            for a, s in zip(model.alpha, model.sequences))
        for x in X
    ])


def enum_max_objective(model, spec: EnumerationSpec, objective: str = "h_star"):
    """Best candidate and its value; ties go to the lexicographically smallest."""
    X = spec.candidates()
    vals = objective_values(model, X, objective)
    i = int(np.argmax(vals))
    return tuple(int(c) for c in X[i]), float(vals[i])


def enum_min_self_kernel(spec: EnumerationSpec, params, table):
    X = spec.candidates()
    vals = gs_rowwise(X, X, params, table)
    i = int(np.argmin(vals))
    return tuple(int(c) for c in X[i]), float(vals[i])


def enum_top_k(model, spec: EnumerationSpec, objective: str, k: int):
    """The ``k`` best candidates sorted by value, then lexicographically."""
    X = spec.candidates()
    if k > len(X):
        raise ValueError(f"k = {k} exceeds the {len(X)} candidates")
    vals = objective_values(model, X, objective)
    order = np.lexsort((np.arange(len(X)), -vals))[:k]
    return [(tuple(int(c) for c in X[i]), float(vals[i])) for i in order]
