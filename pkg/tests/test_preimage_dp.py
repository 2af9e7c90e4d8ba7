import itertools
import math

import numpy as np
import pytest

from conftest import random_instance, random_table
from gsdesign.kernel import GSParams, gs
from gsdesign.preimage_dp import (
    ResourceError,
    argmax_linear,
    best_completion,
    build_tables,
    build_tables_from,
    index_kmer,
    interior_sum,
    kmer_index,
    path_score,
    suffix_value,
)


def linear(model, x):
    return sum(w * gs(s, x, model.params, model.table) for w, s in zip(model.weights, model.sequences))


def test_kmer_indexing():
    for idx in range(27):
        assert kmer_index(index_kmer(idx, 3, 3), 3) == idx
    assert kmer_index((1, 0, 2), 3) == 11


def test_zero_weights(rng):
    table = random_table(rng, 3)
    tb = build_tables_from([(0, 1, 2)], [0.0], GSParams(2, 1, 1), table, 4)
    assert not tb.W.any() and not tb.T.any()
    assert all(not o.any() for o in tb.omega)
    assert argmax_linear(tb) == ((0, 0, 0, 0), 0.0)


def test_hand_expanded_k1():
    from gsdesign.encoding import load_descriptors
    table = load_descriptors("A 0\nB 1\n")
    sp, sc, beta = 1.0, 1.0, 0.7
    train = (0, 1, 1)  # "ABB"
    tb = build_tables_from([train], [beta], GSParams(1, sp, sc), table, 2)

    def sim(a, b):
        return math.exp(-((a - b) ** 2) / (2 * sc ** 2))

    def pos(i, j):
        return math.exp(-((i - j) ** 2) / (2 * sp ** 2))

    for j in range(2):
        for v in range(2):
            w = beta * sum(pos(i, j) * sim(c, v) for i, c in enumerate(train))
            assert tb.W[j, v] == pytest.approx(w, rel=1e-14)
    for v in range(2):
        assert tb.T[0, v] == tb.W[0, v]
        assert tb.T[1, v] == pytest.approx(tb.W[1, v] + max(tb.W[0]), rel=1e-14)


@pytest.mark.parametrize("n_sym,l,k", [(2, 5, 2), (3, 5, 3), (4, 4, 1), (4, 6, 3), (2, 6, 4)])
def test_decomposition_exact(n_sym, l, k):
    rng = np.random.default_rng(n_sym * 100 + l * 10 + k)
    model, _ = random_instance(rng, n_sym=n_sym, l=l, k=k, m=8)
    tb = build_tables(model, l)
    for _ in range(50):
        x = tuple(int(c) for c in rng.integers(0, n_sym, size=l))
        ref = linear(model, x)
        assert path_score(tb, x) == pytest.approx(ref, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("n_sym,l,k,seed", [(2, 5, 2, 0), (2, 5, 2, 1), (4, 6, 3, 2), (4, 6, 3, 3), (3, 5, 1, 4)])
def test_argmax_matches_enumeration(n_sym, l, k, seed):
    rng = np.random.default_rng(seed)
    model, _ = random_instance(rng, n_sym=n_sym, l=l, k=k, normalized=False)
    tb = build_tables(model, l)
    best = max(itertools.product(range(n_sym), repeat=l), key=lambda x: linear(model, x))
    seq, value = argmax_linear(tb)
    assert value == pytest.approx(linear(model, best), rel=1e-9)
    assert seq == best
    assert value == pytest.approx(tb.T[-1].max(), rel=1e-12)


def test_suffix_value_and_witness():
    rng = np.random.default_rng(21)
    for _ in range(10):
        model, l = random_instance(rng, n_sym=2, l=6)
        tb = build_tables(model, l)
        k = model.params.k
        full = tuple(int(c) for c in rng.integers(0, 2, size=l))
        g = suffix_value(tb, 0, kmer_index(full[:k], 2), interior_sum(tb, full))
        assert g == pytest.approx(linear(model, full), rel=1e-9)
        for s in range(k, l + 1):
            suffix = full[l - s:]
            g = suffix_value(tb, l - s, kmer_index(suffix[:k], 2), interior_sum(tb, suffix))
            values = [linear(model, pre + suffix) for pre in itertools.product(range(2), repeat=l - s)]
            assert g == pytest.approx(max(values), rel=1e-9, abs=1e-12)
            witness = best_completion(tb, suffix)
            assert witness[l - s:] == suffix
            assert linear(model, witness) == pytest.approx(g, rel=1e-9, abs=1e-12)


def test_prepend_recurrence_and_monotonicity():
    rng = np.random.default_rng(22)
    model, _ = random_instance(rng, n_sym=4, k=2)
    l, k, n = 7, 2, 4
    tb = build_tables(model, l)
    for _ in range(100):
        s = int(rng.integers(k, l))
        suffix = tuple(int(c) for c in rng.integers(0, n, size=s))
        j, v, inner = l - s, kmer_index(suffix[:k], n), interior_sum(tb, suffix)
        a = int(rng.integers(0, n))
        child = (a,) + suffix
        incremental = suffix_value(tb, j - 1, kmer_index(child[:k], n), inner + tb.W[j, v])
        scratch = suffix_value(tb, j - 1, kmer_index(child[:k], n), interior_sum(tb, child))
        assert incremental == pytest.approx(scratch, rel=1e-12, abs=1e-14)
        assert incremental <= suffix_value(tb, j, v, inner) + 1e-12


def test_contract_errors(rng):
    model, _ = random_instance(rng, n_sym=4, k=3)
    with pytest.raises(ValueError):
        build_tables(model, 2)
    with pytest.raises(ResourceError):
        build_tables(model, 8, max_cells=100)
    tb = build_tables(model, 5)
    with pytest.raises(ValueError):
        suffix_value(tb, 3, 0, 0.0)
