import numpy as np
import pytest

from conftest import random_instance
from gsdesign.kernel import gs
from gsdesign.oracle import (
    EnumerationSpec,
    OracleCapError,
    enum_max_objective,
    enum_min_self_kernel,
    enum_top_k,
    objective_values,
)
from gsdesign.regression import predict_h, predict_h_star
from gsdesign.search import design


def test_single_character(rng):
    model, _ = random_instance(rng, n_sym=2, k=1)
    seq, value = enum_max_objective(model, EnumerationSpec(2, 1))
    vals = [predict_h_star(model, (a,)) for a in range(2)]
    assert seq == (int(np.argmax(vals)),)
    assert value == pytest.approx(max(vals), rel=1e-12)


def test_fixed_full_suffix(rng):
    model, _ = random_instance(rng, n_sym=4)
    x = (1, 3, 0, 2)
    seq, value = enum_max_objective(model, EnumerationSpec(4, 4, x))
    assert seq == x and value == pytest.approx(predict_h_star(model, x), rel=1e-12)


def test_objectives_agree(rng):
    model, l = random_instance(rng, n_sym=2)
    X = EnumerationSpec(2, l).candidates()
    np.testing.assert_allclose(objective_values(model, X, "h_star"),
                               objective_values(model, X, "h_star_alpha"), rtol=1e-10)
    np.testing.assert_allclose(objective_values(model, X, "h_star"),
                               [predict_h_star(model, tuple(x)) for x in X], rtol=1e-10)
    unnorm, _ = random_instance(rng, n_sym=2, normalized=False)
    np.testing.assert_allclose(objective_values(unnorm, X, "h"),
                               [predict_h(unnorm, tuple(x)) for x in X], rtol=1e-10)
    with pytest.raises(ValueError):
        objective_values(model, X, "nope")


def test_min_self_kernel(rng):
    model, _ = random_instance(rng, n_sym=4, k=3)
    params, table = model.params, model.table
    from gsdesign.kernel import GSParams
    p0 = GSParams(3, 0, 1.0)
    _, v = enum_min_self_kernel(EnumerationSpec(4, 5), p0, table)
    assert v == gs((0,) * 5, (0,) * 5, p0, table)
    assert enum_min_self_kernel(EnumerationSpec(4, 1), params, table)[1] == 1.0


def test_top_k(rng):
    model, l = random_instance(rng, n_sym=2)
    spec = EnumerationSpec(2, l)
    everything = enum_top_k(model, spec, "h_star", 2 ** l)
    values = [v for _, v in everything]
    assert values == sorted(values, reverse=True)
    assert enum_top_k(model, spec, "h_star", 1)[0] == enum_max_objective(model, spec)
    with pytest.raises(ValueError):
        enum_top_k(model, spec, "h_star", 2 ** l + 1)


def test_cap(rng):
    model, _ = random_instance(rng, n_sym=4)
    with pytest.raises(OracleCapError):
        enum_max_objective(model, EnumerationSpec(4, 6, cap=100))


def test_matches_design_on_random_instances():
    rng = np.random.default_rng(77)
    for _ in range(20):
        model, l = random_instance(rng)
        n = model.table.size
        seq, value = enum_max_objective(model, EnumerationSpec(n, l), "h_star_alpha")
        got = design(model, l).sequences[0]
        assert got[1] == pytest.approx(value, rel=1e-9)
