import math

import numpy as np
import pytest

from conftest import random_seqs, random_table
from gsdesign.encoding import load_descriptors, toy_table
from gsdesign.kernel import GSParams, gs, normalized_kernel
from gsdesign.regression import (
    ModelFormatError,
    NumericError,
    TrainedModel,
    TrainingSet,
    contiguous_folds,
    cross_validate,
    fit,
    predict,
    predict_h,
    predict_h_star,
    predict_h_star_alpha,
)

PARAMS = GSParams(2, 1.0, 1.0)


def toy_set(rng, m=3, n_sym=4):
    return TrainingSet(random_seqs(rng, n_sym, m, 3, 7), rng.normal(size=m))


def test_single_example_normalized():
    t = toy_table()
    train = TrainingSet([(0, 1, 2)], [1.7])
    model = fit(train, PARAMS, 0.0, True, t)
    assert model.alpha.tolist() == [1.7]
    assert predict_h_star(model, (0, 1, 2)) == pytest.approx(1.7, rel=1e-12)


def test_alpha_matches_independent_solve(rng):
    t = toy_table()
    train = toy_set(rng)
    model = fit(train, PARAMS, 0.1, False, t)
    G = np.array([[gs(a, b, PARAMS, t) for b in train.sequences] for a in train.sequences])
    expected = np.linalg.solve(G + 0.1 * np.eye(3), train.activities)
    np.testing.assert_allclose(model.alpha, expected, rtol=1e-9)
    np.testing.assert_allclose(model.beta * np.sqrt(np.diag(G)), model.alpha, rtol=1e-12)


@pytest.mark.parametrize("normalized", [False, True])
def test_residual_of_linear_system(rng, normalized):
    t = random_table(rng, 4)
    train = toy_set(rng, m=8)
    model = fit(train, PARAMS, 0.3, normalized, t)
    K = normalized_kernel if normalized else gs
    G = np.array([[K(a, b, PARAMS, t) for b in train.sequences] for a in train.sequences])
    r = (G + 0.3 * np.eye(8)) @ model.alpha - train.activities
    assert np.linalg.norm(r) <= 1e-9 * np.linalg.norm(train.activities)


def test_ridgeless_interpolation():
    t = toy_table()
    train = TrainingSet([(0, 1, 2, 3), (3, 3, 1), (2, 0, 0, 1, 1), (1, 2)], [0.5, -1.0, 2.0, 0.1])
    for normalized in (False, True):
        model = fit(train, PARAMS, 1e-12, normalized, t)
        preds = [predict(model, s) for s in train.sequences]
        np.testing.assert_allclose(preds, train.activities, atol=1e-6)


def test_singular_without_ridge():
    t = toy_table()
    train = TrainingSet([(0, 1), (0, 1)], [1.0, 2.0])
    with pytest.raises(NumericError, match="lambda > 0"):
        fit(train, PARAMS, 0.0, False, t)


def _manual_model(t, seqs, alpha, normalized):
    alpha = np.asarray(alpha, dtype=float)
    beta = alpha / np.sqrt([gs(s, s, PARAMS, t) for s in seqs])
    return TrainedModel(seqs, alpha, beta, PARAMS, 0.0, normalized, t)


def test_predict_h():
    t = toy_table()
    x = (1, 2, 3, 0)
    assert predict_h(_manual_model(t, [(0, 1), (2, 2)], [0, 0], False), x) == 0
    assert predict_h(_manual_model(t, [(0, 1, 1)], [1.0], False), x) == gs((0, 1, 1), x, PARAMS, t)
    seqs, alpha = [(0, 1), (2, 3, 1), (3,)], [0.4, -1.1, 2.0]
    expected = sum(a * gs(s, x, PARAMS, t) for a, s in zip(alpha, seqs))
    assert predict_h(_manual_model(t, seqs, alpha, False), x) == pytest.approx(expected, rel=1e-14)
    with pytest.raises(ValueError):
        predict_h(_manual_model(t, seqs, alpha, True), x)


def test_predict_h_star_forms_agree(rng):
    t = random_table(rng, 4)
    train = toy_set(rng, m=8)
    model = fit(train, PARAMS, 0.1, True, t)
    for _ in range(20):
        x = tuple(int(c) for c in rng.integers(0, 4, size=rng.integers(1, 8)))
        a, b = predict_h_star(model, x), predict_h_star_alpha(model, x)
        assert abs(a - b) <= 1e-12 * max(abs(a), 1e-300) or abs(a - b) < 1e-15
    zero = _manual_model(t, [(0, 1)], [0.0], True)
    assert predict_h_star(zero, (1, 1)) == 0
    with pytest.raises(ValueError):
        predict_h_star(model, ())


def test_model_json_round_trip(rng):
    t = toy_table()
    model = fit(toy_set(rng), GSParams(3, math.inf, 0.5), 0.1, True, t)
    back = TrainedModel.from_json(model.to_json(), t)
    assert back.params == model.params and back.normalized
    np.testing.assert_array_equal(back.alpha, model.alpha)
    np.testing.assert_array_equal(back.beta, model.beta)
    assert '"sigma_p": "inf"' in model.to_json()
    other = load_descriptors("A 0\nB 1\nC 2\nD 3\n")
    with pytest.raises(ModelFormatError):
        TrainedModel.from_json(model.to_json(), other)
    with pytest.raises(ModelFormatError):
        TrainedModel.from_json("{", t)


def test_folds():
    parts = contiguous_folds(7, 3)
    assert [p.tolist() for p in parts] == [[0, 1, 2], [3, 4], [5, 6]]
    with pytest.raises(ValueError):
        contiguous_folds(3, 4)
    with pytest.raises(ValueError):
        contiguous_folds(3, 1)


def _direct_cv(train, params, lam, folds, t):
    err = 0.0
    for test_idx in contiguous_folds(len(train), folds):
        rest = [i for i in range(len(train)) if i not in set(test_idx)]
        model = fit(train.subset(rest), params, lam, False, t)
        err += sum((predict_h(model, train.sequences[i]) - train.activities[i]) ** 2 for i in test_idx)
    return err / len(train)


def test_cross_validate(rng):
    t = toy_table()
    params = GSParams(2, 1.0, 1.0)
    # noiseless targets from a kernel expansion
    centers = random_seqs(rng, 4, 3, 4, 6)
    seqs = random_seqs(rng, 4, 12, 4, 6)
    y = [sum(c * gs(z, s, params, t) for c, z in zip([1.0, -0.5, 0.8], centers)) for s in seqs]
    train = TrainingSet(seqs, y)

    best = cross_validate(train, [params], [0.1], 3, t)
    assert best[:2] == (params, 0.1)
    assert best[2] == pytest.approx(_direct_cv(train, params, 0.1, 3, t), rel=1e-9)

    other = GSParams(1, 1.0, 1.0)
    assert cross_validate(train, [other, other], [0.1], 3, t)[0] is other

    scores = {lam: _direct_cv(train, params, lam, 4, t) for lam in (1e-3, 10.0)}
    chosen = cross_validate(train, [params], [10.0, 1e-3], 4, t)[1]
    assert chosen == min(scores, key=scores.get) == 1e-3
    with pytest.raises(ValueError):
        cross_validate(train, [], [0.1], 3, t)
    with pytest.raises(ValueError):
        cross_validate(train, [params], [0.1], 13, t)
