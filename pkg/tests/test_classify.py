import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from rmtles.classify import (
    Dataset,
    ModelSpec,
    Standardizer,
    cross_validate,
    model_from_dict,
    model_to_dict,
    rbf_kernel,
    smo,
    split_indices,
    train_forest,
    train_gnb,
    train_knn,
    train_model,
    train_svm_rbf,
    train_tree,
)
from rmtles.classify.serialize import dumps, loads
from rmtles.classify.tree import resolve_max_features
from rmtles.errors import RmtlesError


def _blobs(n_per=20, centers=((0, 0), (4, 4), (0, 5)), seed=0, spread=0.7):
    rng = np.random.default_rng(seed)
    rows, labels, groups = [], [], []
    for i, c in enumerate(centers):
        rows.append(rng.normal(c, spread, (n_per, len(c))))
        labels += [f"k{i}"] * n_per
        groups += [f"k{i}-s{j // 4}" for j in range(n_per)]
    return Dataset(np.vstack(rows), labels, groups, ("x", "y"))


def test_dataset_validation():
    with pytest.raises(RmtlesError):
        Dataset(np.array([[1.0, np.nan]]), ["a"])
    with pytest.raises(RmtlesError):
        Dataset(np.ones((3, 2)), ["a", "b"])
    ds = Dataset(np.ones((3, 2)), [1, 2, 1])
    assert ds.classes == ("1", "2")


def test_standardizer_round_trip():
    x = np.random.default_rng(0).normal(5, 3, (30, 4))
    s = Standardizer.fit(x)
    z = s.transform(x)
    np.testing.assert_allclose(z.mean(axis=0), 0, atol=1e-12)
    np.testing.assert_allclose(z.std(axis=0), 1, rtol=1e-12)
    np.testing.assert_array_equal(Standardizer.from_params(json.loads(json.dumps(s.to_params()))).transform(x), z)


# -- SVM -------------------------------------------------------------------------


def _dual_objective(alpha, K, y):
    return 0.5 * alpha @ ((y[:, None] * y[None, :]) * K) @ alpha - alpha.sum()


@pytest.mark.parametrize("C", [0.1, 1.0, 10.0])
def test_smo_matches_generic_qp(C):
    rng = np.random.default_rng(3)
    x = rng.standard_normal((24, 2))
    y = np.where(x[:, 0] + 0.5 * rng.standard_normal(24) > 0, 1.0, -1.0)
    K = rbf_kernel(x, x, 0.7)
    alpha, rho, converged = smo(K, y, C, tol=1e-6)
    assert converged
    assert np.all(alpha >= -1e-12) and np.all(alpha <= C + 1e-12)
    assert abs(alpha @ y) < 1e-9
    ref = optimize.minimize(
        _dual_objective,
        np.zeros(len(y)),
        args=(K, y),
        jac=lambda a, K, y: ((y[:, None] * y[None, :]) * K) @ a - 1.0,
        bounds=[(0, C)] * len(y),
        constraints=[{"type": "eq", "fun": lambda a: a @ y, "jac": lambda a: y}],
        method="SLSQP",
        options={"ftol": 1e-14, "maxiter": 1000},
    )
    assert _dual_objective(alpha, K, y) == pytest.approx(ref.fun, abs=1e-6)


def test_svm_xor():
    x = np.array([[0, 0], [1, 1], [0, 1], [1, 0]], dtype=float)
    ds = Dataset(np.repeat(x, 5, axis=0) + np.random.default_rng(0).normal(0, 0.05, (20, 2)), np.repeat(["a", "a", "b", "b"], 5))
    model = train_svm_rbf(ds, C=10.0, gamma=2.0)
    assert list(model.predict(x)) == ["a", "a", "b", "b"]


def test_svm_multiclass_and_degenerate():
    ds = _blobs()
    model = train_svm_rbf(ds, C=1.0, gamma=0.5)
    assert np.mean(model.predict(ds.rows) == ds.labels) > 0.95
    flat = Dataset(np.ones((6, 2)), ["a", "a", "a", "b", "b", "c"])
    m = train_svm_rbf(flat)
    assert m.degenerate and list(m.predict(np.zeros((2, 2)))) == ["a", "a"]
    with pytest.raises(RmtlesError):
        train_svm_rbf(Dataset(np.eye(3), ["a"] * 3))


# -- kNN / naive Bayes -------------------------------------------------------------


def test_knn_one_neighbour_memorizes():
    ds = _blobs(seed=1)
    assert np.array_equal(train_knn(ds, k=1).predict(ds.rows), ds.labels)
    with pytest.raises(RmtlesError):
        train_knn(ds, k=len(ds) + 1)


def test_knn_tie_break():
    ds = Dataset(np.array([[0.0], [2.0], [10.0], [11.0]]), ["b", "a", "c", "c"])
    # one vote each for a and b at equal distance: lexicographically smaller wins
    assert train_knn(ds, k=2).predict(np.array([[1.0]]))[0] == "a"
    # a and b tie on votes, b is closer
    assert train_knn(ds, k=2).predict(np.array([[0.9]]))[0] == "b"


def test_gnb_parameters_and_prediction():
    ds = _blobs(seed=2)
    m = train_gnb(ds)
    for i, c in enumerate(m.classes):
        sel = ds.rows[ds.labels == c]
        np.testing.assert_allclose(m.means[i], sel.mean(axis=0))
        np.testing.assert_allclose(m.variances[i], sel.var(axis=0), rtol=1e-6)
    assert np.mean(m.predict(ds.rows) == ds.labels) > 0.95


# -- trees -------------------------------------------------------------------------


def test_tree_fits_distinct_rows():
    ds = _blobs(seed=4, spread=2.0)
    t = train_tree(ds)
    assert np.array_equal(t.predict(ds.rows), ds.labels)
    shallow = train_tree(ds, max_depth=2)
    assert shallow.depth <= 2


def test_tree_picks_informative_feature():
    x = np.column_stack([np.random.default_rng(0).standard_normal(40), np.r_[np.zeros(20), np.ones(20)]])
    ds = Dataset(x, ["a"] * 20 + ["b"] * 20)
    t = train_tree(ds, max_depth=1)
    assert t.feature[0] == 1 and t.threshold[0] == pytest.approx(0.5)


def test_tree_min_leaf():
    ds = _blobs(seed=5, spread=2.0)
    t = train_tree(ds, min_leaf=5)
    leaves = t.counts[t.feature == -1].sum(axis=1)
    assert leaves.min() >= 5


@pytest.mark.parametrize("sub,d,expected", [("sqrt", 10, 3), ("all", 7, 7), (None, 7, 7), (0.5, 10, 5), (3, 10, 3), (0.01, 10, 1)])
def test_resolve_max_features(sub, d, expected):
    assert resolve_max_features(sub, d) == expected


def test_forest_deterministic_and_order_invariant():
    ds = _blobs(seed=6, spread=1.5)
    a = train_forest(ds, n_trees=15, seed=9)
    b = train_forest(ds, n_trees=15, seed=9)
    perm = np.random.default_rng(0).permutation(len(ds))
    c = train_forest(ds.subset(perm), n_trees=15, seed=9)
    probe = np.random.default_rng(1).normal(2, 3, (50, 2))
    assert np.array_equal(a.predict(probe), b.predict(probe))
    assert np.array_equal(a.predict(probe), c.predict(probe))


# -- serialization -----------------------------------------------------------------


@pytest.mark.parametrize("kind", ["svm", "knn", "gnb", "tree", "forest"])
def test_model_round_trip(kind):
    ds = _blobs(seed=7)
    params = {"forest": {"n_trees": 5}, "svm": {"gamma": None}}.get(kind, {})
    model = train_model(ModelSpec(kind, params), ds, seed=1)
    scaler = Standardizer.fit(ds.rows)
    back, s2, names = loads(dumps(model, scaler, ds.feature_names))
    probe = np.random.default_rng(2).normal(2, 3, (40, 2))
    assert np.array_equal(back.predict(probe), model.predict(probe))
    assert names == ("x", "y")
    np.testing.assert_array_equal(s2.transform(probe), scaler.transform(probe))


def test_model_document_checks():
    doc = model_to_dict(train_gnb(_blobs()))
    with pytest.raises(RmtlesError):
        model_from_dict({**doc, "version": 99})
    with pytest.raises(RmtlesError):
        model_from_dict({**doc, "format": "other"})
    with pytest.raises(RmtlesError):
        model_from_dict({**doc, "kind": "mlp"})


# -- cross-validation ----------------------------------------------------------------


def test_stratified_split_proportions():
    ds = Dataset(np.zeros((50, 1)), ["a"] * 40 + ["b"] * 10)
    tr, te = split_indices(ds, np.random.default_rng(0), 0.8, stratified=True)
    assert sorted(np.r_[tr, te]) == list(range(50))
    assert np.sum(ds.labels[tr] == "a") == 32 and np.sum(ds.labels[tr] == "b") == 8


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), frac=st.floats(0.2, 0.9))
def test_group_split_keeps_subjects_whole(seed, frac):
    ds = _blobs(n_per=12)
    tr, te = split_indices(ds, np.random.default_rng(seed), frac, stratified=True, group_by_subject=True)
    assert not set(ds.group_key[tr]) & set(ds.group_key[te])
    assert len(tr) and len(te)
    for c in ds.classes:
        assert np.any(ds.labels[tr] == c) and np.any(ds.labels[te] == c)


def test_cross_validate_report():
    ds = _blobs(seed=8)
    spec = ModelSpec("knn", {"k": 3})
    r1 = cross_validate(ds, spec, n_repeats=6, seed=4)
    r2 = cross_validate(ds, spec, n_repeats=6, seed=4, workers=3)
    assert r1.to_dict() == r2.to_dict()
    assert r1.std_accuracy == pytest.approx(np.std(r1.per_fold, ddof=1))
    assert r1.confusion.sum() == 6 * 12
    assert r1.mean_accuracy > 0.9


def test_cross_validate_guards():
    ds = Dataset(np.zeros((5, 1)), ["a", "a", "a", "a", "b"])
    with pytest.raises(RmtlesError):
        cross_validate(ds, ModelSpec("gnb"))
    with pytest.raises(RmtlesError):
        ModelSpec("perceptron")
