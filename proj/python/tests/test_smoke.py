import math

import numpy as np
import pytest

import ssfs


def test_element_loss():
    assert ssfs.element_loss(2.0, [1.0, 1.0], [1.0, 0.0], 0.5) == 1.25


def test_mask_counts_and_standardize():
    mask = ssfs.make_mask(10, 10, 0.5, 7)
    assert mask.shape == (10, 10)
    assert int((~mask).sum()) == 50
    values = np.arange(100, dtype=float).reshape(10, 10)
    z = ssfs.standardize_observed(values, mask)
    assert np.isnan(z[~mask]).all()
    assert np.allclose(np.nanmean(z, axis=0), 0.0)


def test_lfa_completion_recovers_low_rank():
    rng = np.random.default_rng(0)
    truth = rng.normal(size=(100, 2)) @ rng.normal(size=(2, 20))
    truth = (truth - truth.mean(0)) / truth.std(0)
    mask = ssfs.make_mask(100, 20, 0.5, 1)
    cfg = ssfs.LfaConfig()
    cfg.rank = 2
    cfg.lambda_ = 0.02
    completed = ssfs.lfa_complete(np.where(mask, truth, 0.0), mask, cfg)
    rmse = math.sqrt(float(((completed - truth)[~mask] ** 2).mean()))
    assert rmse < 0.15
    x, y, trace = ssfs.lfa_train(np.where(mask, truth, 0.0), mask, cfg)
    assert x.shape == (100, 2) and y.shape == (20, 2) and len(trace) >= 1


def test_de_operators_and_evolution():
    assert ssfs.mutate([0.5, 0.5], [1.0, 0.0], [0.0, 1.0], 0.5) == [1.0, 0.0]
    assert ssfs.binarize([0.49, 0.5, 0.51]) == [False, True, True]
    rng = np.random.default_rng(3)
    window = rng.normal(size=(150, 8))
    labels = (window[:, 1] + window[:, 3] > 0).astype(int).tolist()
    result = ssfs.evolve_window(window, labels, ssfs.DeConfig())
    history = result["history"]
    assert all(b <= a for a, b in zip(history, history[1:]))
    assert result["mask"][1] and result["mask"][3]


def test_classifier_and_tests():
    x = np.array([[0.0], [0.1], [10.0], [10.1], [0.2], [10.2]])
    y = [0, 0, 1, 1, 0, 1]
    knn = ssfs.ClassifierConfig("knn")
    knn.k_neighbors = 1
    assert ssfs.cross_val_accuracy(x, y, knn, 3, 0) == 1.0
    p, independent = ssfs.fisher_z_test(0.0, 50)
    assert p == 1.0 and independent
    w = ssfs.wilcoxon_signed_rank([0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
    assert (w["r_plus"], w["r_minus"]) == (21.0, 0.0)
    with pytest.raises(ssfs.AllZeroDifferences):
        ssfs.wilcoxon_signed_rank([0.0, 0.0])


def test_run_and_compare():
    data = ssfs.make_planted_dataset(samples=120, features=20, n_informative=3, seed=5)
    cfg = ssfs.RunConfig()
    cfg.window_size = 10
    cfg.de.generations = 5
    cfg.classifiers = [ssfs.ClassifierConfig("knn")]
    report = ssfs.run(data, cfg)
    assert report["spec_version"] == 1
    assert report["n_selected"] == len(report["selected"])
    assert report == ssfs.run(data, cfg)
    assert report["config"]["ci"]["alpha"] == 0.05

    cmp = ssfs.compare([("toy", data)], cfg, cfg, [1, 2])
    assert cmp["verdict"] == "no difference"


def test_errors_surface_as_python_exceptions(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,0\n1,2,3,1\n")
    with pytest.raises(ssfs.Error, match="ragged row at line 2"):
        ssfs.load_csv(str(bad))
