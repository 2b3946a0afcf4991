import numpy as np
import pytest

import aefs


def test_train_and_rank():
    x, labels, sources = aefs.gen_synthetic(samples=80, sources=3, redundant=6, noise=2, seed=1)
    x = aefs.normalize(x)
    out = aefs.train(x, hidden=8, alpha=0.05, beta=0.001, max_epochs=100, seed=2)
    assert out["w1"].shape == (11, 8)
    assert out["w2"].shape == (8, 11)
    hist = out["objective_history"]
    assert all(b <= a for a, b in zip(hist, hist[1:]))
    scores, order = aefs.rank_features(out["w1"])
    assert sorted(order) == list(range(11))
    assert scores[order[0]] == max(scores)
    assert len(labels) == 80 and len(sources) == 3


def test_gradients_match_finite_differences():
    assert aefs.gradient_check(seed=0, act_hidden="tanh", act_output="sigmoid") < 1e-5


def test_soft_threshold():
    w = aefs.vector_soft_threshold(np.array([3.0, 4.0]), 1.0)
    np.testing.assert_allclose(w, [2.4, 3.2])
    np.testing.assert_array_equal(aefs.vector_soft_threshold(np.array([0.3, 0.4]), 1.0), [0.0, 0.0])


def test_evaluation_helpers():
    assert aefs.best_map_accuracy([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0
    x = np.array([[0.0], [0.1], [5.0], [5.1]])
    assert aefs.nn_classify_accuracy(x, [0, 0, 1, 1]) == 1.0
    assert sorted(set(aefs.kmeans(x, 2, seed=3))) == [0, 1]


def test_rsr_and_errors():
    x, _, _ = aefs.gen_synthetic(samples=40, sources=2, redundant=3, noise=1, seed=4)
    out = aefs.rsr_solve(x, lam=aefs.rsr_lambda_max(x) * 1.01)
    assert np.count_nonzero(out["w"]) == 0
    with pytest.raises(ValueError):
        aefs.train(np.zeros((0, 3)))
    with pytest.raises(aefs.DivergenceError):
        aefs.train(100.0 * x, hidden=4, step="fixed", t=1e6, max_epochs=50, act_hidden="identity")


def test_cli_in_process(tmp_path):
    data = tmp_path / "d.csv"
    assert aefs.cli_main(["synth", "--samples", "30", "--sources", "2", "--redundant", "2",
                          "--noise", "1", "--out", str(data)]) == 0
    assert aefs.cli_main(["select", "--input", str(data), "--header", "--label-column", "-1",
                          "--hidden", "4", "--epochs", "20", "--out", str(tmp_path / "r.json")]) == 0
    assert aefs.cli_main(["select", "--bogus"]) != 0
