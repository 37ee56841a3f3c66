import numpy as np
import pytest

from app.nn.crf import (
    CrfLayer,
    brute_force_paths,
    crf_log_partition,
    crf_nll,
    crf_nll_batch,
    crf_sequence_score,
    viterbi_decode,
)
from app.nn.functional import logsumexp
from app.nn.gradcheck import check_gradients, numerical_gradient, relative_error
from app.nn.tagger import allowed_tags


@pytest.fixture
def layer(rng):
    crf = CrfLayer(3, rng)
    for name in ("chain_kernel", "bias", "left_boundary", "right_boundary"):
        crf.params[name][...] = rng.normal(size=crf.params[name].shape)
    return crf


def all_scores(emissions, layer):
    paths = list(brute_force_paths(emissions.shape[0], layer.num_tags))
    return paths, np.array([crf_sequence_score(emissions, p, layer) for p in paths])


def test_parameter_count(rng):
    assert CrfLayer(3, rng).count_parameters() == 27


@pytest.mark.parametrize("steps", [1, 2, 3, 4, 5, 6])
def test_partition_matches_enumeration(layer, rng, steps):
    emissions = rng.normal(size=(steps, 3))
    _, scores = all_scores(emissions, layer)
    assert crf_log_partition(emissions, layer) == pytest.approx(float(logsumexp(scores)))


@pytest.mark.parametrize("steps", [1, 3, 6])
def test_path_probabilities_sum_to_one(layer, rng, steps):
    emissions = rng.normal(size=(steps, 3))
    _, scores = all_scores(emissions, layer)
    assert np.exp(scores - crf_log_partition(emissions, layer)).sum() == pytest.approx(1.0)


@pytest.mark.parametrize("steps", [1, 2, 4, 6])
def test_viterbi_matches_enumeration(layer, rng, steps):
    emissions = rng.normal(size=(steps, 3))
    paths, scores = all_scores(emissions, layer)
    path, score = viterbi_decode(emissions, layer)
    assert tuple(path) == paths[int(np.argmax(scores))]
    assert score == pytest.approx(scores.max())


def test_viterbi_respects_allowed_tags(layer, rng):
    emissions = rng.normal(size=(5, 3))
    emissions[:, 2] += 100.0
    emissions[0, 1] += 100.0
    path, _ = viterbi_decode(emissions, layer, allowed_tags(5))
    assert path[0] == 0
    assert 2 not in path


def test_nll_is_non_negative(layer, rng):
    emissions = rng.normal(size=(4, 3))
    for path in brute_force_paths(4):
        assert crf_nll(emissions, path, layer) >= -1e-12


def test_nll_near_zero_for_dominant_path():
    layer = CrfLayer.zeros()
    gold = [0, 1, 1, 0]
    emissions = 50.0 * np.eye(3)[gold]
    assert crf_nll(emissions, gold, layer) == pytest.approx(0.0, abs=1e-12)


def test_zero_steps(layer):
    with pytest.raises(ValueError):
        crf_log_partition(np.zeros((0, 3)), layer)
    with pytest.raises(ValueError):
        viterbi_decode(np.zeros((0, 3)), layer)
    with pytest.raises(ValueError):
        crf_sequence_score(np.zeros((2, 3)), [0], layer)


def test_batch_matches_single_sequences(layer, rng):
    emissions = rng.normal(size=(2, 5, 3))
    lengths = np.array([5, 3])
    gold = np.array([[0, 1, 1, 0, 1], [0, 0, 1, 2, 2]])
    loss, _ = crf_nll_batch(emissions, gold, lengths, layer)
    expected = np.mean([
        crf_nll(emissions[0], gold[0], layer),
        crf_nll(emissions[1, :3], gold[1, :3], layer),
    ])
    assert loss == pytest.approx(expected)


def test_batch_gradient(layer, rng):
    x = rng.normal(size=(2, 4, 3))
    lengths = np.array([4, 2])
    gold = np.array([[0, 1, 0, 1], [0, 1, 2, 2]])
    d_emissions = {}

    def loss_and_backward():
        loss, d = crf_nll_batch(layer.project(x), gold, lengths, layer)
        d_emissions["value"] = d
        layer.project_backward(d)
        return loss

    def loss_only():
        return crf_nll_batch(layer.project(x), gold, lengths, layer)[0]

    errors = check_gradients(layer, loss_and_backward, loss_only)
    assert max(errors.values()) < 1e-5, errors

    emissions = layer.project(x)
    numeric = numerical_gradient(lambda: crf_nll_batch(emissions, gold, lengths, layer)[0], emissions)
    assert relative_error(d_emissions["value"], numeric) < 1e-5
    # padded steps get no gradient
    assert np.all(d_emissions["value"][1, 2:] == 0.0)


def test_random_instances_against_enumeration(rng):
    for _ in range(200):
        steps = int(rng.integers(1, 7))
        crf = CrfLayer(3, rng)
        for value in crf.params.values():
            value[...] = rng.normal(size=value.shape)
        emissions = rng.normal(size=(steps, 3)) * 2.0
        paths, scores = all_scores(emissions, crf)
        np.testing.assert_allclose(crf_log_partition(emissions, crf), logsumexp(scores), rtol=1e-8)
        assert tuple(viterbi_decode(emissions, crf)[0]) == paths[int(np.argmax(scores))]
