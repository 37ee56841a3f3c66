import numpy as np
import pytest

from app.nn.gradcheck import check_gradients
from app.nn.seq2seq import EOS, GO, TGT_PAD, AdditiveAttention, Seq2SeqModel, target_tensors


@pytest.fixture
def attention(rng):
    return AdditiveAttention(memory_dim=4, query_dim=3, units=5, rng=rng)


class TestAttention:
    def test_weights_are_distributions(self, attention, rng):
        contexts = rng.normal(size=(2, 6, 4))
        mask = np.array([[1, 1, 1, 1, 1, 1], [1, 1, 1, 0, 0, 0]], dtype=float)
        _, weights = attention.forward(rng.normal(size=(2, 3, 3)), contexts, mask)
        assert np.allclose(weights.sum(axis=-1), 1.0)
        assert np.all(weights[1, :, 3:] == 0.0)

    def test_single_source_step(self, attention, rng):
        context, weights = attention.attend(rng.normal(size=3), rng.normal(size=(1, 4)))
        assert weights.tolist() == [1.0]
        assert context.shape == (4,)

    def test_identical_contexts_are_uniform(self, attention, rng):
        row = rng.normal(size=4)
        context, weights = attention.attend(rng.normal(size=3), np.tile(row, (4, 1)))
        assert weights == pytest.approx(np.full(4, 0.25))
        assert context == pytest.approx(row)

    def test_zero_contexts(self, attention, rng):
        context, _ = attention.attend(rng.normal(size=3), np.zeros((3, 4)))
        assert np.all(context == 0.0)

    def test_empty_contexts(self, attention):
        with pytest.raises(ValueError):
            attention.attend(np.zeros(3), np.zeros((0, 4)))

    def test_gradient(self, attention, rng):
        queries = rng.normal(size=(2, 3, 3))
        contexts = rng.normal(size=(2, 4, 4))
        mask = np.array([[1, 1, 1, 1], [1, 1, 0, 0]], dtype=float)
        weights = rng.normal(size=(2, 3, 4))

        def loss_and_backward():
            attended, _ = attention.forward(queries, contexts, mask)
            attention.backward(weights)
            return float((attended * weights).sum())

        def loss_only():
            return float((attention.forward(queries, contexts, mask)[0] * weights).sum())

        errors = check_gradients(attention, loss_and_backward, loss_only)
        assert max(errors.values()) < 1e-5, errors


def test_target_tensors():
    tgt_in, tgt_out, lengths = target_tensors(["SCS", "S"])
    assert tgt_in.tolist() == [[GO, 0, 1, 0], [GO, 0, TGT_PAD, TGT_PAD]]
    assert tgt_out.tolist() == [[0, 1, 0, EOS], [0, EOS, TGT_PAD, TGT_PAD]]
    assert lengths.tolist() == [4, 2]


def tiny(seed=0):
    return Seq2SeqModel(source_vocab_size=5, embedding_dim=3, units=2, seed=seed)


def source():
    return np.array([[1, 2, 3, 4], [2, 3, 0, 0]]), np.array([4, 2])


def test_full_model_gradients():
    model = Seq2SeqModel(source_vocab_size=5, embedding_dim=3, units=3, seed=0)
    # unit-scale embeddings keep the contexts distinct enough for the query path to matter
    model.source_embedding.params["embeddings"] *= 20.0
    model.target_embedding.params["embeddings"] *= 20.0
    src, src_lengths = source()
    tgt_in, tgt_out, tgt_lengths = target_tensors(["SCSC", "SC"])

    def loss_and_backward():
        return model.loss(src, src_lengths, tgt_in, tgt_out, tgt_lengths)[0]

    def loss_only():
        return model.loss(src, src_lengths, tgt_in, tgt_out, tgt_lengths, backward=False)[0]

    model.zero_grad()
    loss_and_backward()
    assert np.linalg.norm(model.named_gradients()["attention/query_kernel"]) > 1e-6

    errors = check_gradients(model, loss_and_backward, loss_only)
    worst = max(errors, key=errors.get)
    assert errors[worst] < 1e-5, f"{worst}: {errors[worst]}"
    assert "bridge/kernel" in errors and "attention/score_vector" in errors


class TestEncode:
    def test_one_context_per_source_step(self):
        model = tiny()
        src, src_lengths = source()
        contexts = model.encode(src, src_lengths)
        assert contexts.shape == (2, 4, 4)

    def test_zero_weights_give_zero_contexts(self):
        model = tiny()
        for value in model.encoder.named_parameters().values():
            value[...] = 0.0
        src, src_lengths = source()
        assert np.all(model.encode(src, src_lengths) == 0.0)

    def test_fuzzed_inputs_stay_finite(self, rng):
        model = tiny(seed=6)
        for _ in range(100):
            length = int(rng.integers(1, 12))
            ids = rng.integers(1, 5, size=(1, length))
            contexts = model.encode(ids, np.array([length]))
            assert contexts.shape == (1, length, 4)
            assert np.all(np.isfinite(contexts))


def test_greedy_decoding_is_capped_at_twice_the_source():
    model = tiny(seed=1)
    model.output.params["bias"][EOS] = -1e3
    src, src_lengths = source()
    decoded = model.decode_greedy(src, src_lengths)
    assert [len(d.raw) for d in decoded] == [8, 4]
    assert all("<eos>" not in d.symbols for d in decoded)


def test_greedy_decoding_stops_at_eos():
    model = tiny(seed=1)
    model.output.params["bias"][EOS] = 1e3
    src, src_lengths = source()
    for d in model.decode_greedy(src, src_lengths):
        assert d.raw == ""
        assert d.symbols == ["<eos>"]


def test_decoded_attention_rows():
    model = tiny(seed=2)
    src, src_lengths = source()
    for d, length in zip(model.decode_greedy(src, src_lengths), src_lengths):
        assert d.weights.shape == (len(d.symbols), length)
        assert np.allclose(d.weights.sum(axis=1), 1.0)
        assert set(d.raw) <= {"S", "C"}
        assert "<go>" not in d.symbols and "<pad>" not in d.symbols


def test_parameter_names():
    names = set(tiny().named_parameters())
    assert {"encoder/forward/kernel", "decoder/recurrent_kernel", "combine/kernel", "output/bias"} <= names


def test_fuzzed_decodes_keep_rows_normalized(rng):
    model = tiny(seed=4)
    lengths = rng.integers(1, 9, size=1000)
    src = np.zeros((1000, 8), dtype=np.int64)
    for row, length in enumerate(lengths):
        src[row, :length] = rng.integers(1, 5, size=length)
    for d in model.decode_greedy(src, lengths):
        np.testing.assert_allclose(d.weights.sum(axis=1), 1.0, atol=1e-9)
