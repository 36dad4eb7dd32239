import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from subsmt import lm as lm_mod
from subsmt.lm import BOS, EOS, UNK, ArpaFormatError, LMError, NGramModel


def context_sums(model: NGramModel):
    """Sum of P(w | c) over every emittable w, for every stored context c."""
    vocab = model.predicted_vocab()
    contexts = {ng for ng in model.ngrams if len(ng) < model.order and ng[-1] != EOS}
    contexts.add(())
    for c in sorted(contexts):
        yield c, math.fsum(10 ** model.logprob(c, w) for w in vocab)


def random_corpus(rng, vocab, n, max_len=6):
    return [[rng.choice(vocab) for _ in range(rng.randint(1, max_len))] for _ in range(n)]


def test_unigram_normalizes():
    model = lm_mod.train([["a", "a"]], order=1)
    total = sum(10 ** model.logprob((), w) for w in ("a", EOS, UNK))
    assert total == pytest.approx(1.0, abs=1e-6)
    assert model.predicted_vocab() == sorted(["a", EOS, UNK])


@pytest.mark.parametrize("order", [1, 2, 3])
@pytest.mark.parametrize("seed", range(8))
def test_every_context_sums_to_one(order, seed):
    rng = random.Random(seed)
    vocab = [chr(ord("a") + i) for i in range(rng.randint(2, 17))]
    model = lm_mod.train(random_corpus(rng, vocab, 30), order=order)
    assert len(model.predicted_vocab()) <= 20
    for c, s in context_sums(model):
        assert s == pytest.approx(1.0, abs=1e-6), c


def test_kn_prefers_seen_continuation():
    model = lm_mod.train([["a", "b"], ["a", "b"]], order=2)
    assert model.logprob(["a"], "b") > model.logprob(["a"], EOS)


def test_order_of_tokens_matters():
    model = lm_mod.train([["a", "b"]], order=2)
    assert model.score(["a", "b"]) > model.score(["b", "a"])


def test_repeated_sentence_is_most_likely():
    sent = ["a", "b", "a", "c"]
    model = lm_mod.train([sent] * 5, order=3)
    words = [w for w in model.predicted_vocab() if w != EOS]
    best = max(itertools.product(words, repeat=len(sent)), key=model.score)
    assert list(best) == sent
    assert model.score(sent) == max(model.score(s) for s in itertools.product(words, repeat=4))


def test_empty_sentence_scores_end_only():
    model = lm_mod.train([["a", "b"]], order=3)
    assert model.score([]) == model.logprob([BOS], EOS)


def test_unknown_token_is_finite():
    model = lm_mod.train([["a", "b"]], order=3)
    s = model.score(["zzz"])
    assert math.isfinite(s) and s > -99


def test_all_logprobs_nonpositive():
    rng = random.Random(1)
    model = lm_mod.train(random_corpus(rng, list("abcde"), 40), order=4)
    assert all(lp <= 0 for lp, _ in model.ngrams.values())


def test_train_errors():
    with pytest.raises(LMError):
        lm_mod.train([], order=2)
    with pytest.raises(LMError):
        lm_mod.train([["a"]], order=0)
    with pytest.raises(LMError):
        lm_mod.train([["a"]], order=17)
    with pytest.raises(LMError):
        lm_mod.train([["a"]], order=2, discount=1.0)


def test_arpa_roundtrip_unigram(tmp_path):
    model = lm_mod.train([["a", "a"]], order=1)
    model.save_arpa(tmp_path / "m.arpa")
    again = lm_mod.load_arpa(tmp_path / "m.arpa")
    assert again.ngrams == model.ngrams
    assert again.score(["a", "x"]) == model.score(["a", "x"])


def test_arpa_roundtrip_10gram(tmp_path):
    rng = random.Random(5)
    corpus = random_corpus(rng, list("abcdefgh"), 50, max_len=14)
    model = lm_mod.train(corpus, order=10)
    assert model.order == 10 and model.counts()[9] > 0
    path = tmp_path / "ten.arpa"
    lm_mod.save_arpa(model, path)
    again = lm_mod.load_arpa(path)
    assert abs(again.corpus_score(corpus) - model.corpus_score(corpus)) <= 1e-9
    text = path.read_text(encoding="utf-8")
    assert text.lstrip().startswith("\\data\\\n") and text.rstrip().endswith("\\end\\")
    assert "ngram 10=" in text and "\\10-grams:" in text


def test_hand_written_arpa(tmp_path):
    # P(a) = P(</s>) = 1/2; <s> is context only
    path = tmp_path / "hand.arpa"
    path.write_text("\\data\\\nngram 1=2\n\n\\1-grams:\n"
                    "-0.3010299957\ta\n-0.3010299957\t</s>\n\n\\end\\\n", encoding="utf-8")
    model = lm_mod.load_arpa(path)
    assert model.order == 1
    assert model.score(["a"]) == pytest.approx(2 * math.log10(0.5), abs=1e-9)
    assert model.score(["a", "a"]) < model.score(["a"])


@pytest.mark.parametrize("text, line", [
    ("\\data\\\nngram 1=1\n\n\\1-grams:\nnot-a-number\ta\n\\end\\\n", 5),
    ("\\data\\\nngram 1=2\n\n\\1-grams:\n-1.0\ta\n\\end\\\n", None),
    ("ngram 1=1\n", 1),
])
def test_malformed_arpa(tmp_path, text, line):
    path = tmp_path / "bad.arpa"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(LMError) as err:
        lm_mod.load_arpa(path)
    if line is not None:
        assert isinstance(err.value, ArpaFormatError)
        assert err.value.lineno == line


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.sampled_from("abcd"), min_size=1, max_size=5), min_size=1, max_size=8),
       st.integers(0, 7), st.integers(1, 3))
def test_duplicating_a_sentence_never_lowers_its_score(corpus, pick, order):
    sent = corpus[pick % len(corpus)]
    before = lm_mod.train(corpus, order=order).score(sent)
    after = lm_mod.train(corpus + [sent], order=order).score(sent)
    assert after >= before - 1e-12


def test_advance_matches_logprob():
    rng = random.Random(3)
    model = lm_mod.train(random_corpus(rng, list("abc"), 20), order=4)
    sent = ["a", "b", "c", "a", "b", "x"]
    state = model.begin_state()
    for i, w in enumerate(sent):
        state, lp = model.advance(state, w)
        assert lp == pytest.approx(model.logprob([BOS, *sent[:i]], w), abs=1e-12)
