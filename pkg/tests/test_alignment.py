import random

import pytest
from hypothesis import given, strategies as st

from subsmt.alignment import (
    NULL, AlignmentError, AlignmentMatrix, align_corpus, grow_diag_final_and, train_model1,
)


def pairs(*items):
    return [(s.split(), t.split()) for s, t in items]


def test_model1_learns_cooccurrence():
    model = train_model1(pairs(("a", "x"), ("a b", "x y"), ("b", "y")), iterations=5)
    assert model.prob("x", "a") > model.prob("y", "a")
    assert model.prob("y", "b") > model.prob("x", "b")


def test_model1_single_pair():
    model = train_model1(pairs(("a", "x")), iterations=1)
    assert model.prob("x", "a") >= model.prob("x", NULL)


def test_model1_probabilities_normalize():
    model = train_model1(pairs(("a b", "x y"), ("b c", "y z"), ("a", "x")), iterations=3)
    for e in ("a", "b", "c", NULL):
        total = sum(p for (f, src), p in model.table.items() if src == e)
        assert total == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_model1_likelihood_never_decreases(seed):
    rng = random.Random(seed)
    src_vocab, tgt_vocab = list("abcdef"), list("uvwxyz")
    corpus = []
    for _ in range(30):
        n = rng.randint(1, 5)
        s = [rng.choice(src_vocab) for _ in range(n)]
        t = [tgt_vocab[src_vocab.index(w)] if rng.random() < 0.8 else rng.choice(tgt_vocab)
             for w in s]
        corpus.append((s, t))
    model = train_model1(corpus, iterations=8)
    lls = model.log_likelihoods + [model.log_likelihood(corpus)]
    assert all(b >= a - 1e-9 for a, b in zip(lls, lls[1:]))


def test_identical_corpora_align_diagonally():
    text = ["a b c", "b c a", "c a", "a b", "c b a d", "d a"]
    corpus = [(s.split(), s.split()) for s in text]
    _, _, alignments = align_corpus(corpus, iterations=5)
    for (s, _), a in zip(corpus, alignments):
        assert a.links == {(i, i) for i in range(len(s))}


def test_empty_side_skipped():
    model = train_model1([(["a"], ["x"]), ([], ["y"]), (["b"], [])], iterations=2)
    assert ("y", NULL) not in model.table
    with pytest.raises(AlignmentError):
        train_model1([([], ["y"])], iterations=2)
    with pytest.raises(AlignmentError):
        train_model1(pairs(("a", "x")), iterations=0)


def test_matrix_bounds():
    with pytest.raises(AlignmentError):
        AlignmentMatrix(2, 2, {(2, 0)})
    a = AlignmentMatrix.parse("0-1 1-0", 2, 2)
    assert a.links == {(0, 1), (1, 0)} and str(a) == "0-1 1-0"


def test_gdfa_identical():
    a = AlignmentMatrix(3, 3, {(0, 0), (1, 2), (2, 1)})
    assert grow_diag_final_and(a, a) == a


def test_gdfa_grow_adds_adjacent_forward_link():
    fwd = AlignmentMatrix(3, 3, {(0, 0), (1, 1), (1, 2)})
    bwd = AlignmentMatrix(3, 3, {(0, 0), (1, 1)})
    assert grow_diag_final_and(fwd, bwd).links == {(0, 0), (1, 1), (1, 2)}


def test_gdfa_grow_needs_an_unaligned_end():
    # (0, 1) touches (0, 0) but both its rows are already aligned
    fwd = AlignmentMatrix(2, 2, {(0, 0), (1, 1), (0, 1)})
    bwd = AlignmentMatrix(2, 2, {(0, 0), (1, 1)})
    assert grow_diag_final_and(fwd, bwd).links == {(0, 0), (1, 1)}


def test_gdfa_final_and_adds_isolated_links():
    # (2, 2) is not adjacent to anything in the intersection
    fwd = AlignmentMatrix(4, 4, {(0, 0), (3, 3)})
    bwd = AlignmentMatrix(4, 4, {(0, 0)})
    assert grow_diag_final_and(fwd, bwd).links == {(0, 0), (3, 3)}


def test_gdfa_disjoint():
    fwd = AlignmentMatrix(3, 3, {(0, 0), (2, 2)})
    bwd = AlignmentMatrix(3, 3, {(0, 1), (1, 2)})
    out = grow_diag_final_and(fwd, bwd)
    assert out.links <= fwd.links | bwd.links


def test_gdfa_dimension_mismatch():
    with pytest.raises(AlignmentError):
        grow_diag_final_and(AlignmentMatrix(2, 2), AlignmentMatrix(2, 3))


links = st.builds(
    lambda s, t, bits1, bits2: (
        AlignmentMatrix(s, t, {(i, j) for i in range(s) for j in range(t) if bits1 >> (i * t + j) & 1}),
        AlignmentMatrix(s, t, {(i, j) for i in range(s) for j in range(t) if bits2 >> (i * t + j) & 1})),
    st.shared(st.integers(1, 5), key="s"), st.shared(st.integers(1, 5), key="t"),
    st.integers(0, 2 ** 25 - 1), st.integers(0, 2 ** 25 - 1))


@given(links)
def test_gdfa_between_intersection_and_union(pair):
    fwd, bwd = pair
    out = grow_diag_final_and(fwd, bwd).links
    assert fwd.links & bwd.links <= out <= fwd.links | bwd.links
