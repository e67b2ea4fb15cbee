import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from taeg.errors import EmptyCorpus
from taeg.textproc import (
    SparseVector,
    VectorSpace,
    cosine,
    fit_space,
    pairwise_cosine,
    split_sentences,
    stem,
    tokenize,
    vectorize,
)


@pytest.mark.parametrize(
    "text, tokens",
    [
        ("Jesus wept.", ["jesus", "wept"]),
        ("", []),
        ("Bethphage, on the Mount of Olives", ["bethphage", "on", "the", "mount", "of", "olives"]),
        ("Hosanna!\u2014to the Son of David", ["hosanna", "to", "the", "son", "of", "david"]),
        ("ÉLOÏ, 3 days_later", ["éloï", "3", "days", "later"]),
    ],
)
def test_tokenize(text, tokens):
    assert tokenize(text) == tokens


@given(st.text())
def test_tokens_are_clean(text):
    for tok in tokenize(text):
        assert tok and not any(ch.isspace() for ch in tok)
        assert tok == tok.lower()


# vectors from Porter (1980) and its reference vocabulary
@pytest.mark.parametrize(
    "word, expected",
    [
        ("running", "run"), ("caresses", "caress"), ("ponies", "poni"), ("ties", "ti"),
        ("cats", "cat"), ("feed", "feed"), ("agreed", "agre"), ("plastered", "plaster"),
        ("motoring", "motor"), ("sing", "sing"), ("hopping", "hop"), ("falling", "fall"),
        ("happy", "happi"), ("sky", "sky"), ("generalizations", "gener"), ("oscillators", "oscil"),
        ("a", "a"),
    ],
)
def test_stem(word, expected):
    assert stem(word) == expected


def test_split_sentences():
    text = 'He said, "Go." Then they went! Did they?\nNew line without stop'
    assert split_sentences(text) == ['He said, "Go."', "Then they went!", "Did they?", "New line without stop"]
    assert split_sentences("") == []


def test_fit_space_idf():
    space = fit_space([["a", "b"], ["a"]])
    assert space.idf[space.vocabulary["a"]] == 0.0
    assert space.idf[space.vocabulary["b"]] == pytest.approx(math.log(2), abs=1e-12)
    assert space.idf[space.vocabulary["b"]] == pytest.approx(0.6931, abs=1e-4)
    assert sorted(space.vocabulary.values()) == [0, 1]


def test_fit_space_single_unit():
    space = fit_space([["x", "y", "x"]])
    assert np.all(space.idf == 0)


def test_fit_space_empty():
    with pytest.raises(EmptyCorpus):
        fit_space([])


def test_vectorize_hand_example():
    space = VectorSpace({"a": 0, "b": 1}, np.array([0.7, 0.3]), 2)
    v = vectorize(["a", "a", "b"], space)
    assert v.indices == (0, 1)
    assert v.weights == pytest.approx((1.4, 0.3), abs=1e-12)


def test_vectorize_drops_zero_and_oov():
    space = fit_space([["a", "b"], ["a", "c"]])
    assert len(vectorize(["a", "a"], space)) == 0
    assert len(vectorize(["zzz"], space)) == 0


def test_cosine_examples():
    u = SparseVector.from_dict({0: 1.0})
    v = SparseVector.from_dict({0: 1.0, 1: 1.0})
    assert cosine(u, v) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)
    assert cosine(u, SparseVector.from_dict({3: 2.0})) == 0.0
    assert cosine(u, SparseVector()) == 0.0


sparse_vectors = st.dictionaries(
    st.integers(0, 12), st.floats(0.01, 50, allow_nan=False), min_size=0, max_size=8
).map(SparseVector.from_dict)


@given(sparse_vectors, sparse_vectors)
def test_cosine_symmetric_and_bounded(u, v):
    c = cosine(u, v)
    assert 0.0 <= c <= 1.0
    assert c == cosine(v, u)


@given(sparse_vectors, sparse_vectors, st.floats(0.001, 1000))
def test_cosine_scale_invariant(u, v, k):
    assert cosine(u.scale(k), v) == pytest.approx(cosine(u, v), abs=1e-12)


@given(st.lists(st.sampled_from("abcde"), min_size=1, max_size=12))
def test_vectorize_linear_in_counts(unit):
    space = fit_space([unit, ["a"], ["b", "c"]])
    single, double = vectorize(unit, space), vectorize(unit + unit, space)
    assert double.indices == single.indices
    assert double.weights == pytest.approx(tuple(2 * w for w in single.weights), abs=1e-12)


@given(st.lists(sparse_vectors, min_size=1, max_size=6))
def test_pairwise_cosine_matches_scalar(vectors):
    sim = pairwise_cosine(vectors, 13).toarray()
    for i, u in enumerate(vectors):
        for j, v in enumerate(vectors):
            expected = cosine(u, v)
            assert sim[i, j] == pytest.approx(expected, abs=1e-9)
