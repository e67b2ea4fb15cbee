"""Tokenization, Porter stemming, TF-IDF vectors and cosine similarity."""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from nltk.stem.porter import PorterStemmer
from scipy import sparse

from .errors import EmptyCorpus

_TOKEN_RE = re.compile(r"[^\W_]+")
_SENTENCE_END_RE = re.compile(r"(?:(?<=[.!?])|(?<=[.!?][\"'’”)\]]))\s+")

_porter = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and return its maximal runs of letters and digits."""
    return _TOKEN_RE.findall(text.lower())


@lru_cache(maxsize=65536)
def stem(token: str) -> str:
    return _porter.stem(token, to_lowercase=False)


def split_sentences(text: str) -> list[str]:
    """Rough sentence segmentation for raw or synthetic text.

    Lines are always boundaries; inside a line a sentence ends at ``.``,
    ``!`` or ``?`` (plus closing quotes/brackets) followed by whitespace.
    """
    out = []
    for line in text.splitlines():
        for piece in _SENTENCE_END_RE.split(line):
            piece = piece.strip()
            if piece:
                out.append(piece)
    return out


@dataclass(frozen=True)
class SparseVector:
    """Sorted ``(dimension, weight)`` pairs with zero weights elided."""

    indices: tuple[int, ...] = ()
    weights: tuple[float, ...] = ()

    @classmethod
    def from_dict(cls, d: Mapping[int, float]) -> "SparseVector":
        items = sorted((i, w) for i, w in d.items() if w != 0)
        return cls(tuple(i for i, _ in items), tuple(w for _, w in items))

    def to_dict(self) -> dict[int, float]:
        return dict(zip(self.indices, self.weights))

    def __len__(self):
        return len(self.indices)

    def norm(self) -> float:
        return math.sqrt(math.fsum(w * w for w in self.weights))

    def scale(self, c: float) -> "SparseVector":
        return SparseVector(self.indices, tuple(w * c for w in self.weights))


@dataclass(frozen=True)
class VectorSpace:
    vocabulary: Mapping[str, int]
    idf: np.ndarray
    n_units: int

    def __len__(self):
        return len(self.vocabulary)


def fit_space(units: Sequence[Sequence[str]]) -> VectorSpace:
    """Fit a vocabulary and ``idf(t) = ln(N / df(t))`` over token lists."""
    if not units:
        raise EmptyCorpus("cannot fit a vector space on zero units")
    df: Counter = Counter()
    for unit in units:
        df.update(set(unit))
    vocabulary = {tok: i for i, tok in enumerate(sorted(df))}
    n = len(units)
    idf = np.zeros(len(vocabulary))
    for tok, i in vocabulary.items():
        idf[i] = math.log(n / df[tok])
    return VectorSpace(vocabulary, idf, n)


def vectorize(unit: Sequence[str], space: VectorSpace) -> SparseVector:
    counts = Counter(t for t in unit if t in space.vocabulary)
    weights = {}
    for tok, tf in counts.items():
        i = space.vocabulary[tok]
        w = tf * float(space.idf[i])
        if w != 0:
            weights[i] = w
    return SparseVector.from_dict(weights)


def cosine(u: SparseVector, v: SparseVector) -> float:
    nu, nv = u.norm(), v.norm()
    if nu == 0 or nv == 0:
        return 0.0
    # merge the two sorted index lists
    i = j = 0
    dot = 0.0
    ui, vi = u.indices, v.indices
    while i < len(ui) and j < len(vi):
        if ui[i] == vi[j]:
            dot += u.weights[i] * v.weights[j]
            i += 1
            j += 1
        elif ui[i] < vi[j]:
            i += 1
        else:
            j += 1
    return min(1.0, max(0.0, dot / (nu * nv)))


def stack(vectors: Sequence[SparseVector], dim: int) -> sparse.csr_matrix:
    """Rows of a CSR matrix, one per vector."""
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for r, v in enumerate(vectors):
        indptr[r + 1] = indptr[r] + len(v)
    indices = np.fromiter((i for v in vectors for i in v.indices), dtype=np.int64, count=indptr[-1])
    data = np.fromiter((w for v in vectors for w in v.weights), dtype=float, count=indptr[-1])
    return sparse.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


def pairwise_cosine(vectors: Sequence[SparseVector], dim: int) -> sparse.csr_matrix:
    """All-pairs cosine similarity as a sparse matrix (zero-norm rows stay zero)."""
    x = stack(vectors, dim)
    norms = np.sqrt(np.asarray(x.multiply(x).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    x = sparse.diags(inv) @ x
    sim = (x @ x.T).tocsr()
    np.clip(sim.data, 0.0, 1.0, out=sim.data)
    return sim
