"""The baseline sentence-similarity graph and the Temporal Alignment Event Graph."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import sparse

from .corpus import Alignment, Document, Timeline
from .errors import EmptyCorpus, EmptyTimeline, NoVersions
from .textproc import SparseVector, VectorSpace, cosine, fit_space, pairwise_cosine, tokenize, vectorize

DEFAULT_THRESHOLD = 0.1
SAME_EVENT_FLOOR = 0.05
BEFORE_WEIGHT = 1.0


@dataclass
class SemanticGraph:
    """Undirected sentence graph; ``weights`` is a symmetric CSR matrix
    indexed by sentence id with an empty diagonal."""

    node_ids: list[int]
    weights: sparse.csr_matrix
    threshold: float

    @property
    def n_edges(self) -> int:
        return self.weights.nnz // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.weights.indptr)


def build_semantic_graph(
    docs: Sequence[Document],
    space: Optional[VectorSpace] = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> SemanticGraph:
    sentences = [s for d in docs for s in d.sentences]
    if not sentences:
        raise EmptyCorpus("corpus has no sentences")
    if not 0.0 <= threshold < 1.0:
        raise ValueError(f"threshold must lie in [0, 1), got {threshold}")
    units = [tokenize(s.text) for s in sentences]
    if space is None:
        space = fit_space(units)
    vectors = [vectorize(u, space) for u in units]
    return similarity_graph([s.id for s in sentences], vectors, len(space), threshold)


def similarity_graph(
    node_ids: Sequence[int], vectors: Sequence[SparseVector], dim: int, threshold: float
) -> SemanticGraph:
    """Keep every off-diagonal pair whose cosine is positive and >= ``threshold``."""
    sim = pairwise_cosine(vectors, dim).tocoo()
    # decide on the upper triangle only and mirror, so the result is exactly symmetric
    keep = (sim.row < sim.col) & (sim.data >= threshold) & (sim.data > 0)
    rows, cols, data = sim.row[keep], sim.col[keep], sim.data[keep]
    n = len(vectors)
    weights = sparse.csr_matrix(
        (np.r_[data, data], (np.r_[rows, cols], np.r_[cols, rows])), shape=(n, n)
    )
    weights.sort_indices()
    return SemanticGraph(list(node_ids), weights, threshold)


@dataclass
class EventVersionNode:
    id: int
    event_index: int
    doc_id: str
    sentence_ids: list[int]
    text: str
    vector: SparseVector = field(repr=False)


@dataclass
class Taeg:
    nodes: list[EventVersionNode]
    before_edges: list[tuple[int, int]]
    same_event_edges: list[tuple[int, int, float]]

    def event_nodes(self, event_index: int) -> list[EventVersionNode]:
        return [n for n in self.nodes if n.event_index == event_index]

    def by_event(self) -> dict[int, list[EventVersionNode]]:
        out: dict[int, list[EventVersionNode]] = {}
        for n in self.nodes:
            out.setdefault(n.event_index, []).append(n)
        return out

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {
                    "id": n.id,
                    "event_index": n.event_index,
                    "doc_id": n.doc_id,
                    "sentence_ids": n.sentence_ids,
                    "text": n.text,
                }
                for n in self.nodes
            ],
            "edges": [{"type": "BEFORE", "from": a, "to": b, "weight": BEFORE_WEIGHT} for a, b in self.before_edges]
            + [{"type": "SAME_EVENT", "a": a, "b": b, "weight": w} for a, b, w in self.same_event_edges],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def build_taeg(
    docs: Sequence[Document],
    timeline: Timeline,
    alignment: Alignment,
    space: Optional[VectorSpace] = None,
) -> Taeg:
    """One node per non-empty (event, document) version.

    Nodes are numbered in timeline order, then document declaration order.
    When ``space`` is None it is fitted over the version texts themselves.
    """
    if len(timeline) == 0:
        raise EmptyTimeline("timeline has no events")
    text_of = {s.id: s.text for d in docs for s in d.sentences}
    doc_order = [d.id for d in docs]

    raw = []
    for ev in timeline:
        for doc_id in doc_order:
            sids = alignment.event_versions.get((ev.index, doc_id))
            if sids:
                raw.append((ev.index, doc_id, list(sids), " ".join(text_of[i] for i in sids)))
    if not raw:
        raise NoVersions("no event has any aligned version")

    units = [tokenize(text) for *_, text in raw]
    if space is None:
        space = fit_space(units)
    nodes = [
        EventVersionNode(i, ev, doc, sids, text, vectorize(unit, space))
        for i, ((ev, doc, sids, text), unit) in enumerate(zip(raw, units))
    ]

    before = []
    for doc_id in doc_order:
        chain = [n.id for n in nodes if n.doc_id == doc_id]
        before.extend(zip(chain, chain[1:]))

    same = []
    groups: dict[int, list[EventVersionNode]] = {}
    for n in nodes:
        groups.setdefault(n.event_index, []).append(n)
    for members in groups.values():
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                same.append((a.id, b.id, max(cosine(a.vector, b.vector), SAME_EVENT_FLOOR)))

    return Taeg(nodes, before, same)
