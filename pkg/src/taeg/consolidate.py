"""Narrative construction: timeline-driven version selection and the top-k baseline."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .centrality import CentralityScores
from .corpus import Alignment, Document, Timeline
from .errors import KTooLarge, MissingScore, SchemaError
from .graph import EventVersionNode, SemanticGraph, Taeg

ORDERINGS = ("by-score", "by-source")
DEFAULT_SENTENCES = 750
# scores this close are treated as tied; ties go to the smallest doc id
TIE_REL_TOL = 1e-9


@dataclass
class Segment:
    text: str
    doc_id: str
    sentence_ids: list[int]
    event_index: Optional[int] = None
    score: Optional[float] = None


@dataclass
class Narrative:
    segments: list[Segment]
    method: str
    params: dict = field(default_factory=dict)

    @property
    def order(self) -> list[int]:
        """Event indices of the segments that carry one."""
        return [s.event_index for s in self.segments if s.event_index is not None]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "params": self.params,
            "segments": [
                {
                    "event_index": s.event_index,
                    "doc_id": s.doc_id,
                    "sentence_ids": s.sentence_ids,
                    "score": s.score,
                    "text": s.text,
                }
                for s in self.segments
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Narrative":
        try:
            segments = [
                Segment(
                    text=s["text"],
                    doc_id=s["doc_id"],
                    sentence_ids=list(s["sentence_ids"]),
                    event_index=s.get("event_index"),
                    score=s.get("score"),
                )
                for s in data["segments"]
            ]
            return cls(segments, data["method"], dict(data.get("params", {})))
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed narrative sidecar: {exc}") from exc


def render(narrative: Narrative) -> str:
    return "\n".join(s.text for s in narrative.segments)


def find_max_score(candidates: Sequence[EventVersionNode], scores: CentralityScores) -> EventVersionNode:
    """Highest score; near-ties resolved by smallest doc id, then node id."""
    for node in candidates:
        if node.id not in scores:
            raise MissingScore(f"no score for TAEG node {node.id}")
    best = max(scores[n.id] for n in candidates)
    tied = [n for n in candidates if math.isclose(scores[n.id], best, rel_tol=TIE_REL_TOL, abs_tol=0.0)]
    return min(tied, key=lambda n: (n.doc_id, n.id))


def consolidate_taeg(taeg: Taeg, timeline: Timeline, scores: CentralityScores, params: Optional[dict] = None) -> Narrative:
    groups = taeg.by_event()
    segments = []
    for ev in timeline:
        candidates = groups.get(ev.index)
        if not candidates:
            continue
        best = find_max_score(candidates, scores)
        segments.append(Segment(best.text, best.doc_id, list(best.sentence_ids), ev.index, scores[best.id]))
    return Narrative(segments, "taeg", dict(params or {}))


def summarize_baseline(
    docs: Sequence[Document],
    graph: SemanticGraph,
    scores: CentralityScores,
    k: int = DEFAULT_SENTENCES,
    ordering: str = "by-score",
    alignment: Optional[Alignment] = None,
    params: Optional[dict] = None,
) -> Narrative:
    """Top-``k`` sentences by centrality.

    ``by-score`` emits them in descending score order; ``by-source`` in
    document declaration order, then position.
    """
    if ordering not in ORDERINGS:
        raise ValueError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")
    sentences = [s for d in docs for s in d.sentences]
    if k < 1:
        raise ValueError("k must be positive")
    if k > len(sentences):
        raise KTooLarge(f"k={k} exceeds the corpus size of {len(sentences)} sentences")

    row_of = {sid: r for r, sid in enumerate(graph.node_ids)}
    ranked = sorted(sentences, key=lambda s: (-scores[row_of[s.id]], s.id))[:k]
    if ordering == "by-source":
        doc_rank = {d.id: i for i, d in enumerate(docs)}
        ranked.sort(key=lambda s: (doc_rank[s.doc_id], s.position))

    mapping = alignment.sentence_to_event if alignment is not None else {}
    segments = [
        Segment(s.text, s.doc_id, [s.id], mapping.get(s.id), scores[row_of[s.id]])
        for s in ranked
    ]
    out_params = {"k": k, "ordering": ordering}
    out_params.update(params or {})
    return Narrative(segments, "baseline", out_params)


def write_narrative(narrative: Narrative, out_dir) -> tuple[Path, Path]:
    """Write ``narrative.txt`` and its provenance sidecar ``narrative.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text_path = out / "narrative.txt"
    side_path = out / "narrative.json"
    text_path.write_text(render(narrative) + "\n", encoding="utf-8")
    side_path.write_text(json.dumps(narrative.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return text_path, side_path


def read_narrative(path) -> Narrative:
    p = Path(path)
    if p.is_dir():
        p = p / "narrative.json"
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{p}: invalid JSON ({exc})") from exc
    return Narrative.from_dict(data)
