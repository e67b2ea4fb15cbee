"""End-to-end runs of the two systems on a loaded corpus."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .centrality import CentralityScores, PowerIterationConfig, lexrank, taeg_scores, to_stochastic
from .consolidate import DEFAULT_SENTENCES, Narrative, consolidate_taeg, summarize_baseline
from .corpus import Alignment, Document, Timeline, align
from .graph import DEFAULT_THRESHOLD, SemanticGraph, Taeg, build_semantic_graph, build_taeg


@dataclass
class TaegRun:
    narrative: Narrative
    taeg: Taeg
    scores: CentralityScores
    alignment: Alignment


@dataclass
class BaselineRun:
    narrative: Narrative
    graph: SemanticGraph
    scores: CentralityScores


def run_taeg(
    docs: Sequence[Document],
    timeline: Timeline,
    config: PowerIterationConfig = PowerIterationConfig(),
    scope: str = "global",
) -> TaegRun:
    alignment = align(list(docs), timeline)
    taeg = build_taeg(docs, timeline, alignment)
    scores = taeg_scores(taeg, config, scope)
    params = {
        "damping": config.damping,
        "epsilon": config.epsilon,
        "max_iter": config.max_iter,
        "lexrank_scope": scope,
        "iterations": scores.iterations,
    }
    return TaegRun(consolidate_taeg(taeg, timeline, scores, params), taeg, scores, alignment)


def run_baseline(
    docs: Sequence[Document],
    k: int = DEFAULT_SENTENCES,
    ordering: str = "by-score",
    threshold: float = DEFAULT_THRESHOLD,
    config: PowerIterationConfig = PowerIterationConfig(),
    timeline: Optional[Timeline] = None,
) -> BaselineRun:
    graph = build_semantic_graph(docs, threshold=threshold)
    scores = lexrank(to_stochastic(graph.weights, len(graph.node_ids)), config)
    alignment = align(list(docs), timeline) if timeline is not None else None
    params = {
        "threshold": threshold,
        "damping": config.damping,
        "epsilon": config.epsilon,
        "max_iter": config.max_iter,
        "iterations": scores.iterations,
    }
    narrative = summarize_baseline(docs, graph, scores, k, ordering, alignment, params)
    return BaselineRun(narrative, graph, scores)
