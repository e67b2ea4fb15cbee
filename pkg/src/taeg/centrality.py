"""LexRank: damped power iteration over a row-stochastic similarity matrix."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import sparse

from .errors import NegativeWeight, NonStochastic
from .graph import BEFORE_WEIGHT, Taeg

log = logging.getLogger(__name__)

Matrix = Union[np.ndarray, sparse.spmatrix]

SCOPES = ("global", "per-event")


@dataclass(frozen=True)
class PowerIterationConfig:
    damping: float = 0.85
    epsilon: float = 1e-8
    max_iter: int = 200

    def __post_init__(self):
        if not 0.0 < self.damping <= 1.0:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


@dataclass
class CentralityScores:
    """Stationary distribution indexed by node id."""

    scores: np.ndarray
    iterations: int = 0
    converged: bool = True

    def __getitem__(self, node_id: int) -> float:
        return float(self.scores[node_id])

    def __len__(self):
        return len(self.scores)

    def __contains__(self, node_id) -> bool:
        return isinstance(node_id, (int, np.integer)) and 0 <= node_id < len(self.scores)

    def as_dict(self) -> dict[int, float]:
        return {i: float(s) for i, s in enumerate(self.scores)}


def to_stochastic(weights: Matrix, n: int | None = None) -> sparse.csr_matrix:
    """Row-normalize ``weights``; rows with no mass become uniform over all nodes."""
    w = sparse.csr_matrix(weights, dtype=float)
    if n is not None and w.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} matrix, got {w.shape}")
    n = w.shape[0]
    if n < 1:
        raise ValueError("matrix must have at least one node")
    if w.nnz and w.data.min() < 0:
        raise NegativeWeight("edge weights must be non-negative")
    w.eliminate_zeros()
    mass = np.asarray(w.sum(axis=1)).ravel()
    dangling = mass <= 0
    inv = np.divide(1.0, mass, out=np.zeros_like(mass), where=~dangling)
    m = sparse.diags(inv) @ w
    if dangling.any():
        rows = np.flatnonzero(dangling)
        fill = sparse.csr_matrix(
            (np.full(len(rows) * n, 1.0 / n), (np.repeat(rows, n), np.tile(np.arange(n), len(rows)))),
            shape=(n, n),
        )
        m = m + fill
    return sparse.csr_matrix(m)


def lexrank(matrix: Matrix, config: PowerIterationConfig = PowerIterationConfig()) -> CentralityScores:
    """Iterate ``p <- d M^T p + (1 - d)/n`` from the uniform vector."""
    m = sparse.csr_matrix(matrix, dtype=float)
    n = m.shape[0]
    row_sums = np.asarray(m.sum(axis=1)).ravel()
    if np.abs(row_sums - 1.0).max(initial=0.0) > 1e-9:
        raise NonStochastic(f"row sums deviate from 1 by {np.abs(row_sums - 1.0).max():.3g}")
    mt = m.T.tocsr()
    d = config.damping
    p = np.full(n, 1.0 / n)
    teleport = (1.0 - d) / n
    converged = False
    it = 0
    while it < config.max_iter:
        nxt = d * (mt @ p) + teleport
        it += 1
        delta = np.abs(nxt - p).sum()
        p = nxt
        if delta < config.epsilon:
            converged = True
            break
    if not converged:
        log.warning("power iteration stopped after %d iterations without converging", it)
    return CentralityScores(p / p.sum(), it, converged)


def taeg_weights(taeg: Taeg) -> sparse.csr_matrix:
    """SAME_EVENT similarities plus BEFORE edges symmetrized at constant weight."""
    n = len(taeg.nodes)
    rows, cols, vals = [], [], []
    for a, b, w in taeg.same_event_edges:
        rows += [a, b]
        cols += [b, a]
        vals += [w, w]
    for a, b in taeg.before_edges:
        rows += [a, b]
        cols += [b, a]
        vals += [BEFORE_WEIGHT, BEFORE_WEIGHT]
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def taeg_scores(
    taeg: Taeg,
    config: PowerIterationConfig = PowerIterationConfig(),
    scope: str = "global",
) -> CentralityScores:
    """LexRank over the TAEG.

    ``global`` runs one iteration over the whole graph. ``per-event`` runs
    LexRank on each SAME_EVENT clique alone and rescales each cluster by its
    share of the nodes, so scores still sum to one.
    """
    n = len(taeg.nodes)
    if n == 0:
        raise ValueError("TAEG has no nodes")
    if scope == "global":
        return lexrank(to_stochastic(taeg_weights(taeg), n), config)
    if scope != "per-event":
        raise ValueError(f"unknown scope {scope!r}; expected one of {SCOPES}")

    # BEFORE edges join different events, so they vanish from every cluster slice
    weights = taeg_weights(taeg)
    scores = np.zeros(n)
    iterations = 0
    converged = True
    for members in taeg.by_event().values():
        ids = np.array([m.id for m in members])
        sub = weights[ids][:, ids]
        res = lexrank(to_stochastic(sub, len(ids)), config)
        scores[ids] = res.scores * (len(ids) / n)
        iterations = max(iterations, res.iterations)
        converged &= res.converged
    return CentralityScores(scores / scores.sum(), iterations, converged)
