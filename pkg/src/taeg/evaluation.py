"""ROUGE-1/2/L, METEOR and Kendall's tau-b, plus the report bundle and its formats."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .consolidate import Narrative, render
from .errors import EmptyReference, SchemaError
from .textproc import split_sentences, stem, tokenize

log = logging.getLogger(__name__)

ROUGE_L_MODES = ("summary", "corpus")
METEOR_ALPHA = 0.9
METEOR_BETA = 3.0
METEOR_GAMMA = 0.5


@dataclass(frozen=True)
class PrfScore:
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0

    @classmethod
    def from_counts(cls, hits: int, n_cand: int, n_ref: int) -> "PrfScore":
        p = hits / n_cand if n_cand else 0.0
        r = hits / n_ref if n_ref else 0.0
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(p, r, f)


# --------------------------------------------------------------------------
# ROUGE-N
# --------------------------------------------------------------------------

def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int = 1) -> PrfScore:
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    cand, ref = _ngrams(candidate, n), _ngrams(reference, n)
    hits = sum((cand & ref).values())
    return PrfScore.from_counts(hits, sum(cand.values()), sum(ref.values()))


# --------------------------------------------------------------------------
# ROUGE-L
# --------------------------------------------------------------------------

def _encode(*seqs: Sequence[str]) -> list[np.ndarray]:
    ids: dict[str, int] = {}
    return [np.array([ids.setdefault(t, len(ids)) for t in s], dtype=np.int64) for s in seqs]


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """LCS length keeping only two rows of the table.

    Each row is one vectorized step: with ``t[j]`` the diagonal+1 on a match
    and the cell above otherwise, the row is the running maximum of ``t``
    (a row can exceed the diagonal by at most one).
    """
    if not a or not b:
        return 0
    x, y = _encode(a, b)
    if len(x) > len(y):
        x, y = y, x
    prev = np.zeros(len(y) + 1, dtype=np.int64)
    cur = np.zeros_like(prev)
    for tok in x:
        t = np.where(y == tok, prev[:-1] + 1, prev[1:])
        np.maximum.accumulate(t, out=cur[1:])
        prev, cur = cur, prev
    return int(prev[-1])


def _segmented_lcs_table(r: np.ndarray, cols: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """LCS table of ``r`` against many column segments at once.

    ``cols`` holds every segment preceded by a sentinel (-1) column and
    ``offsets`` rises by ``len(r) + 1`` per segment, which stops the running
    maximum from leaking across segment boundaries.
    """
    table = np.zeros((len(r) + 1, len(cols)), dtype=np.int64)
    diag = np.zeros(len(cols), dtype=np.int64)
    for i, tok in enumerate(r, start=1):
        prev = table[i - 1]
        diag[1:] = prev[:-1]
        t = np.where(cols == tok, diag + 1, prev)
        table[i] = np.maximum.accumulate(t + offsets) - offsets
    return table


def _layout(ids: np.ndarray, seg: np.ndarray, stride: int):
    """Insert a sentinel before each segment; return columns, offsets, token columns."""
    starts = np.flatnonzero(np.r_[True, seg[1:] != seg[:-1]])
    rank = np.cumsum(np.r_[False, seg[1:] != seg[:-1]])
    cols = np.insert(ids, starts, -1)
    col_rank = np.insert(rank, starts, rank[starts])
    token_col = np.arange(len(ids)) + rank + 1
    return cols, col_rank * stride, token_col, rank


def union_lcs_hits(ref_sentence: np.ndarray, cand_ids: np.ndarray, cand_seg: np.ndarray) -> np.ndarray:
    """Boolean mask of reference positions lying on some LCS with some candidate sentence.

    Position ``k`` is a hit for a candidate sentence when a matching token
    at column ``j`` satisfies ``F[k][j-1] + 1 + B[k+1][j+1] == LCS``, with
    ``F`` the prefix table and ``B`` the suffix table.
    """
    L = len(ref_sentence)
    hits = np.zeros(L, dtype=bool)
    if L == 0 or len(cand_ids) == 0:
        return hits
    # tokens absent from the reference sentence cannot change its LCS
    keep = np.isin(cand_ids, ref_sentence)
    ids, seg = cand_ids[keep], cand_seg[keep]
    if len(ids) == 0:
        return hits
    stride = L + 1

    cols_f, off_f, tcol_f, rank_f = _layout(ids, seg, stride)
    fwd = _segmented_lcs_table(ref_sentence, cols_f, off_f)
    cols_b, off_b, tcol_b, _ = _layout(ids[::-1], seg[::-1], stride)
    bwd = _segmented_lcs_table(ref_sentence[::-1], cols_b, off_b)
    tcol_b = tcol_b[::-1]

    last = np.r_[rank_f[1:] != rank_f[:-1], True]
    total = fwd[L, tcol_f[last]][rank_f]

    before = fwd[:L, tcol_f - 1]            # LCS(r[:k], segment prefix before the token)
    after = bwd[:L][::-1][:, tcol_b - 1]    # LCS(r[k+1:], segment suffix after the token)
    match = ref_sentence[:, None] == ids[None, :]
    on_lcs = match & (before + 1 + after == total[None, :])
    hits |= on_lcs.any(axis=1)
    return hits


def rouge_l(
    candidate: Sequence[Sequence[str]],
    reference: Sequence[Sequence[str]],
    mode: str = "summary",
) -> PrfScore:
    """ROUGE-L over sentence-split token lists.

    ``corpus`` takes one LCS of the flattened streams. ``summary`` takes, for
    each reference sentence, the union of its LCS hits against every
    candidate sentence; hit tokens are clipped by the token counts on both
    sides so precision and recall stay in [0, 1].
    """
    cand_flat = [t for s in candidate for t in s]
    ref_flat = [t for s in reference for t in s]
    if not cand_flat or not ref_flat:
        return PrfScore()
    if mode == "corpus":
        return PrfScore.from_counts(lcs_length(cand_flat, ref_flat), len(cand_flat), len(ref_flat))
    if mode != "summary":
        raise ValueError(f"unknown ROUGE-L mode {mode!r}")

    vocab: dict[str, int] = {}
    cand_ids = np.array([vocab.setdefault(t, len(vocab)) for t in cand_flat], dtype=np.int64)
    cand_seg = np.repeat(np.arange(len(candidate)), [len(s) for s in candidate])
    cand_left = Counter(cand_flat)
    ref_left = Counter(ref_flat)
    hits = 0
    for sent in reference:
        if not sent:
            continue
        r = np.array([vocab.get(t, -2) for t in sent], dtype=np.int64)
        mask = union_lcs_hits(r, cand_ids, cand_seg)
        for tok in (t for t, h in zip(sent, mask) if h):
            if cand_left[tok] > 0 and ref_left[tok] > 0:
                hits += 1
                cand_left[tok] -= 1
                ref_left[tok] -= 1
    return PrfScore.from_counts(hits, len(cand_flat), len(ref_flat))


# --------------------------------------------------------------------------
# METEOR
# --------------------------------------------------------------------------

_RUN_CAP = 64


def _align_stage(ckeys: Sequence[str], rkeys: Sequence[str], align: dict[int, int], used: list[bool]) -> None:
    """Greedy left-to-right matching of still-unaligned tokens with equal keys.

    Every candidate token is matched while a reference token with its key is
    free, so the stage reaches the maximum match count. To keep chunks few a
    token first continues the previous candidate's alignment, then prefers
    the free reference position opening the longest common run.
    """
    nc, nr = len(ckeys), len(rkeys)
    positions: dict[str, list[int]] = {}
    bigrams: dict[tuple[str, str], list[int]] = {}
    for p, k in enumerate(rkeys):
        if used[p]:
            continue
        positions.setdefault(k, []).append(p)
        if p + 1 < nr and not used[p + 1]:
            bigrams.setdefault((k, rkeys[p + 1]), []).append(p)
    cursor = dict.fromkeys(positions, 0)
    remaining = Counter({k: len(v) for k, v in positions.items()})

    def run_length(i, p):
        n = 0
        while (n < _RUN_CAP and i + n < nc and p + n < nr and not used[p + n]
               and (i + n) not in align and ckeys[i + n] == rkeys[p + n]):
            n += 1
        return n

    for i in range(nc):
        if i in align:
            continue
        k = ckeys[i]
        if remaining[k] <= 0:
            continue
        choice = None
        prev = align.get(i - 1)
        if prev is not None and prev + 1 < nr and not used[prev + 1] and rkeys[prev + 1] == k:
            choice = prev + 1
        elif i + 1 < nc and (i + 1) not in align:
            best = 0
            for p in bigrams.get((k, ckeys[i + 1]), ()):
                if used[p] or used[p + 1]:
                    continue
                n = run_length(i, p)
                if n > best:
                    best, choice = n, p
                    if n >= _RUN_CAP:
                        break
        if choice is None:
            plist = positions[k]
            c = cursor[k]
            while used[plist[c]]:
                c += 1
            cursor[k] = c
            choice = plist[c]
        align[i] = choice
        used[choice] = True
        remaining[k] -= 1


def count_chunks(align: dict[int, int]) -> int:
    """Runs of matches contiguous and in the same order on both sides."""
    chunks = 0
    prev = None
    for i in sorted(align):
        j = align[i]
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def meteor_alignment(candidate: Sequence[str], reference: Sequence[str]) -> dict[int, int]:
    """Exact matches first, then Porter-stem matches among the leftovers."""
    align: dict[int, int] = {}
    used = [False] * len(reference)
    _align_stage(candidate, reference, align, used)
    _align_stage([stem(t) for t in candidate], [stem(t) for t in reference], align, used)
    return align


def meteor(
    candidate: Sequence[str],
    reference: Sequence[str],
    alpha: float = METEOR_ALPHA,
    beta: float = METEOR_BETA,
    gamma: float = METEOR_GAMMA,
) -> float:
    if not candidate or not reference:
        return 0.0
    align = meteor_alignment(candidate, reference)
    m = len(align)
    if m == 0:
        return 0.0
    p = m / len(candidate)
    r = m / len(reference)
    fmean = p * r / (alpha * p + (1 - alpha) * r)
    penalty = gamma * (count_chunks(align) / m) ** beta
    return fmean * (1 - penalty)


# --------------------------------------------------------------------------
# Kendall's tau-b
# --------------------------------------------------------------------------

def _count_inversions(values: list[int]) -> int:
    """Pairs i < j with values[i] > values[j] (equal values are not inversions)."""
    inversions = 0
    width = 1
    a = list(values)
    n = len(a)
    while width < n:
        out = []
        for lo in range(0, n, 2 * width):
            left = a[lo:lo + width]
            right = a[lo + width:lo + 2 * width]
            i = j = 0
            while i < len(left) and j < len(right):
                if right[j] < left[i]:
                    out.append(right[j])
                    inversions += len(left) - i
                    j += 1
                else:
                    out.append(left[i])
                    i += 1
            out.extend(left[i:])
            out.extend(right[j:])
        a = out
        width *= 2
    return inversions


def tau_b(concordant: int, discordant: int, ties_x: int, ties_y: int) -> float:
    """``(C - D) / sqrt((C + D + Tx)(C + D + Ty))``; Tx/Ty are pairs tied in one variable only."""
    return (concordant - discordant) / math.sqrt(
        (concordant + discordant + ties_x) * (concordant + discordant + ties_y)
    )


def kendall_tau(observed: Sequence[int]) -> float:
    """Tau-b between output positions and the event indices found there."""
    n = len(observed)
    if n < 2:
        log.warning("Kendall's tau needs two ordered items, got %d; reporting 1.0", n)
        return 1.0
    pairs = n * (n - 1) // 2
    ties = sum(c * (c - 1) // 2 for c in Counter(observed).values())
    discordant = _count_inversions(list(observed))
    concordant = pairs - discordant - ties
    if concordant + discordant == 0:
        log.warning("every item maps to one event; reporting tau = 1.0")
        return 1.0
    return tau_b(concordant, discordant, 0, ties)


# --------------------------------------------------------------------------
# Report bundle
# --------------------------------------------------------------------------

@dataclass
class EvalReport:
    rouge1: PrfScore
    rouge2: PrfScore
    rougeL: PrfScore
    rougeL_corpus: PrfScore
    meteor: float
    kendall_tau: float
    candidate_chars: int
    reference_chars: int
    unaligned_segments: int = 0
    rouge_l_mode: str = "summary"
    tau_variant: str = "b"
    bertscore_f1: Optional[float] = None  # external only; never computed here
    label: str = ""

    @property
    def rouge_l_primary(self) -> PrfScore:
        return self.rougeL if self.rouge_l_mode == "summary" else self.rougeL_corpus

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        try:
            kw = dict(data)
            for key in ("rouge1", "rouge2", "rougeL", "rougeL_corpus"):
                kw[key] = PrfScore(**kw[key])
            return cls(**kw)
        except (KeyError, TypeError) as exc:
            raise SchemaError(f"malformed evaluation report: {exc}") from exc


def evaluate(
    candidate: Narrative,
    reference_text: str,
    reference_sentences: Optional[Sequence[str]] = None,
    rouge_l_mode: str = "summary",
    label: str = "",
) -> EvalReport:
    if rouge_l_mode not in ROUGE_L_MODES:
        raise ValueError(f"unknown ROUGE-L mode {rouge_l_mode!r}")
    if reference_sentences is None:
        reference_sentences = split_sentences(reference_text)
    ref_units = [tokenize(s) for s in reference_sentences]
    ref_tokens = [t for u in ref_units for t in u]
    if not ref_tokens:
        raise EmptyReference("reference text has no tokens")

    cand_text = render(candidate)
    cand_units = [tokenize(s) for seg in candidate.segments for s in split_sentences(seg.text)]
    cand_tokens = [t for u in cand_units for t in u]

    return EvalReport(
        rouge1=rouge_n(cand_tokens, ref_tokens, 1),
        rouge2=rouge_n(cand_tokens, ref_tokens, 2),
        rougeL=rouge_l(cand_units, ref_units, "summary"),
        rougeL_corpus=rouge_l(cand_units, ref_units, "corpus"),
        meteor=meteor(cand_tokens, ref_tokens),
        kendall_tau=kendall_tau(candidate.order),
        candidate_chars=len(cand_text),
        reference_chars=len(reference_text.strip()),
        unaligned_segments=sum(1 for s in candidate.segments if s.event_index is None),
        rouge_l_mode=rouge_l_mode,
        label=label,
    )


def _rows(report: EvalReport) -> list[tuple[str, str]]:
    other = "corpus" if report.rouge_l_mode == "summary" else "summary"
    other_score = report.rougeL_corpus if other == "corpus" else report.rougeL
    rows = [
        ("ROUGE-1 F1", f"{report.rouge1.f1:.3f}"),
        ("ROUGE-2 F1", f"{report.rouge2.f1:.3f}"),
        ("ROUGE-L F1", f"{report.rouge_l_primary.f1:.3f}"),
        (f"ROUGE-L F1 ({other})", f"{other_score.f1:.3f}"),
    ]
    if report.bertscore_f1 is not None:
        rows.append(("BERTScore F1", f"{report.bertscore_f1:.3f}"))
    rows += [
        ("METEOR", f"{report.meteor:.3f}"),
        ("Kendall's Tau", f"{report.kendall_tau:.3f}"),
        ("Length (chars)", f"{report.candidate_chars:,}"),
    ]
    return rows


def format_table(reports: Sequence[EvalReport]) -> str:
    """Fixed-width table: one row per metric, one column per report."""
    if not reports:
        return ""
    columns = [_rows(r) for r in reports]
    labels = []
    for cols in columns:
        for name, _ in cols:
            if name not in labels:
                labels.append(name)
    values = [dict(cols) for cols in columns]
    heads = [r.label or f"run{i + 1}" for i, r in enumerate(reports)]
    w0 = max(len("Metric"), *(len(lbl) for lbl in labels))
    widths = [max(len(h), *(len(v.get(lbl, "-")) for lbl in labels)) for h, v in zip(heads, values)]
    lines = ["  ".join(["Metric".ljust(w0)] + [h.rjust(w) for h, w in zip(heads, widths)])]
    lines.append("  ".join(["-" * w0] + ["-" * w for w in widths]))
    for lbl in labels:
        lines.append("  ".join([lbl.ljust(w0)] + [v.get(lbl, "-").rjust(w) for v, w in zip(values, widths)]))
    return "\n".join(lines)


CSV_FIELDS = [
    "label", "rouge1_f1", "rouge2_f1", "rougeL_f1", "rougeL_corpus_f1",
    "meteor", "kendall_tau", "candidate_chars", "reference_chars", "unaligned_segments",
]


def format_csv(reports: Sequence[EvalReport]) -> str:
    """One data row per report."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in reports:
        writer.writerow([
            r.label, f"{r.rouge1.f1:.6f}", f"{r.rouge2.f1:.6f}", f"{r.rougeL.f1:.6f}",
            f"{r.rougeL_corpus.f1:.6f}", f"{r.meteor:.6f}", f"{r.kendall_tau:.6f}",
            r.candidate_chars, r.reference_chars, r.unaligned_segments,
        ])
    return buf.getvalue()


def format_json(reports: Sequence[EvalReport]) -> str:
    data = [r.to_dict() for r in reports]
    return json.dumps(data[0] if len(data) == 1 else data, indent=2)
