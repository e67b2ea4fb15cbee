"""Synthetic multi-perspective corpora with ground truth, and timeline degradation.

All randomness comes from SplitMix64 so a seed yields the same bundle in
any implementation that follows the same draw order.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from .corpus import (
    CanonicalEvent,
    Document,
    Sentence,
    Timeline,
    VerseRange,
    VerseRef,
    corpus_to_dict,
    timeline_to_dict,
)
from .errors import ConfigError
from .textproc import tokenize

RNG_ALGORITHM = "splitmix64"
_MASK = (1 << 64) - 1


class SplitMix64:
    """Steele, Lea & Flood's SplitMix64 generator."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def shuffle(self, items: list) -> None:
        """Fisher-Yates, last position first."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


_ONSETS = "b c d f g h k l m n p r s t v z".split()
_VOWELS = "a e i o u".split()


def pseudo_word(n: int) -> str:
    """Distinct pronounceable word for every non-negative integer."""
    syllables = []
    base = len(_ONSETS) * len(_VOWELS)
    while True:
        n, r = divmod(n, base)
        syllables.append(_ONSETS[r // len(_VOWELS)] + _VOWELS[r % len(_VOWELS)])
        if n == 0:
            break
        n -= 1
    word = "".join(reversed(syllables))
    # odd length keeps one-syllable words distinct from all longer ones
    return word + "n" if len(syllables) == 1 else word


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    num_events: int = 20
    num_docs: int = 4
    coverage_prob: float = 0.6
    vocab_size: int = 2000
    min_tokens: int = 6
    max_tokens: int = 14
    min_sentences: int = 1
    max_sentences: int = 3
    paraphrase_noise: float = 0.2

    def validate(self) -> None:
        if self.num_events < 1 or self.num_docs < 1:
            raise ConfigError("num_events and num_docs must be >= 1")
        if not 0.0 < self.coverage_prob <= 1.0:
            raise ConfigError("coverage_prob must lie in (0, 1]")
        if not 0.0 <= self.paraphrase_noise < 1.0:
            raise ConfigError("paraphrase_noise must lie in [0, 1)")
        if not 1 <= self.min_tokens <= self.max_tokens:
            raise ConfigError("need 1 <= min_tokens <= max_tokens")
        if not 1 <= self.min_sentences <= self.max_sentences:
            raise ConfigError("need 1 <= min_sentences <= max_sentences")
        if self.vocab_size < 1:
            raise ConfigError("vocab_size must be >= 1")
        if not 0 <= self.seed <= _MASK:
            raise ConfigError("seed must be an unsigned 64-bit integer")


@dataclass
class SynthBundle:
    config: SynthConfig
    documents: list[Document]
    timeline: Timeline
    golden_reference: list[str]
    golden_versions: list[tuple[int, str]]
    coverage: list[list[bool]]

    @property
    def golden_text(self) -> str:
        return "\n".join(self.golden_reference)

    def metadata(self) -> dict:
        return {
            "rng": RNG_ALGORITHM,
            "config": asdict(self.config),
            "coverage": [[int(c) for c in row] for row in self.coverage],
            "golden_versions": [{"event_index": e, "doc_id": d} for e, d in self.golden_versions],
        }

    def write(self, out_dir) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "corpus": out / "corpus.json",
            "timeline": out / "timeline.json",
            "golden": out / "golden.txt",
            "meta": out / "bundle.json",
        }
        for key, data in (
            ("corpus", corpus_to_dict(self.documents)),
            ("timeline", timeline_to_dict(self.timeline)),
            ("meta", self.metadata()),
        ):
            paths[key].write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
        paths["golden"].write_text(self.golden_text + "\n", encoding="utf-8")
        return paths


def _sentence_text(tokens: list[str]) -> str:
    return tokens[0].capitalize() + (" " + " ".join(tokens[1:]) if len(tokens) > 1 else "") + "."


def generate(config: SynthConfig) -> SynthBundle:
    """Build documents, timeline and golden reference from ``config``.

    Every covered (event, document) pair gets a version built from the
    event's core token sequence with a fraction ``paraphrase_noise`` of its
    tokens swapped for random vocabulary words. Each sentence occupies one
    verse ``doc:1:k``.
    """
    config.validate()
    rng = SplitMix64(config.seed)
    M, N = config.num_events, config.num_docs
    width = len(str(N))
    doc_ids = [f"doc{i + 1:0{width}d}" for i in range(N)]
    vocab = [pseudo_word(i) for i in range(config.vocab_size)]

    coverage = []
    for _ in range(M):
        while True:
            row = [rng.random() < config.coverage_prob for _ in range(N)]
            if any(row):
                break
        coverage.append(row)

    core_len = config.max_tokens * config.max_sentences
    cores = [[vocab[rng.below(len(vocab))] for _ in range(core_len)] for _ in range(M)]

    sentences: dict[str, list[tuple[str, int]]] = {d: [] for d in doc_ids}
    versions: dict[tuple[int, str], list[str]] = {}
    for e in range(M):
        for d, doc_id in enumerate(doc_ids):
            if not coverage[e][d]:
                continue
            n_sent = rng.randint(config.min_sentences, config.max_sentences)
            texts = []
            for s in range(n_sent):
                n_tok = rng.randint(config.min_tokens, config.max_tokens)
                base = s * config.max_tokens
                tokens = []
                for t in range(n_tok):
                    if rng.random() < config.paraphrase_noise:
                        tokens.append(vocab[rng.below(len(vocab))])
                    else:
                        tokens.append(cores[e][base + t])
                texts.append(_sentence_text(tokens))
            versions[(e + 1, doc_id)] = texts
            sentences[doc_id].extend((t, e + 1) for t in texts)

    documents = []
    spans: dict[int, dict[str, VerseRange]] = {e + 1: {} for e in range(M)}
    next_id = 0
    for doc_id in doc_ids:
        sents = []
        for pos, (text, ev) in enumerate(sentences[doc_id]):
            ref = VerseRef(doc_id, 1, pos + 1)
            sents.append(Sentence(next_id, doc_id, pos, text, VerseRange(ref, ref)))
            next_id += 1
            span = spans[ev].get(doc_id)
            spans[ev][doc_id] = VerseRange(span.start if span else ref, ref)
        documents.append(Document(doc_id, f"Synthetic document {doc_id}", tuple(sents)))

    timeline = Timeline(tuple(
        CanonicalEvent(e + 1, f"Event {e + 1}", spans[e + 1]) for e in range(M)
    ))

    golden, golden_versions = [], []
    for e in range(M):
        candidates = [(doc_id, versions[(e + 1, doc_id)]) for doc_id in doc_ids if (e + 1, doc_id) in versions]
        doc_id, texts = min(
            candidates, key=lambda c: (-sum(len(tokenize(t)) for t in c[1]), c[0])
        )
        golden.append(" ".join(texts))
        golden_versions.append((e + 1, doc_id))

    return SynthBundle(config, documents, timeline, golden, golden_versions, coverage)


def removal_order(n_events: int, seed: int) -> list[int]:
    """Positions in the order they are dropped; a prefix of it is removed."""
    order = list(range(n_events))
    SplitMix64(seed).shuffle(order)
    return order


def degrade_timeline(timeline: Timeline, fraction: float, seed: int = 0) -> Timeline:
    """Drop ``floor(fraction * M)`` events at random, keeping survivors in order.

    The dropped set for a smaller fraction is always a subset of the one for
    a larger fraction under the same seed.
    """
    if not 0.0 <= fraction < 1.0:
        raise ConfigError(f"fraction must lie in [0, 1), got {fraction}")
    M = len(timeline)
    n_drop = int(fraction * M)
    dropped = set(removal_order(M, seed)[:n_drop])
    return Timeline(tuple(ev for i, ev in enumerate(timeline.events) if i not in dropped))


def parse_seed(value: Optional[int]) -> int:
    return 0 if value is None else int(value) & _MASK
