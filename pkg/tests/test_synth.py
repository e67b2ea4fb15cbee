import pytest

from taeg.consolidate import Narrative, Segment
from taeg.corpus import align
from taeg.errors import ConfigError
from taeg.evaluation import kendall_tau
from taeg.pipeline import run_taeg
from taeg.synth import (
    SplitMix64,
    SynthConfig,
    degrade_timeline,
    generate,
    parse_seed,
    pseudo_word,
    removal_order,
)


def test_splitmix64_reference_values():
    # published outputs of the reference C implementation
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(3)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
    ]
    assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF


def test_rng_helpers_stay_in_range():
    rng = SplitMix64(9)
    assert all(0 <= rng.random() < 1 for _ in range(1000))
    assert {rng.below(3) for _ in range(300)} == {0, 1, 2}
    assert all(4 <= rng.randint(4, 6) <= 6 for _ in range(100))
    items = list(range(20))
    rng.shuffle(items)
    assert sorted(items) == list(range(20))
    with pytest.raises(ValueError):
        rng.below(0)


def test_pseudo_words_distinct():
    words = [pseudo_word(i) for i in range(20000)]
    assert len(set(words)) == len(words)
    assert all(w.isalpha() and w.islower() for w in words)


def test_full_coverage():
    bundle = generate(SynthConfig(seed=1, num_events=3, num_docs=2, coverage_prob=1.0))
    assert bundle.coverage == [[True, True]] * 3
    assert len(align(bundle.documents, bundle.timeline).event_versions) == 6


def test_same_seed_same_bytes(tmp_path):
    cfg = SynthConfig(seed=42, num_events=15, num_docs=3)
    a, b = tmp_path / "a", tmp_path / "b"
    generate(cfg).write(a)
    generate(cfg).write(b)
    for name in ("corpus.json", "timeline.json", "golden.txt", "bundle.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    generate(SynthConfig(seed=43, num_events=15, num_docs=3)).write(tmp_path / "c")
    assert (tmp_path / "c" / "corpus.json").read_bytes() != (a / "corpus.json").read_bytes()


def test_mean_coverage_monte_carlo():
    fractions = []
    for seed in range(10):
        cov = generate(SynthConfig(seed=seed, num_events=20, num_docs=4, coverage_prob=0.6)).coverage
        fractions.append(sum(map(sum, cov)) / 80)
    assert abs(sum(fractions) / 10 - 0.6) <= 0.15


@pytest.mark.parametrize("seed", range(5))
def test_every_event_covered_and_spans_ordered(seed):
    bundle = generate(SynthConfig(seed=seed, num_events=30, num_docs=3, coverage_prob=0.2))
    assert all(any(row) for row in bundle.coverage)
    assert all(ev.covered for ev in bundle.timeline)
    for doc in bundle.documents:
        events = [ev.index for ev in bundle.timeline if doc.id in ev.spans]
        starts = [bundle.timeline.events[e - 1].spans[doc.id].start.verse for e in events]
        assert starts == sorted(starts)


def test_golden_is_longest_version_in_timeline_order():
    bundle = generate(SynthConfig(seed=8, num_events=12, num_docs=4))
    al = align(bundle.documents, bundle.timeline)
    text_of = {s.id: s.text for d in bundle.documents for s in d.sentences}
    for (e, doc_id), line in zip(bundle.golden_versions, bundle.golden_reference):
        chosen = " ".join(text_of[i] for i in al.event_versions[(e, doc_id)])
        assert chosen == line
        lengths = {d: sum(len(text_of[i].split()) for i in ids) for (ev, d), ids in al.event_versions.items() if ev == e}
        best = max(lengths.values())
        assert lengths[doc_id] == best
        assert doc_id == min(d for d, n in lengths.items() if n == best)
    golden = Narrative([Segment(t, d, [], e) for (e, d), t in zip(bundle.golden_versions, bundle.golden_reference)], "golden")
    assert golden.order == list(range(1, 13))
    assert kendall_tau(golden.order) == 1.0


@pytest.mark.parametrize("kwargs", [
    {"num_events": 0}, {"num_docs": 0}, {"coverage_prob": 0.0}, {"coverage_prob": 1.5},
    {"paraphrase_noise": 1.0}, {"min_tokens": 5, "max_tokens": 4}, {"min_sentences": 0},
    {"vocab_size": 0}, {"seed": -1},
])
def test_config_errors(kwargs):
    with pytest.raises(ConfigError):
        generate(SynthConfig(**kwargs))


def test_degrade_zero_is_identity():
    tl = generate(SynthConfig(seed=2, num_events=10)).timeline
    assert degrade_timeline(tl, 0.0, seed=5) == tl


def test_degrade_half():
    tl = generate(SynthConfig(seed=2, num_events=10)).timeline
    out = degrade_timeline(tl, 0.5, seed=5)
    assert len(out) == 5
    assert out.indices == sorted(out.indices)
    assert set(out.indices) <= set(tl.indices)
    assert degrade_timeline(tl, 0.5, seed=5) == out


def test_degrade_nested_across_fractions():
    tl = generate(SynthConfig(seed=2, num_events=40)).timeline
    kept = [set(degrade_timeline(tl, f, seed=9).indices) for f in (0, 0.25, 0.5, 0.75)]
    assert all(b <= a for a, b in zip(kept, kept[1:]))
    assert [len(k) for k in kept] == [40, 30, 20, 10]
    assert sorted(removal_order(40, 9)) == list(range(40))


@pytest.mark.parametrize("f", [-0.1, 1.0])
def test_degrade_bad_fraction(f):
    tl = generate(SynthConfig(seed=2, num_events=4)).timeline
    with pytest.raises(ConfigError):
        degrade_timeline(tl, f)


def test_consolidation_on_degraded_timeline():
    bundle = generate(SynthConfig(seed=4, num_events=30, num_docs=4))
    tl = degrade_timeline(bundle.timeline, 0.5, seed=1)
    narrative = run_taeg(bundle.documents, tl).narrative
    assert len(narrative.segments) == sum(1 for ev in tl if ev.covered)
    assert kendall_tau(narrative.order) == 1.0


def test_parse_seed():
    assert parse_seed(None) == 0
    assert parse_seed(-1) == 2 ** 64 - 1
