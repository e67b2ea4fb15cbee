"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 schema or invariant
violation. Data goes to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .centrality import SCOPES, PowerIterationConfig
from .consolidate import DEFAULT_SENTENCES, ORDERINGS, Narrative, Segment, read_narrative, write_narrative
from .corpus import dump_json, load_corpus, load_timeline, save_timeline
from .errors import ConfigError, TaegError
from .evaluation import ROUGE_L_MODES, EvalReport, evaluate, format_csv, format_json, format_table
from .graph import DEFAULT_THRESHOLD
from .pipeline import run_baseline, run_taeg
from .synth import SynthConfig, degrade_timeline, generate

log = logging.getLogger("taeg")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DATA = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("shared options")
    g.add_argument("--format", choices=("table", "json", "csv"), default="table")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD,
                   help="baseline cosine threshold (default: %(default)s)")
    g.add_argument("--damping", type=float, default=0.85)
    g.add_argument("--epsilon", type=float, default=1e-8)
    g.add_argument("--max-iter", type=int, default=200)
    g.add_argument("--sentences", type=int, default=DEFAULT_SENTENCES,
                   help="baseline summary size k (default: %(default)s)")
    g.add_argument("--ordering", choices=ORDERINGS, default="by-score")
    g.add_argument("--rouge-l-mode", choices=ROUGE_L_MODES, default="summary")
    g.add_argument("--lexrank-scope", choices=SCOPES, default="global")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    shared = _global_flags()
    parser = _Parser(prog="taeg", description="Narrative consolidation over a temporal event graph.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("consolidate", parents=[shared], help="TAEG consolidation")
    p.add_argument("corpus")
    p.add_argument("timeline")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--dump-graph", action="store_true", help="also write graph.json")

    p = sub.add_parser("baseline", parents=[shared], help="LexRank top-k baseline")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--timeline", help="timeline used to tag sentences with events")

    p = sub.add_parser("evaluate", parents=[shared], help="score a narrative against a reference")
    p.add_argument("candidate", help="run directory, narrative.json, or plain-text narrative")
    p.add_argument("reference", help="plain-text reference narrative")
    p.add_argument("--sidecar", help="provenance JSON for a plain-text candidate")
    p.add_argument("--label", default="")
    p.add_argument("--out", help="also write the JSON report here")

    p = sub.add_parser("synth", parents=[shared], help="generate a synthetic bundle")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--events", type=int, default=20)
    p.add_argument("--docs", type=int, default=4)
    p.add_argument("--coverage", type=float, default=0.6)
    p.add_argument("--vocab", type=int, default=2000)
    p.add_argument("--tokens", type=int, nargs=2, default=(6, 14), metavar=("MIN", "MAX"))
    p.add_argument("--sentences-per-version", type=int, nargs=2, default=(1, 3), metavar=("MIN", "MAX"))
    p.add_argument("--noise", type=float, default=0.2)

    p = sub.add_parser("degrade", parents=[shared], help="randomly drop timeline events")
    p.add_argument("timeline")
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--out", required=True, help="output timeline file")

    p = sub.add_parser("report", parents=[shared], help="compare several evaluation reports")
    p.add_argument("runs", nargs="*", help="evaluation JSON files or directories holding eval.json")
    return parser


def _power_config(args) -> PowerIterationConfig:
    try:
        return PowerIterationConfig(args.damping, args.epsilon, args.max_iter)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _write_manifest(path: Path, args, inputs: list[str]) -> None:
    params = {k: v for k, v in vars(args).items() if k not in ("command", "verbose")}
    manifest = {
        "command": args.command,
        "inputs": [str(Path(i).resolve()) for i in inputs],
        "parameters": params,
        "tau_variant": "b",
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    dump_json(manifest, path)


def _emit(reports: list[EvalReport], fmt: str) -> None:
    if fmt == "json":
        print(format_json(reports))
    elif fmt == "csv":
        sys.stdout.write(format_csv(reports))
    else:
        print(format_table(reports))


def cmd_consolidate(args) -> int:
    config = _power_config(args)
    docs = load_corpus(args.corpus)
    timeline = load_timeline(args.timeline, [d.id for d in docs])
    run = run_taeg(docs, timeline, config, args.lexrank_scope)
    out = Path(args.out)
    write_narrative(run.narrative, out)
    if args.dump_graph:
        (out / "graph.json").write_text(run.taeg.dumps() + "\n", encoding="utf-8")
    _write_manifest(out / "manifest.json", args, [args.corpus, args.timeline])
    log.info("wrote %d segments to %s", len(run.narrative.segments), out)
    return EXIT_OK


def cmd_baseline(args) -> int:
    if args.sentences < 1:
        raise UsageError("--sentences must be positive")
    if not 0.0 <= args.threshold < 1.0:
        raise UsageError("--threshold must lie in [0, 1)")
    config = _power_config(args)
    docs = load_corpus(args.corpus)
    timeline = load_timeline(args.timeline, [d.id for d in docs]) if args.timeline else None
    run = run_baseline(docs, args.sentences, args.ordering, args.threshold, config, timeline)
    out = Path(args.out)
    write_narrative(run.narrative, out)
    inputs = [args.corpus] + ([args.timeline] if args.timeline else [])
    _write_manifest(out / "manifest.json", args, inputs)
    return EXIT_OK


def _load_candidate(path: str, sidecar: str | None) -> Narrative:
    p = Path(path)
    if sidecar:
        return read_narrative(sidecar)
    if p.is_dir() or p.suffix == ".json":
        return read_narrative(p)
    guess = p.with_suffix(".json")
    if guess.exists():
        return read_narrative(guess)
    lines = [ln for ln in p.read_text(encoding="utf-8").splitlines() if ln.strip()]
    return Narrative([Segment(ln, "", []) for ln in lines], "external")


def cmd_evaluate(args) -> int:
    narrative = _load_candidate(args.candidate, args.sidecar)
    reference = Path(args.reference).read_text(encoding="utf-8")
    label = args.label or narrative.method
    report = evaluate(narrative, reference, rouge_l_mode=args.rouge_l_mode, label=label)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(format_json([report]) + "\n", encoding="utf-8")
    _emit([report], args.format)
    return EXIT_OK


def cmd_synth(args) -> int:
    config = SynthConfig(
        seed=args.seed,
        num_events=args.events,
        num_docs=args.docs,
        coverage_prob=args.coverage,
        vocab_size=args.vocab,
        min_tokens=args.tokens[0],
        max_tokens=args.tokens[1],
        min_sentences=args.sentences_per_version[0],
        max_sentences=args.sentences_per_version[1],
        paraphrase_noise=args.noise,
    )
    try:
        bundle = generate(config)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out)
    bundle.write(out)
    _write_manifest(out / "manifest.json", args, [])
    return EXIT_OK


def cmd_degrade(args) -> int:
    if not 0.0 <= args.fraction < 1.0:
        raise UsageError("--fraction must lie in [0, 1)")
    timeline = load_timeline(args.timeline)
    degraded = degrade_timeline(timeline, args.fraction, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_timeline(degraded, out)
    _write_manifest(out.with_name(out.name + ".manifest.json"), args, [args.timeline])
    return EXIT_OK


def _load_report(path: str) -> EvalReport:
    p = Path(path)
    if p.is_dir():
        p = p / "eval.json"
    data = json.loads(p.read_text(encoding="utf-8"))
    report = EvalReport.from_dict(data)
    if not report.label:
        report.label = Path(path).stem if not Path(path).is_dir() else Path(path).name
    return report


def cmd_report(args) -> int:
    if not args.runs:
        raise UsageError("report needs at least one evaluation output")
    try:
        reports = [_load_report(r) for r in args.runs]
    except json.JSONDecodeError as exc:
        raise OSError(f"unreadable run: {exc}") from exc
    _emit(reports, args.format)
    return EXIT_OK


COMMANDS = {
    "consolidate": cmd_consolidate,
    "baseline": cmd_baseline,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
    "degrade": cmd_degrade,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"taeg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"taeg: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TaegError, ValueError) as exc:
        print(f"taeg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
