"""Pipeline command line: generate, translate, evaluate, report.

Stages communicate via line-delimited UTF-8 record files, so expensive
translation runs are cached on disk and can be re-evaluated under different
options. Every stage output gets a manifest sidecar; evaluation checks input
digests against those manifests unless --no-verify is passed.

Exit codes: 0 all ok, 3 completed with per-item failures, 1 aborted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from itertools import chain
from pathlib import Path

from .backends import (
    BackendError,
    TranslationStatus,
    backend_config_from_dict,
    find_backend_entry,
    read_translations,
    translate_batch,
    translation_to_record,
    write_translations,
)
from .classify import ClassifyError, PronounLexicon, classify_batch
from .corpus import (
    CorpusError,
    StereotypeLists,
    Suite,
    assign_stereotype,
    load_neutral_sets,
    load_occupations,
    load_otsc_corpus,
    load_winomt_corpus,
    read_sentences,
    write_sentences,
)
from .fileio import atomic_write_text, dumps_record, sha256_text
from .manifest import (
    RunManifest,
    derive_run_id,
    file_ref,
    tool_version,
    verify_against_sidecar,
    write_sidecar,
)
from .metrics import (
    MetricsError,
    OtscReport,
    Proportions,
    QuadrantStats,
    SetBalance,
    TgbiReport,
    WinomtReport,
    compute_otsc,
    compute_tgbi_report,
    compute_winomt,
)
from .tables import format_otsc_table, format_tgbi_table, format_winomt_table
from .templates import OtscTemplate, TemplateError, expand_otsc
from .resources import data_path

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ABORTED = 1
EXIT_PARTIAL = 3


class CliError(ValueError):
    """Fatal command-line level failure (bad combination of inputs)."""


# --------------------------------------------------------------------------
# Report (de)serialization


def _report_metrics_dict(report: TgbiReport | OtscReport | WinomtReport) -> dict:
    if isinstance(report, WinomtReport):
        return {
            "acc": report.acc,
            "delta_g": report.delta_g,
            "delta_s": report.delta_s,
            "n": report.n,
            "f1_male": report.f1_male,
            "f1_female": report.f1_female,
            "macro_f1_pro": report.macro_f1_pro,
            "macro_f1_anti": report.macro_f1_anti,
            "total": report.total,
            "excluded_unlisted": report.excluded_unlisted,
        }
    if isinstance(report, OtscReport):
        return {
            "quadrants": {
                quadrant: {
                    "p_m": stats.p_m,
                    "p_w": stats.p_w,
                    "p_n": stats.p_n,
                    "true_rate": stats.true_rate,
                    "count": stats.count,
                }
                for quadrant, stats in report.quadrants.items()
            }
        }
    return {
        "per_set": {
            set_id: {
                "p_m": balance.proportions.p_m,
                "p_f": balance.proportions.p_f,
                "p_n": balance.proportions.p_n,
                "ps": balance.ps,
                "count": balance.count,
            }
            for set_id, balance in report.per_set.items()
        },
        "tgbi": report.tgbi,
    }


def report_from_dict(payload: dict) -> tuple[str, str, TgbiReport | OtscReport | WinomtReport]:
    """Rebuild (suite, backend name, report) from a machine report file."""
    suite = payload.get("suite")
    backend = payload.get("backend", "unknown")
    metrics = payload.get("metrics", {})
    counts = payload.get("counts", {})
    if suite == "winomt":
        report: TgbiReport | OtscReport | WinomtReport = WinomtReport(
            acc=metrics["acc"],
            delta_g=metrics["delta_g"],
            delta_s=metrics["delta_s"],
            n=metrics["n"],
            f1_male=metrics["f1_male"],
            f1_female=metrics["f1_female"],
            macro_f1_pro=metrics["macro_f1_pro"],
            macro_f1_anti=metrics["macro_f1_anti"],
            total=metrics["total"],
            excluded_unlisted=metrics["excluded_unlisted"],
            excluded_failed=counts.get("translated_failed", 0),
        )
    elif suite == "otsc":
        report = OtscReport(
            quadrants={
                quadrant: QuadrantStats(**stats)
                for quadrant, stats in metrics["quadrants"].items()
            },
            excluded_failed=counts.get("translated_failed", 0),
        )
    elif suite == "neutral":
        report = TgbiReport(
            per_set={
                set_id: SetBalance(
                    proportions=Proportions(entry["p_m"], entry["p_f"], entry["p_n"]),
                    ps=entry["ps"],
                    count=entry["count"],
                )
                for set_id, entry in metrics["per_set"].items()
            },
            tgbi=metrics["tgbi"],
        )
    else:
        raise CliError(f"report has unknown suite {suite!r}")
    return suite, backend, report


def _format_table(suite: str, named_reports: list) -> str:
    if suite == "winomt":
        return format_winomt_table(named_reports)
    if suite == "otsc":
        return format_otsc_table(named_reports)
    return format_tgbi_table(named_reports)


# --------------------------------------------------------------------------
# generate


def cmd_generate(args: argparse.Namespace) -> int:
    template_path = Path(args.template) if args.template else data_path("otsc_template.json")
    occupations = load_occupations(args.occupations)
    template = OtscTemplate.from_file(template_path)
    sentences = expand_otsc(occupations, template)
    write_sentences(args.out, sentences)

    per_quadrant: dict[str, int] = {}
    for sentence in sentences:
        per_quadrant[sentence.set_id] = per_quadrant.get(sentence.set_id, 0) + 1
    inputs = {
        "occupations": file_ref(args.occupations),
        "template": file_ref(template_path),
    }
    counts = {"generated": len(sentences), **{f"quadrant_{q}": n for q, n in per_quadrant.items()}}
    run_id = derive_run_id({
        "command": "generate",
        "inputs": {k: v["sha256"] for k, v in inputs.items()},
        "version": tool_version(),
    })
    write_sidecar(RunManifest(
        run_id=run_id,
        command="generate",
        suite=Suite.OTSC.value,
        inputs=inputs,
        output={**file_ref(args.out), "records": len(sentences)},
        counts=counts,
    ))
    print(f"generated {len(sentences)} sentences from {len(occupations)} occupations")
    for quadrant in sorted(per_quadrant):
        print(f"  {quadrant}: {per_quadrant[quadrant]}")
    return EXIT_OK


# --------------------------------------------------------------------------
# translate


def _read_journal(path: Path):
    """Lenient read of an interrupted run's journal: a torn final line (crash
    mid-write) is skipped rather than fatal."""
    if not path.exists():
        return []
    from .backends import translation_from_record

    records = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(translation_from_record(json.loads(line)))
        except (json.JSONDecodeError, BackendError):
            logger.warning("%s: line %d is unreadable, retranslating that item", path, lineno)
    return records


def cmd_translate(args: argparse.Namespace) -> int:
    default_suite = Suite(args.suite) if args.suite else None
    sentences = read_sentences(args.sentences, default_suite)
    entry = find_backend_entry(args.config, args.backend)
    config = backend_config_from_dict(entry, base_dir=Path(args.config).parent)
    config_hash = sha256_text(dumps_record(entry))[:16]

    out = Path(args.out)
    journal = Path(str(out) + ".partial")
    if args.fresh:
        journal.unlink(missing_ok=True)

    done = {}
    if not args.fresh:
        if out.exists():
            for record in read_translations(out):
                if record.status is TranslationStatus.OK:
                    done[record.source_id] = record
        for record in _read_journal(journal):
            if record.status is TranslationStatus.OK:
                done[record.source_id] = record
    known_ids = {s.id for s in sentences}
    done = {sid: rec for sid, rec in done.items() if sid in known_ids}

    pending = [s for s in sentences if s.id not in done]
    fresh_records = {}
    if pending:
        with open(journal, "a", encoding="utf-8") as journal_fh:

            def flush(batch):
                for record in batch:
                    journal_fh.write(dumps_record(translation_to_record(record)) + "\n")
                journal_fh.flush()

            results = translate_batch(pending, config, on_batch=flush)
        fresh_records = {r.source_id: r for r in results}

    merged = [fresh_records.get(s.id) or done[s.id] for s in sentences]
    write_translations(out, merged)
    journal.unlink(missing_ok=True)

    failed = sum(1 for r in merged if r.status is TranslationStatus.FAILED)
    counts = {
        "sources": len(sentences),
        "translated_ok": len(merged) - failed,
        "translated_failed": failed,
        "reused": len(done),
    }
    inputs = {"sentences": file_ref(args.sentences)}
    run_id = derive_run_id({
        "command": "translate",
        "backend": {"name": config.name, "config": config_hash},
        "inputs": {k: v["sha256"] for k, v in inputs.items()},
        "version": tool_version(),
    })
    write_sidecar(RunManifest(
        run_id=run_id,
        command="translate",
        suite=default_suite.value if default_suite else None,
        inputs=inputs,
        output={**file_ref(out), "records": len(merged)},
        counts=counts,
        backend={"name": config.name, "config_hash": config_hash},
    ))
    print(
        f"translated {counts['translated_ok']}/{len(merged)} ok "
        f"({failed} failed, {len(done)} reused) via {config.name}"
    )
    return EXIT_PARTIAL if failed else EXIT_OK


# --------------------------------------------------------------------------
# evaluate


def _load_suite_sentences(path: str, suite: Suite):
    if suite is Suite.OTSC:
        return load_otsc_corpus(path)
    if suite is Suite.WINOMT:
        return load_winomt_corpus(path)
    return list(chain.from_iterable(load_neutral_sets(path).values()))


def cmd_evaluate(args: argparse.Namespace) -> int:
    suite = Suite(args.suite)

    for path in (args.sentences, args.translations):
        ok, message = verify_against_sidecar(path)
        if not ok:
            if args.no_verify:
                logger.warning("%s (ignored by --no-verify)", message)
            else:
                raise CliError(f"{message}; pass --no-verify to evaluate anyway")
        else:
            logger.info(message)

    sentences = _load_suite_sentences(args.sentences, suite)
    translations = read_translations(args.translations)

    sentence_ids = {s.id for s in sentences}
    translation_ids = {t.source_id for t in translations}
    if sentence_ids != translation_ids:
        missing = len(sentence_ids - translation_ids)
        extra = len(translation_ids - sentence_ids)
        raise CliError(
            f"id mismatch between sentences and translations "
            f"({missing} missing, {extra} unknown)"
        )

    stereotype_paths = None
    if bool(args.male_stereotypes) != bool(args.female_stereotypes):
        raise CliError("--male-stereotypes and --female-stereotypes must be given together")
    if args.male_stereotypes:
        if suite is not Suite.WINOMT:
            raise CliError("stereotype lists only apply to the winomt suite")
        lists = StereotypeLists.from_files(args.male_stereotypes, args.female_stereotypes)
        sentences = [
            replace(s, stereotype=assign_stereotype(s.occupation, s.gold_gender, lists))
            for s in sentences
        ]
        stereotype_paths = [args.male_stereotypes, args.female_stereotypes]

    if args.pronouns:
        lexicon = PronounLexicon.from_file(args.pronouns)
    elif args.strict:
        lexicon = PronounLexicon.strict()
    else:
        lexicon = PronounLexicon.default()

    index = {s.id: s for s in sentences}
    classified, excluded = classify_batch(translations, index, lexicon)
    if not classified:
        raise CliError("no successful translations to evaluate")

    counts = {
        "sources": len(sentences),
        "translated_ok": len(classified),
        "translated_failed": len(excluded),
        "classified": len(classified),
    }
    if suite is Suite.WINOMT:
        report = compute_winomt(
            classified,
            strict_neutral=args.strict,
            neutral_as_positive=args.neutral_as_positive,
            excluded_failed=len(excluded),
        )
        counts["excluded_unlisted"] = report.excluded_unlisted
    elif suite is Suite.OTSC:
        report = compute_otsc(classified, excluded_failed=len(excluded))
    else:
        report = compute_tgbi_report(classified)

    backends_seen = sorted({t.backend for t in translations})
    backend_name = "+".join(backends_seen)
    options = {
        "strict": bool(args.strict),
        "neutral_as_positive": bool(args.neutral_as_positive),
        "stereotype_lists": stereotype_paths,
        "pronouns": args.pronouns,
    }
    inputs = {
        "sentences": file_ref(args.sentences),
        "translations": file_ref(args.translations),
    }
    run_id = derive_run_id({
        "command": "evaluate",
        "suite": suite.value,
        "backend": backend_name,
        "options": options,
        "inputs": {k: v["sha256"] for k, v in inputs.items()},
        "version": tool_version(),
    })
    payload = {
        "tool": "mtgender",
        "version": tool_version(),
        "run_id": run_id,
        "suite": suite.value,
        "backend": backend_name,
        "options": options,
        # digests only: paths and timestamps live in the manifest sidecar, so
        # identical inputs give a byte-identical report wherever they sit
        "inputs": {k: {"sha256": v["sha256"]} for k, v in inputs.items()},
        "counts": counts,
        "metrics": _report_metrics_dict(report),
    }
    atomic_write_text(
        args.out, json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    )
    write_sidecar(RunManifest(
        run_id=run_id,
        command="evaluate",
        suite=suite.value,
        inputs=inputs,
        output={**file_ref(args.out), "records": 1},
        counts=counts,
        backend={"name": backend_name},
    ))

    table = _format_table(suite.value, [(backend_name, report)])
    if args.table:
        atomic_write_text(args.table, table)
    sys.stdout.write(table)
    if excluded:
        print(f"note: {len(excluded)} failed translations excluded from metrics")
    return EXIT_OK


# --------------------------------------------------------------------------
# report


def cmd_report(args: argparse.Namespace) -> int:
    named_reports = []
    suites = set()
    for path in args.reports:
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"{path}: cannot read report ({exc})") from exc
        suite, backend, report = report_from_dict(payload)
        suites.add(suite)
        named_reports.append((backend, report))
    if len(suites) > 1:
        raise CliError(f"reports mix suites: {', '.join(sorted(suites))}")
    table = _format_table(suites.pop(), named_reports)
    if args.out:
        atomic_write_text(args.out, table)
    sys.stdout.write(table)
    return EXIT_OK


# --------------------------------------------------------------------------
# wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtgender",
        description="Gender bias evaluation pipeline for Hindi-English translation",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="info-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_generate = sub.add_parser(
        "generate", help="expand an occupation list into the four-quadrant test set"
    )
    p_generate.add_argument("--occupations", required=True, help="one occupation per line")
    p_generate.add_argument("--template", help="template JSON (bundled default when omitted)")
    p_generate.add_argument("--out", required=True, help="output sentences file (JSONL)")
    p_generate.set_defaults(func=cmd_generate)

    p_translate = sub.add_parser("translate", help="translate a sentence file via a backend")
    p_translate.add_argument("--sentences", required=True)
    p_translate.add_argument("--config", required=True, help="backends config file (JSON)")
    p_translate.add_argument("--backend", required=True, help="backend name from the config")
    p_translate.add_argument("--suite", choices=[s.value for s in Suite],
                             help="suite of the sentence file when its records do not say")
    p_translate.add_argument("--out", required=True, help="output translations file (JSONL)")
    p_translate.add_argument("--fresh", action="store_true",
                             help="ignore previous output instead of resuming")
    p_translate.set_defaults(func=cmd_translate)

    p_evaluate = sub.add_parser("evaluate", help="classify translations and compute metrics")
    p_evaluate.add_argument("--sentences", required=True)
    p_evaluate.add_argument("--translations", required=True)
    p_evaluate.add_argument("--suite", required=True, choices=[s.value for s in Suite])
    p_evaluate.add_argument("--out", required=True, help="machine-readable report (JSON)")
    p_evaluate.add_argument("--table", help="also write the formatted table here")
    p_evaluate.add_argument("--strict", action="store_true",
                            help="published pronoun sets only; N counts purely neutral outputs")
    p_evaluate.add_argument("--neutral-as-positive", action="store_true",
                            help="credit gender-neutral outputs as correct instead of misses")
    p_evaluate.add_argument("--male-stereotypes", help="recompute stereotype tags from this list")
    p_evaluate.add_argument("--female-stereotypes")
    p_evaluate.add_argument("--pronouns", help="custom pronoun lexicon (JSON)")
    p_evaluate.add_argument("--no-verify", action="store_true",
                            help="skip manifest digest verification")
    p_evaluate.set_defaults(func=cmd_evaluate)

    p_report = sub.add_parser("report", help="side-by-side table from evaluation reports")
    p_report.add_argument("reports", nargs="+", help="report JSON files (same suite)")
    p_report.add_argument("--out", help="write the table to a file as well")
    p_report.set_defaults(func=cmd_report)

    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    # ValueError covers the domain errors (CorpusError, TemplateError,
    # BackendError, ClassifyError, MetricsError, CliError) plus malformed JSONL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ABORTED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
