"""Command-line entry point for the corpus pipeline and reports."""

import functools
import json
from collections import Counter
from pathlib import Path

import click

from . import __version__
from .corpus import load_documents
from .detect import Dictionary, RlfStyle, bundled_dictionary
from .errors import RlfkitError
from .explain import explainability_score, read_wis
from .instruct import build_instruction_dataset, write_samples
from .metrics import (
    AnnotationTable,
    accuracy,
    dataset_summary,
    krippendorff_alpha,
    length_binned_accuracy,
    macro_f1,
    read_predictions,
)
from .pipeline import (
    BalancePolicy,
    DEFAULT_MIN_WORDS,
    apply_form_frequency,
    balance as balance_records,
    extract_corpus,
    merge_short_sentences,
    pair_control,
    read_records,
    segment_sentences,
    stratified_subset,
    write_records,
)
from .sampling import DEFAULT_SEED


def friendly_errors(fn):
    """Turn toolkit errors into clean nonzero exits instead of tracebacks."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except RlfkitError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _load_dictionary(dict_path: str | None) -> Dictionary:
    return Dictionary.load(dict_path) if dict_path else bundled_dictionary()


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, ensure_ascii=False, indent=2))


@click.group()
@click.version_option(__version__, prog_name="rlfkit")
def main() -> None:
    """Detect repetitive lengthening in text and build datasets around it."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--dict", "dict_path", type=click.Path(exists=True, dir_okay=False), help="Word list file; bundled American English list when omitted.")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--min-words", type=int, default=DEFAULT_MIN_WORDS, show_default=True, help="Sentences below this word count merge onto a neighbor.")
@click.option("--min-form-count", type=int, default=0, show_default=True, help="Drop spans whose generalized form is not seen strictly more often than this.")
@click.option("--workers", type=int, default=1, show_default=True, help="Thread count for per-document extraction; output is identical for any value.")
@click.option("--pair/--no-pair", "do_pair", default=True, show_default=True, help="Attach a control sentence from the same document.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Write a JSON extraction report here.")
@friendly_errors
def extract(input_path, output_path, dict_path, seed, min_words, min_form_count, workers, do_pair, report_path):
    """Extract lengthened-word sentence records from a document corpus."""
    docs, load_report = load_documents(input_path)
    dictionary = _load_dictionary(dict_path)
    records, doc_sentences, report = extract_corpus(
        docs, dictionary, min_words=min_words, workers=workers
    )
    spans_dropped = records_dropped = 0
    if min_form_count > 0:
        records, _, spans_dropped, records_dropped = apply_form_frequency(
            records, min_form_count
        )
    if do_pair:
        records = pair_control(records, doc_sentences, seed)
    write_records(output_path, records)
    summary = {
        "documents": report.documents,
        "corpus_lines_skipped": load_report.skipped,
        "unlabeled_skipped": report.unlabeled_skipped,
        "rlf_documents": report.rlf_documents,
        "records_written": len(records),
        "excluded_tokens": dict(sorted(report.detection.excluded.items())),
        "unreduced_tokens": report.detection.unreduced,
        "ambiguous_reductions": report.detection.ambiguous,
        "form_filter_spans_dropped": spans_dropped,
        "form_filter_records_dropped": records_dropped,
    }
    if report_path:
        Path(report_path).write_text(
            json.dumps(summary, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
    click.echo(
        f"extract: {len(records)} records from {report.rlf_documents} of "
        f"{report.documents} documents -> {output_path}",
        err=True,
    )


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Records file to re-pair.")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False), help="The source document corpus.")
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--min-words", type=int, default=DEFAULT_MIN_WORDS, show_default=True, help="Must match the value used at extraction.")
@friendly_errors
def pair(input_path, corpus_path, output_path, seed, min_words):
    """Attach control sentences to an existing records file."""
    records, _ = read_records(input_path)
    docs, _ = load_documents(corpus_path)
    needed = {record.doc_id for record in records}
    doc_sentences = {
        doc.id: merge_short_sentences(segment_sentences(doc), min_words)
        for doc in docs
        if doc.id in needed
    }
    paired = pair_control(records, doc_sentences, seed)
    write_records(output_path, paired)
    with_pair = sum(1 for r in paired if r.pair_sentence is not None)
    click.echo(f"pair: {with_pair} of {len(paired)} records paired", err=True)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--letter-rate", type=float, default=0.20, show_default=True)
@click.option("--ellipsis-rate", type=float, default=0.08, show_default=True)
@click.option("--punct-rate", type=float, default=1.0, show_default=True)
@click.option("--domain-cap", type=int, default=None)
@click.option("--form-cap", type=int, default=None)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Write kept/dropped counts per stratum here (JSONL).")
@friendly_errors
def balance(input_path, output_path, seed, letter_rate, ellipsis_rate, punct_rate, domain_cap, form_cap, report_path):
    """Downsample records by stratum keep rates and optional group caps."""
    records, _ = read_records(input_path)
    policy = BalancePolicy(
        letter_keep_rate=letter_rate,
        ellipsis_keep_rate=ellipsis_rate,
        other_punct_keep_rate=punct_rate,
        per_domain_cap=domain_cap,
        per_form_cap=form_cap,
        seed=seed,
    )
    kept, report = balance_records(records, policy)
    write_records(output_path, kept)
    if report_path:
        from .corpus import write_jsonl

        write_jsonl(report_path, report.rows())
    click.echo(f"balance: kept {len(kept)} of {len(records)} records", err=True)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@click.option("-n", "--size", "size", required=True, type=int)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@friendly_errors
def subset(input_path, output_path, size, seed):
    """Draw a per-domain proportional subset of a records file."""
    records, _ = read_records(input_path)
    chosen = stratified_subset(records, size, seed)
    write_records(output_path, chosen)
    click.echo(f"subset: {len(chosen)} of {len(records)} records", err=True)


def _format_summary_row(name: str, row: dict) -> str:
    docs = row["documents"] if row["documents"] is not None else "-"
    ratio = (
        f"{row['rlf_doc_ratio_pct']:.1f}%"
        if row["rlf_doc_ratio_pct"] is not None
        else "-"
    )
    if row["label_pos_pct"] is not None:
        labels = f"{row['label_pos_pct']:.0f}/{row['label_neg_pct']:.0f}(%)"
    else:
        labels = "-"
    styles = " ".join(f"{k}:{v}" for k, v in row["styles"].items()) or "-"
    return (
        f"{name:<14} docs={docs} rlf_docs={row['rlf_documents']} ratio={ratio} "
        f"samples={row['samples']} labels={labels} "
        f"unique_rlf={row['unique_rlf_words']} unique_root={row['unique_root_words']} "
        f"styles=[{styles}]"
    )


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--docs", "doc_count", type=int, help="Total source document count.")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True, dir_okay=False), help="Source corpus; gives per-domain document counts.")
@click.option("--json", "as_json", is_flag=True)
@friendly_errors
def stats(input_path, doc_count, corpus_path, as_json):
    """Dataset summary statistics for a records file."""
    if (doc_count is None) == (corpus_path is None):
        raise click.ClickException("provide exactly one of --docs or --corpus")
    records, _ = read_records(input_path)
    if corpus_path is not None:
        docs, _ = load_documents(corpus_path)
        counts: int | dict = dict(Counter(doc.domain for doc in docs))
    else:
        counts = doc_count
    summary = dataset_summary(records, counts)
    if as_json:
        _echo_json(summary)
        return
    click.echo(_format_summary_row("overall", summary["overall"]))
    for domain, row in summary["domains"].items():
        click.echo(_format_summary_row(domain, row))


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Word-importance interchange file.")
@click.option("--records", "records_path", type=click.Path(exists=True, dir_okay=False), help="Records file; joins a per-style breakdown by sentence id.")
@click.option("--json", "as_json", is_flag=True)
@friendly_errors
def sexp(input_path, records_path, as_json):
    """Mean normalized importance of the lengthened token (the
    explainability score), over a word-importance file."""
    wis_records, load_report = read_wis(input_path)
    style_by_sentence = None
    if records_path:
        records, _ = read_records(records_path)
        style_by_sentence = {
            record.sentence_id: record.spans[0].style.value for record in records
        }
    report = explainability_score(wis_records, style_by_sentence)
    payload = report.to_json()
    payload["input_lines_skipped"] = load_report.skipped
    if as_json:
        _echo_json(payload)
        return
    click.echo(
        f"s_exp={report.s_exp:.6f} n={report.n_records} std={report.std_dev:.6f} "
        f"model={report.model_id} rejected={report.n_rejected}"
    )
    for style, (value, n) in sorted(report.per_style.items()):
        click.echo(f"  {style}: s_exp={value:.6f} n={n}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Records file.")
@click.option("--wis", "wis_path", type=click.Path(exists=True, dir_okay=False), help="Word-importance file keyed by sentence id; enables the scoring task samples.")
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False))
@friendly_errors
def prompts(input_path, wis_path, output_path):
    """Build the two-task instruction dataset from records."""
    records, _ = read_records(input_path)
    wis_by_sentence = None
    if wis_path:
        wis_records, _ = read_wis(wis_path)
        wis_by_sentence = {record.sentence_id: record for record in wis_records}
    samples, report = build_instruction_dataset(records, wis_by_sentence)
    write_samples(output_path, samples)
    click.echo(
        f"prompts: {report.sa_samples} sentiment + {report.wis_samples} scoring "
        f"samples (missing wis: {report.missing_wis}, "
        f"unrenderable: {report.unrenderable_wis})",
        err=True,
    )


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Prediction records file.")
@click.option("--bin-width", type=int, default=10, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@friendly_errors
def metrics(input_path, bin_width, as_json):
    """Accuracy, macro F1, and length-binned accuracy for predictions."""
    preds, load_report = read_predictions(input_path)
    groups = sorted({p.group for p in preds})
    by_group = {}
    for group in groups:
        subset_preds = [p for p in preds if p.group == group]
        by_group[group] = {
            "accuracy": accuracy(subset_preds),
            "macro_f1": macro_f1(subset_preds),
            "n": len(subset_preds),
        }
    bins, coverage = length_binned_accuracy(preds, bin_width)
    payload = {
        "accuracy": accuracy(preds),
        "macro_f1": macro_f1(preds),
        "n": len(preds),
        "by_group": by_group,
        "length_bins": bins,
        "coverage_le_80": coverage,
        "input_lines_skipped": load_report.skipped,
    }
    if as_json:
        _echo_json(payload)
        return
    click.echo(
        f"accuracy={payload['accuracy']:.4f} macro_f1={payload['macro_f1']:.4f} "
        f"n={payload['n']} coverage<=80ch={coverage:.2%}"
    )
    for group, row in by_group.items():
        click.echo(
            f"  {group}: accuracy={row['accuracy']:.4f} "
            f"macro_f1={row['macro_f1']:.4f} n={row['n']}"
        )
    for row in bins:
        lo, hi = row["bin"]
        click.echo(
            f"  [{lo:>4},{hi:>4}) {row['group']:<6} acc={row['acc']:.4f} n={row['n']}"
        )


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Annotation log (JSONL).")
@click.option("--kind", type=click.Choice(["SentimentLabel", "Reliability"]), default="SentimentLabel", show_default=True)
@click.option("--json", "as_json", is_flag=True)
@friendly_errors
def iaa(input_path, kind, as_json):
    """Inter-annotator agreement (Krippendorff's alpha) over an annotation log."""
    from .corpus import iter_jsonl

    rows = []
    for _, obj in iter_jsonl(input_path):
        if obj is None or obj.get("kind") != kind:
            continue
        item = str(obj["sample_id"])
        if kind == "Reliability":
            item = f"{item}::{obj.get('model_id', '')}"
        rows.append((item, str(obj["annotator_id"]), int(obj["value"])))
    table = AnnotationTable.from_records(rows)
    alpha = krippendorff_alpha(table)
    if as_json:
        _echo_json(
            {
                "alpha": alpha,
                "kind": kind,
                "items": len(table.items),
                "annotators": len(table.annotators),
            }
        )
        return
    click.echo(
        f"alpha={alpha:.6f} kind={kind} items={len(table.items)} "
        f"annotators={len(table.annotators)}"
    )


@main.command()
@click.option("--samples", "samples_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True, type=click.Path(dir_okay=False), help="Append-only annotation log.")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", type=str, default="127.0.0.1", show_default=True)
@friendly_errors
def serve(samples_path, output_path, port, host):
    """Run the annotation HTTP service."""
    import uvicorn

    from .server import create_app

    app = create_app(samples_path, output_path)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
