"""Document to sentence to word extraction, pairing, balancing, sampling.

Every sampling decision is keyed by (seed, doc_id, sentence index) through
the stable hash, so output is identical across runs and worker counts.
"""

import dataclasses
import re
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import Document, LoadReport, Sentence, iter_jsonl, sentence_from_json, sentence_id, sentence_to_json, write_jsonl
from .detect import (
    DetectionReport,
    Dictionary,
    FormFrequencyTable,
    RlfSpan,
    RlfStyle,
    has_potential_rlf_word,
    rlf_search,
    scan_text,
    span_from_json,
    span_to_json,
)
from .errors import ConfigurationError, InputDomainError
from .sampling import DEFAULT_SEED, stable_fraction, stable_hash

DEFAULT_MIN_WORDS = 5

# A sentence ends at a [.?!] run followed by whitespace or end of text; the
# run stays attached. Interior punctuation (decimals, URLs) never matches
# because the character after it is not whitespace.
_SENTENCE_BOUNDARY = re.compile(r"[.?!]+(?=\s|$)")


@dataclass(frozen=True)
class RlfSentenceRecord:
    """One extracted sentence with its spans and inherited document label."""

    doc_id: str
    domain: str
    sentence: Sentence
    spans: tuple[RlfSpan, ...]
    label: int
    pair_sentence: Sentence | None = None
    split_tag: str | None = None

    def __post_init__(self):
        if not self.spans:
            raise InputDomainError("record must carry at least one span")

    @property
    def sentence_id(self) -> str:
        return sentence_id(self.doc_id, self.sentence.index)


@dataclass(frozen=True)
class BalancePolicy:
    """Keep rates per lengthening stratum plus optional group caps."""

    letter_keep_rate: float = 0.20
    ellipsis_keep_rate: float = 0.08
    other_punct_keep_rate: float = 1.0
    per_domain_cap: int | None = None
    per_form_cap: int | None = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        for name in ("letter_keep_rate", "ellipsis_keep_rate", "other_punct_keep_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ConfigurationError(f"{name} must be within [0, 1], got {rate}")
        for name in ("per_domain_cap", "per_form_cap"):
            cap = getattr(self, name)
            if cap is not None and cap < 1:
                raise ConfigurationError(f"{name} must be >= 1, got {cap}")


def segment_sentences(doc: Document) -> list[Sentence]:
    """Split document text into sentences, terminal punctuation attached."""
    if not doc.text.strip():
        raise InputDomainError(f"document {doc.id!r} has empty text")
    pieces = []
    start = 0
    for m in _SENTENCE_BOUNDARY.finditer(doc.text):
        piece = doc.text[start : m.end()].strip()
        if piece:
            pieces.append(piece)
        start = m.end()
    tail = doc.text[start:].strip()
    if tail:
        pieces.append(tail)
    return [Sentence.from_text(doc.id, i, text) for i, text in enumerate(pieces)]


def merge_short_sentences(
    sentences: Sequence[Sentence], min_words: int = DEFAULT_MIN_WORDS
) -> list[Sentence]:
    """Merge sentences below min_words onto their predecessor.

    A short leading sentence has no predecessor and merges into its
    successor instead. A single-sentence document is returned unchanged
    regardless of length.
    """
    if not sentences:
        return []
    doc_id = sentences[0].doc_id
    merged: list[str] = []
    for sentence in sentences:
        if merged and sentence.word_count < min_words:
            merged[-1] = merged[-1] + " " + sentence.text
        else:
            merged.append(sentence.text)
    while len(merged) >= 2 and len(merged[0].split()) < min_words:
        merged[1] = merged[0] + " " + merged[1]
        del merged[0]
    return [Sentence.from_text(doc_id, i, text) for i, text in enumerate(merged)]


@dataclass
class ExtractReport:
    """Corpus-level extraction accounting."""

    documents: int = 0
    unlabeled_skipped: int = 0
    rlf_documents: int = 0
    records: int = 0
    detection: DetectionReport = field(default_factory=DetectionReport)

    def merge_detection(self, other: DetectionReport) -> None:
        self.detection.excluded.update(other.excluded)
        self.detection.unreduced += other.unreduced
        self.detection.ambiguous += other.ambiguous


def extract_rlf(
    doc: Document,
    dictionary: Dictionary,
    *,
    min_words: int = DEFAULT_MIN_WORDS,
    report: ExtractReport | None = None,
) -> list[RlfSentenceRecord]:
    """Extract every sentence of the document that carries a span."""
    label = doc.effective_label()
    if label is None:
        if report is not None:
            report.unlabeled_skipped += 1
        return []
    if not rlf_search(doc.text):
        return []
    detection = report.detection if report is not None else None
    records = []
    for sentence in merge_short_sentences(segment_sentences(doc), min_words):
        if not rlf_search(sentence.text):
            continue
        spans = scan_text(sentence.text, dictionary, detection)
        if spans:
            records.append(
                RlfSentenceRecord(
                    doc_id=doc.id,
                    domain=doc.domain,
                    sentence=sentence,
                    spans=tuple(spans),
                    label=label,
                )
            )
    return records


def extract_corpus(
    docs: Sequence[Document],
    dictionary: Dictionary,
    *,
    min_words: int = DEFAULT_MIN_WORDS,
    workers: int = 1,
) -> tuple[list[RlfSentenceRecord], dict[str, list[Sentence]], ExtractReport]:
    """Extract all documents, returning records, merged sentences per doc, report.

    Documents are processed independently (optionally in a thread pool);
    results are merged in input order, so worker count never changes output.
    """
    report = ExtractReport()

    def one(doc: Document):
        doc_report = ExtractReport()
        recs = extract_rlf(doc, dictionary, min_words=min_words, report=doc_report)
        sentences = (
            merge_short_sentences(segment_sentences(doc), min_words) if recs else []
        )
        return recs, sentences, doc_report

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, docs))
    else:
        results = [one(doc) for doc in docs]

    all_records: list[RlfSentenceRecord] = []
    doc_sentences: dict[str, list[Sentence]] = {}
    for doc, (recs, sentences, doc_report) in zip(docs, results):
        report.documents += 1
        report.unlabeled_skipped += doc_report.unlabeled_skipped
        report.merge_detection(doc_report.detection)
        if recs:
            report.rlf_documents += 1
            report.records += len(recs)
            all_records.extend(recs)
            doc_sentences[doc.id] = sentences
    return all_records, doc_sentences, report


def pair_control(
    records: Sequence[RlfSentenceRecord],
    doc_sentences: dict[str, list[Sentence]],
    seed: int = DEFAULT_SEED,
) -> list[RlfSentenceRecord]:
    """Attach one control sentence (no potential lengthening) per record.

    The control is chosen deterministically under the seed, keyed by the
    record's document and sentence index. Records from single-sentence
    documents, or documents with no clean sentence, keep pair_sentence None.
    """
    candidates_by_doc: dict[str, list[Sentence]] = {}
    out = []
    for record in records:
        sentences = doc_sentences.get(record.doc_id, [])
        if len(sentences) < 2:
            out.append(dataclasses.replace(record, pair_sentence=None))
            continue
        if record.doc_id not in candidates_by_doc:
            candidates_by_doc[record.doc_id] = [
                s for s in sentences if not has_potential_rlf_word(s.text)
            ]
        candidates = candidates_by_doc[record.doc_id]
        if not candidates:
            out.append(dataclasses.replace(record, pair_sentence=None))
            continue
        pick = stable_hash(seed, "pair", record.doc_id, record.sentence.index) % len(
            candidates
        )
        out.append(dataclasses.replace(record, pair_sentence=candidates[pick]))
    return out


def record_stratum(record: RlfSentenceRecord) -> str:
    """Balance stratum of a record, from its first span."""
    span = record.spans[0]
    if span.style is RlfStyle.LETTER:
        return "letter"
    if span.generalized_form.endswith("...+"):
        return "ellipsis"
    return "other_punct"


@dataclass
class BalanceReport:
    strata: dict[str, list[int]] = field(default_factory=dict)  # name -> [kept, dropped]
    domain_cap_dropped: int = 0
    form_cap_dropped: int = 0

    def count(self, stratum: str, kept: bool) -> None:
        pair = self.strata.setdefault(stratum, [0, 0])
        pair[0 if kept else 1] += 1

    def rows(self) -> list[dict]:
        rows = [
            {"stratum": name, "kept": kept, "dropped": dropped}
            for name, (kept, dropped) in sorted(self.strata.items())
        ]
        rows.append({"stratum": "domain-cap", "kept": 0, "dropped": self.domain_cap_dropped})
        rows.append({"stratum": "form-cap", "kept": 0, "dropped": self.form_cap_dropped})
        return rows


def _cap_groups(
    records: list[RlfSentenceRecord],
    cap: int | None,
    key_of,
    seed: int,
    salt: str,
) -> tuple[list[RlfSentenceRecord], int]:
    if cap is None:
        return records, 0
    groups: dict[object, list[int]] = defaultdict(list)
    for i, record in enumerate(records):
        groups[key_of(record)].append(i)
    keep: set[int] = set()
    for key, indices in groups.items():
        if len(indices) <= cap:
            keep.update(indices)
        else:
            ranked = sorted(
                indices,
                key=lambda i: stable_hash(
                    seed, salt, str(key), records[i].doc_id, records[i].sentence.index
                ),
            )
            keep.update(ranked[:cap])
    kept = [record for i, record in enumerate(records) if i in keep]
    return kept, len(records) - len(kept)


def balance(
    records: Sequence[RlfSentenceRecord], policy: BalancePolicy
) -> tuple[list[RlfSentenceRecord], BalanceReport]:
    """Downsample by stratum keep rates, then apply per-group caps.

    Order of the surviving records follows the input.
    """
    rates = {
        "letter": policy.letter_keep_rate,
        "ellipsis": policy.ellipsis_keep_rate,
        "other_punct": policy.other_punct_keep_rate,
    }
    report = BalanceReport()
    kept: list[RlfSentenceRecord] = []
    for record in records:
        stratum = record_stratum(record)
        roll = stable_fraction(
            policy.seed, "balance", record.doc_id, record.sentence.index
        )
        keep = roll < rates[stratum]
        report.count(stratum, keep)
        if keep:
            kept.append(record)
    kept, dropped = _cap_groups(
        kept, policy.per_domain_cap, lambda r: r.domain, policy.seed, "cap-domain"
    )
    report.domain_cap_dropped = dropped
    kept, dropped = _cap_groups(
        kept,
        policy.per_form_cap,
        lambda r: r.spans[0].generalized_form,
        policy.seed,
        "cap-form",
    )
    report.form_cap_dropped = dropped
    return kept, report


def stratified_subset(
    records: Sequence[RlfSentenceRecord], n: int, seed: int = DEFAULT_SEED
) -> list[RlfSentenceRecord]:
    """Proportional per-domain sample of size n (largest-remainder rounding)."""
    if n < 0 or n > len(records):
        raise InputDomainError(f"subset size {n} outside 0..{len(records)}")
    if n == len(records):
        return list(records)
    total = len(records)
    groups: dict[str, list[int]] = defaultdict(list)
    for i, record in enumerate(records):
        groups[record.domain].append(i)
    # Integer largest-remainder allocation: exact, no float ties.
    allocation = {}
    remainders = []
    assigned = 0
    for domain, indices in groups.items():
        base, rem = divmod(n * len(indices), total)
        allocation[domain] = base
        assigned += base
        remainders.append((-rem, domain))
    for _, domain in sorted(remainders)[: n - assigned]:
        allocation[domain] += 1
    keep: set[int] = set()
    for domain, indices in groups.items():
        ranked = sorted(
            indices,
            key=lambda i: stable_hash(
                seed, "subset", records[i].doc_id, records[i].sentence.index
            ),
        )
        keep.update(ranked[: allocation[domain]])
    return [record for i, record in enumerate(records) if i in keep]


@dataclass
class AttachPosReport:
    matched: int = 0
    unmatched: int = 0
    duplicate_keys: int = 0
    malformed_lines: int = 0


def attach_pos(
    records: Sequence[RlfSentenceRecord], sidecar_path
) -> tuple[list[RlfSentenceRecord], AttachPosReport]:
    """Fill span pos_tag fields from a sidecar of externally computed tags.

    Sidecar lines: {doc_id, sentence_index, word_index, pos_tag}. Duplicate
    keys keep the last value and are counted.
    """
    report = AttachPosReport()
    tags: dict[tuple[str, int, int], str] = {}
    for _, obj in iter_jsonl(sidecar_path):
        if obj is None:
            report.malformed_lines += 1
            continue
        try:
            key = (obj["doc_id"], int(obj["sentence_index"]), int(obj["word_index"]))
            tag = str(obj["pos_tag"])
        except (KeyError, TypeError, ValueError):
            report.malformed_lines += 1
            continue
        if key in tags:
            report.duplicate_keys += 1
        tags[key] = tag
    out = []
    for record in records:
        new_spans = []
        for span in record.spans:
            key = (record.doc_id, record.sentence.index, span.word_index)
            tag = tags.get(key)
            if tag is None:
                report.unmatched += 1
                new_spans.append(span)
            else:
                report.matched += 1
                new_spans.append(dataclasses.replace(span, pos_tag=tag))
        out.append(dataclasses.replace(record, spans=tuple(new_spans)))
    return out, report


def apply_form_frequency(
    records: Sequence[RlfSentenceRecord], min_count: int
) -> tuple[list[RlfSentenceRecord], FormFrequencyTable, int, int]:
    """Drop spans whose generalized form is not frequent enough corpus-wide.

    Counts forms over all given records first, then keeps spans whose form
    count strictly exceeds min_count. Records left without spans are
    dropped. Returns (records, table, spans_dropped, records_dropped).
    """
    table = FormFrequencyTable.from_spans(
        span for record in records for span in record.spans
    )
    out = []
    spans_dropped = 0
    records_dropped = 0
    for record in records:
        kept = tuple(
            span
            for span in record.spans
            if table.counts.get(span.generalized_form, 0) > min_count
        )
        spans_dropped += len(record.spans) - len(kept)
        if kept:
            out.append(
                record if len(kept) == len(record.spans) else dataclasses.replace(record, spans=kept)
            )
        else:
            records_dropped += 1
    return out, table, spans_dropped, records_dropped


def record_to_json(record: RlfSentenceRecord) -> dict:
    obj = {
        "doc_id": record.doc_id,
        "domain": record.domain,
        "sentence": sentence_to_json(record.sentence),
        "spans": [span_to_json(span) for span in record.spans],
        "label": record.label,
    }
    if record.pair_sentence is not None:
        obj["pair_sentence"] = sentence_to_json(record.pair_sentence)
    if record.split_tag is not None:
        obj["split_tag"] = record.split_tag
    return obj


def record_from_json(obj: dict) -> RlfSentenceRecord:
    pair = obj.get("pair_sentence")
    return RlfSentenceRecord(
        doc_id=obj["doc_id"],
        domain=obj["domain"],
        sentence=sentence_from_json(obj["sentence"]),
        spans=tuple(span_from_json(s) for s in obj["spans"]),
        label=int(obj["label"]),
        pair_sentence=sentence_from_json(pair) if pair is not None else None,
        split_tag=obj.get("split_tag"),
    )


def write_records(path, records: Iterable[RlfSentenceRecord]) -> int:
    return write_jsonl(path, (record_to_json(r) for r in records))


def read_records(path) -> tuple[list[RlfSentenceRecord], LoadReport]:
    records = []
    report = LoadReport()
    for lineno, obj in iter_jsonl(path):
        if obj is None:
            report.skip(lineno, "invalid JSON")
            continue
        try:
            records.append(record_from_json(obj))
        except (KeyError, TypeError, ValueError, InputDomainError) as exc:
            report.skip(lineno, f"bad record: {exc}")
            continue
        report.read += 1
    return records, report
