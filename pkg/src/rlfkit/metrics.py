"""Evaluation arithmetic over prediction and annotation records.

Plain-float implementations with fsum accumulation; no numerics packages
required. Degenerate inputs raise UndefinedMetricError rather than
returning a default.
"""

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import LoadReport, iter_jsonl
from .errors import ConfigurationError, InputDomainError, UndefinedMetricError
from .pipeline import RlfSentenceRecord

# Character length referenced by the coverage statistic.
COVERAGE_CHAR_LEN = 80


def safe_div(num: float, den: float, default: float = 0.0) -> float:
    return num / den if den else default


@dataclass(frozen=True)
class PredictionRecord:
    """One model prediction joined with its gold label and grouping keys."""

    sentence_id: str
    group: str  # "RLF" or "NoRLF"
    domain: str
    char_len: int
    label: int
    prediction: int


def prediction_to_json(record: PredictionRecord) -> dict:
    return {
        "sentence_id": record.sentence_id,
        "group": record.group,
        "domain": record.domain,
        "char_len": record.char_len,
        "label": record.label,
        "prediction": record.prediction,
    }


def prediction_from_json(obj: dict) -> PredictionRecord:
    record = PredictionRecord(
        sentence_id=str(obj["sentence_id"]),
        group=str(obj["group"]),
        domain=str(obj["domain"]),
        char_len=int(obj["char_len"]),
        label=int(obj["label"]),
        prediction=int(obj["prediction"]),
    )
    if record.label not in (0, 1) or record.prediction not in (0, 1):
        raise InputDomainError("label and prediction must be 0 or 1")
    return record


def read_predictions(path) -> tuple[list[PredictionRecord], LoadReport]:
    records = []
    report = LoadReport()
    for lineno, obj in iter_jsonl(path):
        if obj is None:
            report.skip(lineno, "invalid JSON")
            continue
        try:
            records.append(prediction_from_json(obj))
        except (KeyError, TypeError, ValueError, InputDomainError) as exc:
            report.skip(lineno, f"bad record: {exc}")
            continue
        report.read += 1
    return records, report


def accuracy(preds: Sequence[PredictionRecord]) -> float:
    if not preds:
        raise InputDomainError("accuracy of an empty prediction set")
    correct = sum(1 for p in preds if p.label == p.prediction)
    return correct / len(preds)


def macro_f1(preds: Sequence[PredictionRecord]) -> float:
    """Unweighted mean of per-class F1 over classes {0, 1}.

    A class absent from both labels and predictions contributes F1 = 0 and
    is still averaged; a class with precision + recall = 0 contributes 0.
    """
    if not preds:
        raise InputDomainError("macro F1 of an empty prediction set")
    f1_values = []
    for cls in (0, 1):
        tp = sum(1 for p in preds if p.prediction == cls and p.label == cls)
        fp = sum(1 for p in preds if p.prediction == cls and p.label != cls)
        fn = sum(1 for p in preds if p.prediction != cls and p.label == cls)
        precision = safe_div(tp, tp + fp)
        recall = safe_div(tp, tp + fn)
        f1_values.append(safe_div(2 * precision * recall, precision + recall))
    return (f1_values[0] + f1_values[1]) / 2


def length_binned_accuracy(
    preds: Sequence[PredictionRecord], bin_width: int = 10
) -> tuple[list[dict], float]:
    """Accuracy per (character-length bin, group), plus short-text coverage.

    Returns (rows, fraction of records with char_len <= COVERAGE_CHAR_LEN).
    Rows: {"bin": [lo, hi], "group": group, "acc": float, "n": count}.
    """
    if bin_width <= 0:
        raise ConfigurationError(f"bin_width must be positive, got {bin_width}")
    if not preds:
        raise InputDomainError("length bins of an empty prediction set")
    cells: dict[tuple[int, str], list[int]] = defaultdict(lambda: [0, 0])
    for p in preds:
        cell = cells[(p.char_len // bin_width, p.group)]
        cell[0] += 1
        if p.label == p.prediction:
            cell[1] += 1
    rows = []
    for (bin_index, group), (n, correct) in sorted(cells.items()):
        rows.append(
            {
                "bin": [bin_index * bin_width, (bin_index + 1) * bin_width],
                "group": group,
                "acc": correct / n,
                "n": n,
            }
        )
    covered = sum(1 for p in preds if p.char_len <= COVERAGE_CHAR_LEN)
    return rows, covered / len(preds)


def doc_sentence_confusion(pairs: Iterable[tuple[int, int]]) -> dict[str, int]:
    """Counts of (document label, sentence label) combinations.

    PP = both positive, PN = positive document with negative sentence,
    NP = negative document with positive sentence, NN = both negative.
    """
    counts = {"PP": 0, "PN": 0, "NP": 0, "NN": 0}
    for doc_label, sentence_label in pairs:
        key = ("P" if doc_label == 1 else "N") + ("P" if sentence_label == 1 else "N")
        counts[key] += 1
    return counts


@dataclass(frozen=True)
class AnnotationTable:
    """Codes assigned by annotators to items; cells may be missing."""

    items: tuple[str, ...]
    annotators: tuple[str, ...]
    values: Mapping[tuple[str, str], int]

    @classmethod
    def from_records(
        cls, rows: Iterable[tuple[str, str, int]]
    ) -> "AnnotationTable":
        """Build from (item, annotator, code) triples; last write wins."""
        items: dict[str, None] = {}
        annotators: dict[str, None] = {}
        values: dict[tuple[str, str], int] = {}
        for item, annotator, code in rows:
            items.setdefault(item)
            annotators.setdefault(annotator)
            values[(item, annotator)] = int(code)
        return cls(tuple(items), tuple(annotators), values)


def krippendorff_alpha(table: AnnotationTable, metric: str = "nominal") -> float:
    """Chance-corrected agreement, nominal difference metric.

    Computed through the coincidence matrix: within each item with m >= 2
    codes, every ordered pair of codes counts with weight 1/(m-1). Items
    with fewer than two codes are skipped. Raises UndefinedMetricError when
    no disagreement is expected by chance (all codes identical) or the
    table has no pairable item or fewer than two annotators.
    """
    if metric != "nominal":
        raise ConfigurationError(f"unsupported metric {metric!r}")
    if len(table.annotators) < 2:
        raise UndefinedMetricError("need at least two annotators")
    disagree_terms: list[float] = []
    code_totals: Counter = Counter()
    n_paired = 0
    for item in table.items:
        codes = [
            table.values[(item, annotator)]
            for annotator in table.annotators
            if (item, annotator) in table.values
        ]
        m = len(codes)
        if m < 2:
            continue
        counts = Counter(codes)
        # Ordered disagreeing pairs among the m codes, weighted 1/(m-1).
        ordered_disagreements = m * (m - 1) - sum(c * (c - 1) for c in counts.values())
        disagree_terms.append(ordered_disagreements / (m - 1))
        code_totals.update(counts)
        n_paired += m
    if n_paired == 0:
        raise UndefinedMetricError("no item carries two or more codes")
    expected_disagree = n_paired * n_paired - sum(
        c * c for c in code_totals.values()
    )
    if expected_disagree == 0:
        raise UndefinedMetricError("all codes identical, chance disagreement is zero")
    d_observed = math.fsum(disagree_terms) / n_paired
    d_expected = expected_disagree / (n_paired * (n_paired - 1))
    return 1.0 - d_observed / d_expected


def pearson_corr(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(xs) != len(ys):
        raise InputDomainError("inputs must have equal length")
    n = len(xs)
    if n < 2:
        raise InputDomainError("need at least two points")
    for value in list(xs) + list(ys):
        if not math.isfinite(value):
            raise InputDomainError(f"non-finite value {value!r}")
    mean_x = math.fsum(xs) / n
    mean_y = math.fsum(ys) / n
    a = [x - mean_x for x in xs]
    b = [y - mean_y for y in ys]
    saa = math.fsum(v * v for v in a)
    sbb = math.fsum(v * v for v in b)
    if saa == 0.0 or sbb == 0.0:
        raise UndefinedMetricError("zero variance on one side")
    sab = math.fsum(p * q for p, q in zip(a, b))
    r = sab / math.sqrt(saa * sbb)
    return max(-1.0, min(1.0, r))


def dataset_summary(
    records: Sequence[RlfSentenceRecord],
    doc_count: int | Mapping[str, int],
) -> dict:
    """Per-domain and overall dataset statistics.

    doc_count is the total number of source documents, either one integer
    (per-domain ratios then stay unset) or a mapping from domain to count.
    """
    if isinstance(doc_count, int):
        if doc_count == 0:
            raise UndefinedMetricError("document count of zero")
        total_docs: int | None = doc_count
        domain_docs: Mapping[str, int] = {}
    else:
        domain_docs = dict(doc_count)
        for domain, count in domain_docs.items():
            if count == 0:
                raise UndefinedMetricError(f"document count of zero for {domain!r}")
        total_docs = sum(domain_docs.values())
        if total_docs == 0:
            raise UndefinedMetricError("document count of zero")

    def build_row(rows: Sequence[RlfSentenceRecord], documents: int | None) -> dict:
        samples = len(rows)
        rlf_docs = len({r.doc_id for r in rows})
        pos = sum(1 for r in rows if r.label == 1)
        styles = Counter(span.style.value for r in rows for span in r.spans)
        return {
            "documents": documents,
            "rlf_documents": rlf_docs,
            "rlf_doc_ratio_pct": (
                100.0 * rlf_docs / documents if documents else None
            ),
            "samples": samples,
            "label_pos_pct": 100.0 * pos / samples if samples else None,
            "label_neg_pct": 100.0 * (samples - pos) / samples if samples else None,
            "unique_rlf_words": len({s.surface for r in rows for s in r.spans}),
            "unique_root_words": len({s.root for r in rows for s in r.spans}),
            "styles": dict(sorted(styles.items())),
        }

    by_domain: dict[str, list[RlfSentenceRecord]] = defaultdict(list)
    for record in records:
        by_domain[record.domain].append(record)
    return {
        "overall": build_row(records, total_docs),
        "domains": {
            domain: build_row(rows, domain_docs.get(domain))
            for domain, rows in sorted(by_domain.items())
        },
    }
