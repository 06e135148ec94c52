"""Word-importance scores: normalization, occlusion deltas, and the
dataset-level explainability score (mean normalized importance at the
lengthened token).
"""

import math
import string
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .corpus import LoadReport, iter_jsonl, write_jsonl
from .detect import RlfSpan
from .errors import AlignmentError, InputDomainError, OracleError


@dataclass(frozen=True)
class WisRecord:
    """Per-token importance scores for one sentence under one model."""

    sentence_id: str
    model_id: str
    tokens: tuple[str, ...]
    raw_scores: tuple[float, ...]
    rlf_index: int
    label: int | None = None

    def validate(self) -> None:
        if len(self.tokens) == 0:
            raise InputDomainError(f"{self.sentence_id}: empty token list")
        if len(self.tokens) != len(self.raw_scores):
            raise InputDomainError(
                f"{self.sentence_id}: {len(self.tokens)} tokens vs "
                f"{len(self.raw_scores)} scores"
            )
        if not 0 <= self.rlf_index < len(self.tokens):
            raise InputDomainError(
                f"{self.sentence_id}: rlf_index {self.rlf_index} out of range"
            )
        for value in self.raw_scores:
            if not math.isfinite(value) or value < 0:
                raise InputDomainError(
                    f"{self.sentence_id}: raw score {value!r} not finite and non-negative"
                )
        if self.label is not None and self.label not in (0, 1):
            raise InputDomainError(f"{self.sentence_id}: label {self.label!r}")


class LossOracle(Protocol):
    """Anything that maps (tokens, label) to a finite non-negative loss."""

    def evaluate(self, tokens: Sequence[str], label: int) -> float: ...


@dataclass
class ExplainabilityReport:
    model_id: str
    s_exp: float
    n_records: int
    std_dev: float
    per_style: dict[str, tuple[float, int]] = field(default_factory=dict)
    n_rejected: int = 0
    rejected_ids: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "model_id": self.model_id,
            "s_exp": self.s_exp,
            "n_records": self.n_records,
            "std_dev": self.std_dev,
            "per_style": {
                style: {"s_exp": value, "n": n}
                for style, (value, n) in sorted(self.per_style.items())
            },
            "n_rejected": self.n_rejected,
            "rejected_ids": list(self.rejected_ids),
        }


def normalize_wis(raw: Sequence[float]) -> tuple[float, ...]:
    """Min-max scale then L1-normalize onto the probability simplex.

    All-equal input carries no signal and maps to the uniform vector.
    """
    if len(raw) == 0:
        raise InputDomainError("cannot normalize an empty score vector")
    for value in raw:
        if not math.isfinite(value):
            raise InputDomainError(f"non-finite score {value!r}")
    lo = min(raw)
    hi = max(raw)
    if lo == hi:
        return tuple(1.0 / len(raw) for _ in raw)
    shifted = [(value - lo) / (hi - lo) for value in raw]
    total = math.fsum(shifted)
    return tuple(value / total for value in shifted)


def occlusion_wis(
    tokens: Sequence[str], label: int, oracle: LossOracle
) -> list[float]:
    """Absolute loss change from removing each token in turn.

    One baseline evaluation plus one per token; the removed-token input is
    the remaining tokens in order.
    """
    if len(tokens) < 2:
        raise InputDomainError("occlusion needs at least two tokens")
    tokens = list(tokens)
    try:
        baseline = oracle.evaluate(tokens, label)
    except Exception as exc:
        raise OracleError(f"oracle failed on full input: {exc}") from exc
    scores = []
    for i in range(len(tokens)):
        reduced = tokens[:i] + tokens[i + 1 :]
        try:
            loss = oracle.evaluate(reduced, label)
        except Exception as exc:
            raise OracleError(
                f"oracle failed with token {i} removed: {exc}", token_index=i
            ) from exc
        scores.append(abs(baseline - loss))
    return scores


def explainability_score(
    records: Sequence[WisRecord],
    style_by_sentence: dict[str, str] | None = None,
) -> ExplainabilityReport:
    """Mean normalized importance of the lengthened token across records.

    Records failing their invariants are rejected, counted, and excluded.
    The per-style breakdown is filled for records whose sentence_id appears
    in style_by_sentence.
    """
    if len(records) == 0:
        raise InputDomainError("no records to score")
    values = []
    styles: dict[str, list[float]] = {}
    rejected = []
    model_ids = set()
    for record in records:
        try:
            record.validate()
        except InputDomainError:
            rejected.append(record.sentence_id)
            continue
        normalized = normalize_wis(record.raw_scores)
        value = normalized[record.rlf_index]
        values.append(value)
        model_ids.add(record.model_id)
        if style_by_sentence is not None:
            style = style_by_sentence.get(record.sentence_id)
            if style is not None:
                styles.setdefault(style, []).append(value)
    if not values:
        raise InputDomainError("every record was rejected")
    n = len(values)
    mean = math.fsum(values) / n
    std = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / n)
    per_style = {
        style: (math.fsum(vs) / len(vs), len(vs)) for style, vs in styles.items()
    }
    return ExplainabilityReport(
        model_id=model_ids.pop() if len(model_ids) == 1 else "mixed",
        s_exp=mean,
        n_records=n,
        std_dev=std,
        per_style=per_style,
        n_rejected=len(rejected),
        rejected_ids=tuple(rejected),
    )


def _strip_trailing_punct(token: str) -> str:
    return token.rstrip(string.punctuation)


def align_rlf_index(record_tokens: Sequence[str], span: RlfSpan) -> int:
    """Token index of the span's surface; exact match first, then a match
    with trailing punctuation stripped from both sides."""
    for i, token in enumerate(record_tokens):
        if token == span.surface:
            return i
    target = _strip_trailing_punct(span.surface)
    if target:
        for i, token in enumerate(record_tokens):
            if _strip_trailing_punct(token) == target:
                return i
    raise AlignmentError(
        f"surface {span.surface!r} not found in tokens",
        tokens=list(record_tokens),
        surface=span.surface,
    )


def wis_to_json(record: WisRecord) -> dict:
    obj = {
        "sentence_id": record.sentence_id,
        "model_id": record.model_id,
        "tokens": list(record.tokens),
        "raw_scores": list(record.raw_scores),
        "rlf_index": record.rlf_index,
    }
    if record.label is not None:
        obj["label"] = record.label
    return obj


def wis_from_json(obj: dict) -> WisRecord:
    label = obj.get("label")
    return WisRecord(
        sentence_id=str(obj["sentence_id"]),
        model_id=str(obj["model_id"]),
        tokens=tuple(str(t) for t in obj["tokens"]),
        raw_scores=tuple(float(s) for s in obj["raw_scores"]),
        rlf_index=int(obj["rlf_index"]),
        label=int(label) if label is not None else None,
    )


def write_wis(path, records) -> int:
    return write_jsonl(path, (wis_to_json(r) for r in records))


def read_wis(path) -> tuple[list[WisRecord], LoadReport]:
    records = []
    report = LoadReport()
    for lineno, obj in iter_jsonl(path):
        if obj is None:
            report.skip(lineno, "invalid JSON")
            continue
        try:
            records.append(wis_from_json(obj))
        except (KeyError, TypeError, ValueError) as exc:
            report.skip(lineno, f"bad record: {exc}")
            continue
        report.read += 1
    return records, report
