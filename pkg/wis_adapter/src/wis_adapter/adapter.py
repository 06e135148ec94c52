"""Turn sentence records into word-importance files by occlusion."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable


@dataclass(frozen=True)
class SentenceItem:
    """What the adapter needs from one record of a records file."""

    sentence_id: str
    tokens: tuple[str, ...]
    rlf_index: int
    label: int


@dataclass
class AdapterReport:
    produced: int = 0
    skipped: int = 0
    skip_reasons: list = None

    def __post_init__(self):
        if self.skip_reasons is None:
            self.skip_reasons = []


def load_sentences(path: str | Path) -> tuple[list[SentenceItem], AdapterReport]:
    """Read a records file down to (sentence_id, tokens, rlf_index, label).

    The records format: one JSON object per line with "doc_id", "label",
    a "sentence" object carrying "index" and "text", and a "spans" list
    whose entries carry "word_index" into the whitespace tokenization of
    the sentence text. Sentence ids are "{doc_id}#s{index}". Records that
    cannot be scored (under two tokens, index out of range, malformed
    JSON) are skipped and counted, never guessed at.
    """
    items: list[SentenceItem] = []
    report = AdapterReport()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                doc_id = str(obj["doc_id"])
                sentence = obj["sentence"]
                tokens = tuple(str(sentence["text"]).split())
                rlf_index = int(obj["spans"][0]["word_index"])
                label = int(obj["label"])
                sentence_id = f"{doc_id}#s{int(sentence['index'])}"
            except (ValueError, KeyError, TypeError, IndexError) as exc:
                report.skipped += 1
                report.skip_reasons.append((line_no, f"malformed: {exc}"))
                continue
            if len(tokens) < 2:
                report.skipped += 1
                report.skip_reasons.append((line_no, "under two tokens"))
                continue
            if not 0 <= rlf_index < len(tokens) or label not in (0, 1):
                report.skipped += 1
                report.skip_reasons.append((line_no, "index or label out of range"))
                continue
            items.append(SentenceItem(sentence_id, tokens, rlf_index, label))
    report.produced = len(items)
    return items, report


@dataclass
class OcclusionAdapter:
    """Score tokens by leave-one-out occlusion against an oracle.

    importance_i = |loss(all tokens) - loss(tokens without token i)|,
    one baseline evaluation plus one per token. With `per_surface` set,
    each record is scored against a keyword oracle built from its own
    lengthened token instead of the shared oracle, which pins the whole
    importance mass on that token whenever it is unique in the sentence.
    """

    oracle: object
    model_id: str
    per_surface: bool = False

    def _oracle_for(self, item: SentenceItem):
        if self.per_surface:
            from .oracles import KeywordOracle

            return KeywordOracle(item.tokens[item.rlf_index])
        return self.oracle

    def score(self, item: SentenceItem) -> dict:
        oracle = self._oracle_for(item)
        tokens = list(item.tokens)
        baseline = float(oracle.evaluate(tokens, item.label))
        scores = []
        for i in range(len(tokens)):
            reduced = tokens[:i] + tokens[i + 1 :]
            scores.append(abs(baseline - float(oracle.evaluate(reduced, item.label))))
        return {
            "sentence_id": item.sentence_id,
            "model_id": self.model_id,
            "tokens": tokens,
            "raw_scores": scores,
            "rlf_index": item.rlf_index,
            "label": item.label,
        }

    def run(self, items: Iterable[SentenceItem]) -> list[dict]:
        return [self.score(item) for item in items]


def write_importance(path: str | Path, rows: Iterable[dict]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")))
            handle.write("\n")
            count += 1
    return count
