"""Domain types and line-delimited I/O for documents and sentences.

One JSON object per line, UTF-8, LF-terminated. Writers emit keys in a
fixed order and omit absent optional fields, so a load/write cycle over
valid lines is byte-identical.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CorpusFormatError, InputDomainError

# Binary sentiment labels are plain ints restricted to these two values.
POSITIVE = 1
NEGATIVE = 0

# Domains seen in the source corpora; any other string is preserved as-is.
KNOWN_DOMAINS = ("Books", "Electronics", "Restaurants", "SocialMedia", "Hotels")

# A corpus file with more than this fraction of bad lines is rejected outright.
MAX_MALFORMED_FRACTION = 0.10


def map_rating_to_label(rating: int) -> int | None:
    """Map a 1-5 star rating to a binary label; 3 stars map to None (excluded)."""
    if not isinstance(rating, int) or isinstance(rating, bool) or not 1 <= rating <= 5:
        raise InputDomainError(f"rating must be an integer in 1..5, got {rating!r}")
    if rating <= 2:
        return NEGATIVE
    if rating >= 4:
        return POSITIVE
    return None


@dataclass(frozen=True)
class Document:
    """A labeled source text (review or post)."""

    id: str
    domain: str
    text: str
    rating: int | None = None
    label: int | None = None

    def effective_label(self) -> int | None:
        """The binary label, derived from the rating when not given directly."""
        if self.label is not None:
            return self.label
        if self.rating is not None:
            return map_rating_to_label(self.rating)
        return None


@dataclass(frozen=True)
class Sentence:
    """One sentence of a document, with its position and simple size stats."""

    doc_id: str
    index: int
    text: str
    char_len: int
    word_count: int

    @classmethod
    def from_text(cls, doc_id: str, index: int, text: str) -> "Sentence":
        if not text.strip():
            raise InputDomainError("sentence text must be non-empty")
        return cls(
            doc_id=doc_id,
            index=index,
            text=text,
            char_len=len(text),
            word_count=len(text.split()),
        )


@dataclass
class LoadReport:
    """Counts from one corpus read: lines kept and lines skipped with reasons."""

    read: int = 0
    skipped: int = 0
    skipped_lines: list[tuple[int, str]] = None

    def __post_init__(self):
        if self.skipped_lines is None:
            self.skipped_lines = []

    def skip(self, line_number: int, reason: str) -> None:
        self.skipped += 1
        self.skipped_lines.append((line_number, reason))


def dump_line(obj: dict) -> str:
    """Serialize one record to its canonical single-line JSON form."""
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_jsonl(path: str | Path, objs: Iterable[dict]) -> int:
    """Write records one per line; returns the number of lines written."""
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for obj in objs:
            fh.write(dump_line(obj))
            fh.write("\n")
            n += 1
    return n


def iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict | None]]:
    """Yield (line_number, parsed object) pairs; unparseable lines yield None."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                yield lineno, None
                continue
            yield lineno, obj if isinstance(obj, dict) else None


def document_to_json(doc: Document) -> dict:
    obj = {"id": doc.id, "domain": doc.domain, "text": doc.text}
    if doc.rating is not None:
        obj["rating"] = doc.rating
    if doc.label is not None:
        obj["label"] = doc.label
    return obj


def document_from_json(obj: dict) -> Document:
    """Build a Document from one parsed record, enforcing field invariants."""
    doc_id = obj.get("id")
    domain = obj.get("domain")
    text = obj.get("text")
    if not isinstance(doc_id, str) or not doc_id:
        raise InputDomainError("missing or empty 'id'")
    if not isinstance(domain, str) or not domain:
        raise InputDomainError("missing or empty 'domain'")
    if not isinstance(text, str) or not text.strip():
        raise InputDomainError("missing or empty 'text'")
    rating = obj.get("rating")
    label = obj.get("label")
    if rating is not None:
        if not isinstance(rating, int) or isinstance(rating, bool) or not 1 <= rating <= 5:
            raise InputDomainError(f"rating out of range: {rating!r}")
    if label is not None:
        if not isinstance(label, int) or isinstance(label, bool) or label not in (0, 1):
            raise InputDomainError(f"label must be 0 or 1: {label!r}")
    if rating is not None and label is not None and label != map_rating_to_label(rating):
        raise InputDomainError(f"label {label} contradicts rating {rating}")
    return Document(id=doc_id, domain=domain, text=text, rating=rating, label=label)


def load_documents(path: str | Path) -> tuple[list[Document], LoadReport]:
    """Load a document corpus, skipping and reporting malformed lines.

    Raises CorpusFormatError when more than MAX_MALFORMED_FRACTION of
    non-empty lines are unusable. Unreadable files raise OSError.
    """
    docs: list[Document] = []
    report = LoadReport()
    seen_ids: set[str] = set()
    total = 0
    for lineno, obj in iter_jsonl(path):
        total += 1
        if obj is None:
            report.skip(lineno, "invalid JSON")
            continue
        try:
            doc = document_from_json(obj)
        except InputDomainError as exc:
            report.skip(lineno, str(exc))
            continue
        if doc.id in seen_ids:
            report.skip(lineno, f"duplicate id {doc.id!r}")
            continue
        seen_ids.add(doc.id)
        docs.append(doc)
        report.read += 1
    if total and report.skipped / total > MAX_MALFORMED_FRACTION:
        raise CorpusFormatError(
            f"{report.skipped} of {total} lines malformed in {path}"
        )
    return docs, report


def sentence_to_json(sentence: Sentence) -> dict:
    return {
        "doc_id": sentence.doc_id,
        "index": sentence.index,
        "text": sentence.text,
        "char_len": sentence.char_len,
        "word_count": sentence.word_count,
    }


def sentence_from_json(obj: dict) -> Sentence:
    return Sentence(
        doc_id=obj["doc_id"],
        index=int(obj["index"]),
        text=obj["text"],
        char_len=int(obj["char_len"]),
        word_count=int(obj["word_count"]),
    )


def sentence_id(doc_id: str, index: int) -> str:
    """Stable sentence identifier used across all interchange files."""
    return f"{doc_id}#s{index}"
