"""Detection and normalization of repetitive lengthening in tokens.

A token is lengthened either by a letter repeated LETTER_MIN or more times
in a row ("loooove") or by a trailing punctuation run ("book!!!!!"). Both
kinds reduce to a root form; letter reductions must land on a dictionary
word. Scope is ASCII letters; other scripts pass through undetected.
"""

import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from itertools import product
from pathlib import Path
from typing import Iterable

from .corpus import write_jsonl
from .errors import InputDomainError

LETTER_MIN = 3  # doubles are normal English spelling, triples are not
BANG_MIN = 2    # '!' and '?' lengthen from two onward
DOT_MIN = 4     # "..." is a plain ellipsis, four or more dots lengthen it
ROOT_DOTS = "..."

_LETTER_RUN = re.compile(r"([A-Za-z])\1{2,}", re.IGNORECASE)
_ANY_PUNCT_RUN = re.compile(r"!{2,}|\?{2,}|\.{4,}")
_TRAILING_PUNCT_RUN = re.compile(r"(!{2,}|\?{2,}|\.{4,})$")
_NUMBER = re.compile(r"[0-9,.]*[0-9][0-9,.]*")
_LETTER_CORE = re.compile(r"[A-Za-z](?:.*[A-Za-z])?", re.DOTALL)
_TOKEN = re.compile(r"\S+")

_BANG_COLLAPSE = re.compile(r"!{2,}")
_QUEST_COLLAPSE = re.compile(r"\?{2,}")
_DOT_COLLAPSE = re.compile(r"\.{4,}")

_CURRENCY_SIGNS = "$€£"


class RlfStyle(str, Enum):
    LETTER = "Letter"
    PUNCTUATION = "Punctuation"


@dataclass(frozen=True)
class RlfSpan:
    """One detected lengthened word within a sentence."""

    surface: str
    root: str
    generalized_form: str
    style: RlfStyle
    word_index: int
    char_span: tuple[int, int]
    pos_tag: str | None = None


@dataclass(frozen=True)
class Dictionary:
    """Case-insensitive word list; lookups lowercase the probe."""

    entries: frozenset[str]

    def __post_init__(self):
        if not self.entries:
            raise InputDomainError("dictionary must be non-empty")

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "Dictionary":
        return cls(frozenset(w.strip().lower() for w in words if w.strip()))

    @classmethod
    def load(cls, path: str | Path) -> "Dictionary":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_words(fh)


_BUNDLED: Dictionary | None = None


def bundled_dictionary() -> Dictionary:
    """The American English word list shipped with the package."""
    global _BUNDLED
    if _BUNDLED is None:
        resource = resources.files("rlfkit") / "resources" / "american_english.txt"
        text = resource.read_text(encoding="utf-8")
        _BUNDLED = Dictionary.from_words(text.splitlines())
    return _BUNDLED


@dataclass
class FormFrequencyTable:
    """Occurrence counts of generalized forms over one corpus pass."""

    counts: Counter

    @classmethod
    def from_spans(cls, spans: Iterable[RlfSpan]) -> "FormFrequencyTable":
        return cls(Counter(span.generalized_form for span in spans))

    def merge(self, other: "FormFrequencyTable") -> None:
        self.counts.update(other.counts)

    def write(self, path: str | Path) -> int:
        rows = (
            {"generalized_form": form, "count": count}
            for form, count in sorted(self.counts.items())
        )
        return write_jsonl(path, rows)

    @classmethod
    def load(cls, path: str | Path) -> "FormFrequencyTable":
        from .corpus import iter_jsonl

        counts: Counter = Counter()
        for _, obj in iter_jsonl(path):
            if obj is not None:
                counts[obj["generalized_form"]] = int(obj["count"])
        return cls(counts)


@dataclass
class DetectionReport:
    """Why scanned tokens were dropped, for auditing."""

    excluded: Counter = field(default_factory=Counter)
    unreduced: int = 0  # letter run present but no dictionary reduction
    ambiguous: int = 0  # more than one dictionary reduction existed


def rlf_search(text: str) -> bool:
    """Cheap screen: does the text contain any qualifying repetition run?

    Used for document- and sentence-level fast rejection. A true result
    does not guarantee extraction finds a span (exclusions and the
    dictionary apply later); a false result guarantees it will not.
    """
    return bool(_LETTER_RUN.search(text) or _ANY_PUNCT_RUN.search(text))


def exclusion_class(token: str) -> str | None:
    """Class name when the token is exempt from detection, else None."""
    if token.startswith("@"):
        return "at-mention"
    low = token.lower()
    if "://" in low or low.startswith("www."):
        return "url"
    if _NUMBER.fullmatch(token):
        return "number"
    if len(token) > 1 and token[0] in _CURRENCY_SIGNS and token[1].isdigit():
        return "currency"
    return None


def _char_runs(token: str) -> list[str]:
    """Split into maximal same-character runs; letters compare case-insensitively."""
    runs = []
    i = 0
    n = len(token)
    while i < n:
        c = token[i]
        j = i + 1
        if c.isascii() and c.isalpha():
            low = c.lower()
            while j < n and token[j].lower() == low:
                j += 1
        else:
            while j < n and token[j] == c:
                j += 1
        runs.append(token[i:j])
        i = j
    return runs


def _is_ascii_letter(c: str) -> bool:
    return c.isascii() and c.isalpha()


def generalized_form(token: str) -> str:
    """Collapse qualifying runs to "c+" patterns, lowercasing letters.

    Letter runs of LETTER_MIN or more become the lowercased letter plus '+';
    '!' and '?' runs of BANG_MIN or more become the mark plus '+'; dot runs
    of DOT_MIN or more become "...+" (the reduced ellipsis plus '+').
    """
    out = []
    for run in _char_runs(token):
        c = run[0]
        if _is_ascii_letter(c):
            out.append(c.lower() + "+" if len(run) >= LETTER_MIN else run.lower())
        elif c in "!?" and len(run) >= BANG_MIN:
            out.append(c + "+")
        elif c == "." and len(run) >= DOT_MIN:
            out.append(ROOT_DOTS + "+")
        else:
            out.append(run)
    return "".join(out)


def root_candidates(token: str, dictionary: Dictionary) -> list[str]:
    """All dictionary reductions of the token, best first.

    Every run of LETTER_MIN or more characters is shortened to 1 or 2 of its
    leading characters; shorter runs stay verbatim. Candidates are kept when
    their lowercase form is in the dictionary, ordered by fewest characters,
    then by preferring length-1 keeps left to right, then lexicographically.
    """
    runs = _char_runs(token)
    long_indices = [i for i, run in enumerate(runs) if len(run) >= LETTER_MIN]
    if not long_indices:
        return []
    ranked = []
    for keeps in product((1, 2), repeat=len(long_indices)):
        parts = list(runs)
        for idx, keep in zip(long_indices, keeps):
            parts[idx] = runs[idx][:keep]
        candidate = "".join(parts)
        if candidate in dictionary:
            ranked.append((len(candidate), keeps, candidate))
    ranked.sort()
    return [candidate for _, _, candidate in ranked]


def reduce_to_root(token: str, dictionary: Dictionary) -> str | None:
    """Best dictionary reduction of a letter-lengthened token, or None."""
    candidates = root_candidates(token, dictionary)
    return candidates[0] if candidates else None


def reduce_punct_root(token: str) -> str:
    """Reduce a trailing punctuation run: '!'/'?' to one mark, dots to "..."."""
    m = _TRAILING_PUNCT_RUN.search(token)
    if m is None:
        raise InputDomainError(f"no qualifying trailing punctuation run: {token!r}")
    stem = token[: m.start()]
    return stem + (ROOT_DOTS if m.group(1)[0] == "." else m.group(1)[0])


def _collapse_affix_runs(affix: str) -> str:
    affix = _BANG_COLLAPSE.sub("!", affix)
    affix = _QUEST_COLLAPSE.sub("?", affix)
    return _DOT_COLLAPSE.sub(ROOT_DOTS, affix)


def scan_word(
    token: str,
    dictionary: Dictionary,
    *,
    word_index: int = 0,
    char_start: int = 0,
    report: DetectionReport | None = None,
) -> RlfSpan | None:
    """Detect one token, returning its span or None.

    Letter style wins when a letter run meets its threshold even if trailing
    punctuation also qualifies; the root then reduces both. A letter-style
    token whose core has no dictionary reduction is dropped (and counted in
    the report), as are tokens in an exclusion class.
    """
    if not token:
        return None
    letter_hit = _LETTER_RUN.search(token)
    trailing_hit = _TRAILING_PUNCT_RUN.search(token)
    if letter_hit is None and trailing_hit is None:
        return None
    excluded = exclusion_class(token)
    if excluded is not None:
        if report is not None:
            report.excluded[excluded] += 1
        return None
    if letter_hit is not None:
        style = RlfStyle.LETTER
        core_match = _LETTER_CORE.search(token)
        prefix = token[: core_match.start()]
        suffix = token[core_match.end() :]
        candidates = root_candidates(core_match.group(0), dictionary)
        if not candidates:
            if report is not None:
                report.unreduced += 1
            return None
        if len(candidates) > 1 and report is not None:
            report.ambiguous += 1
        root = _collapse_affix_runs(prefix) + candidates[0] + _collapse_affix_runs(suffix)
    else:
        style = RlfStyle.PUNCTUATION
        root = reduce_punct_root(token)
    return RlfSpan(
        surface=token,
        root=root,
        generalized_form=generalized_form(token),
        style=style,
        word_index=word_index,
        char_span=(char_start, char_start + len(token)),
    )


def scan_text(
    text: str,
    dictionary: Dictionary,
    report: DetectionReport | None = None,
) -> list[RlfSpan]:
    """Scan every whitespace-delimited token of a sentence."""
    spans = []
    for word_index, m in enumerate(_TOKEN.finditer(text)):
        span = scan_word(
            m.group(0),
            dictionary,
            word_index=word_index,
            char_start=m.start(),
            report=report,
        )
        if span is not None:
            spans.append(span)
    return spans


def has_potential_rlf_word(text: str) -> bool:
    """Dictionary-free token-level screen used to pick control sentences.

    True when any non-excluded token has a qualifying letter run or trailing
    punctuation run. Sentences passing this screen are never used as
    controls, even when the dictionary reduction would fail.
    """
    for m in _TOKEN.finditer(text):
        token = m.group(0)
        if _LETTER_RUN.search(token) is None and _TRAILING_PUNCT_RUN.search(token) is None:
            continue
        if exclusion_class(token) is None:
            return True
    return False


def filter_by_form_frequency(
    spans: Iterable[RlfSpan],
    freq: FormFrequencyTable,
    min_count: int = 100,
) -> tuple[list[RlfSpan], list[RlfSpan]]:
    """Keep spans whose generalized form occurs strictly more than min_count.

    Returns (kept, dropped).
    """
    kept, dropped = [], []
    for span in spans:
        if freq.counts.get(span.generalized_form, 0) > min_count:
            kept.append(span)
        else:
            dropped.append(span)
    return kept, dropped


def span_to_json(span: RlfSpan) -> dict:
    obj = {
        "surface": span.surface,
        "root": span.root,
        "generalized_form": span.generalized_form,
        "style": span.style.value,
        "word_index": span.word_index,
        "char_span": list(span.char_span),
    }
    if span.pos_tag is not None:
        obj["pos_tag"] = span.pos_tag
    return obj


def span_from_json(obj: dict) -> RlfSpan:
    return RlfSpan(
        surface=obj["surface"],
        root=obj["root"],
        generalized_form=obj["generalized_form"],
        style=RlfStyle(obj["style"]),
        word_index=int(obj["word_index"]),
        char_span=(int(obj["char_span"][0]), int(obj["char_span"][1])),
        pos_tag=obj.get("pos_tag"),
    )
