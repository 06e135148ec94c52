"""Shared fixtures: the five-document reference corpus and JSONL helpers."""

import json

import pytest

from rlfkit.corpus import Document
from rlfkit.detect import Dictionary, bundled_dictionary

# Reference rows: sentence, label, expected (surface, root, generalized, style).
REFERENCE_ROWS = [
    (
        "Do yourself a favour a read this book!!!!!",
        1,
        ("book!!!!!", "book!", "book!+", "Punctuation"),
    ),
    (
        "I loooove my new phone case.",
        1,
        ("loooove", "love", "lo+ve", "Letter"),
    ),
    (
        "We are from Seattle and this coffee is amazing!!!!!",
        1,
        ("amazing!!!!!", "amazing!", "amazing!+", "Punctuation"),
    ),
    (
        "SOOOO bummed i'm going to miss sam's party tonight.",
        0,
        ("SOOOO", "SO", "so+", "Letter"),
    ),
    (
        "I am looking to go back next year.............",
        0,
        ("year.............", "year...", "year...+", "Punctuation"),
    ),
]


def reference_documents() -> list[Document]:
    domains = ["books", "cellphones", "yelp", "social", "yelp"]
    return [
        Document(id=f"ref{i}", domain=domains[i], text=row[0], label=row[1])
        for i, row in enumerate(REFERENCE_ROWS)
    ]


@pytest.fixture
def reference_docs() -> list[Document]:
    return reference_documents()


@pytest.fixture(scope="session")
def dictionary() -> Dictionary:
    return bundled_dictionary()


@pytest.fixture(scope="session")
def dictionary_words(dictionary) -> set[str]:
    return set(dictionary.entries)


@pytest.fixture
def write_jsonl_file(tmp_path):
    def _write(name: str, rows):
        path = tmp_path / name
        with path.open("w", encoding="utf-8") as handle:
            for row in rows:
                if isinstance(row, str):
                    handle.write(row + "\n")
                else:
                    handle.write(json.dumps(row, ensure_ascii=False) + "\n")
        return path

    return _write
