"""End-to-end acceptance checks, one test per shipped guarantee.

Each test prints one PASS line on success and carries its tolerance and
runtime bound inline. Reference values come from independent in-file
oracles (exact fraction arithmetic, exhaustive enumeration) rather than
from the code under test.
"""

import json
import math
import random
import time
from fractions import Fraction
from itertools import product

import pytest
from click.testing import CliRunner

from conftest import REFERENCE_ROWS, reference_documents
from oracles import (
    ConstantLoss,
    KeywordCountLoss,
    TokenCountLoss,
    brute_force_root,
    elongate_word,
    fraction_alpha,
    fraction_normalize,
)
from rlfkit.cli import main as cli_main
from rlfkit.corpus import Document, Sentence, document_to_json, write_jsonl
from rlfkit.detect import bundled_dictionary, reduce_to_root, scan_text
from rlfkit.errors import UndefinedMetricError
from rlfkit.explain import WisRecord, explainability_score, normalize_wis, occlusion_wis
from rlfkit.instruct import build_instruction_dataset, parse_wis_scores, render_wis_target
from rlfkit.metrics import (
    AnnotationTable,
    doc_sentence_confusion,
    krippendorff_alpha,
    macro_f1,
    pearson_corr,
)
from rlfkit.pipeline import (
    BalancePolicy,
    RlfSentenceRecord,
    balance,
    extract_corpus,
    pair_control,
    record_stratum,
)
from test_metrics import preds_from_pairs


def _report(name: str) -> None:
    print(f"ACCEPTANCE {name}: PASS")


def test_reference_extraction_fidelity(tmp_path):
    """The five reference sentences extract to their exact
    (surface, root, style, label) tuples; exact match, under one second."""
    corpus = tmp_path / "corpus.jsonl"
    write_jsonl(corpus, (document_to_json(d) for d in reference_documents()))
    out = tmp_path / "records.jsonl"
    runner = CliRunner()
    started = time.perf_counter()
    result = runner.invoke(
        cli_main,
        ["extract", "--input", str(corpus), "--output", str(out)],
        catch_exceptions=False,
    )
    elapsed = time.perf_counter() - started
    assert result.exit_code == 0, result.output
    rows = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
    assert len(rows) == 5
    for row, (_, label, (surface, root, _, style)) in zip(rows, REFERENCE_ROWS):
        span = row["spans"][0]
        assert (span["surface"], span["root"], span["style"], row["label"]) == (
            surface,
            root,
            style,
            label,
        )
    assert elapsed < 1.0, f"extraction took {elapsed:.2f}s"
    _report("reference-extraction-fidelity")


def test_root_reduction_matches_brute_force_on_1000_elongations():
    """reduce_to_root agrees with the exhaustive reducer on 1,000 fuzzed
    elongations of dictionary words; 100% agreement, under ten seconds."""
    dictionary = bundled_dictionary()
    words = set(dictionary.entries)
    pool = sorted(w for w in words if 2 <= len(w) <= 12)
    rng = random.Random(42)
    started = time.perf_counter()
    for _ in range(1000):
        token = elongate_word(rng.choice(pool), rng)
        assert reduce_to_root(token, dictionary) == brute_force_root(token, words), token
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"fuzz took {elapsed:.2f}s"
    _report("root-reduction-brute-force-equivalence")


def test_normalization_properties_on_10000_vectors():
    """10,000 random score vectors: simplex sum within 1e-9, range [0, 1],
    affine invariance within 1e-9, argmax preserved on unique-max vectors.
    Under five seconds."""
    rng = random.Random(4242)
    started = time.perf_counter()
    for _ in range(10_000):
        n = rng.randint(1, 40)
        raw = [rng.uniform(0.0, 100.0) for _ in range(n)]
        got = normalize_wis(raw)

        assert abs(math.fsum(got) - 1.0) < 1e-9
        assert all(0.0 <= v <= 1.0 for v in got)

        a = rng.uniform(0.1, 10.0)
        b = rng.uniform(-50.0, 50.0)
        affine = normalize_wis([a * v + b for v in raw])
        assert all(abs(x - y) < 1e-9 for x, y in zip(got, affine))

        top = max(raw)
        if raw.count(top) == 1:
            assert got.index(max(got)) == raw.index(top)
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"property sweep took {elapsed:.2f}s"
    _report("normalization-properties")


# 50 hand-built (raw_scores, lengthened-token index) rows. The expected
# mean below was computed independently with exact fraction arithmetic:
# 10648374006110849297/48758160475259235000.
SEXP_FIXTURE = [
    ([4.0, 5.0, 4.0, 2.0, 8.0, 4.0], 0),
    ([6.0, 4.0], 1),
    ([6.0, 2.0, 8.5, 0.5, 2.0, 3.0, 2.0], 5),
    ([3.0, 5.0, 8.0, 1.0, 1.0, 4.0], 3),
    ([7.0, 9.0], 0),
    ([8.0, 5.0, 0.0, 6.5, 5.5, 9.0, 0.5], 6),
    ([7.0, 5.0, 9.0, 0.0, 6.0, 3.0, 1.0], 4),
    ([8.0, 5.5, 0.5], 1),
    ([3.0, 9.5], 0),
    ([5.5, 5.0, 2.5, 5.0], 0),
    ([4.0, 5.0, 0.0, 0.0, 5.0, 0.0], 3),
    ([0.0, 3.0, 4.0, 4.0, 1.0, 7.0, 0.0], 4),
    ([2.0, 6.0, 7.0, 9.0, 6.0, 2.0], 1),
    ([1.5, 3.0, 0.5, 8.5], 2),
    ([5.0, 5.0, 0.5, 2.5, 6.5, 1.0, 4.5, 4.0], 6),
    ([1.0, 1.0, 1.0, 1.0, 1.0], 4),
    ([3.5, 8.5, 4.0, 9.0, 2.5, 4.5, 0.5], 5),
    ([7.0, 3.0, 8.0, 6.0, 8.0], 3),
    ([3.0, 3.5], 1),
    ([5.5, 9.5, 0.0, 9.0], 3),
    ([5.0, 9.0], 0),
    ([5.0, 5.0, 2.0, 3.0, 4.0, 6.0], 2),
    ([8.0, 1.0, 8.0, 0.0, 3.0], 4),
    ([2.0, 7.0, 7.0, 7.0, 8.0, 2.0, 8.0], 4),
    ([4.0, 4.0, 2.0, 0.0, 7.0], 2),
    ([0.0, 4.0, 1.0, 8.0, 0.0, 0.0, 1.0, 7.0], 4),
    ([1.0, 0.0, 7.0, 8.0, 3.0, 0.0], 3),
    ([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], 0),
    ([4.0, 4.0, 5.5], 1),
    ([6.0, 6.0, 0.0, 8.0, 5.0, 1.0], 5),
    ([10.0, 4.5, 5.0, 5.0, 1.5, 5.0, 2.0, 8.5], 3),
    ([7.0, 1.5, 4.0, 3.5, 1.0], 3),
    ([7.5, 5.5, 2.0, 3.0], 1),
    ([6.0, 7.0, 8.0, 6.0, 8.0, 9.0, 2.0, 8.0], 2),
    ([5.0, 7.0, 4.0], 1),
    ([2.5, 2.0], 0),
    ([8.0, 7.0, 8.0, 2.0, 4.0], 1),
    ([3.0, 5.0, 0.0, 1.0, 5.0], 3),
    ([8.0, 6.0], 0),
    ([3.0, 3.0, 3.0], 0),
    ([7.0, 5.0, 2.0, 2.0], 2),
    ([5.0, 9.0, 8.0, 2.0], 3),
    ([10.5, 10.0], 1),
    ([8.0, 5.0, 6.0], 1),
    ([4.5, 6.0, 10.0, 3.0], 2),
    ([5.0, 5.0], 0),
    ([7.5, 6.0, 6.5, 9.5], 2),
    ([2.0, 6.0, 3.0, 3.0, 3.0, 5.0, 3.0], 1),
    ([6.0, 1.0, 7.0, 3.0, 5.5, 8.0, 2.0, 9.0], 7),
    ([1.0, 2.0, 3.0, 6.0, 6.0, 3.0, 6.0], 3),
]
SEXP_EXPECTED = 0.21839162721313132


def test_explainability_score_on_50_record_fixture():
    """The dataset score equals the independently computed mean within 1e-9,
    and raising the lengthened token's raw score never lowers its normalized
    value across 1,000 random perturbations."""
    records = [
        WisRecord(
            sentence_id=f"fx{i}#s0",
            model_id="fixture",
            tokens=tuple(f"w{k}" for k in range(len(raw))),
            raw_scores=tuple(raw),
            rlf_index=idx,
        )
        for i, (raw, idx) in enumerate(SEXP_FIXTURE)
    ]
    report = explainability_score(records)
    assert report.n_records == 50 and report.n_rejected == 0
    assert abs(report.s_exp - SEXP_EXPECTED) < 1e-9

    oracle_mean = sum(
        fraction_normalize(raw)[idx] for raw, idx in SEXP_FIXTURE
    ) / Fraction(50)
    assert abs(report.s_exp - float(oracle_mean)) < 1e-12

    rng = random.Random(7)
    for _ in range(1000):
        raw, idx = SEXP_FIXTURE[rng.randrange(len(SEXP_FIXTURE))]
        before = normalize_wis(raw)[idx]
        bumped = list(raw)
        bumped[idx] += rng.uniform(1e-6, 50.0)
        after = normalize_wis(bumped)[idx]
        assert after >= before - 1e-12, (raw, idx, bumped[idx])
    _report("explainability-score-fixture-and-monotonicity")


def test_occlusion_reproduces_stub_oracle_scores_exactly():
    """Occlusion deltas against the three analytic stubs are exact."""
    cases = [
        ["we", "loooove", "this", "place"],
        ["read", "this", "book!!!!!"],
        ["so", "so", "good"],
    ]
    for tokens in cases:
        n = len(tokens)
        assert occlusion_wis(tokens, 1, TokenCountLoss()) == [1.0] * n
        assert occlusion_wis(tokens, 0, ConstantLoss()) == [0.0] * n
        for keyword in set(tokens):
            expected = [1.0 if t == keyword else 0.0 for t in tokens]
            assert occlusion_wis(tokens, 1, KeywordCountLoss(keyword)) == expected
    _report("occlusion-stub-contract")


def test_metric_fixtures_and_oracles():
    """Confusion counts {127, 9, 11, 53} exact; macro F1 equals 11/15 within
    1e-9; agreement matches the exact-fraction oracle within 1e-12 over an
    exhaustive sweep of 2x2 tables plus fuzzed tables up to 8 items x 4
    annotators; correlation of a duplicated vector is exactly 1.0."""
    pairs = [(1, 1)] * 127 + [(1, 0)] * 9 + [(0, 1)] * 11 + [(0, 0)] * 53
    assert doc_sentence_confusion(pairs) == {"PP": 127, "PN": 9, "NP": 11, "NN": 53}

    f1_pairs = [(1, 1)] * 4 + [(0, 0)] * 2 + [(0, 1), (1, 0)]
    assert abs(macro_f1(preds_from_pairs(f1_pairs)) - 11 / 15) < 1e-9

    def check(table, items, annotators):
        expected = fraction_alpha(table.values, items, annotators)
        if expected is None:
            with pytest.raises(UndefinedMetricError):
                krippendorff_alpha(table)
        else:
            assert abs(krippendorff_alpha(table) - float(expected)) < 1e-12

    items = ("i0", "i1")
    annotators = ("a", "b")
    cells = [(i, a) for i in items for a in annotators]
    for assignment in product([None, 0, 1], repeat=4):
        values = {c: v for c, v in zip(cells, assignment) if v is not None}
        check(AnnotationTable(items, annotators, values), items, annotators)

    rng = random.Random(99)
    for _ in range(500):
        n_items = rng.randint(1, 8)
        n_annotators = rng.randint(2, 4)
        items = tuple(f"i{k}" for k in range(n_items))
        annotators = tuple(f"a{k}" for k in range(n_annotators))
        values = {
            (i, a): rng.randrange(rng.randint(1, 3))
            for i in items
            for a in annotators
            if rng.random() < 0.8
        }
        check(AnnotationTable(items, annotators, values), items, annotators)

    xs = [3.7, 0.1, 55.0, 2.2, 9.9, 4.0]
    assert pearson_corr(xs, list(xs)) == 1.0
    _report("metric-fixtures-and-oracles")


def _write_synthetic_corpus(path, n_docs=10_000):
    rng = random.Random(99)
    dictionary = bundled_dictionary()
    pool = sorted(w for w in dictionary.entries if 3 <= len(w) <= 8)
    domains = ["Books", "Electronics", "Restaurants", "SocialMedia", "Hotels"]
    rows = []
    for i in range(n_docs):
        sentences = []
        for _ in range(rng.randint(1, 3)):
            tokens = rng.sample(pool, rng.randint(5, 9))
            style = rng.random()
            if style < 0.4:
                j = rng.randrange(len(tokens))
                tokens[j] = elongate_word(tokens[j], rng)
            elif style < 0.55:
                tokens[-1] += "!" * rng.randint(2, 6)
            elif style < 0.65:
                tokens[-1] += "." * rng.randint(4, 9)
            sentence = " ".join(tokens)
            if sentence[-1] not in ".!?":
                sentence += rng.choice([".", "!", "?"])
            sentences.append(sentence)
        rows.append(
            {
                "id": f"doc{i:05d}",
                "domain": domains[i % len(domains)],
                "text": " ".join(sentences),
                "label": i % 2,
            }
        )
    write_jsonl(path, rows)


def test_determinism_of_extract_pair_balance(tmp_path):
    """Extraction with pairing plus balancing under seed 42 is byte-identical
    across reruns and across worker counts; under 30 seconds on a synthetic
    10k-document corpus."""
    corpus = tmp_path / "corpus.jsonl"
    _write_synthetic_corpus(corpus)
    runner = CliRunner()
    started = time.perf_counter()

    def run_extract(name, workers):
        out = tmp_path / name
        result = runner.invoke(
            cli_main,
            [
                "extract",
                "--input",
                str(corpus),
                "--output",
                str(out),
                "--seed",
                "42",
                "--workers",
                str(workers),
            ],
            catch_exceptions=False,
        )
        assert result.exit_code == 0, result.output
        return out

    first = run_extract("run1.jsonl", workers=4)
    second = run_extract("run2.jsonl", workers=4)
    serial = run_extract("run3.jsonl", workers=1)
    assert first.read_bytes() == second.read_bytes() == serial.read_bytes()
    assert len(first.read_bytes()) > 0

    def run_balance(name):
        out = tmp_path / name
        result = runner.invoke(
            cli_main,
            [
                "balance",
                "--input",
                str(first),
                "--output",
                str(out),
                "--seed",
                "42",
            ],
            catch_exceptions=False,
        )
        assert result.exit_code == 0, result.output
        return out

    balanced_a = run_balance("balanced1.jsonl")
    balanced_b = run_balance("balanced2.jsonl")
    assert balanced_a.read_bytes() == balanced_b.read_bytes()
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"determinism sweep took {elapsed:.2f}s"
    _report("seeded-determinism")


def test_instruction_round_trip_on_200_records(dictionary):
    """Render-then-parse of 200 structured score targets reproduces the raw
    scores exactly, and the instruction dataset holds two samples per paired
    record."""
    docs = [
        Document(
            id=f"d{i:03d}",
            domain="Hotels",
            text=(
                "I loooove this hotel so very much. "
                "The breakfast was fresh and generous every single day."
            ),
            label=i % 2,
        )
        for i in range(200)
    ]
    records, doc_sentences, _ = extract_corpus(docs, dictionary)
    records = pair_control(records, doc_sentences)
    assert len(records) == 200
    assert all(r.pair_sentence is not None for r in records)

    rng = random.Random(2024)
    wis_by_sentence = {}
    for record in records:
        tokens = tuple(record.sentence.text.split())
        scores = tuple(float(rng.randint(1, 5)) for _ in tokens)
        wis_by_sentence[record.sentence_id] = WisRecord(
            sentence_id=record.sentence_id,
            model_id="fixture",
            tokens=tokens,
            raw_scores=scores,
            rlf_index=record.spans[0].word_index,
        )

    for wis in wis_by_sentence.values():
        target = render_wis_target(wis.tokens, wis.raw_scores)
        parsed, repair = parse_wis_scores(target, wis.tokens)
        assert tuple(parsed) == wis.raw_scores
        assert repair.filled == repair.clamped == repair.malformed_lines == 0

    samples, report = build_instruction_dataset(records, wis_by_sentence)
    assert len(samples) == 2 * len(records)
    assert report.missing_wis == 0 and report.unrenderable_wis == 0
    _report("instruction-round-trip")


def test_balance_rates_on_10k_per_stratum(dictionary):
    """Kept fractions stay within 3 percentage points of the policy rates on
    10,000 records per stratum and are exactly seed-reproducible."""
    texts = {
        "letter": "i loooove this place so",
        "ellipsis": "going back next year............. soon",
        "other_punct": "you must read this book!!!!!",
    }
    span_cache = {
        stratum: scan_text(text, dictionary) for stratum, text in texts.items()
    }
    records = []
    for stratum, text in texts.items():
        spans = tuple(span_cache[stratum])
        for i in range(10_000):
            doc_id = f"{stratum}-{i}"
            records.append(
                RlfSentenceRecord(
                    doc_id=doc_id,
                    domain="Hotels",
                    sentence=Sentence.from_text(doc_id, 0, text),
                    spans=spans,
                    label=1,
                )
            )
    policy = BalancePolicy()  # letter 0.20, ellipsis 0.08, other 1.0
    kept, report = balance(records, policy)
    counts = {stratum: 0 for stratum in texts}
    for record in kept:
        counts[record_stratum(record)] += 1
    assert abs(counts["letter"] / 10_000 - 0.20) <= 0.03
    assert abs(counts["ellipsis"] / 10_000 - 0.08) <= 0.03
    assert counts["other_punct"] == 10_000

    again, _ = balance(records, BalancePolicy())
    assert again == kept
    _report("balance-keep-rates")
