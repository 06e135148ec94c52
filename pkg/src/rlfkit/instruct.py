"""Instruction-prompt construction and structured-response parsing.

Two tasks share one template: a word-importance task (score each word 1-5
and answer line by line) and a sentiment task (answer "1" or "0"). Task
wording lives in versioned resource files so it can be pinned or swapped
without code changes.
"""

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .corpus import LoadReport, iter_jsonl, write_jsonl
from .errors import InputDomainError, WisParseError
from .explain import WisRecord

TASK_SA = "SA"
TASK_WIS = "WIS"

SCORE_MIN = 1
SCORE_MAX = 5

WIS_TEMPLATE_RESOURCE = "wis_task_v1.txt"
SA_TEMPLATE_RESOURCE = "sa_task_v1.txt"

# Responses aligning fewer than this fraction of the expected tokens are
# rejected instead of repaired.
MIN_ALIGNED_FRACTION = 0.5


@lru_cache(maxsize=None)
def _load_task_text(name: str) -> str:
    resource = resources.files("rlfkit") / "resources" / "prompts" / name
    text = resource.read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return "\n".join(lines).strip()


@dataclass(frozen=True)
class PromptTemplate:
    """Task instruction plus input; output text present only for training."""

    task_instruction: str
    input_text: str
    output_text: str | None = None

    def render(self) -> str:
        parts = [
            "### Task Instruction:",
            self.task_instruction,
            "",
            "### Input:",
            self.input_text,
            "",
            "### Output:",
        ]
        if self.output_text is not None:
            parts.append(self.output_text)
        return "\n".join(parts) + "\n"


@dataclass(frozen=True)
class InstructionSample:
    task: str
    sentence_id: str
    rendered: str
    target: str


def build_wis_prompt(sentence: str) -> PromptTemplate:
    """Prompt asking for per-word 1-5 importance scores, line by line."""
    if not sentence.strip():
        raise InputDomainError("sentence must be non-empty")
    return PromptTemplate(
        task_instruction=_load_task_text(WIS_TEMPLATE_RESOURCE),
        input_text=sentence,
    )


def build_sa_prompt(sentence: str) -> PromptTemplate:
    """Prompt asking for the binary sentiment as a single character."""
    if not sentence.strip():
        raise InputDomainError("sentence must be non-empty")
    return PromptTemplate(
        task_instruction=_load_task_text(SA_TEMPLATE_RESOURCE),
        input_text=sentence,
    )


def render_wis_target(tokens, scores) -> str:
    """Canonical structured output: one "token: score" line per token."""
    if len(tokens) != len(scores):
        raise InputDomainError("tokens and scores must have equal length")
    lines = []
    for token, score in zip(tokens, scores):
        if score != int(score) or not SCORE_MIN <= score <= SCORE_MAX:
            raise InputDomainError(
                f"target score must be an integer in {SCORE_MIN}..{SCORE_MAX}: {score!r}"
            )
        lines.append(f"{token}: {int(score)}")
    return "\n".join(lines)


def has_renderable_scores(record: WisRecord) -> bool:
    """True when every raw score is an integer within the instructed range."""
    return all(
        score == int(score) and SCORE_MIN <= score <= SCORE_MAX
        for score in record.raw_scores
    )


@dataclass
class WisRepairReport:
    """What it took to align a response with the expected tokens."""

    aligned: int = 0
    filled: int = 0  # expected tokens absent from the response, scored SCORE_MIN
    clamped: int = 0
    malformed_lines: int = 0
    extra_lines: int = 0  # response lines matching no expected token


def _lcs_pairs(left: list[str], right: list[str]) -> list[tuple[int, int]]:
    """Index pairs of one longest common subsequence of the two lists."""
    n, m = len(left), len(right)
    lengths = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row = lengths[i]
        below = lengths[i + 1]
        for j in range(m - 1, -1, -1):
            if left[i] == right[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = max(below[j], row[j + 1])
    pairs = []
    i = j = 0
    while i < n and j < m:
        if left[i] == right[j]:
            pairs.append((i, j))
            i += 1
            j += 1
        elif lengths[i + 1][j] >= lengths[i][j + 1]:
            i += 1
        else:
            j += 1
    return pairs


def parse_wis_scores(
    response: str, expected_tokens
) -> tuple[list[float], WisRepairReport]:
    """Parse "token: score" lines, aligned tolerantly to the expected tokens.

    Token matching is case-insensitive; dropped or duplicated tokens are
    bridged by longest-common-subsequence alignment. Missing tokens are
    filled with the minimum score, out-of-range scores are clamped, and a
    response aligning under half the tokens raises WisParseError.
    """
    if not expected_tokens:
        raise InputDomainError("expected_tokens must be non-empty")
    report = WisRepairReport()
    got_tokens: list[str] = []
    got_scores: list[float] = []
    for raw_line in response.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        cut = line.rfind(":")
        if cut <= 0:
            report.malformed_lines += 1
            continue
        token = line[:cut].strip()
        try:
            value = float(line[cut + 1 :].strip())
        except ValueError:
            report.malformed_lines += 1
            continue
        if not token:
            report.malformed_lines += 1
            continue
        if value < SCORE_MIN or value > SCORE_MAX:
            value = min(float(SCORE_MAX), max(float(SCORE_MIN), value))
            report.clamped += 1
        got_tokens.append(token)
        got_scores.append(value)
    expected_lower = [t.lower() for t in expected_tokens]
    got_lower = [t.lower() for t in got_tokens]
    pairs = _lcs_pairs(expected_lower, got_lower)
    report.aligned = len(pairs)
    if report.aligned < MIN_ALIGNED_FRACTION * len(expected_tokens):
        raise WisParseError(
            f"aligned only {report.aligned} of {len(expected_tokens)} tokens"
        )
    scores = [float(SCORE_MIN)] * len(expected_tokens)
    matched = set()
    for i, j in pairs:
        scores[i] = got_scores[j]
        matched.add(j)
    report.filled = len(expected_tokens) - report.aligned
    report.extra_lines = len(got_tokens) - len(matched)
    return scores, report


def parse_wis_response(
    response: str,
    expected_tokens,
    *,
    sentence_id: str,
    model_id: str,
    rlf_index: int,
    label: int | None = None,
) -> tuple[WisRecord, WisRepairReport]:
    """Parse a response into a validated record for the given sentence."""
    scores, report = parse_wis_scores(response, expected_tokens)
    record = WisRecord(
        sentence_id=sentence_id,
        model_id=model_id,
        tokens=tuple(expected_tokens),
        raw_scores=tuple(scores),
        rlf_index=rlf_index,
        label=label,
    )
    record.validate()
    return record, report


@dataclass
class DatasetReport:
    sa_samples: int = 0
    wis_samples: int = 0
    missing_wis: int = 0  # records with no word-importance output
    unrenderable_wis: int = 0  # output present but scores not integers in range


def build_instruction_dataset(
    records,
    wis_by_sentence: dict[str, WisRecord] | None = None,
) -> tuple[list[InstructionSample], DatasetReport]:
    """One sentiment sample per record, plus a word-importance sample when a
    renderable output exists; ordered SA then WIS per record."""
    wis_by_sentence = wis_by_sentence or {}
    report = DatasetReport()
    samples: list[InstructionSample] = []
    for record in records:
        sid = record.sentence_id
        text = record.sentence.text
        samples.append(
            InstructionSample(
                task=TASK_SA,
                sentence_id=sid,
                rendered=build_sa_prompt(text).render(),
                target=str(record.label),
            )
        )
        report.sa_samples += 1
        wis = wis_by_sentence.get(sid)
        if wis is None:
            report.missing_wis += 1
            continue
        if not has_renderable_scores(wis):
            report.unrenderable_wis += 1
            continue
        samples.append(
            InstructionSample(
                task=TASK_WIS,
                sentence_id=sid,
                rendered=build_wis_prompt(text).render(),
                target=render_wis_target(wis.tokens, wis.raw_scores),
            )
        )
        report.wis_samples += 1
    return samples, report


def sample_to_json(sample: InstructionSample) -> dict:
    return {
        "task": sample.task,
        "sentence_id": sample.sentence_id,
        "rendered": sample.rendered,
        "target": sample.target,
    }


def sample_from_json(obj: dict) -> InstructionSample:
    return InstructionSample(
        task=obj["task"],
        sentence_id=obj["sentence_id"],
        rendered=obj["rendered"],
        target=obj["target"],
    )


def write_samples(path, samples) -> int:
    return write_jsonl(path, (sample_to_json(s) for s in samples))


def read_samples(path) -> tuple[list[InstructionSample], LoadReport]:
    samples = []
    report = LoadReport()
    for lineno, obj in iter_jsonl(path):
        if obj is None:
            report.skip(lineno, "invalid JSON")
            continue
        try:
            samples.append(sample_from_json(obj))
        except KeyError as exc:
            report.skip(lineno, f"missing field {exc}")
            continue
        report.read += 1
    return samples, report
