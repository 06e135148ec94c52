"""Annotation HTTP service for the two desk-scale labeling tasks.

Annotators assign a binary sentiment label per sample and an agree or
disagree judgment per anonymized word-importance candidate. Submissions go
to an append-only JSONL log; the effective state is last-write-wins per
(sample, annotator, kind, model) key and is rebuilt from the log on start.
"""

import json
import random
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .corpus import iter_jsonl
from .errors import UndefinedMetricError
from .metrics import AnnotationTable, krippendorff_alpha
from .sampling import stable_hash

KIND_LABEL = "SentimentLabel"
KIND_RELIABILITY = "Reliability"

_ANON_IDS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class WisCandidate:
    model_id: str
    tokens: tuple[str, ...]
    normalized_scores: tuple[float, ...]


@dataclass(frozen=True)
class AnnotationSample:
    sample_id: str
    sentence: str
    rlf_index: int
    candidates: tuple[WisCandidate, ...]  # in anonymized display order
    anon_to_model: dict[str, str]


def _load_samples(path: str | Path) -> list[AnnotationSample]:
    samples = []
    seen = set()
    for lineno, obj in iter_jsonl(path):
        if obj is None:
            raise ValueError(f"samples file line {lineno}: invalid JSON")
        sample_id = str(obj["sample_id"])
        if sample_id in seen:
            raise ValueError(f"samples file line {lineno}: duplicate id {sample_id}")
        seen.add(sample_id)
        candidates = [
            WisCandidate(
                model_id=str(c["model_id"]),
                tokens=tuple(str(t) for t in c["tokens"]),
                normalized_scores=tuple(float(s) for s in c["normalized_scores"]),
            )
            for c in obj.get("wis_candidates", [])
        ]
        # Candidate display order is shuffled per sample, keyed only by the
        # sample id, so every annotator sees the same anonymized order.
        order = list(range(len(candidates)))
        random.Random(stable_hash(0, "candidate-order", sample_id)).shuffle(order)
        shuffled = tuple(candidates[i] for i in order)
        anon_to_model = {
            _ANON_IDS[pos]: candidate.model_id
            for pos, candidate in enumerate(shuffled)
        }
        samples.append(
            AnnotationSample(
                sample_id=sample_id,
                sentence=str(obj["sentence"]),
                rlf_index=int(obj["rlf_index"]),
                candidates=shuffled,
                anon_to_model=anon_to_model,
            )
        )
    return samples


class AnnotationIn(BaseModel):
    sample_id: str
    annotator_id: str
    kind: Literal["SentimentLabel", "Reliability"]
    value: Literal[0, 1]
    candidate_id: str | None = None


class AnnotationStore:
    """Append-only log plus the last-write-wins view derived from it."""

    def __init__(self, log_path: str | Path):
        self.log_path = Path(log_path)
        self.lock = threading.Lock()
        # (sample_id, annotator_id, kind, model_id or "") -> record dict
        self.effective: dict[tuple[str, str, str, str], dict] = {}
        self.appended = 0
        if self.log_path.exists():
            self._replay()

    def _replay(self) -> None:
        # appended counts log rows, so replayed rows count like fresh ones
        for _, obj in iter_jsonl(self.log_path):
            if obj is None:
                continue
            try:
                self._remember(obj)
            except (KeyError, TypeError):
                continue
            self.appended += 1

    def _remember(self, record: dict) -> None:
        key = (
            str(record["sample_id"]),
            str(record["annotator_id"]),
            str(record["kind"]),
            str(record.get("model_id") or ""),
        )
        self.effective[key] = record

    def append(self, record: dict) -> None:
        with self.lock:
            with open(self.log_path, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
                fh.write("\n")
            self._remember(record)
            self.appended += 1

    def label_of(self, sample_id: str, annotator_id: str) -> int | None:
        record = self.effective.get((sample_id, annotator_id, KIND_LABEL, ""))
        return None if record is None else int(record["value"])

    def reliability_of(self, sample_id: str, annotator_id: str) -> dict[str, int]:
        out = {}
        for (sid, aid, kind, model_id), record in self.effective.items():
            if sid == sample_id and aid == annotator_id and kind == KIND_RELIABILITY:
                out[model_id] = int(record["value"])
        return out


def create_app(samples_path: str | Path, log_path: str | Path) -> FastAPI:
    samples = _load_samples(samples_path)
    by_id = {sample.sample_id: sample for sample in samples}
    store = AnnotationStore(log_path)
    app = FastAPI(title="rlfkit annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def is_complete(sample: AnnotationSample, annotator_id: str) -> bool:
        if store.label_of(sample.sample_id, annotator_id) is None:
            return False
        done = store.reliability_of(sample.sample_id, annotator_id)
        return all(c.model_id in done for c in sample.candidates)

    def completed_count(annotator_id: str) -> int:
        return sum(1 for sample in samples if is_complete(sample, annotator_id))

    def sample_view(sample: AnnotationSample, annotator_id: str) -> dict:
        model_to_anon = {m: a for a, m in sample.anon_to_model.items()}
        reliability = {
            model_to_anon[model_id]: value
            for model_id, value in store.reliability_of(
                sample.sample_id, annotator_id
            ).items()
            if model_id in model_to_anon
        }
        return {
            "sample_id": sample.sample_id,
            "sentence": sample.sentence,
            "rlf_index": sample.rlf_index,
            "candidates": [
                {
                    "candidate_id": _ANON_IDS[pos],
                    "tokens": list(candidate.tokens),
                    "scores": list(candidate.normalized_scores),
                }
                for pos, candidate in enumerate(sample.candidates)
            ],
            "state": {
                "label": store.label_of(sample.sample_id, annotator_id),
                "reliability": reliability,
            },
        }

    @app.get("/api/samples/next")
    def next_sample(annotator_id: str) -> dict:
        completed = completed_count(annotator_id)
        progress = {"completed": completed, "total": len(samples)}
        for sample in samples:
            if not is_complete(sample, annotator_id):
                return {
                    "done": False,
                    "progress": progress,
                    "sample": sample_view(sample, annotator_id),
                }
        return {"done": True, "progress": progress, "sample": None}

    @app.get("/api/samples/{sample_id}")
    def get_sample(sample_id: str, annotator_id: str) -> dict:
        sample = by_id.get(sample_id)
        if sample is None:
            raise HTTPException(status_code=404, detail=f"unknown sample {sample_id}")
        return sample_view(sample, annotator_id)

    @app.post("/api/annotations")
    def post_annotation(body: AnnotationIn) -> dict:
        sample = by_id.get(body.sample_id)
        if sample is None:
            raise HTTPException(
                status_code=404, detail=f"unknown sample {body.sample_id}"
            )
        record = {
            "sample_id": body.sample_id,
            "annotator_id": body.annotator_id,
            "kind": body.kind,
            "value": body.value,
        }
        if body.kind == KIND_RELIABILITY:
            if body.candidate_id is None:
                raise HTTPException(
                    status_code=422, detail="candidate_id required for Reliability"
                )
            model_id = sample.anon_to_model.get(body.candidate_id)
            if model_id is None:
                raise HTTPException(
                    status_code=404,
                    detail=f"unknown candidate {body.candidate_id}",
                )
            record["model_id"] = model_id
        elif body.candidate_id is not None:
            raise HTTPException(
                status_code=422, detail="candidate_id only applies to Reliability"
            )
        record["timestamp"] = time.time()
        store.append(record)
        return {
            "stored": True,
            "progress": {
                "completed": completed_count(body.annotator_id),
                "total": len(samples),
            },
        }

    @app.get("/api/progress")
    def progress() -> dict:
        annotator_ids = sorted({key[1] for key in store.effective})
        return {
            "total_samples": len(samples),
            "effective_records": len(store.effective),
            "appended_records": store.appended,
            "annotators": {
                annotator_id: {"completed": completed_count(annotator_id)}
                for annotator_id in annotator_ids
            },
        }

    @app.get("/api/aggregate")
    def aggregate() -> dict:
        label_rows = []
        majority = {}
        for sample in samples:
            votes = {}
            for (sid, aid, kind, _), record in store.effective.items():
                if sid == sample.sample_id and kind == KIND_LABEL:
                    votes[aid] = int(record["value"])
            for annotator_id, value in votes.items():
                label_rows.append((sample.sample_id, annotator_id, value))
            if votes:
                ones = sum(1 for v in votes.values() if v == 1)
                zeros = len(votes) - ones
                if ones > zeros:
                    majority[sample.sample_id] = 1
                elif zeros > ones:
                    majority[sample.sample_id] = 0
                else:
                    majority[sample.sample_id] = "unresolved"
        reliability_values: dict[str, list[int]] = {}
        for (sid, aid, kind, model_id), record in store.effective.items():
            if kind == KIND_RELIABILITY:
                reliability_values.setdefault(model_id, []).append(
                    int(record["value"])
                )
        mean_reliability = {
            model_id: sum(values) / len(values)
            for model_id, values in sorted(reliability_values.items())
        }
        alpha = None
        if label_rows:
            try:
                alpha = krippendorff_alpha(AnnotationTable.from_records(label_rows))
            except UndefinedMetricError:
                alpha = None
        return {
            "labels": majority,
            "mean_reliability": mean_reliability,
            "alpha": alpha,
            "n_annotations": len(store.effective),
        }

    return app
