"""End-to-end evaluation: prompts, model calls, scoring, and aggregation.

Instance evaluations run as independent tasks under bounded parallelism;
results are aggregated in instance-id order so parallelism never changes the
report. The offline mode substitutes the oracle's rendered solution for the
model call, which exercises the whole scoring path without a network.
"""

from __future__ import annotations

import hashlib
import logging
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .client import EndpointError, ModelEndpointConfig, ResponseCache, query_model
from .datasets import Instance, normalize_label
from .prompts import Demonstration, PromptVariant, build_prompt, render_solution
from .reasoner import OracleUnsolvable
from .traces import (
    FALSE,
    LETTER_TO_ANSWER,
    TRUE,
    UNCERTAIN,
    UNKNOWN,
    extract_answer,
    parse_trace,
)
from .verifier import ERROR_CLASSES, VerificationReport, classify_errors, verify_trace

logger = logging.getLogger(__name__)

LABELS = (TRUE, FALSE, UNCERTAIN)
# Ablating the Validate step removes the trace's terminal marker, so that
# variant is graded on its final answer alone, like CoT.
_VERIFIED_VARIANTS = (PromptVariant.SYMBOLIC, PromptVariant.SYMBOLIC_NO_KB)


@dataclass
class PerInstanceResult:
    id: str
    gold: str
    prompt_hash: str
    raw_output: str
    extracted_answer: str
    correct: bool
    verification: VerificationReport | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "gold": self.gold,
            "prompt_hash": self.prompt_hash,
            "raw_output": self.raw_output,
            "extracted_answer": self.extracted_answer,
            "correct": self.correct,
            "verification": self.verification.to_dict() if self.verification else None,
            "error": self.error,
        }

    @staticmethod
    def from_dict(data: dict) -> "PerInstanceResult":
        verification = data.get("verification")
        return PerInstanceResult(
            id=data["id"],
            gold=data["gold"],
            prompt_hash=data["prompt_hash"],
            raw_output=data["raw_output"],
            extracted_answer=data["extracted_answer"],
            correct=data["correct"],
            verification=VerificationReport.from_dict(verification) if verification else None,
            error=data.get("error"),
        )


@dataclass
class EvalReport:
    run_id: str
    created_at: str
    dataset: str
    variant: str
    config_echo: dict
    instance_count: int
    accuracy: float
    confusion: list[list[int]] | None
    unknown_spill: list[int] | None
    recall: dict[str, float] | None
    error_histogram: dict[str, int]
    per_instance: list[PerInstanceResult] = field(default_factory=list)
    partial: bool = False

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "created_at": self.created_at,
            "dataset": self.dataset,
            "variant": self.variant,
            "config_echo": self.config_echo,
            "instance_count": self.instance_count,
            "accuracy": self.accuracy,
            "confusion": self.confusion,
            "unknown_spill": self.unknown_spill,
            "recall": self.recall,
            "error_histogram": self.error_histogram,
            "per_instance": [r.to_dict() for r in self.per_instance],
            "partial": self.partial,
        }

    @staticmethod
    def from_dict(data: dict) -> "EvalReport":
        return EvalReport(
            run_id=data["run_id"],
            created_at=data["created_at"],
            dataset=data["dataset"],
            variant=data["variant"],
            config_echo=data["config_echo"],
            instance_count=data["instance_count"],
            accuracy=data["accuracy"],
            confusion=data["confusion"],
            unknown_spill=data["unknown_spill"],
            recall=data["recall"],
            error_histogram=data["error_histogram"],
            per_instance=[PerInstanceResult.from_dict(r) for r in data["per_instance"]],
            partial=data["partial"],
        )


def _score_key(token: str) -> str:
    """Letters A/B/C and the truth words compare through one key."""
    normalized = normalize_label(token)
    return LETTER_TO_ANSWER.get(normalized, normalized)


def score_answer(extracted: str, gold: str) -> bool:
    """Unknown never scores; letters and words compare through one normalization."""
    if extracted == UNKNOWN:
        return False
    return _score_key(extracted) == _score_key(gold)


def confusion_matrix(results: list[PerInstanceResult]) -> tuple[list[list[int]], list[int]]:
    """3x3 gold-by-predicted counts (True/False/Uncertain) plus the spill
    column of Unknown predictions per gold label."""
    index = {label: i for i, label in enumerate(LABELS)}
    matrix = [[0] * 3 for _ in range(3)]
    spill = [0, 0, 0]
    for result in results:
        gold = _score_key(result.gold)
        if gold not in index:
            continue
        if result.extracted_answer == UNKNOWN:
            spill[index[gold]] += 1
            continue
        predicted = _score_key(result.extracted_answer)
        if predicted in index:
            matrix[index[gold]][index[predicted]] += 1
        else:
            spill[index[gold]] += 1
    return matrix, spill


def recall_per_class(matrix: list[list[int]], spill: list[int]) -> dict[str, float]:
    out = {}
    for i, label in enumerate(LABELS):
        row_total = sum(matrix[i]) + spill[i]
        out[label] = matrix[i][i] / row_total if row_total else 0.0
    return out


def offline_output(instance: Instance, variant: PromptVariant) -> str:
    """The oracle's solution rendered as model output; empty when unsolvable."""
    try:
        return render_solution(instance, variant)
    except OracleUnsolvable:
        return ""


def _evaluate_one(instance: Instance, variant: PromptVariant, demos: list[Demonstration],
                  config: ModelEndpointConfig, offline: bool,
                  cache: ResponseCache | None) -> PerInstanceResult:
    prompt = build_prompt(variant, demos, instance)
    prompt_hash = hashlib.sha256(prompt.text.encode("utf-8")).hexdigest()
    error = None
    try:
        if offline:
            raw = offline_output(instance, variant)
        else:
            raw = query_model(config, prompt, cache)
    except EndpointError as exc:
        raw, error = "", f"EndpointError: {exc}"
    extracted = extract_answer(raw, variant)
    correct = score_answer(extracted, instance.gold)
    verification = None
    if variant in _VERIFIED_VARIANTS and raw:
        verification = verify_trace(instance, parse_trace(raw))
        verification.final_answer_correct = correct
    return PerInstanceResult(
        id=instance.id,
        gold=instance.gold,
        prompt_hash=prompt_hash,
        raw_output=raw,
        extracted_answer=extracted,
        correct=correct,
        verification=verification,
        error=error,
    )


def run_eval(instances: list[Instance], variant: PromptVariant, demos: list[Demonstration],
             config: ModelEndpointConfig, offline: bool = False,
             cache: ResponseCache | None = None, run_id: str | None = None) -> EvalReport:
    """Evaluate every instance and aggregate accuracy, confusion, and taxonomy.

    Partial progress is kept: endpoint failures mark the report partial
    instead of aborting, and an interrupt aggregates what finished.
    """
    results: dict[str, PerInstanceResult] = {}
    partial = False
    max_workers = max(1, config.max_parallel) if not offline else 1
    try:
        if max_workers == 1:
            for instance in instances:
                results[instance.id] = _evaluate_one(
                    instance, variant, demos, config, offline, cache
                )
        else:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                futures = {
                    pool.submit(
                        _evaluate_one, instance, variant, demos, config, offline, cache
                    ): instance.id
                    for instance in instances
                }
                for future, instance_id in futures.items():
                    results[instance_id] = future.result()
    except KeyboardInterrupt:
        logger.warning("interrupted; aggregating %d finished instances", len(results))
        partial = True

    ordered = [results[i] for i in sorted(results)]
    if any(r.error for r in ordered):
        partial = True
    scored = len(ordered)
    correct = sum(1 for r in ordered if r.correct)
    accuracy = correct / scored if scored else 0.0

    three_way = all(normalize_label(i.gold) in LABELS for i in instances) if instances else False
    matrix, spill, recall = None, None, None
    if three_way:
        matrix, spill = confusion_matrix(ordered)
        recall = recall_per_class(matrix, spill)

    histogram = {cls: 0 for cls in ERROR_CLASSES}
    for result in ordered:
        if result.verification is not None:
            for cls, count in classify_errors(result.verification).items():
                histogram[cls] += count

    return EvalReport(
        run_id=run_id or uuid.uuid4().hex[:12],
        created_at=datetime.now(timezone.utc).isoformat(),
        dataset=instances[0].dataset if instances else "",
        variant=variant.value,
        config_echo={"offline": offline, **config.to_dict()},
        instance_count=scored,
        accuracy=accuracy,
        confusion=matrix,
        unknown_spill=spill,
        recall=recall,
        error_histogram=histogram,
        per_instance=ordered,
        partial=partial,
    )
