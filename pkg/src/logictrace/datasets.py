"""Benchmark loading and the normalized instance schema.

The normalized format is JSONL, one object per line:

    {"id": ..., "dataset": ..., "context": ..., "question": ...,
     "options": {...}?, "answer": ...}

Native layouts of the four supported benchmarks are converted to it on load:
ProofWriter OWA meta files (theory + questions), ProntoQA test-example JSON,
FOLIO premise/conclusion JSONL, and BIG-bench style LogicalDeduction JSON.
Records whose sentences fall outside the dialect degrade to opaque-rule
instances; they are never dropped.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from pathlib import Path

from .rules import (
    CHOICE,
    STATEMENT,
    Question,
    Rule,
    UnparsedQuestion,
    parse_context,
    parse_question,
)
from .traces import FALSE, TRUE, UNCERTAIN

DATASETS = ("proofwriter", "prontoqa", "logicaldeduction", "folio")

_LABELS = {
    "true": TRUE,
    "false": FALSE,
    "unknown": UNCERTAIN,
    "uncertain": UNCERTAIN,
    "uncertain.": UNCERTAIN,
}


class SchemaMismatch(ValueError):
    """A record does not match the normalized schema or a known native layout."""

    def __init__(self, index: int, message: str):
        super().__init__(f"record {index}: {message}")
        self.index = index


@dataclass
class Instance:
    """One benchmark problem: tagged rules, a question, and its gold label."""

    id: str
    dataset: str
    context: str
    rules: list[Rule]
    question: Question
    gold: str
    options: dict[str, str] | None = None

    @property
    def solvable(self) -> bool:
        return self.question.is_statement and all(not r.opaque for r in self.rules)

    @property
    def three_way(self) -> bool:
        return self.gold in (TRUE, FALSE, UNCERTAIN)


def normalize_label(value) -> str:
    if isinstance(value, bool):
        return TRUE if value else FALSE
    text = str(value).strip()
    mapped = _LABELS.get(text.lower())
    if mapped is not None:
        return mapped
    if len(text) == 1 and text.upper() in string.ascii_uppercase:
        return text.upper()
    return text


def build_instance(instance_id: str, dataset: str, context: str, question_text: str,
                   answer, options: dict[str, str] | None = None) -> Instance:
    rules = parse_context(context) if context.strip() else []
    try:
        question = parse_question(question_text, options)
    except UnparsedQuestion:
        question = Question(CHOICE if options else STATEMENT, question_text, None, options)
    return Instance(
        id=str(instance_id),
        dataset=dataset,
        context=context,
        rules=rules,
        question=question,
        gold=normalize_label(answer),
        options=options,
    )


def _options_from_record(record: dict) -> dict[str, str] | None:
    options = record.get("options")
    if options is None:
        return None
    if isinstance(options, dict):
        return {str(k).upper(): str(v) for k, v in options.items()}
    return {string.ascii_uppercase[i]: str(v) for i, v in enumerate(options)}


def _from_normalized(record: dict, dataset: str, index: int) -> list[Instance]:
    for key in ("context", "question", "answer"):
        if key not in record:
            raise SchemaMismatch(index, f"missing key {key!r}")
    return [
        build_instance(
            record.get("id", f"{dataset}-{index}"),
            record.get("dataset", dataset),
            record["context"],
            record["question"],
            record["answer"],
            _options_from_record(record),
        )
    ]


def _from_proofwriter_meta(record: dict, index: int) -> list[Instance]:
    theory = record["theory"]
    base_id = record.get("id", f"proofwriter-{index}")
    questions = record.get("questions", {})
    items = questions.items() if isinstance(questions, dict) else enumerate(questions, 1)
    out = []
    for key, entry in items:
        text = entry.get("question", "")
        question = (
            "Based on the above information, is the following statement true, "
            f"false, or unknown? {text}"
        )
        out.append(
            build_instance(f"{base_id}_{key}", "proofwriter", theory, question, entry["answer"])
        )
    return out


def _from_folio(record: dict, dataset: str, index: int) -> list[Instance]:
    premises = record["premises"]
    context = " ".join(premises) if isinstance(premises, list) else str(premises)
    question = (
        "Based on the above information, is the following statement true, "
        f"false, or unknown? {record['conclusion']}"
    )
    label = record.get("label", record.get("answer"))
    return [build_instance(record.get("id", f"{dataset}-{index}"), "folio",
                           context, question, label)]


def _from_prontoqa(payload: dict) -> list[Instance]:
    out = []
    for index, (key, value) in enumerate(payload.items()):
        example = value.get("test_example", value)
        if "question" not in example or "query" not in example:
            raise SchemaMismatch(index, f"record {key!r} lacks question/query")
        out.append(
            build_instance(
                str(key), "prontoqa", example["question"], example["query"], example["answer"]
            )
        )
    return out


def _from_bigbench(payload: dict, dataset: str) -> list[Instance]:
    out = []
    for index, example in enumerate(payload["examples"]):
        scores = example["target_scores"]
        letters = list(string.ascii_uppercase)
        options = {letters[i]: text for i, text in enumerate(scores)}
        gold_letter = next(letters[i] for i, text in enumerate(scores) if scores[text])
        text = example["input"]
        out.append(
            build_instance(f"{dataset}-{index}", dataset, text, text, gold_letter, options)
        )
    return out


def load_dataset(path: str | Path, dataset: str) -> list[Instance]:
    """Load a benchmark file into instances; per-record parse failures degrade,
    schema failures raise SchemaMismatch with the first offending record."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(str(p))
    text = p.read_text(encoding="utf-8").strip()
    if not text:
        return []

    if p.suffix != ".jsonl" and not text.startswith("["):
        try:
            whole = json.loads(text)
        except ValueError:
            whole = None
        if isinstance(whole, dict):
            if "examples" in whole:
                return _from_bigbench(whole, dataset)
            values = list(whole.values())
            if values and all(isinstance(v, dict) for v in values) and any(
                "test_example" in v or ("query" in v and "question" in v) for v in values
            ):
                return _from_prontoqa(whole)
            whole = None  # fall through: a single record on one line

    records: list[dict] = []
    if text.startswith("["):
        records = json.loads(text)
    else:
        for line_no, line in enumerate(text.splitlines()):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except ValueError as exc:
                raise SchemaMismatch(line_no, f"invalid JSON: {exc}") from None

    instances: list[Instance] = []
    for index, record in enumerate(records):
        if not isinstance(record, dict):
            raise SchemaMismatch(index, "record is not an object")
        if "theory" in record:
            instances.extend(_from_proofwriter_meta(record, index))
        elif "premises" in record and "conclusion" in record:
            instances.extend(_from_folio(record, dataset, index))
        else:
            instances.extend(_from_normalized(record, dataset, index))
    return instances


def save_dataset(path: str | Path, instances: list[Instance]) -> None:
    """Write instances in the normalized JSONL schema."""
    with open(path, "w", encoding="utf-8") as handle:
        for inst in instances:
            record = {
                "id": inst.id,
                "dataset": inst.dataset,
                "context": inst.context,
                "question": inst.question.text,
                "answer": inst.gold,
            }
            if inst.options:
                record["options"] = inst.options
            handle.write(json.dumps(record) + "\n")
