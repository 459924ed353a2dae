"""Bundled default demonstrations and the demonstration-file format.

The defaults are small hand-written contexts in the supported dialect whose
solutions the oracle generates at import time, so the few-shot examples are
reproducible byte for byte. A demonstration file overrides them:

    {"dataset": ..., "variant": ...,
     "demos": [{"instance_id", "context", "question", "solution_text", "answer"}]}
"""

from __future__ import annotations

import json
from pathlib import Path

from .datasets import Instance, build_instance
from .prompts import Demonstration, MissingDemonstrations, PromptVariant, make_demonstration

# One True-path and one False-path pattern; a third Uncertain-path instance
# is available for k=3.
_DEFAULT_SOURCES = [
    {
        "id": "demo-true-path",
        "context": (
            "Bob is big. Harry is round. If something is big then it is quiet. "
            "Quiet things are nice."
        ),
        "question": (
            "Based on the above information, is the following statement true, "
            "false, or unknown? Bob is nice."
        ),
        "answer": "True",
    },
    {
        "id": "demo-false-path",
        "context": (
            "The cat likes the dog. The dog is red. "
            "If something likes the dog then it visits the dog. "
            "If something visits the dog then the dog sees it."
        ),
        "question": (
            "Based on the above information, is the following statement true, "
            "false, or unknown? The cat does not visit the dog."
        ),
        "answer": "False",
    },
    {
        "id": "demo-uncertain-path",
        "context": (
            "Fiona is green. Fiona is kind. If something is cold then it is green."
        ),
        "question": (
            "Based on the above information, is the following statement true, "
            "false, or unknown? Fiona is cold."
        ),
        "answer": "Uncertain",
    },
]


def default_demo_instances() -> list[Instance]:
    return [
        build_instance(
            record["id"], "proofwriter", record["context"], record["question"], record["answer"]
        )
        for record in _DEFAULT_SOURCES
    ]


def default_demonstrations(variant: PromptVariant, k: int = 2) -> list[Demonstration]:
    """The first k bundled demonstrations, solved for the requested variant."""
    instances = default_demo_instances()
    if not 1 <= k <= len(instances):
        raise MissingDemonstrations(f"k must be in 1..{len(instances)}, got {k}")
    return [make_demonstration(inst, variant) for inst in instances[:k]]


def save_demo_file(path: str | Path, dataset: str, variant: PromptVariant,
                   demos: list[Demonstration]) -> None:
    payload = {
        "dataset": dataset,
        "variant": variant.value,
        "demos": [
            {
                "instance_id": d.instance.id,
                "context": d.instance.context,
                "question": d.instance.question.text,
                "solution_text": d.solution_text,
                "answer": d.answer,
            }
            for d in demos
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def load_demo_file(path: str | Path, variant: PromptVariant) -> list[Demonstration]:
    """Load demonstrations, re-parsing each context so prompts can tag rules.

    The file's variant must be compatible with the requested one: symbolic
    demo bodies work for any symbolic variant (ablation filters are applied
    at prompt-assembly time), but standard/cot files cannot back symbolic
    prompts or vice versa.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    file_variant = PromptVariant(data["variant"])
    if file_variant.is_symbolic != variant.is_symbolic:
        raise MissingDemonstrations(
            f"demo file {path} holds {file_variant.value!r} demos, "
            f"incompatible with {variant.value!r}"
        )
    demos = []
    for entry in data["demos"]:
        instance = build_instance(
            entry["instance_id"],
            data.get("dataset", "proofwriter"),
            entry["context"],
            entry["question"],
            entry["answer"],
        )
        demos.append(
            Demonstration(
                instance=instance,
                solution_text=entry["solution_text"],
                answer=entry["answer"],
            )
        )
    if not demos:
        raise MissingDemonstrations(f"demo file {path} holds no demonstrations")
    return demos
