"""Prompt assembly for the five few-shot variants.

Standard and CoT prompts are Context / Question / Options blocks with a
JSON-shaped answer; the symbolic variants carry an instruction header, tagged
"# (RuleN):" context lines, and a reasoning-trace body. The two ablations are
pure text filters over the symbolic prompt: the KB ablation drops every
"# KB =" line and nothing else, the Validate ablation replaces the Validate
line with a bare "=> Answer = ..." line.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum

from . import traces
from .reasoner import solve_with_trace
from .traces import ANSWER_TO_LETTER


class PromptVariant(str, Enum):
    STANDARD = "standard"
    COT = "cot"
    SYMBOLIC = "symbolic"
    SYMBOLIC_NO_KB = "symbolic-nokb"
    SYMBOLIC_NO_VALIDATE = "symbolic-novalidate"

    @property
    def is_symbolic(self) -> bool:
        return self.value.startswith("symbolic")


class MissingDemonstrations(ValueError):
    """Few-shot modes need at least one demonstration."""


class UntaggedRules(ValueError):
    """Symbolic prompts need 1-based rule tags."""


SYMBOLIC_INSTRUCTION = (
    "### Let us define F as a function that infers new premises based on a given "
    "list of facts and rules. Using these facts and rules, provide a reasoning "
    "path that leads to one of the values of a Validate function: True, False, "
    "or Uncertain."
)
SEPARATOR = "------"
DEFAULT_OPTIONS_LINE = "Options: A) True B) False C) Uncertain"
ANSWER_STEM = "The correct option is:"

_KB_LINE_RE = re.compile(r"^\s*# KB =")
_VALIDATE_LINE_RE = re.compile(r"^\s*=>\s*Validate\(.*=\s*([A-Za-z]+)\s*\.?\s*$")


@dataclass
class Demonstration:
    """A solved instance plus its rendered solution text for one variant."""

    instance: object
    solution_text: str
    answer: str


@dataclass
class PromptText:
    text: str
    variant: PromptVariant
    instance_id: str


def drop_kb_lines(text: str) -> str:
    """Remove every "# KB = {...}" line; no other byte changes."""
    return "\n".join(line for line in text.split("\n") if not _KB_LINE_RE.match(line))


def replace_validate_lines(text: str) -> str:
    """Swap each Validate line for a bare final-answer line."""
    out = []
    for line in text.split("\n"):
        m = _VALIDATE_LINE_RE.match(line)
        out.append(f"=> Answer = {m.group(1)}." if m else line)
    return "\n".join(out)


def apply_variant_filter(text: str, variant: PromptVariant) -> str:
    if variant == PromptVariant.SYMBOLIC_NO_KB:
        return drop_kb_lines(text)
    if variant == PromptVariant.SYMBOLIC_NO_VALIDATE:
        return replace_validate_lines(text)
    return text


def _options_line(instance) -> str:
    options = getattr(instance, "options", None)
    if options:
        rendered = " ".join(f"{letter}) {text}" for letter, text in options.items())
        return f"Options: {rendered}"
    return DEFAULT_OPTIONS_LINE


def _check_tags(instance) -> None:
    tags = [r.tag for r in instance.rules]
    if any(not isinstance(t, int) or t < 1 for t in tags):
        raise UntaggedRules(f"instance {instance.id!r} has untagged rules")


def _reasoning_prose(trace: traces.Trace, answer: str) -> str:
    sentences = [
        f"{step.produced}." for step in trace.producing_steps() if not step.already_in_kb
    ]
    sentences.append(f"So the statement is {answer.lower()}.")
    return " ".join(sentences)


def make_demonstration(instance, variant: PromptVariant) -> Demonstration:
    """Solve an instance with the oracle and render its solution for a variant."""
    answer, trace = solve_with_trace(instance)
    if variant.is_symbolic:
        solution = apply_variant_filter(traces.render_trace(trace), variant)
    elif variant == PromptVariant.COT:
        payload = {"reasoning": _reasoning_prose(trace, answer), "answer": ANSWER_TO_LETTER[answer]}
        solution = json.dumps(payload)
    else:
        solution = json.dumps({"answer": ANSWER_TO_LETTER[answer]})
    return Demonstration(instance=instance, solution_text=solution, answer=answer)


def _symbolic_block(instance, solution_text: str | None, example_no: int | None) -> str:
    title = f"### Example{example_no}: Given list of facts and rules:" if example_no else (
        "### Given list of facts and rules:"
    )
    lines = [title]
    lines.extend(f"# (Rule{rule.tag}): {rule.surface}" for rule in instance.rules)
    lines.append(f"# (Question): {instance.question.text}")
    if solution_text is None:
        lines.append("# (Answer):")
    else:
        body = solution_text.split("\n")
        lines.append(f"# (Answer): {body[0]}")
        lines.extend(body[1:])
    return "\n".join(lines)


def _plain_block(instance, solution_text: str | None) -> str:
    lines = [
        f"Context: {instance.context}",
        f"Question: {instance.question.text}",
        _options_line(instance),
        ANSWER_STEM,
    ]
    if solution_text is not None:
        lines.append(solution_text)
    return "\n".join(lines)


def build_prompt(variant: PromptVariant, demos: list[Demonstration], instance) -> PromptText:
    """Assemble the full prompt text for one instance under one variant.

    Symbolic demonstrations may be supplied in the unablated form; the
    variant's filter is applied to the assembled text, which keeps the KB
    ablation an exact line-set difference of the symbolic prompt.
    """
    if not demos:
        raise MissingDemonstrations(f"variant {variant.value} needs demonstrations")
    _check_tags(instance)
    if variant.is_symbolic:
        blocks = [SYMBOLIC_INSTRUCTION]
        for number, demo in enumerate(demos, start=1):
            blocks.append(_symbolic_block(demo.instance, demo.solution_text, number))
        blocks.append(_symbolic_block(instance, None, None))
        text = apply_variant_filter(f"\n{SEPARATOR}\n".join(blocks), variant)
    else:
        blocks = [_plain_block(d.instance, d.solution_text) for d in demos]
        blocks.append(_plain_block(instance, None))
        text = "\n\n".join(blocks)
    return PromptText(text=text, variant=variant, instance_id=instance.id)


def render_solution(instance, variant: PromptVariant) -> str:
    """The oracle's answer text for an instance, shaped like model output.

    Used by the offline evaluation mode and for demonstrations.
    """
    return make_demonstration(instance, variant).solution_text
