"""Grammar, tolerant parser, and canonical renderer for symbolic reasoning traces.

A trace is line-oriented:

    Start from the object and their condition mentioned in the question ...
    => Rule4 = `Erin is red`
    # KB = {Erin is not furry, Erin is red}
    => F(KB(`Erin is red`), Rule9) => `Erin is rough`
    # KB = {Erin is not furry, Erin is red, Erin is rough}
    # valid the question with current inferred premises
    => Validate(Question=`Erin is not quiet`, KB(`Erin is quiet`)) = False.

The parser never raises on model output: unrecognized lines become
diagnostics, malformed traces are still returned. The renderer standardizes
on backtick quoting and guarantees one KB snapshot after every producing
step (each inference, and each run of fact collections).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .rules import normalize_premise

FACT_COLLECT = "fact-collect"
INFER = "infer"
KB_SNAPSHOT = "kb-snapshot"
COMMENT = "comment"

TRUE = "True"
FALSE = "False"
UNCERTAIN = "Uncertain"
UNKNOWN = "Unknown"
ANSWERS = (TRUE, FALSE, UNCERTAIN)

# Option-letter convention for three-way questions.
LETTER_TO_ANSWER = {"A": TRUE, "B": FALSE, "C": UNCERTAIN}
ANSWER_TO_LETTER = {v: k for k, v in LETTER_TO_ANSWER.items()}

DEFAULT_HEADER = (
    "Start from the object and their condition mentioned in the question "
    "to collect relevant facts:"
)
VALIDATE_COMMENT = "# valid the question with current inferred premises"

# Reasoning steps beyond this are treated as a runaway inference flow.
# Snapshots and comments are bookkeeping lines and do not count.
STEP_BUDGET = 200


class NonHaltingTrace(ValueError):
    """Raised when rendering a trace that has no Validate step."""


@dataclass
class Diagnostic:
    line_no: int
    line: str
    reason: str


@dataclass
class TraceStep:
    kind: str
    rule_tag: int | None = None
    cited_premises: tuple[str, ...] = ()
    produced: str | None = None
    already_in_kb: bool = False
    kb_contents: tuple[str, ...] = ()
    text: str = ""

    @property
    def is_producing(self) -> bool:
        return self.kind in (FACT_COLLECT, INFER)


@dataclass
class ValidateStep:
    question_text: str
    cited_premise: str | None
    answer: str


@dataclass
class Trace:
    header_text: str = ""
    steps: list[TraceStep] = field(default_factory=list)
    validate: ValidateStep | None = None
    raw: str = ""
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def halting(self) -> bool:
        return self.validate is not None

    def producing_steps(self) -> list[TraceStep]:
        return [s for s in self.steps if s.is_producing]

    def kb_snapshots(self) -> list[TraceStep]:
        return [s for s in self.steps if s.kind == KB_SNAPSHOT]

    def snapshot_deltas(self) -> list[set[str]]:
        """Normalized set difference between consecutive KB snapshots."""
        snaps = [set(map(normalize_premise, s.kb_contents)) for s in self.kb_snapshots()]
        return [cur - prev for prev, cur in zip(snaps, snaps[1:])]


_VALIDATE_RE = re.compile(
    r"^(?:=>)?\s*Validate\(\s*Question\s*=\s*(`[^`]*`|'[^']*'|\"[^\"]*\"|[^,]*?)\s*,"
    r"\s*KB\((.*?)\)\s*\)\s*=\s*([A-Za-z]+)\s*\.?\s*$",
    re.I,
)
_INFER_RE = re.compile(r"^=>\s*F\(\s*KB\((.*)\)\s*,\s*Rule(\d+)\s*\)\s*=>\s*(.+?)\s*$", re.I)
_FACT_RE = re.compile(r"^=>\s*Rule(\d+)\s*=\s*(.+?)\s*$", re.I)
_KB_RE = re.compile(r"^#\s*KB\s*=\s*\{(.*)\}\s*$", re.I)
_ALREADY_RE = re.compile(r"\s*\(\s*already in (?:the )?KB\s*\)\s*$", re.I)
_QUOTED_RE = re.compile(r"`([^`]*)`|'([^']*)'|\"([^\"]*)\"")
_ANSWER_WORD_RE = re.compile(r"\b(true|false|uncertain|unknown)\b", re.I)
_ANSWER_JSON_RES = (
    re.compile(r"\"answer\"\s*:\s*\"([^\"]*)\""),
    re.compile(r"\"answer\"\s*:\s*([A-Za-z]+)"),
)


def _strip_quotes(text: str) -> str:
    t = text.strip()
    if len(t) >= 2 and t[0] == t[-1] and t[0] in "`'\"":
        return t[1:-1].strip()
    return t


def _split_premises(inner: str) -> tuple[str, ...]:
    inner = inner.strip()
    if not inner:
        return ()
    quoted = [next(g for g in m.groups() if g is not None) for m in _QUOTED_RE.finditer(inner)]
    if quoted:
        return tuple(q.strip() for q in quoted)
    return tuple(p.strip() for p in inner.split(",") if p.strip())


def _normalize_answer_word(word: str) -> str | None:
    w = word.strip().lower()
    if w in ("true", "false", "uncertain"):
        return w.capitalize()
    if w == "unknown":
        return UNCERTAIN
    return None


def parse_trace(text: str) -> Trace:
    """Parse arbitrary model output into a Trace; never raises.

    Unrecognized non-comment lines are kept as MalformedLine diagnostics.
    A trace whose reasoning steps exceed the step budget is truncated with
    an UnstoppableFlow diagnostic.
    """
    trace = Trace(raw=text)
    producing = 0
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line:
            continue
        if line.startswith("# (Answer):"):
            remainder = line[len("# (Answer):") :].strip()
            if remainder and not trace.header_text and not trace.steps:
                trace.header_text = remainder
            continue

        m = _VALIDATE_RE.match(line)
        if m and "validate(" in line.lower():
            if trace.validate is None:
                question, cited, answer_word = m.groups()
                answer = _normalize_answer_word(answer_word)
                if answer is None:
                    trace.diagnostics.append(
                        Diagnostic(line_no, raw_line, f"MalformedLine: bad answer {answer_word!r}")
                    )
                    continue
                trace.validate = ValidateStep(
                    question_text=_strip_quotes(question),
                    cited_premise=_strip_quotes(cited) or None,
                    answer=answer,
                )
            continue

        m = _INFER_RE.match(line)
        if m:
            inner, tag, produced_part = m.groups()
            already = bool(_ALREADY_RE.search(produced_part))
            produced_part = _ALREADY_RE.sub("", produced_part)
            cited = _split_premises(inner)
            for produced in _split_premises(produced_part) or (_strip_quotes(produced_part),):
                trace.steps.append(
                    TraceStep(
                        INFER,
                        rule_tag=int(tag),
                        cited_premises=cited,
                        produced=produced,
                        already_in_kb=already,
                    )
                )
                producing += 1
            if producing > STEP_BUDGET:
                trace.diagnostics.append(Diagnostic(line_no, raw_line, "UnstoppableFlow"))
                return trace
            continue

        m = _FACT_RE.match(line)
        if m:
            tag, produced = m.groups()
            trace.steps.append(
                TraceStep(FACT_COLLECT, rule_tag=int(tag), produced=_strip_quotes(produced))
            )
            producing += 1
            if producing > STEP_BUDGET:
                trace.diagnostics.append(Diagnostic(line_no, raw_line, "UnstoppableFlow"))
                return trace
            continue

        m = _KB_RE.match(line)
        if m:
            entries = tuple(_strip_quotes(e) for e in _split_premises(m.group(1)))
            trace.steps.append(TraceStep(KB_SNAPSHOT, kb_contents=entries))
            continue

        if line.startswith("#"):
            # The validation comment is grammar furniture for the Validate
            # step; the renderer re-emits it canonically, so it is not a step.
            if not line.lstrip("# ").lower().startswith("valid"):
                trace.steps.append(TraceStep(COMMENT, text=line))
            continue

        if not trace.steps and trace.validate is None and not trace.header_text:
            trace.header_text = line
            continue
        trace.diagnostics.append(Diagnostic(line_no, raw_line, "MalformedLine"))
    return trace


def _kb_line(entries: list[str]) -> str:
    return "# KB = {" + ", ".join(entries) + "}"


class _RunningKB:
    def __init__(self) -> None:
        self.entries: list[str] = []
        self._seen: set[str] = set()

    def add(self, premise: str) -> None:
        key = normalize_premise(premise)
        if key not in self._seen:
            self._seen.add(key)
            self.entries.append(premise)


def render_trace(trace: Trace) -> str:
    """Render a well-formed trace to its canonical text.

    Backtick quoting throughout, one KB snapshot after every producing step
    (runs of fact collections share one), the canonical validation comment,
    and a final period after the answer. Raises NonHaltingTrace when the
    Validate step is missing.
    """
    if trace.validate is None:
        raise NonHaltingTrace("trace has no Validate step")
    lines = [trace.header_text or DEFAULT_HEADER]
    kb = _RunningKB()
    steps = trace.steps
    i = 0

    def emit_snapshot(after: int) -> int:
        if after < len(steps) and steps[after].kind == KB_SNAPSHOT:
            for entry in steps[after].kb_contents:
                kb.add(entry)
            lines.append(_kb_line(list(steps[after].kb_contents)))
            return after + 1
        lines.append(_kb_line(list(kb.entries)))
        return after

    while i < len(steps):
        step = steps[i]
        if step.kind == FACT_COLLECT:
            while i < len(steps) and steps[i].kind == FACT_COLLECT:
                fact = steps[i]
                lines.append(f"=> Rule{fact.rule_tag} = `{fact.produced}`")
                kb.add(fact.produced or "")
                i += 1
            i = emit_snapshot(i)
        elif step.kind == INFER:
            cited = ", ".join(f"`{p}`" for p in step.cited_premises)
            suffix = " (already in KB)" if step.already_in_kb else ""
            lines.append(f"=> F(KB({cited}), Rule{step.rule_tag}) => `{step.produced}`{suffix}")
            if not step.already_in_kb:
                kb.add(step.produced or "")
            i = emit_snapshot(i + 1)
        elif step.kind == KB_SNAPSHOT:
            for entry in step.kb_contents:
                kb.add(entry)
            lines.append(_kb_line(list(step.kb_contents)))
            i += 1
        else:  # comment
            if not step.text.lstrip("# ").lower().startswith("valid"):
                lines.append(step.text)
            i += 1

    lines.append(VALIDATE_COMMENT)
    cited = f"`{trace.validate.cited_premise}`" if trace.validate.cited_premise else ""
    lines.append(
        f"=> Validate(Question=`{trace.validate.question_text}`, KB({cited})) "
        f"= {trace.validate.answer}."
    )
    return "\n".join(lines)


def _normalize_token(token: str) -> str:
    t = token.strip().strip("`'\".")
    if not t:
        return UNKNOWN
    word = _normalize_answer_word(t)
    if word is not None:
        return word
    first = t[0].upper()
    if len(t) == 1 or (len(t) > 1 and t[1] in ") .:"):
        if first in LETTER_TO_ANSWER:
            return LETTER_TO_ANSWER[first]
        if "A" <= first <= "G":
            return first
    return UNKNOWN


def extract_answer(text: str, variant) -> str:
    """Pull the final answer out of raw model output; total, never raises.

    Symbolic variants read the Validate step, falling back to a scan of the
    trailing lines; Standard/CoT read the last JSON "answer" field, with
    option letters mapped through the A/B/C convention. Returns "Unknown"
    when nothing matches.
    """
    is_symbolic = getattr(variant, "is_symbolic", None)
    if is_symbolic is None:
        is_symbolic = str(variant).startswith("symbolic")
    if is_symbolic:
        trace = parse_trace(text)
        if trace.validate is not None:
            return trace.validate.answer
        for line in reversed(text.splitlines()):
            if not line.strip():
                continue
            matches = _ANSWER_WORD_RE.findall(line)
            if matches:
                answer = _normalize_answer_word(matches[-1])
                return answer if answer is not None else UNKNOWN
        return UNKNOWN

    for pattern in _ANSWER_JSON_RES:
        matches = pattern.findall(text)
        if matches:
            return _normalize_token(matches[-1])
    try:
        obj = json.loads(text)
        if isinstance(obj, dict) and "answer" in obj:
            return _normalize_token(str(obj["answer"]))
    except (ValueError, TypeError):
        pass
    return UNKNOWN
