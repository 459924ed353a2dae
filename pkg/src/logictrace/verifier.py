"""Step-by-step verification of reasoning traces against an instance's rules.

The verifier replays a trace over a shadow knowledge base and classifies
failures into four classes:

* HallucinatedRule - a cited rule does not exist, or a fact collection does
  not match any fact in the context;
* RuleMatchError - a cited rule exists but cannot yield the produced premise
  from the cited premises (also covers KB bookkeeping slips in the taxonomy);
* CyclicInference - a premise is re-derived without the "(already in KB)"
  marker;
* UnstoppableFlow - the trace never reaches a Validate step, or blows the
  step budget.

Premise matching is tolerant: strings are parsed to literals when possible
and normalized (lowercased, article-stripped) otherwise, so abbreviated KB
snapshots still compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import traces
from .reasoner import AmbiguousAnswer, KnowledgeBase, answer_query, match_rule
from .rules import Literal, Rule, normalize_premise, parse_premise
from .traces import FALSE, TRUE, UNCERTAIN, Trace, TraceStep

VALID = "Valid"
HALLUCINATED_RULE = "HallucinatedRule"
RULE_MATCH_ERROR = "RuleMatchError"
KB_UPDATE_ERROR = "KBUpdateError"
REDUNDANT_REINFERENCE = "RedundantReinference"

UNSTOPPABLE_FLOW = "UnstoppableFlow"
CYCLIC_INFERENCE = "CyclicInference"

ERROR_CLASSES = (HALLUCINATED_RULE, UNSTOPPABLE_FLOW, CYCLIC_INFERENCE, RULE_MATCH_ERROR)


@dataclass
class StepVerdict:
    step_index: int
    status: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {"step_index": self.step_index, "status": self.status, "detail": self.detail}


@dataclass
class VerificationReport:
    instance_id: str
    step_verdicts: list[StepVerdict] = field(default_factory=list)
    halted: bool = True
    cyclic: bool = False
    validate_consistent: bool = True
    final_answer_correct: bool = False
    semantic_checked: bool = True
    error_classes: dict[str, int] = field(default_factory=dict)

    @property
    def clean(self) -> bool:
        return not self.error_classes

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "step_verdicts": [v.to_dict() for v in self.step_verdicts],
            "halted": self.halted,
            "cyclic": self.cyclic,
            "validate_consistent": self.validate_consistent,
            "final_answer_correct": self.final_answer_correct,
            "semantic_checked": self.semantic_checked,
            "error_classes": dict(self.error_classes),
        }

    @staticmethod
    def from_dict(data: dict) -> "VerificationReport":
        return VerificationReport(
            instance_id=data["instance_id"],
            step_verdicts=[StepVerdict(**v) for v in data["step_verdicts"]],
            halted=data["halted"],
            cyclic=data["cyclic"],
            validate_consistent=data["validate_consistent"],
            final_answer_correct=data["final_answer_correct"],
            semantic_checked=data.get("semantic_checked", True),
            error_classes=dict(data["error_classes"]),
        )


class _ShadowKB:
    """Monotone KB of (literal | None, normalized string) pairs."""

    def __init__(self) -> None:
        self.literals = KnowledgeBase()
        self.norms: list[str] = []
        self._norm_set: set[str] = set()

    def add(self, premise: str) -> None:
        norm = normalize_premise(premise)
        if norm in self._norm_set:
            return
        self._norm_set.add(norm)
        self.norms.append(norm)
        lit = parse_premise(premise)
        if lit is not None:
            self.literals.add(lit, 0)

    def __contains__(self, premise: str) -> bool:
        return normalize_premise(premise) in self._norm_set

    def norm_set(self) -> set[str]:
        return set(self._norm_set)


def check_validate_step(shadow_kb: KnowledgeBase, question: Literal, claimed: str) -> bool:
    """True iff the claimed answer matches open-world evaluation over the KB.

    A contradictory shadow KB accepts either definite answer.
    """
    try:
        expected = answer_query(shadow_kb, question)
    except AmbiguousAnswer:
        return claimed in (TRUE, FALSE)
    return claimed == expected


def _find_instantiation(rule: Rule, cited: tuple[Literal, ...], produced: Literal) -> bool:
    pool = KnowledgeBase()
    for lit in cited:
        pool.add(lit, 0)
    cited_set = set(cited)
    for inst in match_rule(rule, pool):
        if inst.conclusion == produced and set(inst.matched) <= cited_set:
            return True
    return False


def verify_trace(instance, trace: Trace) -> VerificationReport:
    """Replay a parsed trace against the instance; total, never raises.

    Semantic rule checks run only when every context rule parsed; otherwise
    (FOLIO-style instances) the report carries syntactic checks alone and
    ``semantic_checked`` is False.
    """
    rules_by_tag: dict[int, Rule] = {r.tag: r for r in instance.rules}
    semantic = all(not r.opaque for r in instance.rules)
    question = instance.question
    report = VerificationReport(instance_id=instance.id, semantic_checked=semantic)
    shadow = _ShadowKB()
    counts: dict[str, int] = {}

    def bump(error_class: str) -> None:
        counts[error_class] = counts.get(error_class, 0) + 1

    producing_index = 0
    for index, step in enumerate(trace.steps):
        verdict = StepVerdict(index, VALID)
        if step.kind == traces.FACT_COLLECT:
            producing_index += 1
            rule = rules_by_tag.get(step.rule_tag)
            if rule is None:
                verdict = StepVerdict(
                    index, HALLUCINATED_RULE, f"Rule{step.rule_tag} does not exist"
                )
                bump(HALLUCINATED_RULE)
            elif semantic and not rule.is_fact:
                verdict = StepVerdict(
                    index, HALLUCINATED_RULE, f"Rule{step.rule_tag} is not a fact"
                )
                bump(HALLUCINATED_RULE)
            elif semantic and parse_premise(step.produced or "") != rule.conclusion:
                verdict = StepVerdict(
                    index,
                    HALLUCINATED_RULE,
                    f"Rule{step.rule_tag} does not state {step.produced!r}",
                )
                bump(HALLUCINATED_RULE)
            elif (step.produced or "") in shadow:
                verdict = StepVerdict(
                    index, REDUNDANT_REINFERENCE, f"{step.produced!r} re-collected"
                )
                report.cyclic = True
                bump(CYCLIC_INFERENCE)
            if verdict.status in (VALID, HALLUCINATED_RULE):
                shadow.add(step.produced or "")

        elif step.kind == traces.INFER:
            producing_index += 1
            rule = rules_by_tag.get(step.rule_tag)
            missing = [p for p in step.cited_premises if p not in shadow]
            if rule is None:
                verdict = StepVerdict(
                    index, HALLUCINATED_RULE, f"Rule{step.rule_tag} does not exist"
                )
                bump(HALLUCINATED_RULE)
            elif missing:
                verdict = StepVerdict(
                    index, RULE_MATCH_ERROR, f"cites premises not in KB: {missing}"
                )
                bump(RULE_MATCH_ERROR)
            elif semantic:
                cited_lits = tuple(
                    lit for lit in map(parse_premise, step.cited_premises) if lit is not None
                )
                produced_lit = parse_premise(step.produced or "")
                if not rule.is_implication:
                    verdict = StepVerdict(
                        index, RULE_MATCH_ERROR, f"Rule{step.rule_tag} is a fact, not a rule"
                    )
                    bump(RULE_MATCH_ERROR)
                elif produced_lit is None or not _find_instantiation(
                    rule, cited_lits, produced_lit
                ):
                    verdict = StepVerdict(
                        index,
                        RULE_MATCH_ERROR,
                        f"Rule{step.rule_tag} cannot produce {step.produced!r} "
                        f"from {list(step.cited_premises)}",
                    )
                    bump(RULE_MATCH_ERROR)
            if verdict.status == VALID:
                in_kb = (step.produced or "") in shadow
                if step.already_in_kb and not in_kb:
                    verdict = StepVerdict(
                        index,
                        KB_UPDATE_ERROR,
                        f"{step.produced!r} claimed already in KB but is not",
                    )
                    bump(RULE_MATCH_ERROR)
                elif not step.already_in_kb and in_kb:
                    verdict = StepVerdict(
                        index,
                        REDUNDANT_REINFERENCE,
                        f"{step.produced!r} re-derived without the already-in-KB marker",
                    )
                    report.cyclic = True
                    bump(CYCLIC_INFERENCE)
            shadow.add(step.produced or "")

        elif step.kind == traces.KB_SNAPSHOT:
            snapshot = {normalize_premise(e) for e in step.kb_contents}
            expected = shadow.norm_set()
            if snapshot != expected:
                extra = sorted(snapshot - expected)
                dropped = sorted(expected - snapshot)
                verdict = StepVerdict(
                    index,
                    KB_UPDATE_ERROR,
                    f"snapshot disagrees with KB (extra={extra}, missing={dropped})",
                )
                bump(RULE_MATCH_ERROR)

        report.step_verdicts.append(verdict)

    over_budget = producing_index > traces.STEP_BUDGET or any(
        d.reason == "UnstoppableFlow" for d in trace.diagnostics
    )
    report.halted = trace.validate is not None and not over_budget
    if not report.halted:
        bump(UNSTOPPABLE_FLOW)

    if trace.validate is not None and semantic and question.is_statement:
        report.validate_consistent = check_validate_step(
            shadow.literals, question.literal, trace.validate.answer
        )
        if not report.validate_consistent:
            # A Validate step that misreads its own KB is a matching failure.
            bump(RULE_MATCH_ERROR)

    claimed = trace.validate.answer if trace.validate is not None else None
    gold = getattr(instance, "gold", None)
    if claimed is not None and gold is not None:
        report.final_answer_correct = claimed == gold

    report.error_classes = counts
    return report


def classify_errors(report: VerificationReport) -> dict[str, int]:
    """Project the report onto the four-class taxonomy histogram."""
    return {cls: report.error_classes.get(cls, 0) for cls in ERROR_CLASSES}
