"""Deterministic forward-chaining oracle.

Answers are computed by least-fixpoint closure under the open-world
assumption: a query is True when derivable, False when its explicit negation
is derivable, Uncertain otherwise. Negative conditions match only explicit
negative literals; absence is never negation.

Trace generation seeds the knowledge base with facts mentioning the
question's subject, then expands breadth-first over KB premises in insertion
order, firing rules in ascending tag order. Premises already in the KB are
never re-added; the first duplicate derivation of a premise is emitted once,
marked "(already in KB)".
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import traces
from .rules import Literal, Rule, negate, premise_text
from .traces import FALSE, TRUE, UNCERTAIN, Trace, TraceStep, ValidateStep


class OracleUnsolvable(ValueError):
    """The instance is outside the oracle's scope (opaque rules or no statement query)."""


class AmbiguousAnswer(ValueError):
    """Both a query and its negation are derivable (contradictory closure)."""

    def __init__(self, query: Literal):
        super().__init__(f"both polarities derivable for {premise_text(query)!r}")
        self.query = query


@dataclass
class KnowledgeBase:
    """Insertion-ordered, duplicate-free set of ground literals.

    ``origin`` records, for every entry, the tag of the rule that produced it
    and the earlier entries it was derived from (empty for facts).
    """

    entries: list[Literal] = field(default_factory=list)
    origin: dict[Literal, tuple[int, tuple[Literal, ...]]] = field(default_factory=dict)
    contradictions: list[Literal] = field(default_factory=list)
    _index: set[Literal] = field(default_factory=set, repr=False)

    def __contains__(self, literal: Literal) -> bool:
        return literal in self._index

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def add(self, literal: Literal, rule_tag: int, cited: tuple[Literal, ...] = ()) -> bool:
        """Add a ground literal; returns False (and changes nothing) on duplicates."""
        if literal in self._index:
            return False
        if negate(literal) in self._index:
            self.contradictions.append(literal)
        self._index.add(literal)
        self.entries.append(literal)
        self.origin[literal] = (rule_tag, cited)
        return True

    def constants(self) -> list:
        """Constant terms appearing in entries, in first-seen order."""
        seen: dict = {}
        for lit in self.entries:
            seen.setdefault(lit.subject.name, lit.subject)
            obj = lit.predicate.obj
            if obj is not None:
                seen.setdefault(obj.name, obj)
        return list(seen.values())


@dataclass
class Instantiation:
    """One way a rule fires: the binding, the matched KB literals, the conclusion."""

    rule_tag: int
    binding: dict
    matched: tuple[Literal, ...]
    conclusion: Literal


def match_rule(rule: Rule, kb: KnowledgeBase) -> list[Instantiation]:
    """Every firing of an implication against the KB.

    Bindings are enumerated over the KB's constants in lexicographic order;
    ground rules contribute the single empty binding. All conditions must be
    present with matching polarity.
    """
    if not rule.is_implication:
        raise ValueError(f"Rule{rule.tag} is not an implication")
    has_variable = any(not c.is_ground for c in rule.conditions) or not rule.conclusion.is_ground
    if has_variable:
        candidates = sorted(kb.constants(), key=lambda t: t.name)
        bindings = [{"X": c} for c in candidates]
    else:
        bindings = [{}]
    out: list[Instantiation] = []
    for binding in bindings:
        matched: list[Literal] = []
        for condition in rule.conditions:
            ground = condition.substitute(binding)
            if not ground.is_ground or ground not in kb:
                matched = []
                break
            matched.append(ground)
        if matched:
            conclusion = rule.conclusion.substitute(binding)
            if conclusion.is_ground:
                out.append(Instantiation(rule.tag, binding, tuple(matched), conclusion))
    return out


def _check_rules(instance) -> list[Rule]:
    if any(r.opaque for r in instance.rules):
        bad = [r.tag for r in instance.rules if r.opaque]
        raise OracleUnsolvable(f"instance {instance.id!r} has opaque rules {bad}")
    return list(instance.rules)


def _check_solvable(instance) -> tuple[list[Rule], Literal]:
    rules = _check_rules(instance)
    if not instance.question.is_statement:
        raise OracleUnsolvable(f"instance {instance.id!r} is not a statement query")
    return rules, instance.question.literal


def forward_closure(instance) -> KnowledgeBase:
    """Least fixpoint of rule application starting from the fact rules.

    Contradictory pairs are recorded on the KB (``contradictions``) but do
    not stop the closure; open-world corpora may be inconsistent.
    """
    rules = _check_rules(instance)
    kb = KnowledgeBase()
    for rule in rules:
        if rule.is_fact:
            kb.add(rule.conclusion, rule.tag)
    implications = [r for r in rules if r.is_implication]
    changed = True
    while changed:
        changed = False
        for rule in implications:
            for inst in match_rule(rule, kb):
                if kb.add(inst.conclusion, rule.tag, inst.matched):
                    changed = True
    return kb


def answer_query(closure: KnowledgeBase, query: Literal) -> str:
    """Open-world three-way answer; raises AmbiguousAnswer on contradiction."""
    if not query.is_ground:
        raise ValueError("query must be ground")
    positive = query in closure
    negative = negate(query) in closure
    if positive and negative:
        raise AmbiguousAnswer(query)
    if positive:
        return TRUE
    if negative:
        return FALSE
    return UNCERTAIN


def resolved_answer(closure: KnowledgeBase, query: Literal) -> str:
    """answer_query with True precedence on contradictions, so scoring stays total."""
    try:
        return answer_query(closure, query)
    except AmbiguousAnswer:
        return TRUE


def _condition_key(lit: Literal) -> tuple[str, str, bool]:
    return (lit.predicate.kind, lit.predicate.name, lit.polarity)


class _TraceBuilder:
    def __init__(self, rules: list[Rule], target: Literal | None):
        self.facts = [r for r in rules if r.is_fact]
        self.implications = [r for r in rules if r.is_implication]
        # The literal whose derivation settles the question (None when the
        # answer is Uncertain). Stopping on the answer-supporting polarity
        # keeps the trace consistent with its own Validate step even when the
        # context is contradictory.
        self.target = target
        self.kb = KnowledgeBase()
        self.steps: list[TraceStep] = []
        self.fact_rules: dict[Literal, Rule] = {r.conclusion: r for r in self.facts}
        self.collected: set[int] = set()
        self.decided: Literal | None = None
        self.fired: set[tuple[int, str]] = set()
        self.marked: set[Literal] = set()
        # Rules can lazily pull in facts they need, so matching runs against
        # the trace KB plus every fact, maintained incrementally.
        self.universe = KnowledgeBase()
        for fact in self.facts:
            self.universe.add(fact.conclusion, fact.tag)
        # Premise predicate signature -> rules with a matching condition.
        self.by_condition: dict[tuple[str, str, bool], list[Rule]] = {}
        for rule in self.implications:
            for condition in rule.conditions:
                bucket = self.by_condition.setdefault(_condition_key(condition), [])
                if rule not in bucket:
                    bucket.append(rule)

    def _check_decided(self, literal: Literal) -> None:
        if self.decided is None and self.target is not None and literal == self.target:
            self.decided = literal

    def snapshot(self) -> None:
        self.steps.append(
            TraceStep(
                traces.KB_SNAPSHOT,
                kb_contents=tuple(premise_text(l) for l in self.kb.entries),
            )
        )

    def collect_fact(self, rule: Rule) -> bool:
        """Emit one fact-collection step; duplicate facts collect silently."""
        self.collected.add(rule.tag)
        if rule.conclusion in self.kb:
            return False
        self.steps.append(
            TraceStep(
                traces.FACT_COLLECT,
                rule_tag=rule.tag,
                produced=premise_text(rule.conclusion),
            )
        )
        self.kb.add(rule.conclusion, rule.tag)
        self._check_decided(rule.conclusion)
        return True

    def derive(self, inst: Instantiation) -> None:
        self.kb.add(inst.conclusion, inst.rule_tag, inst.matched)
        self.universe.add(inst.conclusion, inst.rule_tag)
        self._check_decided(inst.conclusion)

    def seed(self, subject_name: str) -> None:
        emitted = False
        for rule in self.facts:
            lit = rule.conclusion
            obj = lit.predicate.obj
            if lit.subject.name == subject_name or (obj is not None and obj.name == subject_name):
                emitted = self.collect_fact(rule) or emitted
                if self.decided is not None:
                    break
        if emitted:
            self.snapshot()

    def admit_remaining_facts(self) -> bool:
        remaining = [r for r in self.facts if r.tag not in self.collected]
        emitted = False
        for rule in remaining:
            emitted = self.collect_fact(rule) or emitted
            if self.decided is not None:
                break
        if emitted:
            self.snapshot()
        return emitted

    def fire_from(self, premise: Literal) -> None:
        rules = self.by_condition.get(_condition_key(premise), ())
        for rule in sorted(rules, key=lambda r: r.tag):
            for inst in match_rule(rule, self.universe):
                if premise not in inst.matched:
                    continue
                key = (inst.rule_tag, inst.binding["X"].name if inst.binding else "")
                if key in self.fired:
                    continue
                self.fired.add(key)
                # Matched conditions may cite facts not yet collected; admit
                # them first so every cited premise precedes its use.
                lazy = [m for m in inst.matched if m not in self.kb]
                if lazy:
                    emitted = False
                    for lit in lazy:
                        emitted = self.collect_fact(self.fact_rules[lit]) or emitted
                    if emitted:
                        self.snapshot()
                    if self.decided is not None:
                        return
                already = inst.conclusion in self.kb
                if already and inst.conclusion in self.marked:
                    continue
                self.steps.append(
                    TraceStep(
                        traces.INFER,
                        rule_tag=inst.rule_tag,
                        cited_premises=tuple(premise_text(m) for m in inst.matched),
                        produced=premise_text(inst.conclusion),
                        already_in_kb=already,
                    )
                )
                if already:
                    self.marked.add(inst.conclusion)
                else:
                    self.derive(inst)
                self.snapshot()
                if self.decided is not None:
                    return


def solve_with_trace(instance) -> tuple[str, Trace]:
    """Solve a statement-query instance, returning the answer and its trace.

    The trace stops as soon as the query or its negation is derived; the
    returned answer always comes from the full closure, so it is correct even
    when the question-seeded search would not have reached the deciding
    premise on its own.
    """
    rules, query = _check_solvable(instance)
    closure = forward_closure(instance)
    answer = resolved_answer(closure, query)
    if answer == TRUE:
        target = query
    elif answer == FALSE:
        target = negate(query)
    else:
        target = None

    builder = _TraceBuilder(rules, target)
    builder.seed(query.subject.name)
    while builder.decided is None:
        i = 0
        while i < len(builder.kb.entries) and builder.decided is None:
            builder.fire_from(builder.kb.entries[i])
            i += 1
        if builder.decided is not None:
            break
        # The seeded search exhausted its frontier. If the closure decides the
        # query through facts never pulled in, admit them and keep going;
        # otherwise the answer is Uncertain and the trace is complete.
        if answer == UNCERTAIN or not builder.admit_remaining_facts():
            break

    if builder.decided is not None:
        cited = premise_text(builder.decided)
    elif builder.kb.entries:
        cited = premise_text(builder.kb.entries[-1])
    else:
        cited = None
    question_text = premise_text(query)
    header = f"{traces.DEFAULT_HEADER} {_header_focus(query)}"
    trace = Trace(
        header_text=header,
        steps=builder.steps,
        validate=ValidateStep(question_text=question_text, cited_premise=cited, answer=answer),
    )
    return answer, trace


def _header_focus(query: Literal) -> str:
    sentence = premise_text(query)
    words = sentence.split()
    subject_words = 2 if words and words[0] == "The" else 1
    subject = " ".join(words[:subject_words])
    remainder = " ".join(words[subject_words:])
    return f"{subject}, {remainder}"
