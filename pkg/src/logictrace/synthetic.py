"""Seeded random instance generation in the supported dialect.

Used by the offline end-to-end path and the property suites: instances stay
within the oracle's scope (at most 8 constants, 20 rules, 2 conditions per
rule, mixed polarities) and carry gold labels computed by closure.
"""

from __future__ import annotations

import random

from .datasets import Instance, build_instance
from .reasoner import forward_closure, resolved_answer
from .rules import Literal, Predicate, Rule, Term, negate, render

_NAMES = ["Anne", "Bob", "Erin", "Gary", "Fiona", "Harry", "Dave", "Charlie"]
_ANIMALS = ["squirrel", "mouse", "cow", "rabbit", "lion", "cat", "dog", "bear"]
_ATTRIBUTES = ["red", "blue", "green", "big", "cold", "quiet", "rough", "nice"]
_VERB_LEMMAS = ["like", "eat", "visit", "need", "see", "chase"]


class InstanceGenerator:
    def __init__(self, seed: int = 0, max_constants: int = 8, max_rules: int = 20,
                 max_conditions: int = 2, n_attributes: int = 5, n_verbs: int = 3):
        self.rng = random.Random(seed)
        self.max_constants = max_constants
        self.max_rules = max_rules
        self.max_conditions = max_conditions
        self.attributes = _ATTRIBUTES[:n_attributes]
        self.verbs = _VERB_LEMMAS[:n_verbs]

    def _constants(self) -> list[Term]:
        n = self.rng.randint(2, self.max_constants)
        pool = _NAMES if self.rng.random() < 0.5 else _ANIMALS
        return [Term.constant(name) for name in self.rng.sample(pool, n)]

    def _literal(self, subject: Term, constants: list[Term], negative_rate: float) -> Literal:
        polarity = self.rng.random() >= negative_rate
        if self.rng.random() < 0.35:
            obj = self.rng.choice(constants)
            return Literal(subject, Predicate("rel", self.rng.choice(self.verbs), obj), polarity)
        return Literal(subject, Predicate("attr", self.rng.choice(self.attributes)), polarity)

    def _ground_literal(self, constants: list[Term]) -> Literal:
        return self._literal(self.rng.choice(constants), constants, negative_rate=0.25)

    def _implication(self, constants: list[Term]) -> Rule:
        use_var = self.rng.random() < 0.7
        n_conditions = self.rng.randint(1, self.max_conditions)
        conditions = []
        for _ in range(n_conditions):
            subject = Term.variable() if use_var else self.rng.choice(constants)
            conditions.append(self._literal(subject, constants, negative_rate=0.2))
        var_in_conditions = any(not c.is_ground for c in conditions)
        if var_in_conditions and self.rng.random() < 0.7:
            conclusion = self._literal(Term.variable(), constants, negative_rate=0.2)
        else:
            conclusion = self._ground_literal(constants)
        return Rule(0, tuple(conditions), conclusion)

    def _chain_rules(self, constants: list[Term]) -> list[Rule]:
        """A ladder of variable rules so closures reach real depth."""
        ladder = self.rng.sample(self.attributes, min(len(self.attributes),
                                                      self.rng.randint(2, 5)))
        rules = []
        for lower, upper in zip(ladder, ladder[1:]):
            conditions = [Literal(Term.variable(), Predicate("attr", lower))]
            if self.max_conditions > 1 and self.rng.random() < 0.25:
                conditions.append(self._literal(Term.variable(), constants, negative_rate=0.3))
            polarity = self.rng.random() >= 0.15
            conclusion = Literal(Term.variable(), Predicate("attr", upper), polarity)
            rules.append(Rule(0, tuple(conditions), conclusion))
        return rules

    def _pick_question(self, closure, constants: list[Term]) -> Literal:
        derived = [lit for lit in closure.entries if closure.origin[lit][1]]
        roll = self.rng.random()
        if roll < 0.40 and closure.entries:
            pool = derived if derived and self.rng.random() < 0.7 else closure.entries
            return self.rng.choice(pool)
        if roll < 0.65 and closure.entries:
            pool = derived if derived and self.rng.random() < 0.7 else closure.entries
            return negate(self.rng.choice(pool))
        return self._ground_literal(constants)

    def generate(self, instance_id: str) -> Instance:
        constants = self._constants()
        n_rules = self.rng.randint(4, self.max_rules)
        chain = self._chain_rules(constants)
        n_facts = max(1, round(n_rules * self.rng.uniform(0.3, 0.5)))
        facts: list[Literal] = []
        seen_facts: set[Literal] = set()
        # Seed the bottom of the ladder for some constants so it actually fires.
        for constant in self.rng.sample(constants, min(len(constants), 2)):
            first = chain[0].conditions[0].substitute({"X": constant})
            if first not in seen_facts:
                seen_facts.add(first)
                facts.append(first)
        while len(facts) < n_facts:
            lit = self._ground_literal(constants)
            if lit in seen_facts:
                continue
            seen_facts.add(lit)
            facts.append(lit)
        rules: list[Rule] = chain[:]
        while len(facts) + len(rules) < n_rules:
            rules.append(self._implication(constants))
        sentences = [render(lit) for lit in facts] + [render(r) for r in rules]
        self.rng.shuffle(sentences)
        context = " ".join(sentences)
        instance = build_instance(
            instance_id, "proofwriter", context,
            "Based on the above information, is the following statement true, "
            "false, or unknown? placeholder.", "Uncertain",
        )
        closure = forward_closure(instance)
        query = self._pick_question(closure, constants)
        question = (
            "Based on the above information, is the following statement true, "
            f"false, or unknown? {render(query)}"
        )
        instance = build_instance(instance_id, "proofwriter", context, question, "Uncertain")
        instance.gold = resolved_answer(closure, instance.question.literal)
        return instance

    def generate_many(self, count: int, prefix: str = "gen") -> list[Instance]:
        return [self.generate(f"{prefix}-{i:04d}") for i in range(count)]
