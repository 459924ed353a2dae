"""Independent reference implementations used as test oracles.

These share only the data types with the package; the closure logic is a
separate naive iterate-until-no-change loop so the two paths can check each
other.
"""

from logictrace.rules import Literal, Rule, Term, negate


def instance_constants(rules: list[Rule]) -> list[Term]:
    seen: dict[str, Term] = {}
    for rule in rules:
        literals = list(rule.conditions) + ([rule.conclusion] if rule.conclusion else [])
        for lit in literals:
            for term in (lit.subject, lit.predicate.obj):
                if term is not None and not term.is_variable:
                    seen.setdefault(term.name, term)
    return list(seen.values())


def naive_closure(rules: list[Rule]) -> set[Literal]:
    """Iterate until no change: every rule, every constant substitution."""
    constants = instance_constants(rules)
    facts = {r.conclusion for r in rules if r.is_fact}
    implications = [r for r in rules if r.is_implication]
    changed = True
    while changed:
        changed = False
        for rule in implications:
            bindings = [{}]
            if any(not c.is_ground for c in rule.conditions) or not rule.conclusion.is_ground:
                bindings = [{"X": c} for c in constants]
            for binding in bindings:
                grounded = [c.substitute(binding) for c in rule.conditions]
                if all(g.is_ground and g in facts for g in grounded):
                    conclusion = rule.conclusion.substitute(binding)
                    if conclusion.is_ground and conclusion not in facts:
                        facts.add(conclusion)
                        changed = True
    return facts


def naive_answer(rules: list[Rule], query: Literal) -> str:
    closure = naive_closure(rules)
    if query in closure:
        return "True"
    if negate(query) in closure:
        return "False"
    return "Uncertain"


def brute_force_instantiations(rule: Rule, kb_literals: set[Literal]) -> set:
    """All (binding-name, matched, conclusion) triples over every constant."""
    constants = sorted(
        {t.name: t for lit in kb_literals for t in (lit.subject, lit.predicate.obj) if t}.values(),
        key=lambda t: t.name,
    )
    out = set()
    bindings = [{}]
    if any(not c.is_ground for c in rule.conditions) or not rule.conclusion.is_ground:
        bindings = [{"X": c} for c in constants]
    for binding in bindings:
        grounded = tuple(c.substitute(binding) for c in rule.conditions)
        if all(g.is_ground and g in kb_literals for g in grounded):
            conclusion = rule.conclusion.substitute(binding)
            if conclusion.is_ground:
                name = binding["X"].name if binding else ""
                out.add((name, grounded, conclusion))
    return out
