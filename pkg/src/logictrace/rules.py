"""Parsing and rendering for the restricted natural-language rule dialect.

The dialect covers ProofWriter-style attribute and relation sentences plus
ProntoQA-style category chains:

* ground facts: ``"Anne is not rough."``, ``"The squirrel likes the cow."``
* implications: ``"If something is blue then it is rough."``
* quantified attributes: ``"Red things are rough."``, ``"All smart, furry
  people are nice."``
* category membership: ``"Every tumpus is a wumpus."``, ``"Tumpuses are
  wumpuses."`` (modeled as attribute predicates)

Parsing is deterministic and pure; entity and predicate names are lowercased
for equality while the original surface forms are kept for rendering.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field, replace

CONSTANT = "const"
VARIABLE = "var"

ATTRIBUTE = "attr"
RELATION = "rel"

STATEMENT = "statement"
CHOICE = "choice"

_ARTICLES = ("the", "a", "an")
# "something"/"someone" introduce the rule variable; "it"/"they"/"them" refer
# back to it. Exactly one variable ("X") is used per rule.
_VAR_WORDS = {"something", "someone", "somebody", "anything", "anyone", "it", "they", "them"}
_QUANT_NOUNS = {"things", "people"}


class UnparsedSentence(ValueError):
    """A sentence outside the supported dialect."""

    def __init__(self, text: str, tag: int):
        super().__init__(f"cannot parse sentence {tag}: {text!r}")
        self.text = text
        self.tag = tag


class UnparsedQuestion(ValueError):
    """A question whose statement is outside the supported dialect."""


class EmptyContextWarning(UserWarning):
    """Emitted when a context string contains no sentences."""


@dataclass(frozen=True)
class Term:
    """A constant (entity) or the rule variable."""

    kind: str
    name: str
    surface: str = field(compare=False, default="")

    @staticmethod
    def constant(surface: str) -> "Term":
        return Term(CONSTANT, surface.lower(), surface)

    @staticmethod
    def variable(name: str = "X") -> "Term":
        return Term(VARIABLE, name, name)

    @property
    def is_variable(self) -> bool:
        return self.kind == VARIABLE


@dataclass(frozen=True)
class Predicate:
    """An attribute (``rough``) or a relation with one object (``likes the cow``).

    ``category`` records whether the attribute was written with an article
    ("is a tumpus"); it only affects rendering, never equality.
    """

    kind: str
    name: str
    obj: Term | None = None
    category: bool = field(compare=False, default=False)


@dataclass(frozen=True)
class Literal:
    """A signed atomic statement: subject, predicate, polarity."""

    subject: Term
    predicate: Predicate
    polarity: bool = True

    @property
    def is_ground(self) -> bool:
        if self.subject.is_variable:
            return False
        obj = self.predicate.obj
        return obj is None or not obj.is_variable

    def substitute(self, binding: dict[str, Term]) -> "Literal":
        """Replace variable occurrences (subject and object) via ``binding``."""
        subject = self.subject
        if subject.is_variable and subject.name in binding:
            subject = binding[subject.name]
        pred = self.predicate
        if pred.obj is not None and pred.obj.is_variable and pred.obj.name in binding:
            pred = replace(pred, obj=binding[pred.obj.name])
        return Literal(subject, pred, self.polarity)


def negate(literal: Literal) -> Literal:
    """Flip the polarity; double negation is the identity."""
    return replace(literal, polarity=not literal.polarity)


@dataclass(frozen=True)
class Rule:
    """A tagged context sentence: a ground fact or an implication.

    ``conclusion`` is None for opaque rules (sentences the dialect could not
    parse); those stay usable in prompts but are excluded from oracle and
    verifier semantics.
    """

    tag: int
    conditions: tuple[Literal, ...]
    conclusion: Literal | None
    surface: str = field(compare=False, default="")

    @property
    def opaque(self) -> bool:
        return self.conclusion is None

    @property
    def is_fact(self) -> bool:
        return not self.conditions and self.conclusion is not None and self.conclusion.is_ground

    @property
    def is_implication(self) -> bool:
        return bool(self.conditions) and self.conclusion is not None


@dataclass
class Question:
    """A statement query (one literal) or a lettered multiple-choice question."""

    kind: str
    text: str
    literal: Literal | None = None
    options: dict[str, str] | None = None

    @property
    def is_statement(self) -> bool:
        return self.kind == STATEMENT and self.literal is not None


class _ClauseError(ValueError):
    pass


def _lemma(verb: str) -> str:
    """Third-person verb form to lemma: likes -> like, catches -> catch."""
    v = verb.lower()
    if v.endswith("ies") and len(v) > 3:
        return v[:-3] + "y"
    if v.endswith(("sses", "shes", "ches", "xes", "zes")):
        return v[:-2]
    if v.endswith("s") and not v.endswith("ss"):
        return v[:-1]
    return v


def _inflect(lemma: str) -> str:
    """Lemma back to third-person form: like -> likes, catch -> catches."""
    if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in "aeiou":
        return lemma[:-1] + "ies"
    if lemma.endswith(("s", "sh", "ch", "x", "z")):
        return lemma + "es"
    return lemma + "s"


def _singular(noun: str) -> str:
    n = noun.lower()
    if n.endswith("ies") and len(n) > 3:
        return n[:-3] + "y"
    if n.endswith(("sses", "shes", "ches", "xes", "zes", "uses")):
        return n[:-2]
    if n.endswith("s") and not n.endswith("ss"):
        return n[:-1]
    return n


def _parse_term(tokens: list[str], i: int, env: dict) -> tuple[Term, int]:
    if i >= len(tokens):
        raise _ClauseError("missing term")
    word = tokens[i]
    low = word.lower()
    if low in _ARTICLES:
        if i + 1 >= len(tokens):
            raise _ClauseError("article without noun")
        return Term.constant(tokens[i + 1]), i + 2
    if low in _VAR_WORDS:
        env["var_seen"] = True
        return Term.variable(), i + 1
    return Term.constant(word), i + 1


def _parse_clause(text: str, env: dict) -> Literal:
    """Parse one subject-predicate clause ("Erin is red", "it eats the cow")."""
    tokens = text.split()
    if len(tokens) < 2:
        raise _ClauseError(text)
    subject, i = _parse_term(tokens, 0, env)
    if i >= len(tokens):
        raise _ClauseError(text)
    word = tokens[i].lower()
    if word in ("is", "are"):
        i += 1
        polarity = True
        category = False
        if i < len(tokens) and tokens[i].lower() == "not":
            polarity = False
            i += 1
        if i < len(tokens) and tokens[i].lower() in ("a", "an"):
            category = True
            i += 1
        if i != len(tokens) - 1:
            raise _ClauseError(text)
        return Literal(subject, Predicate(ATTRIBUTE, tokens[i].lower(), None, category), polarity)
    polarity = True
    if word in ("does", "do") and i + 1 < len(tokens) and tokens[i + 1].lower() == "not":
        polarity = False
        i += 2
        if i >= len(tokens):
            raise _ClauseError(text)
        verb = tokens[i].lower()
    else:
        # Positive relations are third-person ("likes"); a bare lemma is only
        # grammatical after a variable subject ("they like ...").
        if not word.endswith("s") and not subject.is_variable:
            raise _ClauseError(text)
        verb = _lemma(tokens[i])
    i += 1
    obj, i = _parse_term(tokens, i, env)
    if i != len(tokens):
        raise _ClauseError(text)
    return Literal(subject, Predicate(RELATION, verb, obj), polarity)


def _bare_attribute(fragment: str, subject: Term) -> Literal | None:
    """Handle compressed conjuncts: "... is smart and nice" -> nice(subject)."""
    tokens = fragment.split()
    polarity = True
    if tokens and tokens[0].lower() == "not":
        polarity = False
        tokens = tokens[1:]
    if len(tokens) != 1 or tokens[0].lower() in _VAR_WORDS:
        return None
    return Literal(subject, Predicate(ATTRIBUTE, tokens[0].lower()), polarity)


_EVERY_RE = re.compile(r"^(?:every|each)\s+(\w+)\s+is\s+(not\s+)?(?:(a|an)\s+)?(\w+)$", re.I)
_ALL_RE = re.compile(r"^all\s+(.+?)\s+(things|people)\s+are\s+(not\s+)?(\w+)$", re.I)
_QUANT_RE = re.compile(r"^(.+?)\s+(things|people)\s+are\s+(not\s+)?(\w+)$", re.I)
_PLURAL_RE = re.compile(r"^(\w+)\s+are\s+(not\s+)?(\w+)$", re.I)
_ADJ_SPLIT_RE = re.compile(r",\s*|\s+and\s+", re.I)

_BOILERPLATE_RES = (
    re.compile(
        r"^based on the above information,\s*is the following statement true,\s*false,\s*or unknown\?\s*",
        re.I,
    ),
    re.compile(r"^true or false:\s*", re.I),
    re.compile(r"^is the following statement true,\s*false,\s*or unknown\?\s*", re.I),
)


def _var_literal(name: str, polarity: bool = True, category: bool = False) -> Literal:
    return Literal(Term.variable(), Predicate(ATTRIBUTE, name.lower(), None, category), polarity)


def _parse_implication(body: str, tag: int, surface: str) -> Rule:
    low = body.lower()
    idx = low.find(" then ")
    if idx < 0:
        raise UnparsedSentence(surface, tag)
    cond_text = body[3:idx].strip()
    concl_text = body[idx + 6 :].strip()
    env: dict = {"var_seen": False}
    conditions: list[Literal] = []
    last_subject: Term | None = None
    for fragment in re.split(r"\s+and\s+", cond_text, flags=re.I):
        fragment = fragment.strip()
        try:
            lit = _parse_clause(fragment, env)
        except _ClauseError:
            lit = _bare_attribute(fragment, last_subject) if last_subject else None
            if lit is None:
                raise UnparsedSentence(surface, tag) from None
        conditions.append(lit)
        last_subject = lit.subject
    var_in_conditions = env["var_seen"]
    try:
        conclusion = _parse_clause(concl_text, env)
    except _ClauseError:
        raise UnparsedSentence(surface, tag) from None
    if not conclusion.is_ground and not var_in_conditions:
        # A free variable in the conclusion has nothing to bind against.
        raise UnparsedSentence(surface, tag)
    return Rule(tag, tuple(conditions), conclusion, surface)


def parse_sentence(text: str, tag: int) -> Rule:
    """Parse one trimmed sentence of the dialect into a tagged Rule.

    Raises UnparsedSentence on coverage gaps; callers that must not abort
    (``parse_context``) degrade those sentences to opaque rules instead.
    """
    surface = " ".join(text.split())
    body = surface.rstrip(".!?").strip()
    if not body:
        raise UnparsedSentence(surface, tag)
    low = body.lower()

    if low.startswith("if "):
        return _parse_implication(body, tag, surface)

    m = _EVERY_RE.match(body)
    if m:
        cond_name, neg, article, concl_name = m.groups()
        concl = _var_literal(concl_name, polarity=not neg, category=bool(article))
        return Rule(tag, (_var_literal(cond_name, category=True),), concl, surface)

    m = _ALL_RE.match(body) or _QUANT_RE.match(body)
    if m:
        adj_text, _, neg, concl_name = m.groups()
        adjectives = [a.strip() for a in _ADJ_SPLIT_RE.split(adj_text) if a.strip()]
        if adjectives and all(a.isalpha() and a.lower() not in _QUANT_NOUNS for a in adjectives):
            conditions = tuple(_var_literal(a) for a in adjectives)
            return Rule(tag, conditions, _var_literal(concl_name, polarity=not neg), surface)

    m = _PLURAL_RE.match(body)
    if m:
        subj_noun, neg, concl_name = m.groups()
        if subj_noun.lower().endswith("s") and subj_noun.lower() not in _QUANT_NOUNS:
            concl_is_category = concl_name.lower().endswith("s")
            concl = _var_literal(
                _singular(concl_name) if concl_is_category else concl_name,
                polarity=not neg,
                category=concl_is_category,
            )
            return Rule(tag, (_var_literal(_singular(subj_noun), category=True),), concl, surface)

    env: dict = {"var_seen": False}
    try:
        lit = _parse_clause(body, env)
    except _ClauseError:
        raise UnparsedSentence(surface, tag) from None
    if env["var_seen"]:
        raise UnparsedSentence(surface, tag)
    return Rule(tag, (), lit, surface)


def _split_sentences(text: str) -> list[str]:
    parts = re.split(r"(?<=[.!?])\s+|\n+", text.strip())
    return [p.strip() for p in parts if p.strip()]


def parse_context(text: str) -> list[Rule]:
    """Segment a context into sentences and parse each, tagging 1..N in order.

    Sentences the dialect cannot parse become opaque rules rather than being
    dropped, so tag integrity is preserved.
    """
    if not text or not text.strip():
        warnings.warn("empty context", EmptyContextWarning, stacklevel=2)
        return []
    rules: list[Rule] = []
    for tag, sentence in enumerate(_split_sentences(text), start=1):
        try:
            rules.append(parse_sentence(sentence, tag))
        except UnparsedSentence:
            rules.append(Rule(tag, (), None, sentence))
    return rules


def parse_question(text: str, options: dict[str, str] | None = None) -> Question:
    """Parse a question, stripping the standard boilerplate prefix.

    Questions that carry an option map (LogicalDeduction style) come back as
    multiple-choice; everything else must parse to exactly one ground literal.
    """
    t = " ".join(text.split())
    if not t:
        raise UnparsedQuestion("empty question")
    if options:
        if len(options) < 2:
            raise UnparsedQuestion(f"multiple-choice question with {len(options)} option(s)")
        return Question(CHOICE, t, None, dict(options))
    statement = t
    for pattern in _BOILERPLATE_RES:
        statement = pattern.sub("", statement).strip()
    env: dict = {"var_seen": False}
    try:
        lit = _parse_clause(statement.rstrip(".!?").strip(), env)
    except _ClauseError:
        raise UnparsedQuestion(f"cannot parse question statement: {statement!r}") from None
    if env["var_seen"] or not lit.is_ground:
        raise UnparsedQuestion(f"question statement is not ground: {statement!r}")
    return Question(STATEMENT, t, lit)


def parse_premise(text: str) -> Literal | None:
    """Tolerant literal parse for trace premise strings.

    Accepts article-less abbreviations ("squirrel likes cow") and stray
    quotes; returns None instead of raising so verifiers can fall back to
    string comparison.
    """
    cleaned = text.strip().strip("`'\"").rstrip(".").strip()
    if not cleaned:
        return None
    env: dict = {"var_seen": False}
    try:
        lit = _parse_clause(cleaned, env)
    except _ClauseError:
        return None
    if env["var_seen"] or not lit.is_ground:
        return None
    return lit


def _render_term(term: Term, capitalize: bool, var_state: dict) -> str:
    if term.is_variable:
        if var_state.get("seen"):
            return "it"
        var_state["seen"] = True
        return "something"
    surface = term.surface or term.name
    if surface[:1].isupper():
        return surface
    article = "The" if capitalize else "the"
    return f"{article} {surface}"


def _indefinite(noun: str) -> str:
    return "an" if noun[:1].lower() in "aeiou" else "a"


def _render_literal(lit: Literal, capitalize: bool = True, var_state: dict | None = None) -> str:
    state = var_state if var_state is not None else {}
    subject = _render_term(lit.subject, capitalize, state)
    pred = lit.predicate
    if pred.kind == ATTRIBUTE:
        copula = "is" if lit.polarity else "is not"
        noun = pred.name
        if pred.category:
            return f"{subject} {copula} {_indefinite(noun)} {noun}"
        return f"{subject} {copula} {noun}"
    obj = _render_term(pred.obj, False, state)
    if lit.polarity:
        return f"{subject} {_inflect(pred.name)} {obj}"
    return f"{subject} does not {pred.name} {obj}"


def premise_text(lit: Literal) -> str:
    """Canonical premise string for trace lines (no trailing period)."""
    return _render_literal(lit, capitalize=True)


def render(item: Rule | Literal) -> str:
    """Render a rule or literal back to one canonical dialect sentence.

    Implications always come out in "If ... then ..." form, so the round trip
    through ``parse_sentence`` is structural, not byte-level.
    """
    if isinstance(item, Literal):
        return _render_literal(item) + "."
    if item.opaque:
        return item.surface
    if item.conditions:
        state: dict = {}
        parts = [_render_literal(c, capitalize=False, var_state=state) for c in item.conditions]
        conclusion = _render_literal(item.conclusion, capitalize=False, var_state=state)
        return f"If {' and '.join(parts)} then {conclusion}."
    return _render_literal(item.conclusion) + "."


_ARTICLE_TOKENS = frozenset(_ARTICLES)


def normalize_premise(text: str) -> str:
    """Normalize a premise string for KB comparisons.

    Lowercases, drops quotes, trailing periods, and article tokens, so the
    abbreviated snapshot form "cow eats mouse" equals "The cow eats the
    mouse".
    """
    cleaned = text.strip().strip("`'\"").rstrip(".").lower()
    return " ".join(w for w in cleaned.split() if w not in _ARTICLE_TOKENS)
