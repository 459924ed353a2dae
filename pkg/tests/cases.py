"""ProofWriter depth-5 OWA case fixtures.

Four cases with their questions and gold labels, plus a captured symbolic
model output for the first one. Contexts for the last three are excerpts, so
their rules keep the original (non-contiguous) tags.
"""

from logictrace.datasets import Instance, build_instance
from logictrace.rules import parse_question, parse_sentence

ATTNEG_596_CONTEXT = (
    "Anne is not rough. Bob is blue. Erin is not furry. Erin is red. Gary is big. "
    "Gary is not cold. Gary is furry. If something is blue then it is rough. "
    "Red things are rough. If Gary is rough then Gary is not blue. Rough things are red. "
    "Big things are quiet. All cold things are big. If something is red then it is big."
)

_QUESTION_PREFIX = (
    "Based on the above information, is the following statement true, false, or unknown? "
)

RELNONEG_356_SENTENCES = {
    1: "The cow eats the mouse.",
    15: "The squirrel likes the cow.",
    16: "The squirrel likes the mouse.",
    17: "If something likes the cow then it visits the mouse.",
    18: "If something likes the cow then the cow is green.",
    19: "If something eats the squirrel and the squirrel likes the rabbit then it eats the rabbit.",
    20: "If something is cold then it likes the cow.",
    21: "If something visits the squirrel then the squirrel likes the rabbit.",
    22: "If the cow likes the rabbit then the cow is cold.",
}

RELNEG_688_SENTENCES = {
    6: "The lion needs the mouse.",
    7: "The mouse is round.",
    8: "The mouse likes the lion.",
    9: "The mouse needs the lion.",
    15: "If something likes the cat and it does not visit the cat then it visits the lion.",
    16: "If the lion is green and the lion visits the mouse then the mouse is red.",
    17: "All red things are nice.",
    18: "If something likes the lion then it is red.",
    19: "If the mouse visits the cat and the mouse needs the squirrel then the mouse does not like the cat.",
    20: "Nice things are big.",
    21: "If something is big then it visits the squirrel.",
    22: "If the mouse visits the squirrel then the mouse does not visit the lion.",
}

ATTNONEG_245_SENTENCES = {
    4: "Erin is nice.",
    11: "Furry people are smart.",
    12: "If someone is smart and nice then they are round.",
    13: "Cold people are red.",
    14: "If someone is quiet then they are nice.",
    15: "All red people are furry.",
    16: "All smart, furry people are nice.",
}

# Captured symbolic output for the first case, quoting style and typos kept
# as-is: 2 fact collections, 4 inferences (one already-in-KB), Validate.
ATTNEG_596_MODEL_OUTPUT = """\
Start from the object and their condition mentioned in the question to collect relevant facts: Erin, is not quiet
# KB = {}
=> Rule3 = `Erin is not furry`
=> Rule4 = `Erin is red`
# KB = {Erin is not furry, Erin is red}
=> F(KB('Erin is red'), Rule9) => `Erin is rough`
# KB = {Erin is not furry, Erin is red, Erin is rough}
=> F(KB('Erin is red'), Rule11) => `Erin is red` (already in KB)
# KB = {Erin is not furry, Erin is red, Erin is rough}
=> F(KB('Erin is red'), Rule14) => `Erin is big`
# KB = {Erin is not furry, Erin is red, Erin is rough, Erin is big}
=> F(KB('Erin is big'), Rule12) => `Erin is quiet`
# KB = {Erin is not furry, Erin is red, Erin is rough, Erin is big, Erin is quiet}
# valid the question with current infered premies
=> Validate(Question=`Erin is not quiet`, KB('Erin is quiet'))=False.
"""


def _excerpt_instance(instance_id, sentences, question_statement, gold):
    rules = [parse_sentence(text, tag) for tag, text in sorted(sentences.items())]
    question = parse_question(_QUESTION_PREFIX + question_statement)
    context = " ".join(text for _, text in sorted(sentences.items()))
    return Instance(
        id=instance_id,
        dataset="proofwriter",
        context=context,
        rules=rules,
        question=question,
        gold=gold,
    )


def attneg_596() -> Instance:
    return build_instance(
        "AttNeg-OWA-D5-596_Q6",
        "proofwriter",
        ATTNEG_596_CONTEXT,
        _QUESTION_PREFIX + "Erin is not quiet.",
        "False",
    )


def relnoneg_356() -> Instance:
    return _excerpt_instance(
        "RelNoneg-OWA-D5-356_Q4",
        RELNONEG_356_SENTENCES,
        "The squirrel does not visit the mouse.",
        "False",
    )


def relneg_688() -> Instance:
    return _excerpt_instance(
        "RelNeg-OWA-D5-688_Q22",
        RELNEG_688_SENTENCES,
        "The lion likes the mouse.",
        "Uncertain",
    )


def attnoneg_245() -> Instance:
    return _excerpt_instance(
        "AttNoneg-OWA-D5-245_Q19",
        ATTNONEG_245_SENTENCES,
        "Erin is not quiet.",
        "Uncertain",
    )


def all_case_studies() -> list[Instance]:
    return [attneg_596(), relnoneg_356(), relneg_688(), attnoneg_245()]


def all_case_sentences() -> list[str]:
    out = ATTNEG_596_CONTEXT.split(". ")
    out = [s if s.endswith(".") else s + "." for s in out]
    for sentences in (RELNONEG_356_SENTENCES, RELNEG_688_SENTENCES, ATTNONEG_245_SENTENCES):
        out.extend(sentences.values())
    return out
