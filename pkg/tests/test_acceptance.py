"""Acceptance suite: the offline property criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.
"""

import json
import time

import pytest

from cases import (
    ATTNEG_596_MODEL_OUTPUT,
    all_case_sentences,
    attneg_596,
    attnoneg_245,
    relneg_688,
    relnoneg_356,
)
from logictrace.cli import main
from logictrace.datasets import save_dataset
from logictrace.demos import default_demo_instances, default_demonstrations
from logictrace.evaluate import EvalReport
from logictrace.prompts import PromptVariant, build_prompt, make_demonstration
from logictrace.reasoner import solve_with_trace
from logictrace.report import load_report
from logictrace.rules import parse_sentence
from logictrace.synthetic import InstanceGenerator
from logictrace.traces import FACT_COLLECT, INFER, parse_trace, render_trace
from logictrace.verifier import (
    CYCLIC_INFERENCE,
    HALLUCINATED_RULE,
    RULE_MATCH_ERROR,
    UNSTOPPABLE_FLOW,
    classify_errors,
    verify_trace,
)

CORPUS_SIZE = 1000


def report_line(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"{status}  {name}{suffix}")
    assert ok, f"{name}{suffix}"


@pytest.fixture(scope="module")
def corpus():
    return InstanceGenerator(seed=2024).generate_many(CORPUS_SIZE)


@pytest.fixture(scope="module")
def oracle_traces(corpus):
    return [solve_with_trace(instance) for instance in corpus]


def test_oracle_brute_force_equivalence(corpus):
    from reference import naive_answer

    start = time.perf_counter()
    agreements = 0
    for instance in corpus:
        answer, _ = solve_with_trace(instance)
        agreements += answer == naive_answer(instance.rules, instance.question.literal)
    elapsed = time.perf_counter() - start
    report_line(
        "oracle equals naive fixpoint on random instances",
        agreements == CORPUS_SIZE and elapsed < 10.0,
        f"{agreements}/{CORPUS_SIZE} in {elapsed:.2f}s",
    )


def test_case_study_reproduction():
    expectations = [
        (attneg_596(), "False", "Erin is quiet"),
        (relnoneg_356(), "False", "The squirrel visits the mouse"),
        (relneg_688(), "Uncertain", None),
        (attnoneg_245(), "Uncertain", None),
    ]
    matches = 0
    for instance, gold, derived in expectations:
        answer, trace = solve_with_trace(instance)
        produced = {s.produced for s in trace.producing_steps()}
        ok = answer == gold and (derived is None or derived in produced)
        matches += ok
    report_line("case-study answers and derivations", matches == 4, f"{matches}/4")


_HALLUCINATED_TRACE = (
    "=> Rule4 = `Erin is red`\n"
    "=> F(KB(`Erin is red`), Rule9) => `Erin is rough`\n"
    "=> F(KB(`Erin is rough`), Rule15) => `Erin is not quiet`\n"
    "=> Validate(Question=`Erin is not quiet`, KB(`Erin is not quiet`)) = True.\n"
)

_MISMATCHED_CYCLIC_TRACE = (
    "=> Rule1 = `The cow eats the mouse`\n"
    "=> F(KB(`The cow eats the mouse`), Rule22) => `The cow is cold`\n"
    "=> F(KB(`The cow is cold`), Rule20) => `The cow likes the cow`\n"
    "=> F(KB(`The cow likes the cow`), Rule17) => `The cow visits the mouse`\n"
    "=> F(KB(`The cow likes the cow`), Rule17) => `The cow visits the mouse`\n"
    "=> Validate(Question=`The squirrel does not visit the mouse`, "
    "KB(`The cow visits the mouse`)) = Uncertain.\n"
)

_RUNAWAY_TRACE = (
    "=> Rule8 = `The mouse likes the lion`\n"
    "=> F(KB(`The mouse likes the lion`), Rule18) => `The mouse is red`\n"
    "=> F(KB(`The mouse is red`), Rule17) => `The mouse is nice`\n"
    "=> F(KB(`The mouse is nice`), Rule20) => `The mouse is big`\n"
    "=> F(KB(`The mouse is red`), Rule17) => `The mouse is nice`\n"
    "=> F(KB(`The mouse is nice`), Rule20) => `The mouse is big`\n"
    "=> F(KB(`The mouse is red`), Rule17) => `The mouse is nice`\n"
)

_BACKWARDS_RULE_TRACE = (
    "Start from the object and their condition mentioned in the question to "
    "collect relevant facts: Erin, is not quiet\n"
    "# KB = {}\n"
    "=> Rule4 = `Erin is nice`\n"
    "# KB = {Erin is nice}\n"
    "=> F(KB('Erin is nice'), Rule14) => `Erin is quiet`\n"
    "# KB = {Erin is nice, Erin is quiet}\n"
    "# valid the question with current infered premies\n"
    "=> Validate(Question=`Erin is not quiet`, KB('Erin is quiet')) = False.\n"
)


def test_verifier_error_taxonomy():
    checks = []

    histogram = classify_errors(verify_trace(attneg_596(), parse_trace(_HALLUCINATED_TRACE)))
    checks.append(histogram[HALLUCINATED_RULE] >= 1)

    histogram = classify_errors(
        verify_trace(relnoneg_356(), parse_trace(_MISMATCHED_CYCLIC_TRACE))
    )
    checks.append(histogram[CYCLIC_INFERENCE] >= 1 or histogram[RULE_MATCH_ERROR] >= 1)

    histogram = classify_errors(verify_trace(relneg_688(), parse_trace(_RUNAWAY_TRACE)))
    checks.append(histogram[UNSTOPPABLE_FLOW] >= 1 and histogram[CYCLIC_INFERENCE] >= 1)

    histogram = classify_errors(verify_trace(attnoneg_245(), parse_trace(_BACKWARDS_RULE_TRACE)))
    checks.append(
        histogram[RULE_MATCH_ERROR] >= 1
        and histogram[HALLUCINATED_RULE] == 0
        and histogram[UNSTOPPABLE_FLOW] == 0
    )

    report_line("failure patterns map to their taxonomy classes",
                all(checks), f"{sum(checks)}/4")


def test_oracle_self_verification(corpus, oracle_traces):
    clean = 0
    for instance, (_, trace) in zip(corpus, oracle_traces):
        report = verify_trace(instance, parse_trace(render_trace(trace)))
        clean += report.clean
    report_line("oracle traces verify with zero error classes",
                clean == CORPUS_SIZE, f"{clean}/{CORPUS_SIZE}")


def test_trace_round_trip(oracle_traces):
    fixed_points = 0
    for _, trace in oracle_traces:
        text = render_trace(trace)
        fixed_points += render_trace(parse_trace(text)) == text
    parsed = parse_trace(ATTNEG_596_MODEL_OUTPUT)
    kinds = [s.kind for s in parsed.steps]
    verbatim_ok = (
        kinds.count(FACT_COLLECT) == 2
        and kinds.count(INFER) == 4
        and parsed.validate is not None
        and parsed.validate.answer == "False"
    )
    report_line(
        "render-parse-render is a fixed point; verbatim output parses",
        fixed_points == CORPUS_SIZE and verbatim_ok,
        f"{fixed_points}/{CORPUS_SIZE}, verbatim={verbatim_ok}",
    )


def test_ablation_byte_diff():
    demos = default_demonstrations(PromptVariant.SYMBOLIC, k=3)
    ok = True
    for target in default_demo_instances():
        full = build_prompt(PromptVariant.SYMBOLIC, demos, target).text
        ablated = build_prompt(PromptVariant.SYMBOLIC_NO_KB, demos, target).text
        kept = [line for line in full.split("\n") if not line.startswith("# KB =")]
        removed = [line for line in full.split("\n") if line.startswith("# KB =")]
        ok = ok and ablated.split("\n") == kept and removed
    for instance in default_demo_instances():
        solution = make_demonstration(instance, PromptVariant.SYMBOLIC).solution_text
        nokb = make_demonstration(instance, PromptVariant.SYMBOLIC_NO_KB).solution_text
        ok = ok and nokb.split("\n") == [
            line for line in solution.split("\n") if not line.startswith("# KB =")
        ]
    report_line("KB ablation is an exact line filter of the symbolic prompt", ok)


def test_end_to_end_offline(tmp_path):
    data = tmp_path / "generated.jsonl"
    save_dataset(data, InstanceGenerator(seed=99).generate_many(100))
    out = tmp_path / "results"
    code = main([
        "run", "--dataset", "proofwriter", "--data", str(data),
        "--variant", "symbolic", "--offline", "--out", str(out),
    ])
    (report,) = load_report(out / "eval_report.json")
    off_diagonal = sum(
        report.confusion[i][j] for i in range(3) for j in range(3) if i != j
    ) + sum(report.unknown_spill)
    payload = json.loads((out / "eval_report.json").read_text())
    round_trip = EvalReport.from_dict(payload["reports"][0]) == report
    report_line(
        "offline end-to-end run is exact",
        code == 0 and report.accuracy == 1.0 and off_diagonal == 0 and round_trip,
        f"accuracy={report.accuracy:.3f}, off-diagonal={off_diagonal}",
    )


def test_parser_coverage():
    sentences = all_case_sentences()
    parsed = 0
    for i, sentence in enumerate(sentences, start=1):
        try:
            parse_sentence(sentence, i)
            parsed += 1
        except Exception:
            pass
    report_line("every case-study sentence parses",
                parsed == len(sentences), f"{parsed}/{len(sentences)}")
