import json

import pytest

from cases import attneg_596
from logictrace.datasets import build_instance
from logictrace.demos import default_demonstrations
from logictrace.prompts import (
    MissingDemonstrations,
    PromptVariant,
    build_prompt,
    make_demonstration,
)
from logictrace.reasoner import OracleUnsolvable
from logictrace.traces import extract_answer, parse_trace
from logictrace.verifier import verify_trace


@pytest.fixture(scope="module")
def demos():
    return default_demonstrations(PromptVariant.SYMBOLIC, k=2)


@pytest.fixture(scope="module")
def erin():
    return attneg_596()


class TestBuildPrompt:
    def test_symbolic_layout(self, demos, erin):
        prompt = build_prompt(PromptVariant.SYMBOLIC, demos, erin)
        assert prompt.text.startswith("### Let us define F as a function")
        assert "\n------\n" in prompt.text
        assert "### Example1: Given list of facts and rules:" in prompt.text
        assert "### Example2: Given list of facts and rules:" in prompt.text
        assert "# (Rule4): Erin is red." in prompt.text
        assert prompt.text.endswith("# (Answer):")
        assert prompt.instance_id == erin.id

    def test_every_context_sentence_tagged_once(self, demos, erin):
        prompt = build_prompt(PromptVariant.SYMBOLIC, demos, erin)
        target = prompt.text.split("------")[-1]
        for rule in erin.rules:
            assert target.count(f"# (Rule{rule.tag}): {rule.surface}") == 1
        assert target.count("# (Rule") == len(erin.rules)

    def test_standard_shape(self, erin):
        demos = default_demonstrations(PromptVariant.STANDARD, k=1)
        prompt = build_prompt(PromptVariant.STANDARD, demos, erin)
        assert '{"answer":' in prompt.text
        assert "Options: A) True B) False C) Uncertain" in prompt.text
        assert prompt.text.count("Context:") == 2
        assert prompt.text.endswith("The correct option is:")

    def test_cot_shape(self, erin):
        demos = default_demonstrations(PromptVariant.COT, k=2)
        prompt = build_prompt(PromptVariant.COT, demos, erin)
        assert '"reasoning"' in prompt.text

    def test_nokb_is_exact_line_filter(self, demos, erin):
        full = build_prompt(PromptVariant.SYMBOLIC, demos, erin).text
        ablated = build_prompt(PromptVariant.SYMBOLIC_NO_KB, demos, erin).text
        kept = [l for l in full.split("\n") if not l.startswith("# KB =")]
        assert ablated.split("\n") == kept
        assert "# KB =" in full and "# KB =" not in ablated

    def test_novalidate_replaces_terminal_line(self, demos, erin):
        ablated = build_prompt(PromptVariant.SYMBOLIC_NO_VALIDATE, demos, erin).text
        assert "Validate(" not in ablated.replace(
            "values of a Validate function", ""
        )
        assert "=> Answer = " in ablated

    def test_determinism(self, demos, erin):
        a = build_prompt(PromptVariant.SYMBOLIC, demos, erin).text
        b = build_prompt(PromptVariant.SYMBOLIC, demos, erin).text
        assert a == b

    def test_missing_demos_raise(self, erin):
        with pytest.raises(MissingDemonstrations):
            build_prompt(PromptVariant.SYMBOLIC, [], erin)

    def test_multiple_choice_options_rendered(self):
        demos = default_demonstrations(PromptVariant.STANDARD, k=1)
        instance = build_instance(
            "ld-1", "logicaldeduction", "Three birds sit on a branch.",
            "Which bird is leftmost?", "B",
            {"A": "the robin", "B": "the jay", "C": "the crow"},
        )
        prompt = build_prompt(PromptVariant.STANDARD, demos, instance)
        assert "Options: A) the robin B) the jay C) the crow" in prompt.text


class TestMakeDemonstration:
    def test_symbolic_demo_reparses_and_verifies(self, erin):
        demo = make_demonstration(erin, PromptVariant.SYMBOLIC)
        trace = parse_trace(demo.solution_text)
        assert not trace.diagnostics
        assert trace.validate.answer == "False"
        report = verify_trace(erin, trace)
        assert report.clean

    def test_demo_answer_matches_gold(self, erin):
        for variant in PromptVariant:
            demo = make_demonstration(erin, variant)
            assert demo.answer == erin.gold

    def test_novalidate_demo_keeps_body(self, erin):
        full = make_demonstration(erin, PromptVariant.SYMBOLIC).solution_text
        ablated = make_demonstration(erin, PromptVariant.SYMBOLIC_NO_VALIDATE).solution_text
        assert ablated.split("\n")[:-1] == full.split("\n")[:-1]
        assert ablated.split("\n")[-1] == "=> Answer = False."
        assert extract_answer(ablated, PromptVariant.SYMBOLIC_NO_VALIDATE) == "False"

    def test_standard_demo_letter(self, erin):
        demo = make_demonstration(erin, PromptVariant.STANDARD)
        assert json.loads(demo.solution_text) == {"answer": "B"}

    def test_cot_demo_contains_reasoning(self, erin):
        demo = make_demonstration(erin, PromptVariant.COT)
        payload = json.loads(demo.solution_text)
        assert payload["answer"] == "B"
        assert "Erin is quiet." in payload["reasoning"]

    def test_unsolvable_instance_raises(self):
        instance = build_instance(
            "folio-x", "folio", "Entirely free-form text goes here today.",
            "Based on the above information, is the following statement true, "
            "false, or unknown? Bob is calm.",
            "Uncertain",
        )
        with pytest.raises(OracleUnsolvable):
            make_demonstration(instance, PromptVariant.SYMBOLIC)

    def test_generated_demos_verify_clean(self, small_instances):
        for instance in small_instances[:25]:
            demo = make_demonstration(instance, PromptVariant.SYMBOLIC)
            trace = parse_trace(demo.solution_text)
            assert not trace.diagnostics
            assert verify_trace(instance, trace).clean
