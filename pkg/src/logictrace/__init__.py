"""logictrace: symbolic chain-of-thought reasoning over constrained rule text.

Parses the restricted natural-language dialect into rules, answers queries
with a deterministic forward-chaining oracle, builds few-shot prompts in five
variants, parses and verifies symbolic reasoning traces, and evaluates model
endpoints (or the oracle offline) with accuracy, confusion-matrix, and
error-taxonomy reporting.
"""

from .client import EndpointError, ModelEndpointConfig, ResponseCache, query_model
from .datasets import Instance, SchemaMismatch, build_instance, load_dataset, save_dataset
from .evaluate import EvalReport, PerInstanceResult, confusion_matrix, run_eval, score_answer
from .prompts import (
    Demonstration,
    MissingDemonstrations,
    PromptText,
    PromptVariant,
    build_prompt,
    make_demonstration,
)
from .reasoner import (
    AmbiguousAnswer,
    Instantiation,
    KnowledgeBase,
    OracleUnsolvable,
    answer_query,
    forward_closure,
    match_rule,
    solve_with_trace,
)
from .report import emit_report, load_report
from .rules import (
    Literal,
    Predicate,
    Question,
    Rule,
    Term,
    UnparsedQuestion,
    UnparsedSentence,
    negate,
    parse_context,
    parse_question,
    parse_sentence,
    render,
)
from .traces import (
    NonHaltingTrace,
    Trace,
    TraceStep,
    ValidateStep,
    extract_answer,
    parse_trace,
    render_trace,
)
from .verifier import (
    StepVerdict,
    VerificationReport,
    check_validate_step,
    classify_errors,
    verify_trace,
)

__version__ = "0.1.0"
