"""Command-line interface: run evaluations, verify trace files, generate demos.

    eval run --dataset proofwriter --data instances.jsonl --variant symbolic \
        --offline --out results/
    eval verify --data instances.jsonl --traces outputs.jsonl --out results/
    eval demo-gen --data instances.jsonl --k 2 --out demos.json

Exit code 0 on success, 2 on a partial run.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .client import ModelEndpointConfig, ResponseCache
from .datasets import load_dataset
from .demos import default_demonstrations, load_demo_file, save_demo_file
from .evaluate import run_eval
from .prompts import PromptVariant, make_demonstration
from .reasoner import OracleUnsolvable
from .report import emit_report, taxonomy_figure
from .traces import parse_trace
from .verifier import ERROR_CLASSES, classify_errors, verify_trace

PARTIAL_EXIT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eval", description="Evaluate reasoning variants over logic benchmarks."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one or more prompt variants over a dataset")
    run.add_argument("--dataset", required=True,
                     choices=["proofwriter", "prontoqa", "logicaldeduction", "folio"])
    run.add_argument("--data", required=True, help="benchmark file (normalized or native)")
    run.add_argument("--variant", default="symbolic",
                     help="comma-separated subset of standard,cot,symbolic,"
                          "symbolic-nokb,symbolic-novalidate")
    run.add_argument("--demos", default=None, help="demonstration JSON file")
    run.add_argument("--k", type=int, default=2, help="bundled demonstrations to use")
    run.add_argument("--endpoint", default="", help="OpenAI-compatible base URL")
    run.add_argument("--model", default="offline-oracle")
    run.add_argument("--api-key-env", default="OPENAI_API_KEY")
    run.add_argument("--offline", action="store_true",
                     help="substitute the oracle for the model; no network")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--cache", default=None, help="response cache path (JSONL)")
    run.add_argument("--max-parallel", type=int, default=4)
    run.add_argument("--limit", type=int, default=None, help="evaluate only the first N")

    verify = sub.add_parser("verify", help="verify stored model traces against a dataset")
    verify.add_argument("--data", required=True)
    verify.add_argument("--traces", required=True,
                        help="JSONL with {id, output_text} or a directory of <id>.txt files")
    verify.add_argument("--out", required=True)

    demo = sub.add_parser("demo-gen", help="generate oracle demonstrations from a dataset")
    demo.add_argument("--data", required=True)
    demo.add_argument("--k", type=int, default=2)
    demo.add_argument("--variant", default="symbolic")
    demo.add_argument("--dataset", default="proofwriter")
    demo.add_argument("--out", required=True)
    return parser


def _load_traces(path: str) -> dict[str, str]:
    p = Path(path)
    if p.is_dir():
        return {f.stem: f.read_text(encoding="utf-8") for f in sorted(p.glob("*.txt"))}
    out: dict[str, str] = {}
    for line in p.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        out[str(record["id"])] = record["output_text"]
    return out


def _cmd_run(args) -> int:
    instances = load_dataset(args.data, args.dataset)
    if args.limit:
        instances = instances[: args.limit]
    config = ModelEndpointConfig(
        base_url=args.endpoint,
        model_name=args.model,
        api_key_env=args.api_key_env,
        max_parallel=args.max_parallel,
    )
    cache = ResponseCache(args.cache) if args.cache else None
    reports = []
    for name in args.variant.split(","):
        variant = PromptVariant(name.strip())
        if args.demos:
            demos = load_demo_file(args.demos, variant)
        else:
            demos = default_demonstrations(variant, k=args.k)
        reports.append(
            run_eval(instances, variant, demos, config, offline=args.offline, cache=cache)
        )
    paths = emit_report(reports, args.out)
    for report in reports:
        print(f"{report.variant}: accuracy {report.accuracy:.3f} "
              f"on {report.instance_count} instances"
              + (" [partial]" if report.partial else ""))
    print(f"wrote {len(paths)} files to {args.out}")
    return PARTIAL_EXIT if any(r.partial for r in reports) else 0


def _cmd_verify(args) -> int:
    instances = {i.id: i for i in load_dataset(args.data, "proofwriter")}
    traces_by_id = _load_traces(args.traces)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    missing = sorted(set(traces_by_id) - set(instances))
    for instance_id in sorted(set(traces_by_id) & set(instances)):
        trace = parse_trace(traces_by_id[instance_id])
        reports.append(verify_trace(instances[instance_id], trace))
    payload = [r.to_dict() for r in reports]
    (out_dir / "verification.json").write_text(
        json.dumps({"reports": payload}, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    histogram = {cls: 0 for cls in ERROR_CLASSES}
    for report in reports:
        for cls, count in classify_errors(report).items():
            histogram[cls] += count
    clean = sum(1 for r in reports if r.clean)
    lines = ["# Trace verification", "",
             f"Verified {len(reports)} traces; {clean} clean.", "",
             "| class | count |", "|---|---:|"]
    lines.extend(f"| {cls} | {count} |" for cls, count in histogram.items())
    lines.append("")
    (out_dir / "verification.md").write_text("\n".join(lines), encoding="utf-8")
    taxonomy_figure(histogram, f"Error taxonomy ({len(reports)} traces)",
                    out_dir / "errors_verified.png")
    print(f"verified {len(reports)} traces ({clean} clean); "
          f"taxonomy {histogram}")
    if missing:
        print(f"warning: {len(missing)} trace ids not found in the dataset", file=sys.stderr)
        return PARTIAL_EXIT
    return 0


def _cmd_demo_gen(args) -> int:
    variant = PromptVariant(args.variant)
    instances = load_dataset(args.data, args.dataset)
    demos = []
    for instance in instances:
        try:
            demo = make_demonstration(instance, variant)
        except OracleUnsolvable:
            continue
        if demo.answer != instance.gold:
            logging.getLogger(__name__).warning(
                "skipping %s: oracle answer %s disagrees with gold %s",
                instance.id, demo.answer, instance.gold,
            )
            continue
        demos.append(demo)
        if len(demos) >= args.k:
            break
    if len(demos) < args.k:
        print(f"error: only {len(demos)} of {args.k} requested demonstrations are "
              "oracle-solvable", file=sys.stderr)
        return PARTIAL_EXIT
    save_demo_file(args.out, args.dataset, variant, demos)
    print(f"wrote {len(demos)} demonstrations to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "verify":
        return _cmd_verify(args)
    return _cmd_demo_gen(args)


if __name__ == "__main__":
    sys.exit(main())
