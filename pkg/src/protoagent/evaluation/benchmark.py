"""Batch evaluation over a case directory.

For every case: route or parse the request, plan, auto-approve, execute,
then score syntax, exact-match segments, retrieval overlap and plan
faithfulness. Per-case errors become report entries, never batch aborts.
With the scripted backend the whole run is offline and byte-deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..agent import (ProposalStatus, RetrievedContext, build_memory, execute,
                     parse_structured_request, plan, route)
from ..llm import (ChatGateway, GatewayConfig, ScriptedChatBackend,
                   make_chat_backend, make_embedder)
from ..model import (RuleSet, SchemaRegistry, load_rules, parse_protocol,
                     serialize_protocol, validate_syntax)
from .cases import EvalCase, case_directories, load_case
from .faithfulness import FaithfulnessScore, faithfulness_from_texts
from .metrics import (BucketRates, PlanAccuracyReport, PlanOutcome,
                      RetrievalScore, SyntaxOutcome, compute_plan_accuracy,
                      compute_retrieval_metrics, compute_scr, mean,
                      standard_error)
from .pseudo import DEFAULT_TASK_COUNT, generate_pseudo_tasks
from .segments import affected_segments


@dataclass
class CaseRun:
    case: EvalCase
    syntax_ok: bool = False
    segments: tuple | None = None
    retrieval: RetrievalScore | None = None
    faithfulness: FaithfulnessScore | None = None
    error: str | None = None


@dataclass(frozen=True)
class MetricsReport:
    scr: BucketRates
    plan_accuracy: PlanAccuracyReport
    retrieval: dict
    faithfulness: dict
    failures: dict
    case_count: int

    def to_json(self) -> dict:
        return {"case_count": self.case_count,
                "scr": self.scr.to_json(),
                "plan_accuracy": self.plan_accuracy.to_json(),
                "retrieval": self.retrieval,
                "faithfulness": self.faithfulness,
                "failures": dict(self.failures)}

    def to_markdown(self) -> str:
        return render_markdown(self)


def _case_backend(config: GatewayConfig, case: EvalCase):
    if config.backend == "mock":
        if case.script_path is None:
            raise FileNotFoundError(f"case {case.id}: script.json missing")
        return ScriptedChatBackend.from_file(case.script_path)
    return make_chat_backend(config)


def _merge_retrieved(parts: list[RetrievedContext]) -> RetrievedContext:
    entities: list = []
    essentials: list = []
    for part in parts:
        for ref in part.entities:
            if ref not in entities:
                entities.append(ref)
        for pair in part.essentials:
            if pair not in essentials:
                essentials.append(pair)
    return RetrievedContext(entities=tuple(entities), essentials=tuple(essentials))


def _run_case(case: EvalCase, config: GatewayConfig, rules: RuleSet,
              registry: SchemaRegistry | None, embedder,
              pseudo_count: int) -> CaseRun:
    run = CaseRun(case=case)
    before = parse_protocol(case.protocol_path.read_text(encoding="utf-8"),
                            registry=registry)
    gateway = ChatGateway(_case_backend(config, case))
    memory = build_memory(before)

    if case.request_json is not None:
        subs = parse_structured_request(case.request_json)
        anchor_text = subs[0].text
    else:
        subs = route(case.request_text, gateway)
        anchor_text = case.request_text

    doc = before
    actions: list = []
    retrieved_parts: list[RetrievedContext] = []
    for index, sub in enumerate(subs):
        if not sub.dispatchable:
            continue
        proposal = plan(sub, doc, memory, gateway, rules=rules,
                        proposal_id=f"prop-{index + 1}")
        retrieved_parts.append(proposal.retrieved)
        if proposal.status is ProposalStatus.FAILED:
            raise RuntimeError(f"planning failed: {proposal.error}")
        done, result = execute(proposal.advance(ProposalStatus.APPROVED), doc,
                               rules=rules, registry=registry)
        if done.status is not ProposalStatus.APPLIED:
            raise RuntimeError(f"execution failed: {done.error}")
        doc = result.document
        actions.extend(proposal.actions)

    run.syntax_ok = validate_syntax(serialize_protocol(doc)).ok
    run.segments = tuple(affected_segments(before, doc, actions))
    retrieved = _merge_retrieved(retrieved_parts)
    if case.gold_entity_ids:
        run.retrieval = compute_retrieval_metrics(case.gold_entity_ids,
                                                  case.gold_essentials,
                                                  retrieved)
    tasks = generate_pseudo_tasks(retrieved, before, gateway, pseudo_count,
                                  memory=memory, source_case_id=case.id)
    run.faithfulness = faithfulness_from_texts(anchor_text,
                                               [t.text for t in tasks],
                                               embedder)
    return run


def _aggregate_retrieval(runs: list[CaseRun]) -> dict:
    per_case = {}
    levels: dict = {"entity": {"precision": [], "recall": [], "f1": []},
                    "essential": {"precision": [], "recall": [], "f1": []}}
    for run in runs:
        if run.retrieval is None:
            continue
        per_case[run.case.id] = run.retrieval.to_json()
        for level, prf in (("entity", run.retrieval.entity),
                           ("essential", run.retrieval.essential)):
            if prf is None:
                continue
            for metric, value in prf.to_json().items():
                levels[level][metric].append(value)
    aggregate = {}
    for level, metrics in levels.items():
        if not metrics["precision"]:
            aggregate[level] = None
            continue
        aggregate[level] = {metric: {"mean": mean(values),
                                     "sem": standard_error(values),
                                     "n": len(values)}
                            for metric, values in metrics.items()}
    return {"aggregate": aggregate, "per_case": per_case}


def _aggregate_faithfulness(runs: list[CaseRun]) -> dict:
    per_case = {run.case.id: run.faithfulness.to_json()
                for run in runs if run.faithfulness is not None}
    means = [entry["mean"] for entry in per_case.values()]
    aggregate = None
    if means:
        aggregate = {"mean": mean(means), "sem": standard_error(means),
                     "n": len(means)}
    return {"aggregate": aggregate, "per_case": per_case}


def run_benchmark(case_dir: Path, config: GatewayConfig | None = None, *,
                  out_dir: Path | None = None, rules: RuleSet | None = None,
                  registry: SchemaRegistry | None = None,
                  pseudo_count: int = DEFAULT_TASK_COUNT) -> MetricsReport:
    config = config or GatewayConfig(backend="mock")
    rules = rules if rules is not None else load_rules()
    embedder = make_embedder(config)

    cases: list[EvalCase] = []
    failures: dict = {}
    directories = case_directories(Path(case_dir))
    for directory in directories:
        try:
            cases.append(load_case(directory))
        except (ValueError, OSError, json.JSONDecodeError) as exc:
            failures[directory.name] = f"load: {exc}"

    runs: list[CaseRun] = []
    syntax_outcomes: list[SyntaxOutcome] = []
    plan_outcomes: list[PlanOutcome] = []
    for case in cases:
        try:
            run = _run_case(case, config, rules, registry, embedder,
                            pseudo_count)
        except Exception as exc:  # per-case isolation, batch never aborts
            run = CaseRun(case=case, error=f"{type(exc).__name__}: {exc}")
            failures[case.id] = run.error
        runs.append(run)
        syntax_outcomes.append(SyntaxOutcome(category=case.category,
                                             syntax_ok=run.syntax_ok))
        plan_outcomes.append(PlanOutcome(case_id=case.id, segments=run.segments))

    report = MetricsReport(scr=compute_scr(syntax_outcomes),
                           plan_accuracy=compute_plan_accuracy(cases, plan_outcomes),
                           retrieval=_aggregate_retrieval(runs),
                           faithfulness=_aggregate_faithfulness(runs),
                           failures=failures,
                           case_count=len(directories))
    if out_dir is not None:
        write_report(report, Path(out_dir))
    return report


def write_report(report: MetricsReport, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(report.to_json(), indent=2, sort_keys=True,
                         ensure_ascii=False) + "\n"
    (out_dir / "report.json").write_text(payload, encoding="utf-8")
    (out_dir / "report.md").write_text(report.to_markdown(), encoding="utf-8")


# --- rendering -------------------------------------------------------------


def _fmt(value) -> str:
    return "-" if value is None else f"{value:.3f}"


def _rate_row(label: str, rates: BucketRates) -> str:
    cells = [_fmt(rates.per_category.get(bucket))
             for bucket in ("Modification", "Adding", "Deleting", "JSON")]
    return (f"| {label} | " + " | ".join(cells)
            + f" | {_fmt(rates.macro)} | {_fmt(rates.micro)} |")


def render_markdown(report: MetricsReport) -> str:
    lines = ["# Evaluation report", "",
             f"Cases: {report.case_count}, failures: {len(report.failures)}.",
             "",
             "## Syntax correctness and plan accuracy", "",
             "| Metric | Modification | Adding | Deleting | JSON | General (macro) | General (micro) |",
             "|---|---|---|---|---|---|---|",
             _rate_row("SCR", report.scr),
             _rate_row("Plan accuracy", report.plan_accuracy.rates),
             ""]

    lines += ["## Plan faithfulness", ""]
    aggregate = report.faithfulness.get("aggregate")
    if aggregate is None:
        lines.append("No faithfulness scores (all cases failed before scoring).")
    else:
        lines += ["| Case | Mean | SEM | n |", "|---|---|---|---|"]
        for case_id in sorted(report.faithfulness["per_case"]):
            entry = report.faithfulness["per_case"][case_id]
            lines.append(f"| {case_id} | {_fmt(entry['mean'])} | "
                         f"{_fmt(entry['sem'])} | {entry['n']} |")
        lines.append(f"| **all cases** | {_fmt(aggregate['mean'])} | "
                     f"{_fmt(aggregate['sem'])} | {aggregate['n']} |")
    lines.append("")

    lines += ["## Retrieval", ""]
    if not report.retrieval["per_case"]:
        lines.append("No retrieval scores (all cases failed before scoring).")
    else:
        lines += ["| Level | Precision | Recall | F1 | n |", "|---|---|---|---|---|"]
        for level in ("entity", "essential"):
            stats = report.retrieval["aggregate"].get(level)
            if stats is None:
                lines.append(f"| {level} | - | - | - | 0 |")
                continue
            cells = [f"{_fmt(stats[m]['mean'])} ± {_fmt(stats[m]['sem'])}"
                     for m in ("precision", "recall", "f1")]
            lines.append(f"| {level} | " + " | ".join(cells)
                         + f" | {stats['precision']['n']} |")
    lines.append("")

    if report.failures:
        lines += ["## Failures", ""]
        for case_id in sorted(report.failures):
            lines.append(f"- {case_id}: {report.failures[case_id]}")
        lines.append("")
    return "\n".join(lines) + "\n"
