"""Multi-level scoring: syntax rate, plan accuracy, faithfulness, retrieval."""

from .benchmark import CaseRun, MetricsReport, render_markdown, run_benchmark, write_report
from .cases import EvalCase, case_directories, category_for_actions, load_case
from .faithfulness import (FaithfulnessScore, compute_faithfulness,
                           faithfulness_from_texts)
from .metrics import (PRF, STANDARD_BUCKETS, BucketRates, PlanAccuracyReport,
                      PlanOutcome, RetrievalScore, SyntaxOutcome,
                      compute_plan_accuracy, compute_retrieval_metrics,
                      compute_scr, cosine_similarity, mean, standard_error)
from .pseudo import (DEFAULT_TASK_COUNT, PseudoTask, build_pseudo_task_request,
                     generate_pseudo_tasks, render_retrieved_context)
from .segments import affected_segments, segment_roots

__all__ = [
    "CaseRun",
    "MetricsReport",
    "render_markdown",
    "run_benchmark",
    "write_report",
    "EvalCase",
    "case_directories",
    "category_for_actions",
    "load_case",
    "FaithfulnessScore",
    "compute_faithfulness",
    "faithfulness_from_texts",
    "PRF",
    "STANDARD_BUCKETS",
    "BucketRates",
    "PlanAccuracyReport",
    "PlanOutcome",
    "RetrievalScore",
    "SyntaxOutcome",
    "compute_plan_accuracy",
    "compute_retrieval_metrics",
    "compute_scr",
    "cosine_similarity",
    "mean",
    "standard_error",
    "DEFAULT_TASK_COUNT",
    "PseudoTask",
    "build_pseudo_task_request",
    "generate_pseudo_tasks",
    "render_retrieved_context",
    "affected_segments",
    "segment_roots",
]
