"""Scoring primitives: syntax rates, exact-match plan accuracy, cosine
similarity and retrieval precision/recall/F1."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..agent import RetrievedContext
from ..errors import DimensionMismatchError, EmptyGoldError, ZeroVectorError

# The four report columns; "JSON" is its own bucket because structured
# requests skip the router and are scored as their own input mode.
STANDARD_BUCKETS = ("Modification", "Adding", "Deleting", "JSON")


@dataclass(frozen=True)
class SyntaxOutcome:
    category: str
    syntax_ok: bool


@dataclass(frozen=True)
class BucketRates:
    """Per-category rates plus the two aggregate views.

    macro averages the four standard buckets (empty ones excluded, reported
    as None); micro pools every outcome into one ratio.
    """

    per_category: dict
    counts: dict
    macro: float | None
    micro: float | None

    def to_json(self) -> dict:
        return {"per_category": dict(self.per_category),
                "counts": {k: list(v) for k, v in self.counts.items()},
                "macro": self.macro, "micro": self.micro}


def _bucket_rates(pairs: list[tuple[str, bool]]) -> BucketRates:
    counts: dict = {bucket: [0, 0] for bucket in STANDARD_BUCKETS}
    for category, ok in pairs:
        bucket = counts.setdefault(category, [0, 0])
        bucket[0] += int(ok)
        bucket[1] += 1
    per_category = {category: (correct / total if total else None)
                    for category, (correct, total) in counts.items()}
    macro_parts = [per_category[b] for b in STANDARD_BUCKETS
                   if per_category[b] is not None]
    total_correct = sum(c for c, _ in counts.values())
    total = sum(t for _, t in counts.values())
    return BucketRates(per_category=per_category,
                       counts={k: tuple(v) for k, v in counts.items()},
                       macro=(sum(macro_parts) / len(macro_parts)
                              if macro_parts else None),
                       micro=(total_correct / total if total else None))


def compute_scr(outcomes: list[SyntaxOutcome]) -> BucketRates:
    """Syntax correctness rate: share of outcomes whose serialized result
    still parses cleanly, per category and aggregated."""
    return _bucket_rates([(o.category, o.syntax_ok) for o in outcomes])


@dataclass(frozen=True)
class PlanOutcome:
    """What one evaluated case produced; segments=None means no result."""

    case_id: str
    segments: tuple | None


@dataclass(frozen=True)
class PlanAccuracyReport:
    rates: BucketRates
    missing: tuple
    incorrect: tuple

    def to_json(self) -> dict:
        return {"rates": self.rates.to_json(), "missing": list(self.missing),
                "incorrect": list(self.incorrect)}


def compute_plan_accuracy(cases, outcomes: list[PlanOutcome]) -> PlanAccuracyReport:
    """Exact-match accuracy: a case is correct iff its affected subtrees,
    canonically serialized, equal the gold segments byte for byte.

    Cases without a produced outcome count as incorrect and are listed in
    ``missing``.
    """
    by_id = {o.case_id: o for o in outcomes}
    pairs = []
    missing = []
    incorrect = []
    for case in cases:
        outcome = by_id.get(case.id)
        if outcome is None or outcome.segments is None:
            missing.append(case.id)
            pairs.append((case.category, False))
            continue
        ok = tuple(outcome.segments) == tuple(case.gold_segments)
        if not ok:
            incorrect.append(case.id)
        pairs.append((case.category, ok))
    return PlanAccuracyReport(rates=_bucket_rates(pairs),
                              missing=tuple(missing),
                              incorrect=tuple(incorrect))


def _vector(value) -> np.ndarray:
    values = getattr(value, "values", value)
    return np.asarray(values, dtype=np.float64)


def cosine_similarity(a, b) -> float:
    """Plain cosine of the angle between two embedding vectors."""
    va, vb = _vector(a), _vector(b)
    if va.shape != vb.shape:
        raise DimensionMismatchError(
            f"vector sizes differ: {va.shape[0]} vs {vb.shape[0]}")
    norm_a = float(np.linalg.norm(va))
    norm_b = float(np.linalg.norm(vb))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for zero vectors")
    return float(np.dot(va, vb) / (norm_a * norm_b))


def mean(values) -> float:
    data = list(values)
    return float(np.mean(np.asarray(data, dtype=np.float64))) if data else 0.0


def standard_error(values) -> float:
    """Standard error of the mean, sample std with n-1; 0.0 for n <= 1."""
    data = np.asarray(list(values), dtype=np.float64)
    if data.size <= 1:
        return 0.0
    return float(np.std(data, ddof=1) / math.sqrt(data.size))


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float

    def to_json(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class RetrievalScore:
    entity: PRF
    essential: PRF | None  # None when the case has no essential-level gold

    def to_json(self) -> dict:
        return {"entity": self.entity.to_json(),
                "essential": self.essential.to_json() if self.essential else None}


def _prf(gold: frozenset, retrieved: frozenset) -> PRF:
    hit = len(gold & retrieved)
    precision = hit / len(retrieved) if retrieved else 0.0
    recall = hit / len(gold)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return PRF(precision=precision, recall=recall, f1=f1)


def compute_retrieval_metrics(gold_entity_ids, gold_essentials,
                              retrieved: RetrievedContext) -> RetrievalScore:
    """Score what the planner retrieved against the gold context.

    Entity-level gold must be non-empty; essential-level scoring is skipped
    (None) when that gold set is empty.
    """
    if not gold_entity_ids:
        raise EmptyGoldError("entity-level gold set is empty")
    entity = _prf(frozenset(gold_entity_ids),
                  frozenset(ref.entity_id for ref in retrieved.entities))
    essential = None
    if gold_essentials:
        essential = _prf(frozenset(tuple(p) for p in gold_essentials),
                         frozenset(retrieved.essentials))
    return RetrievalScore(entity=entity, essential=essential)
