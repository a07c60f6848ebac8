"""Scoring layer tests.

Every aggregate the report prints is re-derived here with an independent
oracle (brute-force recounts, the plain cosine formula, statistics-module
standard errors) before the implementation's number is trusted.
"""

import json
import math
import random
import shutil
import statistics
from dataclasses import dataclass

import pytest

from protoagent.agent import (Proposal, RequestCategory, RetrievedContext,
                              SubRequest, build_memory)
from protoagent.edit import (AddEntity, DeleteEntity, EntityRef, SetEssential,
                             apply_actions)
from protoagent.errors import (DimensionMismatchError, EmptyCaseSetError,
                               EmptyGoldError, MalformedOutputError,
                               ZeroVectorError)
from protoagent.evaluation import (DEFAULT_TASK_COUNT, PlanOutcome, PseudoTask,
                                   SyntaxOutcome, affected_segments,
                                   build_pseudo_task_request, case_directories,
                                   category_for_actions, compute_faithfulness,
                                   compute_plan_accuracy,
                                   compute_retrieval_metrics, compute_scr,
                                   cosine_similarity, faithfulness_from_texts,
                                   generate_pseudo_tasks, load_case, mean,
                                   run_benchmark, segment_roots,
                                   standard_error)
from protoagent.llm import (ChatGateway, ChatMessage, GatewayConfig,
                            HashingEmbedder, ScriptedChatBackend,
                            ScriptedExchange)
from protoagent.model import (TypedValue, serialize_entity,
                              serialize_protocol)

BUCKETS = ("Modification", "Adding", "Deleting", "JSON")


def refs(*entity_ids):
    return tuple(EntityRef(entity_id=i, name=i, entity_type="CTReconEntity")
                 for i in entity_ids)


def retrieval_of(*entity_ids, essentials=()):
    return RetrievedContext(entities=refs(*entity_ids),
                            essentials=tuple(essentials))


# --- syntax rate and plan accuracy vs. brute-force recounts ---------------


def recount(pairs):
    """Oracle: recompute per-bucket/macro/micro rates from scratch."""
    seen = set(BUCKETS) | {category for category, _ in pairs}
    per = {}
    for category in seen:
        subset = [ok for c, ok in pairs if c == category]
        per[category] = sum(subset) / len(subset) if subset else None
    parts = [per[b] for b in BUCKETS if per[b] is not None]
    macro = sum(parts) / len(parts) if parts else None
    micro = sum(ok for _, ok in pairs) / len(pairs) if pairs else None
    return per, macro, micro


class TestSyntaxRates:
    def test_recount_oracle_on_random_outcome_sets(self):
        rng = random.Random(411)
        categories = BUCKETS + ("Others",)
        for _ in range(100):
            pairs = [(rng.choice(categories), rng.random() < 0.7)
                     for _ in range(rng.randrange(0, 41))]
            rates = compute_scr([SyntaxOutcome(category=c, syntax_ok=ok)
                                 for c, ok in pairs])
            per, macro, micro = recount(pairs)
            assert rates.per_category == per
            assert rates.macro == macro
            assert rates.micro == micro

    def test_empty_outcome_set(self):
        rates = compute_scr([])
        assert rates.macro is None and rates.micro is None
        assert set(rates.per_category) == set(BUCKETS)
        assert all(v is None for v in rates.per_category.values())

    def test_nonstandard_bucket_excluded_from_macro(self):
        outcomes = [SyntaxOutcome("Modification", True),
                    SyntaxOutcome("Others", False)]
        rates = compute_scr(outcomes)
        assert rates.macro == 1.0  # only the standard bucket counts
        assert rates.micro == 0.5  # but everything pools into micro
        assert rates.per_category["Others"] == 0.0

    def test_counts_track_totals(self):
        rates = compute_scr([SyntaxOutcome("Adding", True),
                             SyntaxOutcome("Adding", False),
                             SyntaxOutcome("Adding", True)])
        assert rates.counts["Adding"] == (2, 3)
        assert rates.per_category["Adding"] == 2 / 3


@dataclass(frozen=True)
class FakeCase:
    id: str
    category: str
    gold_segments: tuple


class TestPlanAccuracy:
    def test_recount_oracle_on_random_case_sets(self):
        rng = random.Random(412)
        for _ in range(100):
            cases = [FakeCase(id=f"c{i}", category=rng.choice(BUCKETS),
                              gold_segments=tuple(
                                  f"<seg-{i}-{j}/>"
                                  for j in range(rng.randrange(1, 4))))
                     for i in range(rng.randrange(0, 15))]
            outcomes, expected_missing, expected_wrong, pairs = [], [], [], []
            for case in cases:
                roll = rng.random()
                if roll < 0.2:
                    expected_missing.append(case.id)
                    pairs.append((case.category, False))
                    if rng.random() < 0.5:
                        outcomes.append(PlanOutcome(case.id, None))
                elif roll < 0.4:
                    outcomes.append(PlanOutcome(
                        case.id, case.gold_segments + ("<extra/>",)))
                    expected_wrong.append(case.id)
                    pairs.append((case.category, False))
                else:
                    outcomes.append(PlanOutcome(case.id, case.gold_segments))
                    pairs.append((case.category, True))
            report = compute_plan_accuracy(cases, outcomes)
            per, macro, micro = recount(pairs)
            assert report.rates.per_category == per
            assert report.rates.macro == macro
            assert report.rates.micro == micro
            assert report.missing == tuple(expected_missing)
            assert report.incorrect == tuple(expected_wrong)

    def test_segment_order_matters(self):
        case = FakeCase(id="c1", category="Adding",
                        gold_segments=("<a/>", "<b/>"))
        flipped = compute_plan_accuracy(
            [case], [PlanOutcome("c1", ("<b/>", "<a/>"))])
        assert flipped.incorrect == ("c1",)
        assert flipped.rates.micro == 0.0

    def test_unknown_outcome_ids_ignored(self):
        case = FakeCase(id="c1", category="Deleting", gold_segments=("<a/>",))
        report = compute_plan_accuracy(
            [case], [PlanOutcome("ghost", ("<a/>",)),
                     PlanOutcome("c1", ("<a/>",))])
        assert report.rates.micro == 1.0 and report.missing == ()


# --- cosine similarity, mean, standard error ------------------------------


def cosine_oracle(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    return dot / (math.sqrt(sum(x * x for x in a))
                  * math.sqrt(sum(x * x for x in b)))


class TestCosine:
    def test_matches_direct_formula_on_random_pairs(self):
        rng = random.Random(413)
        for _ in range(1000):
            dim = rng.randrange(1, 17)
            a = [rng.uniform(-10.0, 10.0) for _ in range(dim)]
            b = [rng.uniform(-10.0, 10.0) for _ in range(dim)]
            assert cosine_similarity(a, b) == pytest.approx(
                cosine_oracle(a, b), abs=1e-9)

    def test_parallel_vectors(self):
        assert cosine_similarity([1.0, 0.0], [2.0, 0.0]) == 1.0

    def test_orthogonal_vectors(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 3.0]) == 0.0

    def test_forty_five_degrees(self):
        assert cosine_similarity([1.0, 0.0], [1.0, 1.0]) == pytest.approx(
            1.0 / math.sqrt(2.0), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            cosine_similarity([1.0, 2.0, 3.0], [1.0, 2.0])

    def test_zero_vector_rejected_either_side(self):
        with pytest.raises(ZeroVectorError):
            cosine_similarity([0.0, 0.0], [1.0, 2.0])
        with pytest.raises(ZeroVectorError):
            cosine_similarity([1.0, 2.0], [0.0, 0.0])

    def test_accepts_embedding_vectors(self):
        embedder = HashingEmbedder()
        va, vb = embedder.embed("change the kernel"), embedder.embed("delete it")
        assert cosine_similarity(va, vb) == cosine_similarity(
            list(va.values), list(vb.values))


class TestMeanAndSem:
    def test_mean(self):
        assert mean([]) == 0.0
        assert mean([2, 4, 9]) == 5.0

    def test_sem_degenerate(self):
        assert standard_error([]) == 0.0
        assert standard_error([3.7]) == 0.0

    def test_sem_uses_sample_std(self):
        rng = random.Random(414)
        for _ in range(50):
            data = [rng.uniform(-5, 5) for _ in range(rng.randrange(2, 20))]
            expected = statistics.stdev(data) / math.sqrt(len(data))
            assert standard_error(data) == pytest.approx(expected, abs=1e-12)


# --- faithfulness ---------------------------------------------------------


class TestFaithfulness:
    def test_identical_texts_score_one(self):
        embedder = HashingEmbedder()
        score = faithfulness_from_texts(
            "Set the kernel", ["Set the kernel"] * 10, embedder)
        assert score.mean == pytest.approx(1.0, abs=1e-12)
        assert score.sem == 0.0
        assert score.n == 10 and len(score.similarities) == 10

    def test_matches_independent_recompute(self):
        embedder = HashingEmbedder()
        request = "Change the reconstruction kernel of the lung recon to Bl64"
        tasks = ["Set the lung kernel to Bl64",
                 "Please use a sharper kernel for the lung reconstruction",
                 "Delete the topogram",
                 "Adjust slice thickness on the axial recon",
                 "Switch the lung recon kernel"]
        score = faithfulness_from_texts(request, tasks, embedder)
        anchor = list(embedder.embed(request).values)
        sims = [cosine_oracle(anchor, list(embedder.embed(t).values))
                for t in tasks]
        assert score.mean == pytest.approx(sum(sims) / len(sims), abs=1e-12)
        assert score.sem == pytest.approx(
            statistics.stdev(sims) / math.sqrt(len(sims)), abs=1e-12)
        assert score.similarities == pytest.approx(sims, abs=1e-12)

    def test_single_task_has_zero_sem(self):
        score = faithfulness_from_texts("a request", ["one task"],
                                        HashingEmbedder())
        assert score.n == 1 and score.sem == 0.0

    def test_no_tasks(self):
        score = faithfulness_from_texts("a request", [], HashingEmbedder())
        assert score.n == 0 and score.mean == 0.0 and score.sem == 0.0

    def test_default_task_count(self):
        assert DEFAULT_TASK_COUNT == 10


# --- retrieval precision/recall/F1 ----------------------------------------


class TestRetrievalMetrics:
    def test_hand_worked_case(self):
        score = compute_retrieval_metrics(
            {"a", "b", "c"}, frozenset(), retrieval_of("a", "b", "d", "e"))
        assert score.entity.precision == 0.5
        assert score.entity.recall == 2 / 3
        p, r = 0.5, 2 / 3
        assert score.entity.f1 == 2 * p * r / (p + r)
        assert score.entity.f1 == pytest.approx(4 / 7, abs=1e-15)
        assert score.essential is None

    def test_perfect_retrieval(self):
        score = compute_retrieval_metrics({"a", "b"}, frozenset(),
                                          retrieval_of("b", "a"))
        assert (score.entity.precision, score.entity.recall,
                score.entity.f1) == (1.0, 1.0, 1.0)

    def test_empty_retrieved(self):
        score = compute_retrieval_metrics({"a"}, frozenset(), retrieval_of())
        assert (score.entity.precision, score.entity.recall,
                score.entity.f1) == (0.0, 0.0, 0.0)

    def test_empty_gold_rejected(self):
        with pytest.raises(EmptyGoldError):
            compute_retrieval_metrics(set(), frozenset(), retrieval_of("a"))

    def test_essential_level_scored_when_gold_present(self):
        score = compute_retrieval_metrics(
            {"e1"}, {("e1", "KernelEssential")},
            retrieval_of("e1", essentials=(("e1", "KernelEssential"),
                                           ("e2", "SliceThicknessEssential"))))
        assert score.essential.precision == 0.5
        assert score.essential.recall == 1.0

    def test_metamorphic_monotonicity(self):
        # Dilution with a non-gold hit can only hurt precision and never
        # moves recall; adding a missed gold hit can only help both.
        rng = random.Random(415)
        pool = [f"id{i}" for i in range(12)]
        for _ in range(500):
            gold = set(rng.sample(pool, rng.randrange(1, 7)))
            retrieved = set(rng.sample(pool, rng.randrange(0, 9)))
            base = compute_retrieval_metrics(gold, frozenset(),
                                             retrieval_of(*retrieved)).entity

            diluted = compute_retrieval_metrics(
                gold, frozenset(), retrieval_of(*retrieved, "noise-x")).entity
            assert diluted.precision <= base.precision
            assert diluted.recall == base.recall

            missed = sorted(gold - retrieved)
            if missed:
                boosted = compute_retrieval_metrics(
                    gold, frozenset(),
                    retrieval_of(*retrieved, missed[0])).entity
                assert boosted.recall > base.recall
                assert boosted.precision >= base.precision


# --- affected segments ----------------------------------------------------


class TestAffectedSegments:
    def test_set_essential_yields_entity_subtree(self, thorax, rules):
        actions = [SetEssential("recon-lung", "KernelEssential",
                                TypedValue("EnumToken", "Bl64"))]
        after = apply_actions(thorax, actions, rules=rules).document
        segments = affected_segments(thorax, after, actions)
        assert segments == [serialize_entity(after.get("recon-lung"))]
        assert "Bl64" in segments[0]

    def test_add_entity_yields_parent_subtree(self, thorax, rules):
        actions = [AddEntity("recon-ax", "recon-comp-body")]
        after = apply_actions(thorax, actions, rules=rules).document
        segments = affected_segments(thorax, after, actions)
        assert segments == [serialize_entity(after.get("recon-comp-body"))]
        assert "recon-ax-copy-1" in segments[0]

    def test_delete_yields_surviving_parent(self, thorax, rules):
        actions = [DeleteEntity("recon-ax")]
        after = apply_actions(thorax, actions, rules=rules).document
        segments = affected_segments(thorax, after, actions)
        assert segments == [serialize_entity(after.get("recon-comp-body"))]
        assert "recon-ax" not in segments[0]

    def test_cascade_walks_up_to_survivor(self, thorax, rules):
        # Removing the sole recon inside the LungCAD compound takes the
        # compound with it; the segment root is the post-processing step.
        actions = [DeleteEntity("lungcad-recon")]
        after = apply_actions(thorax, actions, rules=rules).document
        assert after.get("lungcad-comp") is None
        segments = affected_segments(thorax, after, actions)
        assert segments == [serialize_entity(after.get("postproc-1"))]

    def test_root_level_change_serializes_whole_document(self, thorax, rules):
        actions = [DeleteEntity("for-1")]
        after = apply_actions(thorax, actions, rules=rules).document
        segments = affected_segments(thorax, after, actions)
        assert segments == [serialize_protocol(after)]

    def test_duplicate_roots_deduplicated_in_order(self, thorax, rules):
        actions = [SetEssential("recon-lung", "KernelEssential",
                                TypedValue("EnumToken", "Bl64")),
                   SetEssential("recon-lung", "SliceThicknessEssential",
                                TypedValue("Decimal", "1.0")),
                   DeleteEntity("recon-ax")]
        after = apply_actions(thorax, actions, rules=rules).document
        assert segment_roots(thorax, after, actions) == ["recon-lung",
                                                         "recon-comp-body"]
        assert len(affected_segments(thorax, after, actions)) == 2

    def test_rejects_non_action(self, thorax):
        with pytest.raises(TypeError):
            segment_roots(thorax, thorax, ["not an action"])


# --- pseudo tasks ---------------------------------------------------------


def pseudo_gateway(*reply_texts):
    exchanges = tuple(
        ScriptedExchange(reply=(ChatMessage(role="assistant", content=text),),
                         ordinal=i + 1)
        for i, text in enumerate(reply_texts))
    backend = ScriptedChatBackend(exchanges)
    return backend, ChatGateway(backend)


def tasks_json(*texts):
    return json.dumps({"tasks": list(texts)})


class _CaptureBackend:
    """Returns one canned reply while keeping every outgoing prompt."""

    def __init__(self, reply_text):
        self.prompts = []
        self._reply = reply_text

    def chat(self, messages, tools=(), params=None):
        self.prompts.append(tuple(messages))
        return ChatMessage(role="assistant", content=self._reply)


class TestPseudoTasks:
    def test_prompt_contains_stripped_snippets(self, thorax):
        retrieved = retrieval_of("postproc-1", "recon-lung")
        prompt = build_pseudo_task_request(retrieved, thorax, None, 7)
        assert "Reconstruct exactly 7" in prompt
        assert ('<Entity id="recon-lung" name="Recon Lung Bl60" '
                'type="CTReconEntity">') in prompt
        assert "KernelEssential" in prompt
        # children of the retrieved post-processing step are stripped
        assert "lungcad-comp" not in prompt

    def test_prompt_includes_memory_notes(self, thorax):
        memory = build_memory(thorax)
        prompt = build_pseudo_task_request(retrieval_of("recon-lung"), thorax,
                                           memory, 3)
        assert "Entity type notes:" in prompt

    def test_generate_happy_path(self, thorax):
        backend, gateway = pseudo_gateway(tasks_json("one", "two", "three"))
        tasks = generate_pseudo_tasks(retrieval_of("recon-lung"), thorax,
                                      gateway, 3, source_case_id="case-7")
        assert [t.text for t in tasks] == ["one", "two", "three"]
        assert all(t.source_case_id == "case-7" for t in tasks)
        assert backend.calls == 1

    def test_wrong_count_gets_one_corrective_retry(self, thorax):
        backend, gateway = pseudo_gateway(tasks_json("only one"),
                                          tasks_json("a", "b"))
        tasks = generate_pseudo_tasks(retrieval_of("recon-lung"), thorax,
                                      gateway, 2)
        assert len(tasks) == 2
        assert backend.calls == 2

    def test_unparseable_then_good(self, thorax):
        backend, gateway = pseudo_gateway("sorry, no JSON here",
                                          tasks_json("a"))
        tasks = generate_pseudo_tasks(retrieval_of("recon-lung"), thorax,
                                      gateway, 1)
        assert tasks[0].text == "a"

    def test_two_bad_replies_fail(self, thorax):
        backend, gateway = pseudo_gateway(tasks_json("x"), tasks_json("y"))
        with pytest.raises(MalformedOutputError):
            generate_pseudo_tasks(retrieval_of("recon-lung"), thorax,
                                  gateway, 3)

    def test_preconditions(self, thorax):
        _, gateway = pseudo_gateway(tasks_json("a"))
        with pytest.raises(ValueError):
            generate_pseudo_tasks(retrieval_of("recon-lung"), thorax,
                                  gateway, 0)
        with pytest.raises(ValueError):
            generate_pseudo_tasks(retrieval_of(), thorax, gateway, 3)

    def test_empty_task_text_rejected(self):
        with pytest.raises(ValueError):
            PseudoTask(text="   ")

    def test_request_text_never_reaches_the_prompt(self, thorax):
        # Faithfulness reconstructs requests from retrieved context alone;
        # leaking the original wording would make the score meaningless.
        sentinel = "zebra-crossing-9981 unique wording"
        backend = _CaptureBackend(tasks_json(*[f"task {i}" for i in range(10)]))
        proposal = Proposal(
            id="prop-1",
            subrequest=SubRequest(text=sentinel,
                                  category=RequestCategory.MODIFICATION),
            retrieved=retrieval_of("recon-lung"))
        score = compute_faithfulness(sentinel, proposal, thorax,
                                     ChatGateway(backend), HashingEmbedder())
        assert score.n == 10
        assert backend.prompts, "expected at least one generation call"
        for prompt in backend.prompts:
            for message in prompt:
                assert sentinel not in (message.content or "")


# --- case loading ---------------------------------------------------------


def write_case(directory, *, protocol=None, request_txt=None,
               request_json=None, actions=None, segments=None,
               retrieval=None):
    directory.mkdir(parents=True, exist_ok=True)
    if protocol is not None:
        (directory / "protocol.xml").write_text(protocol, encoding="utf-8")
    if request_txt is not None:
        (directory / "request.txt").write_text(request_txt, encoding="utf-8")
    if request_json is not None:
        (directory / "request.json").write_text(request_json, encoding="utf-8")
    if actions is not None:
        (directory / "gold_actions.json").write_text(json.dumps(actions),
                                                     encoding="utf-8")
    if segments is not None:
        seg_dir = directory / "gold_segments"
        seg_dir.mkdir(exist_ok=True)
        for i, text in enumerate(segments):
            (seg_dir / f"{i:02d}.xml").write_text(text, encoding="utf-8")
    if retrieval is not None:
        (directory / "gold_retrieval.json").write_text(json.dumps(retrieval),
                                                       encoding="utf-8")
    return directory


DELETE_ACTION = [{"op": "delete_entity", "entity_id": "recon-ax"}]
FULL_KWARGS = dict(protocol="<x/>", request_txt="Delete the axial recon.",
                   actions=DELETE_ACTION, segments=("<a/>",),
                   retrieval={"entity_ids": ["recon-ax"], "essentials": []})


class TestCaseLoading:
    def test_category_for_actions(self):
        value = TypedValue("EnumToken", "Bl64")
        assert category_for_actions(
            [SetEssential("a", "KernelEssential", value)]) == "Modification"
        assert category_for_actions([AddEntity("a", "b")]) == "Adding"
        assert category_for_actions(
            [DeleteEntity("a"), DeleteEntity("b")]) == "Deleting"
        with pytest.raises(ValueError):
            category_for_actions([DeleteEntity("a"), AddEntity("a", "b")])
        with pytest.raises(ValueError):
            category_for_actions([])

    @pytest.mark.parametrize("omit, message", [
        ("protocol", "protocol.xml"),
        ("request_txt", "exactly one"),
        ("actions", "gold_actions"),
        ("segments", "gold_segments"),
        ("retrieval", "gold_retrieval"),
    ])
    def test_missing_pieces_rejected(self, tmp_path, omit, message):
        kwargs = {k: v for k, v in FULL_KWARGS.items() if k != omit}
        directory = write_case(tmp_path / "broken", **kwargs)
        with pytest.raises(ValueError, match=message):
            load_case(directory)

    def test_both_request_forms_rejected(self, tmp_path):
        directory = write_case(tmp_path / "both", **FULL_KWARGS,
                               request_json="{}")
        with pytest.raises(ValueError, match="exactly one"):
            load_case(directory)

    def test_empty_gold_actions_rejected(self, tmp_path):
        kwargs = dict(FULL_KWARGS, actions=[])
        with pytest.raises(ValueError, match="empty"):
            load_case(write_case(tmp_path / "noact", **kwargs))

    def test_empty_gold_entity_ids_rejected(self, tmp_path):
        kwargs = dict(FULL_KWARGS,
                      retrieval={"entity_ids": [], "essentials": []})
        with pytest.raises(ValueError, match="entity_ids"):
            load_case(write_case(tmp_path / "nogold", **kwargs))

    def test_loads_natural_language_case(self, cases_dir):
        case = load_case(cases_dir / "mod-kernel-lung")
        assert case.category == "Modification"
        assert case.request_text and case.request_json is None
        assert case.gold_entity_ids == frozenset({"recon-lung"})
        assert ("recon-lung", "KernelEssential") in case.gold_essentials
        assert case.script_path is not None
        assert len(case.gold_segments) >= 1

    def test_loads_structured_case(self, cases_dir):
        case = load_case(cases_dir / "json-delete-lungcad")
        assert case.category == "JSON"
        assert case.request_json and case.request_text is None

    def test_case_directories(self, cases_dir, tmp_path):
        names = [p.name for p in case_directories(cases_dir)]
        assert len(names) == 12 and names == sorted(names)
        with pytest.raises(EmptyCaseSetError):
            case_directories(tmp_path / "missing")
        empty = tmp_path / "empty"
        empty.mkdir()
        with pytest.raises(EmptyCaseSetError):
            case_directories(empty)


# --- the batch benchmark --------------------------------------------------


@pytest.fixture(scope="module")
def shipped_report(cases_dir):
    return run_benchmark(cases_dir, GatewayConfig(backend="mock"))


class TestBenchmark:
    def test_shipped_cases_all_green(self, shipped_report):
        report = shipped_report
        assert report.case_count == 12
        assert report.failures == {}
        assert report.scr.micro == 1.0 and report.scr.macro == 1.0
        assert all(report.scr.per_category[b] == 1.0 for b in BUCKETS)
        assert report.plan_accuracy.rates.micro == 1.0
        assert report.plan_accuracy.missing == ()
        assert report.plan_accuracy.incorrect == ()

    def test_shipped_retrieval_aggregates(self, shipped_report):
        aggregate = shipped_report.retrieval["aggregate"]
        assert aggregate["entity"]["recall"]["mean"] == 1.0
        assert aggregate["entity"]["recall"]["n"] == 12
        assert 0.0 < aggregate["entity"]["precision"]["mean"] <= 1.0
        # only the modification-style cases carry essential-level gold
        assert aggregate["essential"]["precision"]["n"] == 4
        assert aggregate["essential"]["f1"]["mean"] == 1.0

    def test_shipped_faithfulness_aggregates(self, shipped_report):
        aggregate = shipped_report.faithfulness["aggregate"]
        assert aggregate["n"] == 12
        assert 0.0 < aggregate["mean"] < 1.0
        per_case = shipped_report.faithfulness["per_case"]
        assert all(entry["n"] == DEFAULT_TASK_COUNT
                   for entry in per_case.values())

    def test_runs_are_deterministic(self, shipped_report, cases_dir):
        again = run_benchmark(cases_dir, GatewayConfig(backend="mock"))
        as_text = json.dumps(shipped_report.to_json(), sort_keys=True)
        assert json.dumps(again.to_json(), sort_keys=True) == as_text

    def test_report_files_written(self, cases_dir, tmp_path):
        report = run_benchmark(cases_dir, GatewayConfig(backend="mock"),
                               out_dir=tmp_path / "out")
        payload = json.loads((tmp_path / "out" / "report.json").read_text())
        assert payload == report.to_json()
        markdown = (tmp_path / "out" / "report.md").read_text()
        assert "| SCR |" in markdown and "| Plan accuracy |" in markdown
        assert markdown == report.to_markdown()

    def test_one_corrupted_case_fails_in_isolation(self, cases_dir, tmp_path):
        mirror = tmp_path / "cases"
        shutil.copytree(cases_dir, mirror)
        (mirror / "del-lungcad" / "script.json").write_text("{not json",
                                                            encoding="utf-8")
        report = run_benchmark(mirror, GatewayConfig(backend="mock"))
        assert set(report.failures) == {"del-lungcad"}
        assert report.scr.micro == 11 / 12
        assert report.scr.per_category["Modification"] == 1.0
        assert "del-lungcad" in report.plan_accuracy.missing

    def test_empty_case_dir_raises(self, tmp_path):
        with pytest.raises(EmptyCaseSetError):
            run_benchmark(tmp_path / "nope", GatewayConfig(backend="mock"))
