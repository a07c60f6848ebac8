"""Retrieval queries, edit primitives, cascades, and the action codec."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genprotocol import non_root_ids, random_document
from protoagent.edit import (ID_ASSIGNED, PARENT_REMOVED, AddEntity,
                             DeleteEntity, EntityQuery, SetEssential,
                             action_from_json, action_to_json,
                             add_entity_from_template, apply_actions,
                             delete_entity, get_essentials, retrieve_entities,
                             set_essential, value_from_json, value_to_json)
from protoagent.errors import (ActionError, CannotDeleteRootError,
                               EmptyQueryError, JsonSchemaError,
                               PlacementNotAllowedError, TypeMismatchError,
                               UnknownEntityError, UnknownEssentialError,
                               ValueNotAllowedError)
from protoagent.model import (CompositeNode, Entity, Essential,
                              ProtocolDocument, TypedValue, iter_entities,
                              serialize_protocol)


def entity(eid, etype, name=None, essentials=(), children=()):
    return Entity(id=eid, name=name or eid, entity_type=etype,
                  essentials=tuple(essentials), children=tuple(children))


def doc_of(*children):
    return ProtocolDocument("1.0", entity("root", "ScanProtocol", "Root",
                                          (), children))


# --- retrieval ------------------------------------------------------------


class TestRetrieve:
    def test_by_type(self, thorax):
        refs = retrieve_entities(thorax, EntityQuery(type_filter="CTReconEntity"))
        assert {r.entity_id for r in refs} == {
            "recon-ax", "recon-cor", "recon-sag", "recon-lung", "lungcad-recon"}

    def test_by_name_substring_case_insensitive(self, thorax):
        refs = retrieve_entities(thorax, EntityQuery(name_contains="lungcad"))
        assert [r.entity_id for r in refs] == ["lungcad-comp", "lungcad-recon"]

    def test_keyword_searches_names_types_and_values(self, thorax):
        hits = retrieve_entities(thorax, EntityQuery(keyword="topogram"))
        assert "topo-1" in {r.entity_id for r in hits}
        # keyword also matches scalar essential payloads
        hits = retrieve_entities(thorax, EntityQuery(keyword="Bl60"))
        assert all(h.entity_type == "CTReconEntity" for h in hits)
        assert hits

    def test_filters_combine_conjunctively(self, thorax):
        refs = retrieve_entities(thorax, EntityQuery(
            type_filter="CTReconEntity", name_contains="Lung"))
        assert {r.entity_id for r in refs} == {"recon-lung", "lungcad-recon"}

    def test_document_order_and_cap(self, thorax):
        refs = retrieve_entities(thorax, EntityQuery(type_filter="CTReconEntity",
                                                     max_results=2))
        assert [r.entity_id for r in refs] == ["recon-ax", "recon-cor"]

    def test_empty_query_rejected(self, thorax):
        with pytest.raises(EmptyQueryError):
            retrieve_entities(thorax, EntityQuery())

    def test_no_matches_is_empty_list(self, thorax):
        assert retrieve_entities(thorax, EntityQuery(keyword="zebra")) == []


def test_get_essentials(thorax):
    all_ess = get_essentials(thorax, "recon-lung")
    assert [e.name for e in all_ess][:2] == ["KernelEssential",
                                             "SliceThicknessEssential"]
    few = get_essentials(thorax, "recon-lung", names=["KernelEssential"])
    assert [e.name for e in few] == ["KernelEssential"]
    assert get_essentials(thorax, "recon-lung", names=["Nope"]) == []
    with pytest.raises(UnknownEntityError):
        get_essentials(thorax, "ghost")


# --- set_essential --------------------------------------------------------


class TestSetEssential:
    def test_replaces_value_and_leaves_input_untouched(self, thorax):
        before = serialize_protocol(thorax)
        out = set_essential(thorax, "recon-lung", "KernelEssential",
                            TypedValue.enum("Br40"))
        assert out.get("recon-lung").essential("KernelEssential").value.payload == "Br40"
        assert serialize_protocol(thorax) == before

    def test_preserves_essential_order(self, thorax):
        out = set_essential(thorax, "recon-lung", "SliceThicknessEssential",
                            TypedValue.decimal("2.0"))
        assert [e.name for e in out.get("recon-lung").essentials] == \
            [e.name for e in thorax.get("recon-lung").essentials]

    def test_type_mismatch_rejected(self, thorax):
        with pytest.raises(TypeMismatchError):
            set_essential(thorax, "recon-lung", "KernelEssential",
                          TypedValue.string("Br40"))

    def test_creates_registered_essential(self, thorax):
        assert thorax.get("recon-ax").essential("WindowSettingEssential") is None
        out = set_essential(thorax, "recon-ax", "WindowSettingEssential",
                            TypedValue.enum("WindowLung"))
        created = out.get("recon-ax").essential("WindowSettingEssential")
        assert created.value.payload == "WindowLung"
        # appended after the existing essentials
        assert [e.name for e in out.get("recon-ax").essentials][-1] == \
            "WindowSettingEssential"

    def test_strict_refuses_unregistered_names(self, thorax):
        with pytest.raises(UnknownEssentialError):
            set_essential(thorax, "recon-ax", "MadeUpEssential",
                          TypedValue.string("x"))
        out = set_essential(thorax, "recon-ax", "MadeUpEssential",
                            TypedValue.string("x"), strict=False)
        assert out.get("recon-ax").essential("MadeUpEssential") is not None

    def test_create_missing_off(self, thorax):
        with pytest.raises(UnknownEssentialError):
            set_essential(thorax, "recon-ax", "WindowSettingEssential",
                          TypedValue.enum("WindowLung"), create_missing=False)

    def test_registered_type_enforced_on_create(self, thorax):
        with pytest.raises(TypeMismatchError):
            set_essential(thorax, "recon-ax", "WindowSettingEssential",
                          TypedValue.integer(4))

    def test_unknown_entity(self, thorax):
        with pytest.raises(UnknownEntityError):
            set_essential(thorax, "ghost", "KernelEssential",
                          TypedValue.enum("Br40"))

    def test_enforce_values_uses_rules(self, thorax, rules):
        with pytest.raises(ValueNotAllowedError):
            set_essential(thorax, "recon-lung", "KernelEssential",
                          TypedValue.enum("Xx11"), rules=rules,
                          enforce_values=True)


# --- add_entity_from_template ---------------------------------------------


class TestAddEntity:
    def test_copy_gets_fresh_ids_everywhere(self, thorax, rules):
        result = add_entity_from_template(thorax, "recon-comp-lung",
                                          "spiral-1", rules=rules)
        copies = [e for e in iter_entities(result.document.root)
                  if "-copy-" in e.id]
        assert {e.id for e in copies} == {"recon-comp-lung-copy-1",
                                          "recon-lung-copy-1"}
        assigned = [s for s in result.side_effects if s.kind == ID_ASSIGNED]
        assert len(assigned) == 2
        assert result.document.entity_count() == thorax.entity_count() + 2

    def test_copy_appended_as_last_child(self, thorax, rules):
        result = add_entity_from_template(thorax, "recon-comp-lung",
                                          "spiral-1", rules=rules)
        assert result.document.get("spiral-1").children[-1].id == \
            "recon-comp-lung-copy-1"

    def test_fresh_id_counter_skips_taken_ids(self, thorax, rules):
        once = add_entity_from_template(thorax, "recon-ax", "recon-comp-body",
                                        rules=rules).document
        twice = add_entity_from_template(once, "recon-ax", "recon-comp-body",
                                         rules=rules).document
        assert twice.get("recon-ax-copy-2") is not None

    def test_overrides_replace_template_values(self, thorax, rules):
        result = add_entity_from_template(
            thorax, "recon-ax", "recon-comp-body",
            overrides=(("KernelEssential", TypedValue.enum("Qr40")),),
            new_name="Axial Qr40", rules=rules)
        copy = result.document.get("recon-ax-copy-1")
        assert copy.name == "Axial Qr40"
        assert copy.essential("KernelEssential").value.payload == "Qr40"

    def test_override_can_add_registered_essential(self, thorax, rules):
        result = add_entity_from_template(
            thorax, "recon-ax", "recon-comp-body",
            overrides=(("WindowSettingEssential", TypedValue.enum("WindowLung")),),
            rules=rules)
        copy = result.document.get("recon-ax-copy-1")
        assert copy.essential("WindowSettingEssential").value.payload == "WindowLung"

    def test_override_type_mismatch(self, thorax, rules):
        with pytest.raises(TypeMismatchError):
            add_entity_from_template(
                thorax, "recon-ax", "recon-comp-body",
                overrides=(("KernelEssential", TypedValue.integer(1)),),
                rules=rules)

    def test_override_unknown_name(self, thorax, rules):
        with pytest.raises(UnknownEssentialError):
            add_entity_from_template(
                thorax, "recon-ax", "recon-comp-body",
                overrides=(("NopeEssential", TypedValue.string("x")),),
                rules=rules)

    def test_placement_rules_enforced(self, thorax, rules):
        with pytest.raises(PlacementNotAllowedError):
            add_entity_from_template(thorax, "recon-ax", "for-1", rules=rules)

    def test_unknown_ids(self, thorax, rules):
        with pytest.raises(UnknownEntityError):
            add_entity_from_template(thorax, "ghost", "spiral-1", rules=rules)
        with pytest.raises(UnknownEntityError):
            add_entity_from_template(thorax, "recon-ax", "ghost", rules=rules)


# --- delete_entity --------------------------------------------------------


class TestDelete:
    def test_plain_delete(self, thorax, rules):
        result = delete_entity(thorax, "recon-sag", rules=rules)
        assert result.document.get("recon-sag") is None
        assert result.side_effects == ()
        # siblings survive
        assert result.document.get("recon-ax") is not None

    def test_sole_child_cascades_to_compound_parent(self, thorax, rules):
        result = delete_entity(thorax, "lungcad-recon", rules=rules)
        assert result.document.get("lungcad-recon") is None
        assert result.document.get("lungcad-comp") is None
        kinds = [s.kind for s in result.side_effects]
        assert kinds == [PARENT_REMOVED]
        assert result.side_effects[0].detail["entity_id"] == "lungcad-comp"
        # the cascade stops at the post-processing step: not a compound type
        assert result.document.get("postproc-1") is not None

    def test_non_compound_parent_never_cascades(self, thorax, rules):
        result = delete_entity(thorax, "lungcad-comp", rules=rules)
        assert result.document.get("postproc-1") is not None
        assert result.side_effects == ()

    def test_three_level_chain_cascades_exactly_two_parents(self, rules):
        chain = doc_of(entity(
            "outer", "StandardReconCompoundEntity", "Outer", children=(
                entity("inner", "OrientedReconCompoundEntity", "Inner",
                       children=(entity("leaf", "CTReconEntity", "Leaf"),)),)))
        result = delete_entity(chain, "leaf", rules=rules)
        removed = [s.detail["entity_id"] for s in result.side_effects
                   if s.kind == PARENT_REMOVED]
        assert removed == ["inner", "outer"]
        assert result.document.root.children == ()

    def test_cascade_stops_at_sibling(self, rules):
        d = doc_of(entity("comp", "StandardReconCompoundEntity", "Group",
                          children=(entity("a", "CTReconEntity"),
                                    entity("b", "CTReconEntity"))))
        result = delete_entity(d, "a", rules=rules)
        assert result.document.get("comp") is not None
        assert result.document.get("b") is not None
        assert result.side_effects == ()

    def test_root_delete_refused(self, thorax, rules):
        with pytest.raises(CannotDeleteRootError):
            delete_entity(thorax, "root", rules=rules)

    def test_unknown_entity(self, thorax, rules):
        with pytest.raises(UnknownEntityError):
            delete_entity(thorax, "ghost", rules=rules)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_cascade_leaves_no_empty_compounds(seed):
    """Deleting any entity never leaves a childless compound behind."""
    rng = random.Random(seed)
    from protoagent.model import load_rules

    rules = load_rules()
    d = random_document(rng, fill_compounds=True)
    targets = non_root_ids(d)
    if not targets:
        return
    target = rng.choice(targets)
    parent = d.parent_of(target)
    result = delete_entity(d, target, rules=rules)
    for node in iter_entities(result.document.root):
        if node.entity_type in rules.compound_types:
            assert node.children, f"empty compound {node.id} after deleting {target}"
    if len(parent.children) >= 2:
        assert result.document.get(parent.id) is not None


# --- apply_actions --------------------------------------------------------


class TestApplyActions:
    def test_sequence_applies_in_order(self, thorax, rules):
        actions = [
            SetEssential("recon-lung", "KernelEssential", TypedValue.enum("Br59")),
            DeleteEntity("recon-sag"),
            AddEntity("recon-ax", "recon-comp-body", (), "Extra Axial"),
        ]
        result = apply_actions(thorax, actions, rules=rules)
        d = result.document
        assert d.get("recon-lung").essential("KernelEssential").value.payload == "Br59"
        assert d.get("recon-sag") is None
        assert d.get("recon-ax-copy-1").name == "Extra Axial"
        assert result.applied == tuple(actions)

    def test_failure_names_index_and_cause(self, thorax, rules):
        actions = [
            SetEssential("recon-lung", "KernelEssential", TypedValue.enum("Br59")),
            DeleteEntity("ghost"),
        ]
        with pytest.raises(ActionError) as err:
            apply_actions(thorax, actions, rules=rules)
        assert err.value.index == 1
        assert isinstance(err.value.cause, UnknownEntityError)

    def test_failure_is_transactional(self, thorax, rules):
        before = serialize_protocol(thorax)
        with pytest.raises(ActionError):
            apply_actions(thorax, [DeleteEntity("recon-sag"),
                                   DeleteEntity("ghost")], rules=rules)
        assert serialize_protocol(thorax) == before

    def test_later_action_sees_earlier_state(self, thorax, rules):
        # add a copy, then edit the copy in the same batch
        actions = [
            AddEntity("recon-ax", "recon-comp-body"),
            SetEssential("recon-ax-copy-1", "KernelEssential",
                         TypedValue.enum("Qr40")),
        ]
        d = apply_actions(thorax, actions, rules=rules).document
        assert d.get("recon-ax-copy-1").essential("KernelEssential").value.payload == "Qr40"

    def test_cascade_side_effects_surface(self, thorax, rules):
        result = apply_actions(thorax, [DeleteEntity("lungcad-recon")],
                               rules=rules)
        assert [s.kind for s in result.side_effects] == [PARENT_REMOVED]

    def test_non_action_raises_type_error(self, thorax, rules):
        with pytest.raises(TypeError):
            apply_actions(thorax, ["bogus"], rules=rules)


# --- action codec ---------------------------------------------------------


class TestActionCodec:
    @pytest.mark.parametrize("action", [
        SetEssential("e1", "KernelEssential", TypedValue.enum("Br40")),
        SetEssential("e1", "ProfileEssential", TypedValue.composite(
            CompositeNode("Profile", children=(
                CompositeNode("Step", text="1"),)))),
        AddEntity("t1", "p1"),
        AddEntity("t1", "p1", (("KernelEssential", TypedValue.enum("Qr40")),),
                  "New Name"),
        DeleteEntity("e9"),
    ])
    def test_round_trip(self, action):
        assert action_from_json(action_to_json(action)) == action

    def test_value_codec_round_trip(self):
        for value in (TypedValue.integer(3), TypedValue.decimal("0.6"),
                      TypedValue.boolean(False), TypedValue.string("a<b"),
                      TypedValue.enum("Tok"),
                      TypedValue.composite(CompositeNode("Empty"))):
            assert value_from_json(value_to_json(value)) == value

    @pytest.mark.parametrize("data,pointer", [
        ({"op": "warp", "entity_id": "x"}, "/"),
        ({"op": "delete_entity"}, "/"),
        ({"op": "set_essential", "entity_id": "x", "essential_name": "K",
          "value": {"type": "EnumToken", "payload": "has space"}}, "/value"),
    ])
    def test_schema_violations(self, data, pointer):
        with pytest.raises(JsonSchemaError) as err:
            action_from_json(data)
        assert err.value.pointer == pointer
