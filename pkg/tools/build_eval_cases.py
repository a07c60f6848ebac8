#!/usr/bin/env python3
"""Regenerate the packaged 12-case evaluation suite.

Each case gets a protocol snapshot, a request, a canned backend script
(router reply, planner tool turns, pseudo-task reply), gold actions and
the gold artifacts derived from them. Gold segments are produced by
actually applying the gold actions, so the suite stays consistent with
the edit semantics by construction.

    python3 tools/build_eval_cases.py
"""

from __future__ import annotations

import json
import pathlib
import shutil
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from protoagent.agent import parse_structured_request, plan, build_memory
from protoagent.edit import action_from_json, action_to_json, apply_actions
from protoagent.evaluation import affected_segments
from protoagent.llm import ChatMessage, ScriptedExchange, ToolCall, save_script
from protoagent.model import (asset_path, default_registry, load_rules,
                              parse_protocol, serialize_protocol)

ASSETS = pathlib.Path(__file__).resolve().parents[1] / "src" / "protoagent" / "assets"
CASES_DIR = ASSETS / "cases"


def assistant(content: str = "", tool: str | None = None, **arguments) -> ChatMessage:
    call = None
    if tool is not None:
        call = ToolCall(tool_name=tool,
                        arguments_json=json.dumps(arguments, sort_keys=True))
    return ChatMessage(role="assistant", content=content, tool_call=call)


def router_exchange(text: str, category: str, rationale: str) -> ScriptedExchange:
    payload = {"sub_requests": [{"text": text, "category": category,
                                 "rationale": rationale}]}
    return ScriptedExchange(ordinal=1, reply=(assistant(json.dumps(payload)),))


def planner_exchange(tool_turns: list[ChatMessage], actions: list[dict],
                     plan_text: str) -> ScriptedExchange:
    final = assistant(json.dumps({"actions": actions, "plan": plan_text}))
    return ScriptedExchange(ordinal=2, reply=tuple(tool_turns) + (final,))


def pseudo_exchange(ordinal: int, tasks: list[str]) -> ScriptedExchange:
    return ScriptedExchange(ordinal=ordinal,
                            reply=(assistant(json.dumps({"tasks": tasks})),))


CASES = [
    {
        "id": "mod-patient-position",
        "request_text": "for this protocol, the patient should be positioned "
                        "face up and feet first",
        "router": ("Set the patient position to face up, feet first.",
                   "Modification",
                   "The request changes an existing positioning setting."),
        "tools": [assistant(tool="retrieve_entities",
                            entity_type="FrameOfReferenceEntity"),
                  assistant(tool="get_essentials", entity_id="for-1")],
        "actions": [{"op": "set_essential", "entity_id": "for-1",
                     "essential_name": "PatientPositionEssential",
                     "value": {"type": "EnumToken", "payload": "FaceUpFeetFirst"}}],
        "plan": "Set PatientPositionEssential from FaceUpHeadFirst to "
                "FaceUpFeetFirst on Patient Registration (for-1).",
        "gold_entities": ["for-1"],
        "gold_essentials": [["for-1", "PatientPositionEssential"]],
        "pseudo": [
            "position the patient face up and feet first in this protocol",
            "the patient needs to be positioned face up, feet first",
            "set the patient position to face up with feet first",
            "please change the patient position to face up feet first",
            "patient should lie face up entering feet first",
            "make the patient position face up and feet first for this scan",
            "update the protocol so the patient is positioned face up, feet first",
            "switch patient positioning to face up and feet first",
            "use a face up, feet first patient position here",
            "adjust the patient position: face up, feet first",
        ],
    },
    {
        "id": "mod-kernel-lung",
        "request_text": "switch the lung recon kernel to Bl57",
        "router": ("Set the kernel of the lung reconstruction to Bl57.",
                   "Modification",
                   "An existing reconstruction setting should change."),
        "tools": [assistant(tool="retrieve_entities",
                            entity_type="CTReconEntity", name_contains="Lung"),
                  assistant(tool="get_essentials", entity_id="recon-lung",
                            names=["KernelEssential"])],
        "actions": [{"op": "set_essential", "entity_id": "recon-lung",
                     "essential_name": "KernelEssential",
                     "value": {"type": "EnumToken", "payload": "Bl57"}}],
        "plan": "Set KernelEssential from Bl60 to Bl57 on Recon Lung Bl60 "
                "(recon-lung).",
        "gold_entities": ["recon-lung"],
        "gold_essentials": [["recon-lung", "KernelEssential"]],
        "pseudo": [
            "change the lung reconstruction kernel to Bl57",
            "set the kernel of the lung recon to Bl57",
            "use kernel Bl57 for the lung reconstruction",
            "the lung recon should use the Bl57 kernel",
            "please switch the lung kernel to Bl57",
            "update the lung reconstruction to kernel Bl57",
            "make the lung recon run with Bl57",
            "kernel for the lung recon needs to be Bl57",
            "swap the lung recon kernel over to Bl57",
            "set Bl57 as the kernel on the lung reconstruction",
        ],
    },
    {
        "id": "mod-slice-thickness",
        "request_text": "make the axial body recon 2 millimeters thick",
        "router": ("Set the slice thickness of the axial body reconstruction "
                   "to 2.0 mm.", "Modification",
                   "An existing reconstruction setting should change."),
        "tools": [assistant(tool="retrieve_entities", name_contains="Recon Axial"),
                  assistant(tool="get_essentials", entity_id="recon-ax",
                            names=["SliceThicknessEssential"])],
        "actions": [{"op": "set_essential", "entity_id": "recon-ax",
                     "essential_name": "SliceThicknessEssential",
                     "value": {"type": "Decimal", "payload": "2.0"}}],
        "plan": "Set SliceThicknessEssential from 1.0 to 2.0 on Recon Axial "
                "Br40 (recon-ax).",
        "gold_entities": ["recon-ax"],
        "gold_essentials": [["recon-ax", "SliceThicknessEssential"]],
        "pseudo": [
            "set the axial body reconstruction slice thickness to 2 mm",
            "change the axial recon thickness to 2 millimeters",
            "the axial body recon should be 2 mm thick",
            "please make the axial reconstruction 2 millimeters thick",
            "use a 2 mm slice thickness for the axial body recon",
            "update the axial body recon to 2 millimeter slices",
            "slice thickness of the axial recon goes to 2 mm",
            "thicken the axial body recon slices to 2 millimeters",
            "set 2.0 mm slices on the axial body reconstruction",
            "adjust the axial recon to a 2 mm thickness",
        ],
    },
    {
        "id": "add-sagittal-lung",
        "request_text": "add a sagittal recon to the lung 3d compound like "
                        "the existing lung recon",
        "router": ("Add a sagittal copy of the lung reconstruction to the "
                   "Lung 3D compound.", "Adding",
                   "A new entity should be created from a template."),
        "tools": [assistant(tool="retrieve_entities", name_contains="Lung 3D"),
                  assistant(tool="retrieve_entities",
                            entity_type="CTReconEntity", name_contains="Lung")],
        "actions": [{"op": "add_entity", "template_entity_id": "recon-lung",
                     "parent_id": "recon-comp-lung",
                     "overrides": [{"essential": "ReconOrientationEssential",
                                    "value": {"type": "EnumToken",
                                              "payload": "Sagittal"}}],
                     "new_name": "Recon Lung Sagittal"}],
        "plan": "Copy Recon Lung Bl60 (recon-lung) into Lung 3D "
                "(recon-comp-lung) as Recon Lung Sagittal with "
                "ReconOrientationEssential Sagittal.",
        "gold_entities": ["recon-lung", "recon-comp-lung"],
        "gold_essentials": [],
        "pseudo": [
            "add a sagittal reconstruction to the lung 3d compound",
            "create a sagittal copy of the lung recon in the lung 3d compound",
            "please add a sagittal lung recon like the existing one",
            "the lung 3d compound needs an extra sagittal recon",
            "duplicate the lung recon as a sagittal reconstruction",
            "put a sagittal version of the lung recon into lung 3d",
            "add another lung recon, but sagittal, to the compound",
            "extend the lung 3d compound with a sagittal recon",
            "make a sagittal recon from the existing lung reconstruction",
            "insert a sagittal lung reconstruction into the lung 3d compound",
        ],
    },
    {
        "id": "add-body-compound",
        "request_text": "duplicate the body multiplanar compound under the spiral",
        "router": ("Add a copy of the Body Multiplanar compound under the "
                   "spiral range.", "Adding",
                   "A new entity should be created from a template."),
        "tools": [assistant(tool="retrieve_entities",
                            name_contains="Body Multiplanar"),
                  assistant(tool="retrieve_entities",
                            entity_type="SpiralRangeEntity")],
        "actions": [{"op": "add_entity",
                     "template_entity_id": "recon-comp-body",
                     "parent_id": "spiral-1", "overrides": [],
                     "new_name": "Body Multiplanar Copy"}],
        "plan": "Copy Body Multiplanar (recon-comp-body) with its three "
                "reconstructions into Spiral Thorax (spiral-1) as Body "
                "Multiplanar Copy.",
        "gold_entities": ["recon-comp-body", "spiral-1"],
        "gold_essentials": [],
        "pseudo": [
            "copy the body multiplanar compound into the spiral range",
            "duplicate the whole body multiplanar compound",
            "add a second body multiplanar compound under the spiral",
            "clone the body multiplanar recon compound in the spiral",
            "the spiral should get a copy of the body multiplanar compound",
            "please duplicate body multiplanar under the spiral range",
            "create another body multiplanar compound from the existing one",
            "replicate the body multiplanar compound inside the spiral",
            "add a duplicate of the body multiplanar compound",
            "make a copy of the body multiplanar compound under the spiral",
        ],
    },
    {
        "id": "add-axial-qr40",
        "request_text": "add another axial recon with a Qr40 kernel to the "
                        "body compound",
        "router": ("Add a copy of the axial reconstruction with kernel Qr40 "
                   "to the Body Multiplanar compound.", "Adding",
                   "A new entity should be created from a template."),
        "tools": [assistant(tool="retrieve_entities", name_contains="Recon Axial"),
                  assistant(tool="retrieve_entities",
                            name_contains="Body Multiplanar")],
        "actions": [{"op": "add_entity", "template_entity_id": "recon-ax",
                     "parent_id": "recon-comp-body",
                     "overrides": [{"essential": "KernelEssential",
                                    "value": {"type": "EnumToken",
                                              "payload": "Qr40"}}],
                     "new_name": "Recon Axial Qr40"}],
        "plan": "Copy Recon Axial Br40 (recon-ax) into Body Multiplanar "
                "(recon-comp-body) as Recon Axial Qr40 with KernelEssential "
                "Qr40.",
        "gold_entities": ["recon-ax", "recon-comp-body"],
        "gold_essentials": [],
        "pseudo": [
            "add an extra axial recon using kernel Qr40 to the body compound",
            "create a new axial reconstruction with Qr40 in the body compound",
            "the body compound needs another axial recon with a Qr40 kernel",
            "please add an axial Qr40 recon to the body multiplanar compound",
            "copy the axial recon into the body compound with kernel Qr40",
            "add one more axial reconstruction, kernel Qr40",
            "insert an axial recon with the Qr40 kernel into the body compound",
            "another axial recon with Qr40 should go into the body compound",
            "duplicate the axial recon with a Qr40 kernel",
            "extend the body compound with an axial Qr40 reconstruction",
        ],
    },
    {
        "id": "del-lungcad",
        "request_text": "can you delete the lung cad from this protocol?",
        "router": ("Delete the LungCAD result from the protocol.", "Deleting",
                   "The user wants the LungCAD entity removed."),
        "tools": [assistant(tool="retrieve_entities", keyword="LungCAD")],
        "actions": [{"op": "delete_entity", "entity_id": "lungcad-recon"}],
        "plan": "Delete Inline Result: LungCAD (lungcad-recon). Its compound "
                "parent LungCAD Result (lungcad-comp) will be left without "
                "children, so it needs to be removed as well.",
        "gold_entities": ["lungcad-recon", "lungcad-comp"],
        "gold_essentials": [],
        "pseudo": [
            "delete the lung cad result from the protocol",
            "remove the lungcad from this protocol",
            "please delete the inline lung cad result",
            "take the lung cad out of the protocol",
            "drop the lungcad result entity",
            "get rid of the lung cad in this protocol",
            "remove the inline result lungcad recon",
            "delete the lungcad reconstruction from the scan protocol",
            "the lung cad result should be removed",
            "clear the lung cad from the protocol",
        ],
    },
    {
        "id": "del-sagittal",
        "request_text": "remove the sagittal reconstruction from the body compound",
        "router": ("Delete the sagittal reconstruction from the Body "
                   "Multiplanar compound.", "Deleting",
                   "An entity should be removed."),
        "tools": [assistant(tool="retrieve_entities",
                            name_contains="Recon Sagittal")],
        "actions": [{"op": "delete_entity", "entity_id": "recon-sag"}],
        "plan": "Delete Recon Sagittal Br40 (recon-sag) from Body Multiplanar; "
                "the compound keeps its axial and coronal reconstructions.",
        "gold_entities": ["recon-sag"],
        "gold_essentials": [],
        "pseudo": [
            "delete the sagittal recon from the body compound",
            "remove the sagittal recon",
            "please drop the sagittal reconstruction",
            "the sagittal recon in the body compound should be deleted",
            "take the sagittal reconstruction out of the body multiplanar compound",
            "get rid of the sagittal recon in the body compound",
            "delete the body compound's sagittal reconstruction",
            "remove the sagittal oriented recon",
            "the sagittal reconstruction is not needed, remove it",
            "drop the sagittal recon from body multiplanar",
        ],
    },
    {
        "id": "del-lung3d",
        "request_text": "drop the whole lung 3d compound",
        "router": ("Delete the Lung 3D compound with everything in it.",
                   "Deleting", "An entity should be removed."),
        "tools": [assistant(tool="retrieve_entities", name_contains="Lung 3D")],
        "actions": [{"op": "delete_entity", "entity_id": "recon-comp-lung"}],
        "plan": "Delete Lung 3D (recon-comp-lung) including its lung "
                "reconstruction.",
        "gold_entities": ["recon-comp-lung"],
        "gold_essentials": [],
        "pseudo": [
            "delete the lung 3d compound",
            "remove the whole lung 3d recon compound",
            "please drop the lung 3d compound from the protocol",
            "the lung 3d compound should be removed entirely",
            "get rid of the lung 3d compound",
            "delete the entire lung 3d reconstruction compound",
            "remove lung 3d and everything in it",
            "drop the lung 3d compound with its recons",
            "take the lung 3d compound out of the spiral",
            "clear the whole lung 3d compound",
        ],
    },
    {
        "id": "json-modify-position",
        "request_json": {
            "operation": "modify",
            "target": {"entity_type": "FrameOfReferenceEntity"},
            "changes": [{"essential": "PatientPositionEssential",
                         "value": {"type": "EnumToken",
                                   "payload": "FaceUpFeetFirst"}}],
        },
        "gold_entities": ["for-1"],
        "gold_essentials": [["for-1", "PatientPositionEssential"]],
        "pseudo": [
            "set PatientPositionEssential to FaceUpFeetFirst on the frame of reference",
            "change the patient position essential to FaceUpFeetFirst",
            "update the FrameOfReferenceEntity patient position to FaceUpFeetFirst",
            "set the patient position to face up feet first on the frame of reference entity",
            "make PatientPositionEssential FaceUpFeetFirst",
            "the frame of reference should have patient position FaceUpFeetFirst",
            "switch the patient position value to FaceUpFeetFirst",
            "set position FaceUpFeetFirst on the FrameOfReferenceEntity",
            "patient position essential changes to FaceUpFeetFirst",
            "apply FaceUpFeetFirst to the patient position essential",
        ],
    },
    {
        "id": "json-add-axial",
        "request_json": {
            "operation": "add",
            "template": {"entity_type": "CTReconEntity",
                         "name_contains": "Axial"},
            "parent": {"name_contains": "Body Multiplanar"},
            "changes": [{"essential": "KernelEssential",
                         "value": {"type": "EnumToken", "payload": "Qr40"}}],
        },
        "gold_entities": ["recon-ax", "recon-comp-body"],
        "gold_essentials": [],
        "pseudo": [
            "add a copy of the axial CTReconEntity under Body Multiplanar with kernel Qr40",
            "copy the axial recon entity into the Body Multiplanar compound, kernel Qr40",
            "add the axial reconstruction under Body Multiplanar with KernelEssential Qr40",
            "create a copy of the Axial recon in Body Multiplanar using Qr40",
            "duplicate the axial CTRecon entity under the Body Multiplanar entity with Qr40",
            "add an axial recon copy with kernel set to Qr40 under Body Multiplanar",
            "insert a copy of the axial recon into Body Multiplanar, KernelEssential Qr40",
            "clone the axial reconstruction under Body Multiplanar and set Qr40",
            "a copy of the axial recon with Qr40 goes under Body Multiplanar",
            "add axial recon copy to Body Multiplanar, kernel Qr40",
        ],
    },
    {
        "id": "json-delete-lungcad",
        "request_json": {
            "operation": "delete",
            "target": {"name_contains": "Inline Result"},
        },
        "gold_entities": ["lungcad-recon"],
        "gold_essentials": [],
        "pseudo": [
            "delete the entity whose name contains Inline Result",
            "remove the Inline Result entity",
            "delete the inline result recon",
            "drop the entity named Inline Result",
            "the Inline Result entity should be deleted",
            "remove the entity containing Inline Result in its name",
            "please delete the Inline Result",
            "get rid of the Inline Result entity",
            "delete Inline Result from the protocol",
            "take out the entity whose name has Inline Result",
        ],
    },
]


def build_case(spec: dict, fixture_xml: str) -> None:
    directory = CASES_DIR / spec["id"]
    directory.mkdir(parents=True)
    (directory / "protocol.xml").write_text(fixture_xml, encoding="utf-8")

    doc = parse_protocol(fixture_xml, strict=True)
    rules = load_rules()
    registry = default_registry()

    if "request_json" in spec:
        request_json = json.dumps(spec["request_json"], indent=2) + "\n"
        (directory / "request.json").write_text(request_json, encoding="utf-8")
        sub = parse_structured_request(request_json)[0]
        proposal = plan(sub, doc, build_memory(doc), None, rules=rules)
        assert proposal.error is None, (spec["id"], proposal.error)
        actions = list(proposal.actions)
        script = [pseudo_exchange(1, spec["pseudo"])]
    else:
        (directory / "request.txt").write_text(spec["request_text"] + "\n",
                                               encoding="utf-8")
        actions = [action_from_json(item) for item in spec["actions"]]
        script = [router_exchange(*spec["router"]),
                  planner_exchange(spec["tools"], spec["actions"], spec["plan"]),
                  pseudo_exchange(3, spec["pseudo"])]

    save_script(script, directory / "script.json")

    result = apply_actions(doc, actions, rules=rules, registry=registry)
    segments = affected_segments(doc, result.document, actions)
    segments_dir = directory / "gold_segments"
    segments_dir.mkdir()
    roots = []
    for index, segment in enumerate(segments):
        # First id attribute in the segment names the subtree root.
        root_id = segment.split('id="', 1)[1].split('"', 1)[0]
        roots.append(root_id)
        (segments_dir / f"{index:02d}_{root_id}.xml").write_text(
            segment, encoding="utf-8")

    (directory / "gold_actions.json").write_text(
        json.dumps([action_to_json(a) for a in actions], indent=2) + "\n",
        encoding="utf-8")
    (directory / "gold_retrieval.json").write_text(
        json.dumps({"entity_ids": spec["gold_entities"],
                    "essentials": spec["gold_essentials"]}, indent=2) + "\n",
        encoding="utf-8")
    print(f"built {spec['id']}: {len(actions)} action(s), "
          f"segments {', '.join(roots)}")


def main() -> None:
    if CASES_DIR.exists():
        shutil.rmtree(CASES_DIR)
    fixture_xml = asset_path("protocols", "adult_thorax.xml").read_text(
        encoding="utf-8")
    # Canonical-form guard: the stored fixture must round-trip exactly.
    assert serialize_protocol(parse_protocol(fixture_xml)) == fixture_xml
    for spec in CASES:
        build_case(spec, fixture_xml)
    print(f"{len(CASES)} cases under {CASES_DIR}")


if __name__ == "__main__":
    main()
