#!/usr/bin/env python3
"""Regenerate the canned backend scripts for the three walkthrough scenarios.

Each script holds the router exchange followed by the planner exchange for
one request against the packaged adult thorax protocol. Run from the repo
root after changing the fixture or the reply wording:

    python3 tools/build_scenario_scripts.py
"""

from __future__ import annotations

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from protoagent.llm import ChatMessage, ScriptedExchange, ToolCall, save_script

OUT_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "protoagent" / "assets" / "scripts"


def assistant(content: str = "", tool: str | None = None, **arguments) -> ChatMessage:
    call = None
    if tool is not None:
        call = ToolCall(tool_name=tool,
                        arguments_json=json.dumps(arguments, sort_keys=True))
    return ChatMessage(role="assistant", content=content, tool_call=call)


def router_reply(*subs: tuple[str, str, str]) -> ChatMessage:
    payload = {"sub_requests": [{"text": t, "category": c, "rationale": r}
                                for t, c, r in subs]}
    return assistant(json.dumps(payload))


def final_reply(actions: list[dict], plan: str) -> ChatMessage:
    return assistant(json.dumps({"actions": actions, "plan": plan}))


SCRIPTS = {
    "lungcad_delete.json": [
        ScriptedExchange(ordinal=1, reply=(router_reply(
            ("Delete the LungCAD result from the protocol.", "Deleting",
             "The user wants the LungCAD entity removed."),
        ),)),
        ScriptedExchange(ordinal=2, reply=(
            assistant(tool="retrieve_entities", keyword="LungCAD"),
            final_reply(
                [{"op": "delete_entity", "entity_id": "lungcad-recon"}],
                "Delete Inline Result: LungCAD (lungcad-recon). Its compound "
                "parent LungCAD Result (lungcad-comp) will be left without "
                "children, so it needs to be removed as well."),
        )),
    ],
    "patient_position.json": [
        ScriptedExchange(ordinal=1, reply=(router_reply(
            ("Set the patient position to face up, feet first.", "Modification",
             "The request changes an existing positioning setting."),
        ),)),
        ScriptedExchange(ordinal=2, reply=(
            assistant(tool="retrieve_entities", entity_type="FrameOfReferenceEntity"),
            assistant(tool="get_essentials", entity_id="for-1"),
            final_reply(
                [{"op": "set_essential", "entity_id": "for-1",
                  "essential_name": "PatientPositionEssential",
                  "value": {"type": "EnumToken", "payload": "FaceUpFeetFirst"}}],
                "Set PatientPositionEssential from FaceUpHeadFirst to "
                "FaceUpFeetFirst on Patient Registration (for-1)."),
        )),
    ],
    # The planner's table-direction value here is deliberately one the device
    # does not support; structural validation must flag it afterwards.
    "lateral_topo.json": [
        ScriptedExchange(ordinal=1, reply=(router_reply(
            ("Replace the AP topogram with a lateral topogram and set the "
             "tube position to the right.", "Modification",
             "The request changes the topogram orientation and tube position."),
        ),)),
        ScriptedExchange(ordinal=2, reply=(
            assistant(tool="retrieve_entities", keyword="topogram"),
            assistant(tool="get_essentials", entity_id="topo-1"),
            final_reply(
                [{"op": "set_essential", "entity_id": "topo-1",
                  "essential_name": "TableDirectionPatientRelatedEssential",
                  "value": {"type": "EnumToken", "payload": "Lateral"}},
                 {"op": "set_essential", "entity_id": "acq-1",
                  "essential_name": "PerformedTubeCurrentProfileEssential",
                  "value": {"type": "Composite",
                            "payload": {"tag": "PositionsWithCurrents",
                                        "children": [{"tag": "Position",
                                                      "text": "Right"}]}}}],
                "Change the table direction from HeadToFeet to Lateral on "
                "Topogram AP (topo-1) and set the tube position profile to "
                "Right on CT Measurement Unit (acq-1)."),
        )),
    ],
}


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for name, exchanges in SCRIPTS.items():
        save_script(exchanges, OUT_DIR / name)
        print(f"wrote {OUT_DIR / name}")


if __name__ == "__main__":
    main()
