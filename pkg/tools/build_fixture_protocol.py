#!/usr/bin/env python3
"""Regenerate the adult-thorax fixture protocol in canonical form.

Building the XML through the library guarantees the committed file is
byte-identical to its own canonicalization.
"""

from pathlib import Path

from protoagent.model import (
    CompositeNode,
    Entity,
    Essential,
    ProtocolDocument,
    TypedValue,
    serialize_protocol,
)

OUT = Path(__file__).resolve().parents[1] / "src/protoagent/assets/protocols/adult_thorax.xml"


def ess(name: str, value: TypedValue) -> Essential:
    return Essential(name, value)


def recon(eid: str, name: str, kernel: str, thickness: str, orientation: str) -> Entity:
    return Entity(eid, name, "CTReconEntity", essentials=(
        ess("KernelEssential", TypedValue.enum(kernel)),
        ess("SliceThicknessEssential", TypedValue.decimal(thickness)),
        ess("ReconOrientationEssential", TypedValue.enum(orientation)),
    ))


def build() -> ProtocolDocument:
    tube_profile = TypedValue.composite(CompositeNode(
        "PositionsWithCurrents",
        children=(CompositeNode("Position", text="Top"),),
    ))
    root = Entity("root", "Adult Thorax", "ScanProtocol", children=(
        Entity("for-1", "Patient Registration", "FrameOfReferenceEntity", essentials=(
            ess("PatientPositionEssential", TypedValue.enum("FaceUpHeadFirst")),
        )),
        Entity("acq-1", "CT Measurement Unit", "AcquisitionUnitEntity", essentials=(
            ess("TubeVoltageEssential", TypedValue.integer(120)),
            ess("PerformedTubeCurrentProfileEssential", tube_profile),
        ), children=(
            Entity("topo-1", "Topogram AP", "TopogramRangeEntity", essentials=(
                ess("TableDirectionPatientRelatedEssential", TypedValue.enum("HeadToFeet")),
                ess("TubeCurrentEssential", TypedValue.integer(20)),
            )),
            Entity("spiral-1", "Spiral Thorax", "SpiralRangeEntity", essentials=(
                ess("PitchFactorEssential", TypedValue.decimal("1.2")),
                ess("TubeCurrentEssential", TypedValue.integer(100)),
            ), children=(
                Entity("recon-comp-body", "Body Multiplanar", "OrientedReconCompoundEntity",
                       children=(
                           recon("recon-ax", "Recon Axial Br40", "Br40", "1.0", "Transverse"),
                           recon("recon-cor", "Recon Coronal Br40", "Br40", "1.0", "Coronal"),
                           recon("recon-sag", "Recon Sagittal Br40", "Br40", "1.0", "Sagittal"),
                       )),
                Entity("recon-comp-lung", "Lung 3D", "StandardReconCompoundEntity",
                       children=(
                           recon("recon-lung", "Recon Lung Bl60", "Bl60", "0.6", "Transverse"),
                       )),
                Entity("postproc-1", "Post Processing", "PostProcessingEntity", children=(
                    Entity("lungcad-comp", "LungCAD Result", "StandardReconCompoundEntity",
                           children=(
                               recon("lungcad-recon", "Inline Result: LungCAD",
                                     "Bl60", "0.6", "Transverse"),
                           )),
                )),
            )),
        )),
    ))
    return ProtocolDocument(schema_version="1.0", root=root)


def main() -> None:
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(serialize_protocol(build()), encoding="utf-8")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
