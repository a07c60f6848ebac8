"""Syntax and structure validation.

``validate_syntax`` is the repo's stand-in for the scanner-side check that a
modified protocol stays loadable.  ``validate_structure`` applies the
declarative rule file: allowed value sets and ranges, entity-local
dependencies between essentials, and the no-empty-compound constraint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import ProtocolSyntaxError, RuleSetError, SchemaError
from .document import Entity, ProtocolDocument, TypedValue, iter_entities
from .schema import SchemaRegistry, asset_path, default_registry
from .xmlio import parse_protocol

ERROR = "Error"
WARNING = "Warning"


@dataclass(frozen=True)
class Issue:
    severity: str
    code: str
    path: str
    message: str

    def to_json(self) -> dict:
        return {"severity": self.severity, "code": self.code,
                "path": self.path, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...] = ()

    @property
    def ok(self) -> bool:
        return not any(i.severity == ERROR for i in self.issues)

    def codes(self) -> set[str]:
        return {i.code for i in self.issues}

    def to_json(self) -> dict:
        return {"ok": self.ok, "issues": [i.to_json() for i in self.issues]}


def validate_syntax(xml_text: str, *, strict: bool = False,
                    registry: SchemaRegistry | None = None) -> ValidationReport:
    """Report whether the text parses and passes schema validation."""
    try:
        parse_protocol(xml_text, strict=strict, registry=registry)
    except ProtocolSyntaxError as exc:
        where = "" if exc.line is None else f" (line {exc.line}, column {exc.column})"
        return ValidationReport((Issue(ERROR, "MALFORMED_XML", "",
                                       f"{exc.message}{where}"),))
    except SchemaError as exc:
        return ValidationReport((Issue(ERROR, exc.code, exc.path, exc.message),))
    return ValidationReport()


# --- rule file ------------------------------------------------------------


@dataclass(frozen=True)
class ValueRange:
    min: float
    max: float

    def contains(self, x: float) -> bool:
        return self.min <= x <= self.max


@dataclass(frozen=True)
class DependencyRule:
    """Entity-local rule: when an essential has a value, constrain another."""

    when_essential: str
    when_equals: str
    require_essential: str
    require_in: tuple[str, ...] = ()
    require_range: ValueRange | None = None


@dataclass(frozen=True)
class RuleSet:
    allowed_values: dict[str, tuple[str, ...] | ValueRange] = field(default_factory=dict)
    dependencies: tuple[DependencyRule, ...] = ()
    compound_types: frozenset[str] = frozenset()
    placement: dict[str, tuple[str, ...]] | None = None

    def allows_child(self, parent_type: str, child_type: str) -> bool:
        """Placement check; types without an entry are unconstrained."""
        if self.placement is None or parent_type not in self.placement:
            return True
        return child_type in self.placement[parent_type]

    def value_allowed(self, essential_name: str, value: TypedValue) -> bool:
        rule = self.allowed_values.get(essential_name)
        if rule is None or not isinstance(value.payload, str):
            return True
        if isinstance(rule, ValueRange):
            try:
                return rule.contains(float(value.payload))
            except ValueError:
                return False
        return value.payload in rule


def load_rules(path=None) -> RuleSet:
    """Load a rule file; with no path, the packaged default rules."""
    if path is None:
        raw = asset_path("rules", "default_rules.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise RuleSetError(f"rule file is not valid JSON: {exc}") from exc
    return parse_rules(data)


def parse_rules(data: dict) -> RuleSet:
    if not isinstance(data, dict):
        raise RuleSetError("rule file must be a JSON object")
    try:
        allowed: dict[str, tuple[str, ...] | ValueRange] = {}
        for name, spec in data.get("allowed_values", {}).items():
            if isinstance(spec, list):
                if not all(isinstance(t, str) for t in spec):
                    raise RuleSetError(f"allowed tokens for {name!r} must be strings")
                allowed[name] = tuple(spec)
            elif isinstance(spec, dict):
                allowed[name] = ValueRange(float(spec["min"]), float(spec["max"]))
            else:
                raise RuleSetError(f"bad allowed_values entry for {name!r}")
        deps = []
        for i, dep in enumerate(data.get("dependencies", [])):
            when, require = dep["when"], dep["require"]
            deps.append(DependencyRule(
                when_essential=when["essential"],
                when_equals=when["equals"],
                require_essential=require["essential"],
                require_in=tuple(require.get("in", ())),
                require_range=(ValueRange(float(require["in_range"]["min"]),
                                          float(require["in_range"]["max"]))
                               if "in_range" in require else None),
            ))
            if not deps[-1].require_in and deps[-1].require_range is None:
                raise RuleSetError(f"dependency {i} has no constraint")
        compound = data.get("compound_types", [])
        if not all(isinstance(t, str) for t in compound):
            raise RuleSetError("compound_types must be strings")
        placement = None
        if "placement" in data:
            placement = {p: tuple(kids) for p, kids in data["placement"].items()}
        return RuleSet(allowed_values=allowed, dependencies=tuple(deps),
                       compound_types=frozenset(compound), placement=placement)
    except RuleSetError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise RuleSetError(f"invalid rule file: {exc!r}") from exc


def validate_structure(doc: ProtocolDocument, rules: RuleSet) -> ValidationReport:
    """Apply the declarative rules to a parsed document."""
    issues: list[Issue] = []
    for entity in iter_entities(doc.root):
        if entity.entity_type in rules.compound_types and not entity.children:
            issues.append(Issue(ERROR, "EMPTY_COMPOUND", entity.id,
                                f"compound entity {entity.name!r} has no children"))
        for essential in entity.essentials:
            if not rules.value_allowed(essential.name, essential.value):
                issues.append(Issue(
                    ERROR, "VALUE_NOT_ALLOWED", entity.id,
                    f"value {essential.value.payload!r} is not supported for "
                    f"{essential.name} in this context"))
        issues.extend(_check_dependencies(entity, rules))
    return ValidationReport(tuple(issues))


def _check_dependencies(entity: Entity, rules: RuleSet) -> list[Issue]:
    issues = []
    for dep in rules.dependencies:
        trigger = entity.essential(dep.when_essential)
        if trigger is None or not isinstance(trigger.value.payload, str):
            continue
        if trigger.value.payload != dep.when_equals:
            continue
        target = entity.essential(dep.require_essential)
        ok = False
        if target is not None and isinstance(target.value.payload, str):
            if dep.require_range is not None:
                try:
                    ok = dep.require_range.contains(float(target.value.payload))
                except ValueError:
                    ok = False
            else:
                ok = target.value.payload in dep.require_in
        if not ok:
            issues.append(Issue(
                ERROR, "DEPENDENCY_VIOLATED", entity.id,
                f"{dep.when_essential}={dep.when_equals} requires "
                f"{dep.require_essential} to satisfy the declared constraint"))
    return issues
