"""Domain specifications: schema.org subsets with constraints, plus the validator.

A domain specification (DS) names a target type, required/optional
properties with allowed ranges, and semantic rules.  Validation checks
both the syntactic shape (types, properties, ranges, cardinality) and
the semantic rules; properties not covered by the DS are warnings, not
errors (schema.org is open-world).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import date, datetime
from typing import Any, Iterable, Sequence

from . import vocab
from .rdf import ClassHierarchy

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_DATETIME_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}(:\d{2})?")
_TIME_RE = re.compile(r"^\d{2}:\d{2}(:\d{2})?$")
_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")

RULE_KINDS = ("numericRange", "pattern", "valueIn", "dateOrder")


class DomainSpecError(ValueError):
    """Raised for malformed or vocabulary-violating DS definitions."""


@dataclass(frozen=True)
class SemanticRule:
    """A constraint on the values reachable through a property path."""

    path: tuple[str, ...]
    kind: str  # one of RULE_KINDS
    minimum: float | None = None
    maximum: float | None = None
    pattern: str | None = None
    values: tuple[Any, ...] | None = None
    before: tuple[str, ...] | None = None  # dateOrder: path that must come later


@dataclass(frozen=True)
class PropertyConstraint:
    property: str
    required: bool
    ranges: tuple[str, ...]
    multiple: bool = False
    nested: "DomainSpecification | None" = None


@dataclass(frozen=True)
class DomainSpecification:
    name: str
    target_type: str
    properties: tuple[PropertyConstraint, ...]
    rules: tuple[SemanticRule, ...] = ()

    def constraint(self, prop: str) -> PropertyConstraint | None:
        for c in self.properties:
            if c.property == prop:
                return c
        return None


@dataclass
class ValidationReport:
    document_id: str
    errors: list[tuple[str, str, str]] = field(default_factory=list)  # (code, path, message)
    warnings: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "invalid" if self.errors else "valid"

    def to_dict(self) -> dict:
        return {
            "documentId": self.document_id,
            "verdict": self.verdict,
            "errors": [{"code": c, "path": p, "message": m} for c, p, m in self.errors],
            "warnings": [{"code": c, "path": p, "message": m} for c, p, m in self.warnings],
        }


def _parse_rule(obj: dict, where: str) -> SemanticRule:
    if not isinstance(obj, dict):
        raise DomainSpecError(f"{where}: rule must be an object")
    path = obj.get("path")
    if not isinstance(path, list) or not path or not all(isinstance(p, str) for p in path):
        raise DomainSpecError(f"{where}: rule path must be a non-empty list of property names")
    kind = obj.get("check")
    if kind not in RULE_KINDS:
        raise DomainSpecError(f"{where}: unknown rule check {kind!r}")
    if kind == "numericRange":
        if "min" not in obj and "max" not in obj:
            raise DomainSpecError(f"{where}: numericRange needs min and/or max")
        return SemanticRule(
            tuple(path), kind, minimum=obj.get("min"), maximum=obj.get("max")
        )
    if kind == "pattern":
        pattern = obj.get("pattern")
        if not isinstance(pattern, str):
            raise DomainSpecError(f"{where}: pattern rule needs a regular expression")
        try:
            re.compile(pattern)
        except re.error as exc:
            raise DomainSpecError(f"{where}: bad pattern: {exc}") from None
        return SemanticRule(tuple(path), kind, pattern=pattern)
    if kind == "valueIn":
        values = obj.get("values")
        if not isinstance(values, list) or not values:
            raise DomainSpecError(f"{where}: valueIn rule needs a non-empty values list")
        return SemanticRule(tuple(path), kind, values=tuple(values))
    before = obj.get("before")
    if not isinstance(before, list) or not before:
        raise DomainSpecError(f"{where}: dateOrder rule needs the later property path")
    return SemanticRule(tuple(path), kind, before=tuple(before))


def _parse_ds(obj: dict, where: str = "$") -> DomainSpecification:
    if not isinstance(obj, dict):
        raise DomainSpecError(f"{where}: DS must be a JSON object")
    target = obj.get("targetType")
    if not isinstance(target, str):
        raise DomainSpecError(f"{where}: missing targetType")
    if not vocab.is_class(target):
        raise DomainSpecError(f"{where}: unknown schema.org type {target!r}")
    name = obj.get("name", target)
    props_in = obj.get("properties")
    if not isinstance(props_in, list):
        raise DomainSpecError(f"{where}: properties must be a list")
    seen: set[str] = set()
    constraints: list[PropertyConstraint] = []
    for i, p in enumerate(props_in):
        pwhere = f"{where}/properties[{i}]"
        if not isinstance(p, dict) or not isinstance(p.get("property"), str):
            raise DomainSpecError(f"{pwhere}: missing property name")
        prop = p["property"]
        if not vocab.is_property(prop):
            raise DomainSpecError(f"{pwhere}: unknown schema.org property {prop!r}")
        if prop in seen:
            raise DomainSpecError(f"{pwhere}: duplicate property {prop!r}")
        seen.add(prop)
        ranges = p.get("ranges")
        if not isinstance(ranges, list) or not ranges:
            raise DomainSpecError(f"{pwhere}: ranges must be a non-empty list")
        for r in ranges:
            if not (vocab.is_datatype(r) or vocab.is_class(r)):
                raise DomainSpecError(f"{pwhere}: unknown range {r!r}")
        nested = None
        if "nested" in p:
            nested = _parse_ds(p["nested"], f"{pwhere}/nested")
        constraints.append(
            PropertyConstraint(
                property=prop,
                required=bool(p.get("required", False)),
                ranges=tuple(ranges),
                multiple=bool(p.get("multiple", False)),
                nested=nested,
            )
        )
    rules = tuple(
        _parse_rule(r, f"{where}/rules[{i}]") for i, r in enumerate(obj.get("rules", []))
    )
    return DomainSpecification(
        name=name, target_type=target, properties=tuple(constraints), rules=rules
    )


def load_ds(text: str) -> DomainSpecification:
    """Load a DS from its JSON form, checking names against the vocabulary."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainSpecError(f"invalid JSON: {exc}") from None
    return _parse_ds(obj)


# -- value/kind matching -------------------------------------------------------


def _matches_datatype(value: Any, name: str) -> bool:
    if name == "Text":
        return isinstance(value, str)
    if name == "URL":
        return isinstance(value, str) and bool(_SCHEME_RE.match(value))
    if name == "Number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if name == "Integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if name == "Float":
        return isinstance(value, float)
    if name == "Boolean":
        return isinstance(value, bool)
    if name == "Date":
        return isinstance(value, str) and bool(_DATE_RE.match(value))
    if name == "DateTime":
        return isinstance(value, str) and bool(_DATETIME_RE.match(value))
    if name == "Time":
        return isinstance(value, str) and bool(_TIME_RE.match(value))
    return False


def _node_types(value: dict) -> list[str]:
    types = value.get("@type", [])
    return [types] if isinstance(types, str) else list(types)


def _matches_range(value: Any, name: str, hierarchy: ClassHierarchy) -> bool:
    if vocab.is_datatype(name):
        return _matches_datatype(value, name)
    if isinstance(value, dict):
        if "@value" in value:
            return False
        if set(value) == {"@id"}:
            return True  # IRI references are accepted unchecked
        return any(
            hierarchy.is_subclass(vocab.class_iri(t), vocab.class_iri(name))
            for t in _node_types(value)
        )
    return False


# -- rule evaluation ----------------------------------------------------------


def _walk_path(node: Any, path: Sequence[str]) -> list[Any]:
    """All scalar/node values reachable through the property path."""
    current = [node]
    for prop in path:
        nxt: list[Any] = []
        for n in current:
            if not isinstance(n, dict) or prop not in n:
                continue
            v = n[prop]
            nxt.extend(v if isinstance(v, list) else [v])
        current = nxt
    return current


def _as_number(value: Any) -> float | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return None
    return None


def _as_date(value: Any) -> date | None:
    if not isinstance(value, str):
        return None
    try:
        if _DATE_RE.match(value):
            return date.fromisoformat(value)
        return datetime.fromisoformat(value).date()
    except ValueError:
        return None


def _check_rule(doc: dict, rule: SemanticRule, report: ValidationReport) -> None:
    path_str = "/".join(rule.path)
    values = _walk_path(doc, rule.path)
    if not values:
        return  # absent values cannot violate a rule; required-ness is separate
    if rule.kind == "numericRange":
        for v in values:
            num = _as_number(v)
            if num is None:
                report.errors.append(
                    ("RuleViolation", path_str, f"value {v!r} is not numeric")
                )
            elif (rule.minimum is not None and num < rule.minimum) or (
                rule.maximum is not None and num > rule.maximum
            ):
                report.errors.append(
                    (
                        "RuleViolation",
                        path_str,
                        f"value {num:g} outside range [{rule.minimum:g}, {rule.maximum:g}]"
                        if rule.minimum is not None and rule.maximum is not None
                        else f"value {num:g} outside allowed range",
                    )
                )
    elif rule.kind == "pattern":
        for v in values:
            if not isinstance(v, str) or not re.fullmatch(rule.pattern, v):
                report.errors.append(
                    ("RuleViolation", path_str, f"value {v!r} does not match {rule.pattern!r}")
                )
    elif rule.kind == "valueIn":
        for v in values:
            if v not in rule.values:
                report.errors.append(
                    ("RuleViolation", path_str, f"value {v!r} not in allowed set")
                )
    elif rule.kind == "dateOrder":
        later_values = _walk_path(doc, rule.before)
        if not later_values:
            return
        for v in values:
            d1 = _as_date(v)
            for w in later_values:
                d2 = _as_date(w)
                if d1 is None or d2 is None or not d1 < d2:
                    report.errors.append(
                        (
                            "RuleViolation",
                            path_str,
                            f"{v!r} must be an earlier date than {w!r} ({'/'.join(rule.before)})",
                        )
                    )


# -- validation ---------------------------------------------------------------


def _validate_node(
    node: dict,
    ds: DomainSpecification,
    hierarchy: ClassHierarchy,
    report: ValidationReport,
    prefix: str,
    check_type: bool,
) -> None:
    if check_type:
        types = _node_types(node)
        ok = any(
            vocab.is_class(t)
            and hierarchy.is_subclass(vocab.class_iri(t), vocab.class_iri(ds.target_type))
            for t in types
        )
        if not ok:
            report.errors.append(
                (
                    "UnexpectedType",
                    f"{prefix}@type" if prefix else "@type",
                    f"expected {ds.target_type} or a subclass, got {types or 'no type'}",
                )
            )

    present = {k for k in node if not k.startswith("@")}
    for constraint in ds.properties:
        path = prefix + constraint.property
        if constraint.property not in present:
            if constraint.required:
                report.errors.append(
                    ("MissingRequiredProperty", path, f"required property {constraint.property} is missing")
                )
            continue
        value = node[constraint.property]
        values = value if isinstance(value, list) else [value]
        if isinstance(value, list) and not constraint.multiple:
            report.errors.append(
                ("CardinalityViolation", path, "single-valued property has an array value")
            )
        for v in values:
            if not any(_matches_range(v, r, hierarchy) for r in constraint.ranges):
                report.errors.append(
                    (
                        "RangeViolation",
                        path,
                        f"value kind matches none of the allowed ranges {list(constraint.ranges)}",
                    )
                )
            elif (
                constraint.nested is not None
                and isinstance(v, dict)
                and "@value" not in v
                and set(v) != {"@id"}
            ):
                _validate_node(
                    v, constraint.nested, hierarchy, report, path + "/", check_type=False
                )
    for prop in sorted(present):
        if ds.constraint(prop) is None:
            report.warnings.append(
                ("UnknownProperty", prefix + prop, f"property {prop} is not part of the {ds.name} specification")
            )


def validate(
    doc: dict,
    ds: DomainSpecification,
    hierarchy: ClassHierarchy | None = None,
    document_id: str | None = None,
) -> ValidationReport:
    """Check one annotation document against a DS; problems become report entries."""
    if hierarchy is None:
        hierarchy = vocab.default_hierarchy()
    report = ValidationReport(document_id or str(doc.get("@id", "")))
    _validate_node(doc, ds, hierarchy, report, prefix="", check_type=True)
    for rule in ds.rules:
        _check_rule(doc, rule, report)
    return report


def validate_batch(
    docs: Iterable[dict],
    ds: DomainSpecification,
    hierarchy: ClassHierarchy | None = None,
) -> dict:
    """Element-wise validation plus aggregate counts by error code."""
    reports = [
        validate(doc, ds, hierarchy, document_id=str(doc.get("@id", f"doc-{i}")))
        for i, doc in enumerate(docs)
    ]
    errors_by_code: dict[str, int] = {}
    warnings_by_code: dict[str, int] = {}
    for r in reports:
        for code, _p, _m in r.errors:
            errors_by_code[code] = errors_by_code.get(code, 0) + 1
        for code, _p, _m in r.warnings:
            warnings_by_code[code] = warnings_by_code.get(code, 0) + 1
    return {
        "reports": reports,
        "documents": len(reports),
        "valid": sum(1 for r in reports if r.verdict == "valid"),
        "invalid": sum(1 for r in reports if r.verdict == "invalid"),
        "errorsByCode": errors_by_code,
        "warningsByCode": warnings_by_code,
    }
