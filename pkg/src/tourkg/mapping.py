"""Declarative source-to-annotation mapping: one spec per data source.

A mapping spec names a target schema.org type and, per property, a rule
that extracts a value from a source record: a path expression, a
constant, a concatenation, or a nested sub-mapping.  Unresolved paths
simply omit the property; records never produce nulls.

Path language: root `$`, dot member access, bracket numeric index, and
a terminal `[*]` spread over an array.
"""
from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from . import vocab

_MISSING = object()

_PATH_TOKEN = re.compile(r"\.([A-Za-z_][A-Za-z0-9_\-]*)|\[(\d+)\]|\[\*\]")


class MappingSpecError(ValueError):
    """Raised for malformed mapping specifications."""


class MappingError(ValueError):
    """Raised when a record cannot be mapped (bad input, failed coercion)."""


TRANSFORMS = ("trim", "lowercase", "to-number")


def parse_path(expr: str) -> list[tuple]:
    """Compile a path expression into steps; raises on bad syntax."""
    if not isinstance(expr, str) or not expr.startswith("$"):
        raise MappingSpecError(f"path must start with $: {expr!r}")
    steps: list[tuple] = []
    pos = 1
    while pos < len(expr):
        m = _PATH_TOKEN.match(expr, pos)
        if not m:
            raise MappingSpecError(f"bad path syntax at offset {pos} in {expr!r}")
        if m.group(1) is not None:
            steps.append(("key", m.group(1)))
        elif m.group(2) is not None:
            steps.append(("index", int(m.group(2))))
        else:
            steps.append(("spread",))
        pos = m.end()
    for i, step in enumerate(steps):
        if step == ("spread",) and i != len(steps) - 1:
            raise MappingSpecError(f"[*] is only allowed as the final step: {expr!r}")
    return steps


def resolve_path(record: Any, expr: str) -> Any:
    """Value at `expr` in `record`, or the missing sentinel.

    A terminal `[*]` returns the list itself (spread handled by caller).
    """
    current = record
    for step in parse_path(expr):
        if step[0] == "key":
            if not isinstance(current, dict) or step[1] not in current:
                return _MISSING
            current = current[step[1]]
        elif step[0] == "index":
            if not isinstance(current, list) or step[1] >= len(current):
                return _MISSING
            current = current[step[1]]
        else:  # spread
            if not isinstance(current, list):
                return _MISSING
    return current


@dataclass(frozen=True)
class ConcatPart:
    path: str | None = None
    constant: str | None = None


@dataclass(frozen=True)
class FieldRule:
    """Exactly one of path / constant / concat / nested is set."""

    path: str | None = None
    constant: Any = _MISSING
    concat: tuple[ConcatPart, ...] | None = None
    separator: str = ""
    nested: "MappingSpec | None" = None
    nested_path: str | None = None
    transform: str | None = None


@dataclass(frozen=True)
class MappingSpec:
    source_format: str  # "json" | "csv"
    target_type: str
    fields: tuple[tuple[str, FieldRule], ...]  # (property name, rule), in spec order


def _parse_rule(obj: dict, where: str) -> FieldRule:
    if not isinstance(obj, dict):
        raise MappingSpecError(f"{where}: rule must be an object")
    variants = [k for k in ("path", "constant", "concat", "nested") if k in obj]
    if len(variants) != 1:
        raise MappingSpecError(
            f"{where}: rule must set exactly one of path/constant/concat/nested, got {variants}"
        )
    transform = obj.get("transform")
    if transform is not None and transform not in TRANSFORMS:
        raise MappingSpecError(f"{where}: unknown transform {transform!r}")
    kind = variants[0]
    if kind == "path":
        parse_path(obj["path"])
        return FieldRule(path=obj["path"], transform=transform)
    if kind == "constant":
        if obj["constant"] is None:
            raise MappingSpecError(f"{where}: constant must not be null")
        return FieldRule(constant=obj["constant"], transform=transform)
    if kind == "concat":
        parts_in = obj["concat"]
        if not isinstance(parts_in, list) or not parts_in:
            raise MappingSpecError(f"{where}: concat must be a non-empty list")
        parts = []
        for i, p in enumerate(parts_in):
            if isinstance(p, dict) and set(p) == {"path"}:
                parse_path(p["path"])
                parts.append(ConcatPart(path=p["path"]))
            elif isinstance(p, dict) and set(p) == {"constant"}:
                parts.append(ConcatPart(constant=str(p["constant"])))
            else:
                raise MappingSpecError(
                    f"{where}: concat part {i} must be {{'path': ...}} or {{'constant': ...}}"
                )
        return FieldRule(
            concat=tuple(parts), separator=str(obj.get("separator", "")), transform=transform
        )
    nested_obj = obj["nested"]
    if not isinstance(nested_obj, dict):
        raise MappingSpecError(f"{where}: nested must be an object")
    nested_path = nested_obj.get("path", "$")
    parse_path(nested_path)
    nested_spec = _parse_spec(
        {
            "sourceFormat": "json",
            "targetType": nested_obj.get("targetType"),
            "fields": nested_obj.get("fields", {}),
        },
        f"{where}/nested",
    )
    return FieldRule(nested=nested_spec, nested_path=nested_path, transform=transform)


def _parse_spec(obj: dict, where: str) -> MappingSpec:
    if not isinstance(obj, dict):
        raise MappingSpecError(f"{where}: mapping must be a JSON object")
    source_format = obj.get("sourceFormat", "json")
    if source_format not in ("json", "csv"):
        raise MappingSpecError(f"{where}: sourceFormat must be json or csv")
    target = obj.get("targetType")
    if not isinstance(target, str) or not vocab.is_class(target):
        raise MappingSpecError(f"{where}: unknown target type {target!r}")
    fields_in = obj.get("fields")
    if not isinstance(fields_in, dict) or not fields_in:
        raise MappingSpecError(f"{where}: fields must be a non-empty object")
    rules: list[tuple[str, FieldRule]] = []
    for prop, rule_obj in fields_in.items():
        if not vocab.is_property(prop):
            raise MappingSpecError(f"{where}/fields/{prop}: unknown schema.org property")
        rules.append((prop, _parse_rule(rule_obj, f"{where}/fields/{prop}")))
    return MappingSpec(source_format=source_format, target_type=target, fields=tuple(rules))


def load_mapping(text: str) -> MappingSpec:
    """Load a mapping spec from JSON, checking names against the vocabulary."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MappingSpecError(f"invalid JSON: {exc}") from None
    return _parse_spec(obj, "$")


# -- application ---------------------------------------------------------------


def _to_number(value: Any, path: str):
    if isinstance(value, bool):
        raise MappingError(f"{path}: cannot coerce boolean {value!r} to a number")
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            return int(text)
        except ValueError:
            try:
                return float(text)
            except ValueError:
                raise MappingError(f"{path}: cannot coerce {value!r} to a number") from None
    raise MappingError(f"{path}: cannot coerce {value!r} to a number")


def _apply_transform(value: Any, transform: str | None, path: str) -> Any:
    if transform is None:
        return value
    if transform == "trim":
        return value.strip() if isinstance(value, str) else value
    if transform == "lowercase":
        return value.lower() if isinstance(value, str) else value
    return _to_number(value, path)


def _eval_rule(rule: FieldRule, record: Any, path: str) -> Any:
    if rule.path is not None:
        value = resolve_path(record, rule.path)
        if value is _MISSING or value is None:
            return _MISSING
        if isinstance(value, list):
            values = [
                _apply_transform(v, rule.transform, rule.path) for v in value if v is not None
            ]
            return values if values else _MISSING
        return _apply_transform(value, rule.transform, rule.path)
    if rule.constant is not _MISSING:
        return _apply_transform(rule.constant, rule.transform, path)
    if rule.concat is not None:
        pieces: list[str] = []
        any_path_resolved = False
        has_path_parts = False
        for part in rule.concat:
            if part.path is not None:
                has_path_parts = True
                v = resolve_path(record, part.path)
                if v is _MISSING or v is None:
                    continue
                any_path_resolved = True
                pieces.append(str(v))
            else:
                pieces.append(part.constant or "")
        if has_path_parts and not any_path_resolved:
            return _MISSING
        return _apply_transform(rule.separator.join(pieces), rule.transform, path)
    # nested sub-mapping
    base = resolve_path(record, rule.nested_path or "$")
    if base is _MISSING or base is None:
        return _MISSING
    items = base if isinstance(base, list) else [base]
    nodes = [_build_node(rule.nested, item) for item in items]
    nodes = [n for n in nodes if n is not None]
    if not nodes:
        return _MISSING
    return nodes if isinstance(base, list) else nodes[0]


def _build_node(spec: MappingSpec, record: Any) -> dict | None:
    node: dict[str, Any] = {"@type": spec.target_type}
    populated = False
    for prop, rule in spec.fields:
        value = _eval_rule(rule, record, prop)
        if value is _MISSING:
            continue
        node[prop] = value
        populated = True
    return node if populated else None


def apply_mapping(spec: MappingSpec, record: Any) -> dict:
    """Map one source record to an annotation document.

    Unresolved paths omit their property; array-valued paths yield
    multi-valued properties.
    """
    if not isinstance(record, dict):
        raise MappingError(f"record must be an object, got {type(record).__name__}")
    doc: dict[str, Any] = {"@context": vocab.SCHEMA, "@type": spec.target_type}
    for prop, rule in spec.fields:
        value = _eval_rule(rule, record, prop)
        if value is _MISSING:
            continue
        doc[prop] = value
    return doc


def apply_batch(spec: MappingSpec, records: Iterable[Any]) -> tuple[list[dict], list[tuple[int, str]]]:
    """Element-wise apply_mapping; failures collected as (record index, message)."""
    docs: list[dict] = []
    errors: list[tuple[int, str]] = []
    for i, record in enumerate(records):
        try:
            docs.append(apply_mapping(spec, record))
        except MappingError as exc:
            errors.append((i, str(exc)))
    return docs, errors


def load_records(text: str, source_format: str) -> list[dict]:
    """Read source records: a JSON array/object or CSV with a header row."""
    if source_format == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MappingError(f"invalid JSON source: {exc}") from None
        if isinstance(data, dict):
            return [data]
        if isinstance(data, list):
            return data
        raise MappingError("JSON source must be an object or an array of objects")
    if source_format == "csv":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None:
            raise MappingError("CSV source must have a header row")
        return [dict(row) for row in reader]
    raise MappingError(f"unknown source format {source_format!r}")
