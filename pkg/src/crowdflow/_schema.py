"""Minimal JSON-schema subset validator.

Supports the keywords our shipped schemas use: type, const, enum, required,
properties, additionalProperties (bool), items (single schema), minItems,
maxItems, minimum, exclusiveMinimum, oneOf. Errors carry a JSON pointer to
the offending element.
"""

from __future__ import annotations

from .errors import ScenarioFormatError

_TYPES = {
    "object": dict,
    "array": list,
    "string": str,
    "number": (int, float),
    "integer": int,
    "boolean": bool,
    "null": type(None),
}


def _type_ok(value, name: str) -> bool:
    py = _TYPES[name]
    if isinstance(value, bool):
        return name == "boolean"
    if name == "integer":
        return isinstance(value, int)
    return isinstance(value, py)


def validate_instance(instance, schema: dict, pointer: str = "") -> None:
    """Raise ScenarioFormatError at the first violation."""
    if "const" in schema and instance != schema["const"]:
        raise ScenarioFormatError(pointer, f"expected {schema['const']!r}, got {instance!r}")
    if "enum" in schema and instance not in schema["enum"]:
        raise ScenarioFormatError(pointer, f"expected one of {schema['enum']}, got {instance!r}")
    if "type" in schema and not _type_ok(instance, schema["type"]):
        raise ScenarioFormatError(
            pointer, f"expected {schema['type']}, got {type(instance).__name__}"
        )
    if "oneOf" in schema:
        errors = []
        matched = 0
        for variant in schema["oneOf"]:
            try:
                validate_instance(instance, variant, pointer)
                matched += 1
            except ScenarioFormatError as exc:
                errors.append(str(exc))
        if matched != 1:
            detail = " | ".join(errors) if matched == 0 else f"{matched} variants matched"
            raise ScenarioFormatError(pointer, f"no unique oneOf match: {detail}")

    if isinstance(instance, dict):
        for key in schema.get("required", ()):
            if key not in instance:
                raise ScenarioFormatError(pointer, f"missing required key {key!r}")
        props = schema.get("properties", {})
        if schema.get("additionalProperties", True) is False:
            for key in instance:
                if key not in props:
                    raise ScenarioFormatError(f"{pointer}/{key}", "unexpected key")
        for key, sub in props.items():
            if key in instance:
                validate_instance(instance[key], sub, f"{pointer}/{key}")

    if isinstance(instance, list):
        if "minItems" in schema and len(instance) < schema["minItems"]:
            raise ScenarioFormatError(
                pointer, f"expected at least {schema['minItems']} items, got {len(instance)}"
            )
        if "maxItems" in schema and len(instance) > schema["maxItems"]:
            raise ScenarioFormatError(
                pointer, f"expected at most {schema['maxItems']} items, got {len(instance)}"
            )
        if "items" in schema:
            for idx, item in enumerate(instance):
                validate_instance(item, schema["items"], f"{pointer}/{idx}")

    if isinstance(instance, (int, float)) and not isinstance(instance, bool):
        if "minimum" in schema and instance < schema["minimum"]:
            raise ScenarioFormatError(pointer, f"must be >= {schema['minimum']}, got {instance}")
        if "exclusiveMinimum" in schema and instance <= schema["exclusiveMinimum"]:
            raise ScenarioFormatError(
                pointer, f"must be > {schema['exclusiveMinimum']}, got {instance}"
            )
