"""Canonical JSON (``cmsmodel/1``) and PlantUML renderings of a :class:`CmsModel`."""

import json

from .errors import SchemaVersionMismatch, ValidationFailed
from .metamodel import (
    CORE_CLASS_NAMES,
    CORE_CLASSES,
    PARENT,
    AttributeType,
    CmsAttribute,
    CmsClass,
    CmsModel,
    CmsRelationship,
    CoreKind,
    Multiplicity,
    Platform,
    validate,
)

SCHEMA_VERSION = "cmsmodel/1"


def model_to_dict(model):
    return {
        "version": SCHEMA_VERSION,
        "siteName": model.site_name,
        "host": model.host,
        "basePath": model.base_path,
        "platform": model.platform.value,
        "coreClasses": sorted(c.name for c in model.classes if c.is_core),
        "extensions": [
            {
                "name": c.name,
                "coreKind": c.core_kind.value,
                "endpointPath": c.endpoint_path,
                "attributes": [
                    {"name": a.name, "type": a.type.value, "isIdentifier": a.is_identifier}
                    for a in c.attributes
                ],
                "relationships": [
                    {
                        "name": r.name,
                        "target": r.target,
                        "multiplicity": r.multiplicity.value,
                        "relatedLinkTemplate": r.related_link_template,
                    }
                    for r in c.relationships
                ],
            }
            for c in model.classes
            if not c.is_core
        ],
    }


def dumps(data):
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def save_model(model):
    """Serialize ``model`` to its canonical text form (sorted keys, LF, 2-space indent)."""
    validate(model)
    return dumps(model_to_dict(model))


def _require(obj, key, kind, path):
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationFailed(f"missing key {key!r}", path)
    value = obj[key]
    if not isinstance(value, kind):
        raise ValidationFailed(f"expected {getattr(kind, '__name__', kind)}", f"{path}.{key}")
    return value


def _enum(enum, value, path):
    try:
        return enum(value)
    except ValueError:
        raise ValidationFailed(f"unknown {enum.__name__} {value!r}", path) from None


def load_model(document):
    """Parse a ``cmsmodel/1`` document (text or already-decoded dict)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationFailed(f"not JSON: {exc}", "$") from None
    if not isinstance(document, dict):
        raise ValidationFailed("document must be an object", "$")
    version = document.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"expected {SCHEMA_VERSION}, got {version!r}")

    core_names = _require(document, "coreClasses", list, "$")
    for i, name in enumerate(core_names):
        if name not in CORE_CLASSES:
            raise ValidationFailed(f"unknown core class {name!r}", f"$.coreClasses[{i}]")
    if sorted(core_names) != sorted(CORE_CLASS_NAMES):
        raise ValidationFailed("core class list incomplete or duplicated", "$.coreClasses")

    classes = [CORE_CLASSES[n] for n in core_names]
    for i, ext in enumerate(_require(document, "extensions", list, "$")):
        path = f"$.extensions[{i}]"
        attributes = []
        for j, a in enumerate(_require(ext, "attributes", list, path)):
            apath = f"{path}.attributes[{j}]"
            attributes.append(CmsAttribute(
                _require(a, "name", str, apath),
                _enum(AttributeType, _require(a, "type", str, apath), apath + ".type"),
                _require(a, "isIdentifier", bool, apath),
            ))
        relationships = []
        for j, r in enumerate(_require(ext, "relationships", list, path)):
            rpath = f"{path}.relationships[{j}]"
            link = r.get("relatedLinkTemplate") if isinstance(r, dict) else None
            if link is not None and not isinstance(link, str):
                raise ValidationFailed("expected string or null", rpath + ".relatedLinkTemplate")
            relationships.append(CmsRelationship(
                _require(r, "name", str, rpath),
                _require(r, "target", str, rpath),
                _enum(Multiplicity, _require(r, "multiplicity", str, rpath),
                      rpath + ".multiplicity"),
                link,
            ))
        endpoint = ext.get("endpointPath") if isinstance(ext, dict) else None
        if endpoint is not None and not isinstance(endpoint, str):
            raise ValidationFailed("expected string or null", path + ".endpointPath")
        declared = ext if isinstance(ext, dict) else {}
        cls = CmsClass(
            _require(declared, "name", str, path),
            _enum(CoreKind, _require(declared, "coreKind", str, path), path + ".coreKind"),
            False,
            endpoint,
            attributes,
            relationships,
        )
        # the constructor canonicalises id; a difference means the document was not canonical
        if cls.attributes != tuple(attributes):
            raise ValidationFailed("first attribute must be the canonical id", path + ".attributes")
        classes.append(cls)

    model = CmsModel(
        _require(document, "siteName", str, "$"),
        _require(document, "host", str, "$"),
        _require(document, "basePath", str, "$"),
        _enum(Platform, _require(document, "platform", str, "$"), "$.platform"),
        classes,
    )
    return validate(model)


_MULT = {Multiplicity.One: "1", Multiplicity.Many: "*"}


def emit_diagram(model):
    """Render ``model`` as a PlantUML class diagram."""
    validate(model)
    # the site name is free text; keep the title on one printable line
    title = " ".join("".join(ch if ch.isprintable() else " " for ch in model.site_name).split())
    lines = ["@startuml", f"title {title or 'CMS model'} ({model.platform.value})", ""]
    for c in model.classes:
        stereotype = " <<core>>" if c.is_core else f" <<{c.core_kind.value}>>"
        lines.append(f"class {c.name}{stereotype} {{")
        for a in c.attributes:
            lines.append(f"  {a.name} : {a.type.value}")
        lines.append("}")
    lines.append("")
    for c in model.classes:
        if c.is_core:
            parent = PARENT.get(c.core_kind)
            if parent is not None:
                lines.append(f"{c.name} --|> {parent.value}")
        else:
            lines.append(f"{c.name} --|> {c.core_kind.value}")
    for c in model.classes:
        for r in c.relationships:
            lines.append(f'{c.name} --> "{_MULT[r.multiplicity]}" {r.target} : {r.name}')
    lines.append("@enduml")
    return "\n".join(lines) + "\n"
