"""Declarative mock sites: schema, seed content, wire documents and reference semantics."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

from ..classify import (
    RawEntity,
    RawRelationship,
    assemble_model,
    classify_entity,
    split_drupal_name,
)
from ..discovery import WORDPRESS_META_ROUTES
from ..drivers.query import WORDPRESS_RESERVED_PARAMS, Direction, FilterOp
from ..errors import InvalidDefinition, QueryError, UnclassifiableEntity, UnknownType
from ..metamodel import AttributeType, Multiplicity, Platform
from ..names import is_identifier

SCHEMA_VERSION = "mocksite/1"

DEFAULT_BASE_PATHS = {Platform.Drupal: "/jsonapi", Platform.WordPress: "/wp-json"}

# Names the wire formats use for bookkeeping; attributes may not shadow them.
RESERVED_NAMES = frozenset({
    "id", "type", "links", "relationships", "attributes", "changed", "modified",
    "_links", "lastUpdated", "taxonomy",
}) | WORDPRESS_RESERVED_PARAMS


class InvalidQuery(QueryError):
    """A query that names an unknown field or mixes incompatible types."""


@dataclass
class AttributeDef:
    name: str
    type: AttributeType = AttributeType.Text


@dataclass
class RelationshipDef:
    name: str
    target: str
    multiplicity: Multiplicity = Multiplicity.Many


@dataclass
class EntityDef:
    raw_name: str
    attributes: list = field(default_factory=list)
    relationships: list = field(default_factory=list)
    taxonomy: bool = False  # WordPress only: a custom taxonomy rather than a post type

    def attribute(self, name):
        for a in self.attributes:
            if a.name == name:
                return a
        return None

    def relationship(self, name):
        for r in self.relationships:
            if r.name == name:
                return r
        return None


@dataclass
class SeedRecord:
    id: str
    type: str
    attributes: dict = field(default_factory=dict)
    relationships: dict = field(default_factory=dict)
    last_updated: Optional[str] = None


@dataclass
class MockSiteDefinition:
    site_name: str
    platform: Platform
    schema: list = field(default_factory=list)
    content: list = field(default_factory=list)
    host: str = "example.com"
    base_path: Optional[str] = None
    auth: Optional[tuple] = None  # (username, secret)

    def __post_init__(self):
        self.platform = Platform.parse(self.platform)
        if self.base_path is None:
            self.base_path = DEFAULT_BASE_PATHS[self.platform]

    def entity(self, raw_name):
        for e in self.schema:
            if e.raw_name == raw_name:
                return e
        return None

    def records(self, raw_name):
        return [r for r in self.content if r.type == raw_name]


# -- dates ---------------------------------------------------------------------

def parse_datetime(value):
    """Parse an ISO-8601 string (``Z`` accepted); naive values are taken as UTC."""
    if isinstance(value, datetime):
        dt = value
    else:
        text = value.strip()
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def now_iso():
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")


def value_conforms(attr_type, value):
    if value is None:
        return True
    if attr_type is AttributeType.Text:
        return isinstance(value, str)
    if attr_type is AttributeType.Integer:
        return isinstance(value, int) and not isinstance(value, bool)
    if attr_type is AttributeType.Float:
        return (isinstance(value, (int, float)) and not isinstance(value, bool)
                and math.isfinite(value))
    if attr_type is AttributeType.Boolean:
        return isinstance(value, bool)
    if attr_type is AttributeType.DateTime:
        if not isinstance(value, str):
            return False
        try:
            parse_datetime(value)
        except ValueError:
            return False
        return True
    return isinstance(value, (str, int, float, bool))


# -- layout shared by the server and model induction -----------------------------

def endpoint_path(definition, entity):
    base = definition.base_path.rstrip("/")
    if definition.platform is Platform.Drupal:
        prefix, suffix = split_drupal_name(entity.raw_name)
        return f"{base}/{prefix}/{suffix}"
    return f"{base}/wp/v2/{entity.raw_name}"


def related_link_template(definition, entity, relationship):
    return f"{endpoint_path(definition, entity)}/{{id}}/{relationship.name}"


def induce_model(definition):
    """The model a correct discovery over ``definition`` must produce."""
    validate_definition(definition)
    entities = [
        RawEntity(
            e.raw_name,
            endpoint_path(definition, e),
            tuple((a.name, a.type) for a in e.attributes),
            tuple(
                RawRelationship(r.name, r.target, r.multiplicity,
                                related_link_template(definition, e, r))
                for r in e.relationships
            ),
            taxonomy=e.taxonomy and definition.platform is Platform.WordPress,
        )
        for e in definition.schema
    ]
    return assemble_model(definition.platform, entities, site_name=definition.site_name,
                          host=definition.host, base_path=definition.base_path)


# -- validation ------------------------------------------------------------------

def _fail(message, where):
    raise InvalidDefinition(f"{where}: {message}")


def _check_raw_name(definition, raw, where):
    if definition.platform is Platform.Drupal:
        try:
            split_drupal_name(raw)
        except UnclassifiableEntity as exc:
            _fail(str(exc), where)
    elif not raw or not all(ch.isalnum() or ch in "_-" for ch in raw):
        _fail(f"{raw!r} is not a route name", where)
    elif raw in WORDPRESS_META_ROUTES:
        _fail(f"{raw!r} is a reserved WordPress route", where)


def validate_definition(definition):
    if not isinstance(definition.site_name, str):
        _fail("siteName must be a string", "$")
    if not definition.host:
        _fail("host must be non-empty", "$")
    if not definition.base_path.startswith("/"):
        _fail("basePath must start with '/'", "$")
    if definition.platform is Platform.WordPress and not definition.base_path.endswith("/wp-json"):
        _fail("WordPress basePath must end with /wp-json", "$")
    if definition.auth is not None and (len(definition.auth) != 2 or not definition.auth[0]):
        _fail("auth must be (username, secret)", "$.auth")

    seen = set()
    for i, e in enumerate(definition.schema):
        where = f"$.schema[{i}]"
        _check_raw_name(definition, e.raw_name, where)
        try:
            classify_entity(definition.platform, e.raw_name, taxonomy=e.taxonomy)
        except UnclassifiableEntity as exc:
            _fail(str(exc), where)
        if e.raw_name in seen:
            _fail(f"duplicate entity {e.raw_name!r}", where)
        seen.add(e.raw_name)
        names = set()
        for j, a in enumerate(e.attributes):
            if not is_identifier(a.name) or a.name in RESERVED_NAMES or a.name in names:
                _fail(f"bad, reserved or duplicate attribute {a.name!r}", f"{where}.attributes[{j}]")
            a.type = AttributeType(a.type)
            names.add(a.name)
        for j, r in enumerate(e.relationships):
            rwhere = f"{where}.relationships[{j}]"
            if not is_identifier(r.name) or r.name in RESERVED_NAMES or r.name in names:
                _fail(f"bad, reserved or duplicate relationship {r.name!r}", rwhere)
            names.add(r.name)
            r.multiplicity = Multiplicity(r.multiplicity)
            _check_raw_name(definition, r.target, rwhere + ".target")

    ids = set()
    for i, rec in enumerate(definition.content):
        where = f"$.content[{i}]"
        entity = definition.entity(rec.type)
        if entity is None:
            _fail(f"undeclared type {rec.type!r}", where)
        if not isinstance(rec.id, str) or not rec.id or "/" in rec.id:
            _fail("id must be a non-empty string without '/'", where)
        if (rec.type, rec.id) in ids:
            _fail(f"duplicate id {rec.id!r}", where)
        ids.add((rec.type, rec.id))
        if rec.last_updated is not None and not value_conforms(AttributeType.DateTime,
                                                               rec.last_updated):
            _fail("lastUpdated must be an ISO date-time", where)
        for name, value in rec.attributes.items():
            attr = entity.attribute(name)
            if attr is None:
                _fail(f"undeclared attribute {name!r}", where)
            if not value_conforms(attr.type, value):
                _fail(f"value {value!r} is not {attr.type.value}", f"{where}.attributes.{name}")
        for name in rec.relationships:
            if entity.relationship(name) is None:
                _fail(f"undeclared relationship {name!r}", where)

    for i, rec in enumerate(definition.content):
        entity = definition.entity(rec.type)
        for name, value in rec.relationships.items():
            rel = entity.relationship(name)
            where = f"$.content[{i}].relationships.{name}"
            if rel.multiplicity is Multiplicity.Many:
                if not isinstance(value, list):
                    _fail("Many relationship needs a list of ids", where)
                targets = value
            else:
                if value is not None and not isinstance(value, str):
                    _fail("One relationship needs an id or null", where)
                targets = [] if value is None else [value]
            for target_id in targets:
                if (rel.target, target_id) not in ids:
                    _fail(f"no {rel.target} record with id {target_id!r}", where)
    return definition


# -- (de)serialization -----------------------------------------------------------

def definition_from_dict(data):
    if not isinstance(data, dict):
        raise InvalidDefinition("$: definition must be an object")
    if data.get("version") != SCHEMA_VERSION:
        raise InvalidDefinition(f"$.version: expected {SCHEMA_VERSION!r}")
    try:
        auth = data.get("auth")
        definition = MockSiteDefinition(
            site_name=data["siteName"],
            platform=data["platform"],
            host=data.get("host", "example.com"),
            base_path=data.get("basePath"),
            auth=(auth["username"], auth["secret"]) if auth else None,
            schema=[
                EntityDef(
                    e["rawTypeName"],
                    [AttributeDef(a["name"], AttributeType(a["type"]))
                     for a in e.get("attributes", [])],
                    [RelationshipDef(r["name"], r["target"], Multiplicity(r["multiplicity"]))
                     for r in e.get("relationships", [])],
                    bool(e.get("taxonomy", False)),
                )
                for e in data.get("schema", [])
            ],
            content=[
                SeedRecord(
                    c["id"], c["type"], dict(c.get("attributes", {})),
                    dict(c.get("relationships", {})), c.get("lastUpdated"),
                )
                for c in data.get("content", [])
            ],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDefinition(f"$: malformed definition ({exc.__class__.__name__}: {exc})") from None
    return validate_definition(definition)


def definition_to_dict(definition):
    return {
        "version": SCHEMA_VERSION,
        "siteName": definition.site_name,
        "platform": definition.platform.value,
        "host": definition.host,
        "basePath": definition.base_path,
        "auth": ({"username": definition.auth[0], "secret": definition.auth[1]}
                 if definition.auth else None),
        "schema": [
            {
                "rawTypeName": e.raw_name,
                "taxonomy": e.taxonomy,
                "attributes": [{"name": a.name, "type": AttributeType(a.type).value}
                               for a in e.attributes],
                "relationships": [{"name": r.name, "target": r.target,
                                   "multiplicity": Multiplicity(r.multiplicity).value}
                                  for r in e.relationships],
            }
            for e in definition.schema
        ],
        "content": [
            {"id": c.id, "type": c.type, "lastUpdated": c.last_updated,
             "attributes": c.attributes, "relationships": c.relationships}
            for c in definition.content
        ],
    }


def load_definition(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidDefinition(f"{path}: not JSON ({exc})") from None
    return definition_from_dict(data)


def dump_definition(definition):
    return json.dumps(definition_to_dict(definition), indent=2, ensure_ascii=False) + "\n"


def copy_definition(definition, **changes):
    clone = copy.deepcopy(definition)
    for key, value in changes.items():
        setattr(clone, key, value)
    return clone


# -- reference query semantics -----------------------------------------------------

_ID = AttributeDef("id", AttributeType.Text)


def _field(entity, name):
    if name == "id":
        return _ID
    attr = entity.attribute(name)
    if attr is None:
        raise InvalidQuery(f"{entity.raw_name} has no attribute {name!r}")
    if attr.type is AttributeType.Unknown:
        raise InvalidQuery(f"{name!r} is untyped and cannot be queried")
    return attr


def _typed(attr_type, value, where):
    number = isinstance(value, (int, float)) and not isinstance(value, bool)
    if attr_type is AttributeType.Text and isinstance(value, str):
        return value
    if attr_type in (AttributeType.Integer, AttributeType.Float) and number:
        return value
    if attr_type is AttributeType.Boolean and isinstance(value, bool):
        return value
    if attr_type is AttributeType.DateTime and isinstance(value, (str, datetime)):
        try:
            return parse_datetime(value)
        except ValueError:
            pass
    raise InvalidQuery(f"{where}: {value!r} does not fit {attr_type.value}")


def _record_value(record, attr):
    value = record.id if attr.name == "id" else record.attributes.get(attr.name)
    if value is not None and attr.type is AttributeType.DateTime:
        return parse_datetime(value)
    return value


def brute_force_query(definition, type_name, query, content=None):
    """Ids of ``type_name`` records selected by ``query``: filter, then sort, then slice.

    Filters are conjunctive; ``Contains`` is a case-sensitive substring test;
    a null attribute satisfies only ``Ne``.  Sorting is stable with nulls
    first in ascending order and ties broken by ascending id.
    """
    entity = definition.entity(type_name)
    if entity is None:
        raise UnknownType(type_name)
    records = [r for r in (definition.content if content is None else content)
               if r.type == type_name]

    checks = []
    for f in query.filters:
        attr = _field(entity, f.field)
        if f.op in (FilterOp.Gt, FilterOp.Lt) and attr.type not in (
            AttributeType.Integer, AttributeType.Float, AttributeType.DateTime
        ):
            raise InvalidQuery(f"{f.op.value} on non-ordered attribute {f.field!r}")
        if f.op is FilterOp.Contains and attr.type is not AttributeType.Text:
            raise InvalidQuery(f"Contains on non-text attribute {f.field!r}")
        checks.append((attr, f.op, _typed(attr.type, f.value, f.field)))

    def keep(record):
        for attr, op, wanted in checks:
            value = _record_value(record, attr)
            if value is None:
                if op is not FilterOp.Ne:
                    return False
                continue
            if op is FilterOp.Eq and not value == wanted:
                return False
            if op is FilterOp.Ne and not value != wanted:
                return False
            if op is FilterOp.Gt and not value > wanted:
                return False
            if op is FilterOp.Lt and not value < wanted:
                return False
            if op is FilterOp.Contains and wanted not in value:
                return False
        return True

    selected = sorted((r for r in records if keep(r)), key=lambda r: r.id)
    for sorter in reversed(query.sorters):
        attr = _field(entity, sorter.field)

        def key(record, attr=attr):
            value = _record_value(record, attr)
            return (0, 0) if value is None else (1, value)

        selected.sort(key=key, reverse=sorter.direction is Direction.Desc)
    start = query.page.offset
    return [r.id for r in selected[start:start + query.page.limit]]
