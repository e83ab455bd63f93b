"""Reverse engineering of a live CMS into a :class:`CmsModel`.

Drupal is read from its OpenAPI document (``/openapi.json``); WordPress from
the ``/wp-json`` route index, the taxonomy index and one ``OPTIONS`` schema
request per collection route.  Only GET and OPTIONS requests are issued.
"""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from urllib.parse import urlsplit

from . import http
from .classify import (
    DiscoveryWarning,
    RawEntity,
    RawRelationship,
    assemble_model,
    classify_entity,
    split_drupal_name,
)
from .errors import (
    MalformedDiscoveryDocument,
    MalformedRelationshipEntry,
    UnclassifiableEntity,
    UnexpectedStatus,
)
from .metamodel import AttributeType, CmsRelationship, Multiplicity, Platform
from .names import lower_camel, upper_camel

log = logging.getLogger(__name__)

MAX_PARALLEL_FETCHES = 4

_SPELLINGS = {
    "string": AttributeType.Text,
    "text": AttributeType.Text,
    "integer": AttributeType.Integer,
    "int": AttributeType.Integer,
    "number": AttributeType.Float,
    "float": AttributeType.Float,
    "double": AttributeType.Float,
    "boolean": AttributeType.Boolean,
    "bool": AttributeType.Boolean,
    "datetime": AttributeType.DateTime,
    "date-time": AttributeType.DateTime,
    "date": AttributeType.DateTime,
    "timestamp": AttributeType.DateTime,
}

# /wp/v2/<name> routes that describe the API itself rather than content
WORDPRESS_META_ROUTES = frozenset({
    "types", "taxonomies", "statuses", "settings", "themes", "plugins", "search",
    "block-types", "block-renderer", "block-directory", "sidebars", "widgets",
    "widget-types", "menu-locations", "navigation", "templates", "template-parts",
    "global-styles", "pattern-directory", "font-families", "font-collections",
})

_WP_COLLECTION = re.compile(r"^/wp/v2/([A-Za-z0-9_\-]+)$")


@dataclass
class DiscoveryReport:
    model: object
    warnings: list = field(default_factory=list)

    def codes(self):
        return [w.code for w in self.warnings]


def infer_attribute_type(raw, *, sample=False):
    """Map a declared type spelling, a JSON-schema fragment or a sample value.

    Strings are read as declared spellings (``"String"``, ``"Integer"`` ...)
    unless ``sample=True``; dicts as JSON-schema fragments; anything else as a
    sample value typed by its JSON type.  Unrecognised input gives ``Unknown``.
    """
    if sample or not isinstance(raw, (str, dict)):
        if isinstance(raw, bool):
            return AttributeType.Boolean
        if isinstance(raw, int):
            return AttributeType.Integer
        if isinstance(raw, float):
            return AttributeType.Float
        if isinstance(raw, str):
            return AttributeType.Text
        return AttributeType.Unknown
    if isinstance(raw, str):
        return _SPELLINGS.get(raw.strip().lower(), AttributeType.Unknown)
    declared = raw.get("type")
    if isinstance(declared, list):
        declared = next((t for t in declared if t != "null"), None)
    if not isinstance(declared, str):
        return AttributeType.Unknown
    if declared == "string" and raw.get("format") in ("date-time", "date"):
        return AttributeType.DateTime
    if declared in ("object", "array", "null"):
        return AttributeType.Unknown
    return _SPELLINGS.get(declared.lower(), AttributeType.Unknown)


# -- relationships -------------------------------------------------------------

def _entry_target(item, where):
    if not isinstance(item, dict) or not isinstance(item.get("type"), str) or not item["type"]:
        raise MalformedRelationshipEntry(f"{where}: entry needs a string 'type'")
    link = item.get("link")
    if link is not None and not isinstance(link, str):
        raise MalformedRelationshipEntry(f"{where}: 'link' must be a string")
    return item["type"], link


def _is_indexed(obj):
    return isinstance(obj, dict) and bool(obj) and all(k.isdigit() for k in obj)


def _target_name(platform, raw):
    try:
        return classify_entity(platform, raw)[0]
    except UnclassifiableEntity:
        return upper_camel(raw.rpartition("--")[2]) or raw


def _drupal_relationships(definition):
    properties = definition.get("properties", {}) if isinstance(definition, dict) else None
    if not isinstance(properties, dict):
        raise MalformedRelationshipEntry("definition has no 'properties' object")
    block = properties.get("relationships", {})
    if block in (None, [], {}):
        return []
    if isinstance(block, list):
        block = {str(i): item for i, item in enumerate(block)}
    if not isinstance(block, dict):
        raise MalformedRelationshipEntry("'relationships' must be an object")

    out = []
    if _is_indexed(block):
        # unnamed, array-indexed form: each distinct target is one Many relationship
        seen = set()
        for key in sorted(block, key=int):
            raw, link = _entry_target(block[key], f"relationships.{key}")
            if raw in seen:
                continue
            seen.add(raw)
            name = lower_camel(_target_name(Platform.Drupal, raw))
            out.append(RawRelationship(name, raw, Multiplicity.Many, link))
        return out

    for name, entry in block.items():
        where = f"relationships.{name}"
        if isinstance(entry, list):
            if not entry:
                raise MalformedRelationshipEntry(f"{where}: empty array entry")
            raw, link = _entry_target(entry[0], where)
            multiplicity = Multiplicity.Many
        elif _is_indexed(entry):
            raw, link = _entry_target(entry[min(entry, key=int)], where)
            multiplicity = Multiplicity.Many
        elif isinstance(entry, dict):
            raw, link = _entry_target(entry, where)
            multiplicity = Multiplicity.One
        else:
            raise MalformedRelationshipEntry(f"{where}: expected an object or array")
        out.append(RawRelationship(name, raw, multiplicity, link))
    return out


def _wordpress_relationships(schema):
    if not isinstance(schema, dict):
        raise MalformedRelationshipEntry("schema must be an object")
    links = schema.get("links", [])
    if not isinstance(links, list):
        raise MalformedRelationshipEntry("schema 'links' must be an array")
    properties = schema.get("properties", {})
    out = []
    for i, link in enumerate(links):
        if not isinstance(link, dict):
            raise MalformedRelationshipEntry(f"links[{i}]: expected an object")
        route = link.get("targetRoute")
        if not isinstance(link.get("rel"), str) or not isinstance(route, str):
            # WordPress' own action links carry no target; they are not relationships
            continue
        match = _WP_COLLECTION.match(route)
        if not match:
            raise MalformedRelationshipEntry(f"links[{i}]: bad targetRoute {route!r}")
        href = link.get("href")
        if href is not None and not isinstance(href, str):
            raise MalformedRelationshipEntry(f"links[{i}]: 'href' must be a string")
        prop = properties.get(link["rel"]) if isinstance(properties, dict) else None
        array_shaped = isinstance(prop, dict) and prop.get("type") == "array"
        multiplicity = Multiplicity.Many if array_shaped else Multiplicity.One
        out.append(RawRelationship(link["rel"], match.group(1), multiplicity, href))
    return out


def infer_relationships(raw_definition, platform=Platform.Drupal):
    """Relationships declared by one raw definition (Drupal) or route schema (WordPress).

    Targets are named with the plain classification rule; discovery proper
    resolves them against the whole site, including collision renames.
    """
    platform = Platform.parse(platform)
    if platform is Platform.Drupal:
        raws = _drupal_relationships(raw_definition)
    else:
        raws = _wordpress_relationships(raw_definition)
    return [
        CmsRelationship(r.name, _target_name(platform, r.target), r.multiplicity, r.link)
        for r in raws
    ]


# -- fetching ------------------------------------------------------------------

def _get_json(url, credentials, method="GET"):
    response = http.send(method, url, credentials)
    if response.status != 200:
        raise UnexpectedStatus(response.status, url)
    try:
        return response.json()
    except ValueError as exc:
        raise MalformedDiscoveryDocument(f"invalid JSON ({exc})", urlsplit(url).path) from None


def _require_dict(obj, what, path):
    if not isinstance(obj, dict):
        raise MalformedDiscoveryDocument(f"{what} must be an object", path)
    return obj


def _discover_drupal(base_url, credentials, warnings):
    url = base_url.rstrip("/") + "/openapi.json"
    path = urlsplit(url).path
    doc = _require_dict(_get_json(url, credentials), "document", path)
    definitions = _require_dict(doc.get("definitions", {}), "'definitions'", path)
    host = doc.get("host", "")
    base_path = doc.get("basePath", "")
    info = doc.get("info", {})
    title = info.get("title", "") if isinstance(info, dict) else ""
    if not all(isinstance(v, str) for v in (host, base_path, title)):
        raise MalformedDiscoveryDocument("info.title, host and basePath must be strings", path)

    entities = []
    for raw_name, definition in definitions.items():
        where = f"{path}#/definitions/{raw_name}"
        _require_dict(definition, "definition", where)
        properties = _require_dict(definition.get("properties", {}), "'properties'", where)
        attributes = _require_dict(properties.get("attributes", {}) or {}, "'attributes'", where)
        try:
            relationships = _drupal_relationships(definition)
        except MalformedRelationshipEntry as exc:
            raise MalformedDiscoveryDocument(str(exc), where) from None
        try:
            prefix, suffix = split_drupal_name(raw_name)
            endpoint = f"{base_path.rstrip('/')}/{prefix}/{suffix}"
        except UnclassifiableEntity:
            endpoint = None
        entities.append(RawEntity(
            raw_name,
            endpoint,
            tuple((name, infer_attribute_type(spec)) for name, spec in attributes.items()),
            tuple(relationships),
        ))
    return entities, title, host, base_path


def _schema_attributes(options, relationship_names):
    schema = options.get("schema")
    if isinstance(schema, dict) and isinstance(schema.get("properties"), dict):
        props = schema["properties"]
    else:
        # no schema: fall back to the arguments of the write endpoint
        props = {}
        for endpoint in options.get("endpoints", []) or []:
            if isinstance(endpoint, dict) and "POST" in endpoint.get("methods", []):
                props.update(endpoint.get("args", {}) or {})
    return tuple(
        (name, infer_attribute_type(spec if isinstance(spec, dict) else {}))
        for name, spec in props.items()
        if name not in relationship_names
    )


def _discover_wordpress(base_url, credentials, warnings):
    root = base_url.rstrip("/") + "/wp-json"
    index = _require_dict(_get_json(root, credentials), "route index", urlsplit(root).path)
    routes = _require_dict(index.get("routes"), "'routes'", urlsplit(root).path)
    site_url = index.get("url", "")
    name = index.get("name", "")
    if not isinstance(site_url, str) or not isinstance(name, str):
        raise MalformedDiscoveryDocument("'url' and 'name' must be strings", urlsplit(root).path)
    parts = urlsplit(site_url)
    host = parts.netloc
    base_path = parts.path.rstrip("/") + "/wp-json"

    taxonomy_routes = set()
    try:
        taxonomies = _get_json(root + "/wp/v2/taxonomies", credentials)
    except UnexpectedStatus as exc:
        warnings.append(DiscoveryWarning(
            "NoTaxonomyIndex", f"taxonomy index unavailable ({exc}); custom taxonomies "
            "will be read as content types", "/wp/v2/taxonomies"))
    else:
        for slug, info in _require_dict(taxonomies, "taxonomy index", "/wp/v2/taxonomies").items():
            if isinstance(info, dict) and isinstance(info.get("rest_base"), str):
                taxonomy_routes.add(info["rest_base"])

    collections = sorted(
        m.group(1) for m in map(_WP_COLLECTION.match, routes) if m
        and m.group(1) not in WORDPRESS_META_ROUTES
    )

    def fetch(route_name):
        return route_name, _get_json(f"{root}/wp/v2/{route_name}", credentials, method="OPTIONS")

    with ThreadPoolExecutor(max_workers=MAX_PARALLEL_FETCHES) as pool:
        schemas = dict(pool.map(fetch, collections))

    entities = []
    for route_name in collections:
        where = f"{urlsplit(root).path}/wp/v2/{route_name}"
        options = _require_dict(schemas[route_name], "OPTIONS response", where)
        try:
            relationships = _wordpress_relationships(options.get("schema") or {})
        except MalformedRelationshipEntry as exc:
            raise MalformedDiscoveryDocument(str(exc), where) from None
        entities.append(RawEntity(
            route_name,
            f"{base_path}/wp/v2/{route_name}",
            _schema_attributes(options, {r.name for r in relationships}),
            tuple(relationships),
            taxonomy=route_name in taxonomy_routes,
        ))
    return entities, name, host, base_path


def discover(base_url, credentials=http.NO_CREDENTIALS, platform=Platform.Drupal):
    """Extract the model of the CMS at ``base_url``.

    Raises :class:`~cmsbridge.errors.Unreachable`, :class:`~cmsbridge.errors.AuthFailed`,
    :class:`~cmsbridge.errors.UnexpectedStatus` or
    :class:`~cmsbridge.errors.MalformedDiscoveryDocument`.
    """
    parts = urlsplit(base_url)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise ValueError(f"not an http(s) URL: {base_url!r}")
    platform = Platform.parse(platform)
    warnings = []
    if platform is Platform.Drupal:
        entities, title, host, base_path = _discover_drupal(base_url, credentials, warnings)
    else:
        entities, title, host, base_path = _discover_wordpress(base_url, credentials, warnings)
    model = assemble_model(platform, entities, site_name=title, host=host,
                           base_path=base_path, warnings=warnings)
    for w in warnings:
        log.warning("%s: %s (%s)", w.code, w.message, w.context)
    return DiscoveryReport(model, warnings)
