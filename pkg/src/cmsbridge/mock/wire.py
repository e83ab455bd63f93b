"""Documents and payloads the mock serves, in both platform dialects."""

from ..metamodel import AttributeType, Multiplicity, Platform
from .definition import endpoint_path, related_link_template

DRUPAL_SPELLINGS = {
    AttributeType.Text: "String",
    AttributeType.Integer: "Integer",
    AttributeType.Float: "Number",
    AttributeType.Boolean: "Boolean",
    AttributeType.DateTime: "DateTime",
    AttributeType.Unknown: "Any",
}

JSON_SCHEMA_TYPES = {
    AttributeType.Text: {"type": "string"},
    AttributeType.Integer: {"type": "integer"},
    AttributeType.Float: {"type": "number"},
    AttributeType.Boolean: {"type": "boolean"},
    AttributeType.DateTime: {"type": "string", "format": "date-time"},
    AttributeType.Unknown: {"type": "any"},
}

WORDPRESS_TAXONOMY_SLUGS = {"categories": "category", "tags": "post_tag"}


def drupal_openapi(definition):
    definitions = {}
    for e in definition.schema:
        prefix, _, suffix = e.raw_name.partition("--")
        relationships = {}
        for r in e.relationships:
            entry = {"type": r.target, "link": related_link_template(definition, e, r)}
            relationships[r.name] = {"0": entry} if r.multiplicity is Multiplicity.Many else entry
        attributes = {"id": "String"}
        attributes.update((a.name, DRUPAL_SPELLINGS[a.type]) for a in e.attributes)
        definitions[e.raw_name] = {
            "title": f"{prefix}:{suffix} Schema",
            "description": f"{suffix} entities",
            "type": "object",
            "properties": {"attributes": attributes, "relationships": relationships},
        }
    return {
        "swagger": "2.0",
        "info": {"title": definition.site_name, "version": "1.0.0"},
        "host": definition.host,
        "basePath": definition.base_path,
        "schemes": ["http"],
        "definitions": definitions,
    }


def _site_url(definition):
    return f"http://{definition.host}{definition.base_path[:-len('/wp-json')]}"


def wordpress_index(definition):
    routes = {
        "/": {"namespace": "", "methods": ["GET"]},
        "/wp/v2": {"namespace": "wp/v2", "methods": ["GET"]},
        "/wp/v2/types": {"namespace": "wp/v2", "methods": ["GET"]},
        "/wp/v2/taxonomies": {"namespace": "wp/v2", "methods": ["GET"]},
    }
    for e in definition.schema:
        route = f"/wp/v2/{e.raw_name}"
        routes[route] = {
            "namespace": "wp/v2",
            "methods": ["GET", "OPTIONS"],
            "endpoints": [{"methods": ["GET"], "args": {}}],
        }
        routes[route + "/(?P<id>[\\w-]+)"] = {
            "namespace": "wp/v2",
            "methods": ["GET", "POST"],
            "endpoints": [{"methods": ["GET"], "args": {}}, {"methods": ["POST"], "args": {}}],
        }
    return {
        "name": definition.site_name,
        "description": "",
        "url": _site_url(definition),
        "home": _site_url(definition),
        "namespaces": ["wp/v2"],
        "routes": routes,
    }


def wordpress_taxonomies(definition):
    out = {}
    for e in definition.schema:
        if e.raw_name in WORDPRESS_TAXONOMY_SLUGS:
            slug = WORDPRESS_TAXONOMY_SLUGS[e.raw_name]
        elif e.taxonomy:
            slug = e.raw_name
        else:
            continue
        out[slug] = {"name": slug, "slug": slug, "rest_base": e.raw_name, "types": ["post"]}
    return out


def wordpress_options(definition, entity):
    properties = {"id": {"type": "string", "readonly": True,
                         "description": "Unique identifier for the object."}}
    args = {}
    for a in entity.attributes:
        properties[a.name] = dict(JSON_SCHEMA_TYPES[a.type])
        args[a.name] = dict(JSON_SCHEMA_TYPES[a.type])
    links = []
    for r in entity.relationships:
        if r.multiplicity is Multiplicity.Many:
            properties[r.name] = {"type": "array", "items": {"type": "string"}}
        else:
            properties[r.name] = {"type": ["string", "null"]}
        links.append({
            "rel": r.name,
            "href": related_link_template(definition, entity, r),
            "targetRoute": f"/wp/v2/{r.target}",
        })
    read_args = {
        "per_page": {"type": "integer", "default": 10, "minimum": 1},
        "offset": {"type": "integer"},
        "search": {"type": "string"},
        "search_columns": {"type": "array"},
        "orderby": {"type": "string"},
        "order": {"type": "string", "enum": ["asc", "desc"]},
    }
    return {
        "namespace": "wp/v2",
        "methods": ["GET", "POST"],
        "endpoints": [
            {"methods": ["GET"], "args": read_args},
            {"methods": ["POST"], "args": args},
        ],
        "schema": {
            "$schema": "http://json-schema.org/draft-04/schema#",
            "title": entity.raw_name,
            "type": "object",
            "properties": properties,
            "links": links,
        },
    }


def _self_url(origin, definition, entity, record_id):
    return f"{origin}{endpoint_path(definition, entity)}/{record_id}"


def drupal_resource(origin, definition, entity, record):
    attributes = {a.name: record.attributes.get(a.name) for a in entity.attributes}
    attributes["changed"] = record.last_updated
    relationships = {}
    for r in entity.relationships:
        value = record.relationships.get(r.name)
        if r.multiplicity is Multiplicity.Many:
            data = [{"type": r.target, "id": i} for i in (value or [])]
        else:
            data = None if value is None else {"type": r.target, "id": value}
        relationships[r.name] = {
            "data": data,
            "links": {"related": {"href": f"{_self_url(origin, definition, entity, record.id)}/{r.name}"}},
        }
    return {
        "type": entity.raw_name,
        "id": record.id,
        "attributes": attributes,
        "relationships": relationships,
        "links": {"self": {"href": _self_url(origin, definition, entity, record.id)}},
    }


def wordpress_record(origin, definition, entity, record):
    out = {"id": record.id, "type": entity.raw_name, "modified": record.last_updated}
    for a in entity.attributes:
        out[a.name] = record.attributes.get(a.name)
    self_url = _self_url(origin, definition, entity, record.id)
    links = {
        "self": [{"href": self_url}],
        "collection": [{"href": f"{origin}{endpoint_path(definition, entity)}"}],
    }
    for r in entity.relationships:
        value = record.relationships.get(r.name)
        out[r.name] = list(value or []) if r.multiplicity is Multiplicity.Many else value
        links[r.name] = [{"href": f"{self_url}/{r.name}", "embeddable": True}]
    out["_links"] = links
    return out


def render_record(platform, origin, definition, entity, record):
    if platform is Platform.Drupal:
        return drupal_resource(origin, definition, entity, record)
    return wordpress_record(origin, definition, entity, record)
