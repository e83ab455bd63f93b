"""Mock CMS: declarative site definitions served over HTTP."""

from importlib import resources

from .definition import (
    SCHEMA_VERSION,
    AttributeDef,
    EntityDef,
    InvalidQuery,
    MockSiteDefinition,
    RelationshipDef,
    SeedRecord,
    brute_force_query,
    copy_definition,
    definition_from_dict,
    definition_to_dict,
    dump_definition,
    induce_model,
    load_definition,
    validate_definition,
)
from .server import MockCms, RequestLogEntry, serve


def fixture_path(name="journal.json"):
    """Path of a bundled site definition (``journal.json``, ``journal_wordpress.json``)."""
    return resources.files(__package__).joinpath("fixtures", name)


def journal_site(platform="Drupal"):
    name = "journal_wordpress.json" if str(platform).lower() == "wordpress" else "journal.json"
    return load_definition(fixture_path(name))


__all__ = [
    "SCHEMA_VERSION", "AttributeDef", "EntityDef", "InvalidQuery", "MockCms",
    "MockSiteDefinition", "RelationshipDef", "RequestLogEntry", "SeedRecord",
    "brute_force_query", "copy_definition", "definition_from_dict", "definition_to_dict",
    "dump_definition", "fixture_path", "induce_model", "journal_site", "load_definition",
    "serve", "validate_definition",
]
