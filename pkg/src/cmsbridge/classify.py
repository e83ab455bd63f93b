"""Naming and classification rules that turn raw platform entities into model classes.

Both the live discovery process and the mock server's model induction feed
:func:`assemble_model`, so a site and the model it induces agree by
construction.  What differs between them is only how the raw entities are
obtained (wire documents versus an in-memory definition).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import UnclassifiableEntity
from .metamodel import (
    CORE_CLASSES,
    AttributeType,
    CmsAttribute,
    CmsClass,
    CmsRelationship,
    CoreKind,
    Multiplicity,
    Platform,
    add_class,
    core_model,
    descends_from,
    validate,
)
from .names import is_identifier, upper_camel

DRUPAL_PREFIXES = {
    "node": CoreKind.ContentType,
    "taxonomy": CoreKind.Taxonomy,
    "taxonomy_term": CoreKind.Taxonomy,
    "media": CoreKind.Media,
    "block": CoreKind.Block,
    "block_content": CoreKind.Block,
    "comment": CoreKind.Comment,
    "user": CoreKind.User,
}

MEDIA_REFINEMENTS = {
    "image": CoreKind.Image,
    "video": CoreKind.Video,
    "audio": CoreKind.Audio,
}

WORDPRESS_BUILTINS = {
    "posts": ("Post", CoreKind.ContentType),
    "pages": ("Page", CoreKind.ContentType),
    "tags": ("Tag", CoreKind.Tag),
    "categories": ("Category", CoreKind.Category),
    "comments": ("Comment", CoreKind.Comment),
    "media": ("Media", CoreKind.Media),
    "users": ("User", CoreKind.User),
}


@dataclass(frozen=True)
class DiscoveryWarning:
    code: str
    message: str
    context: str = ""


def _warn(warnings, code, message, context=""):
    if warnings is not None:
        warnings.append(DiscoveryWarning(code, message, context))


def split_drupal_name(raw):
    prefix, sep, suffix = raw.partition("--")
    if not sep or not prefix or not suffix:
        raise UnclassifiableEntity(f"{raw!r} is not of the form <prefix>--<bundle>")
    return prefix, suffix


def _core_match(name, kind):
    if name in CORE_CLASSES and descends_from(CoreKind(name), kind):
        return CoreKind(name)
    return None


def classify_entity(platform, raw_type_name, *, taxonomy=False, warnings=None):
    """Map a raw platform type name onto ``(class_name, core_kind)``.

    A name that matches a core class compatible with the inferred kind is
    reported with that core class's own kind, e.g. ``taxonomy--category`` ->
    ``("Category", CoreKind.Category)``.  Unknown Drupal prefixes fall back
    to ``ContentEntity`` and append an ``UnclassifiableEntity`` warning.
    """
    platform = Platform.parse(platform)
    if not raw_type_name:
        raise UnclassifiableEntity("empty type name")
    if platform is Platform.Drupal:
        prefix, suffix = split_drupal_name(raw_type_name)
        name = upper_camel(suffix)
        if not is_identifier(name):
            raise UnclassifiableEntity(f"{raw_type_name!r} gives no usable class name")
        kind = DRUPAL_PREFIXES.get(prefix)
        if kind is None:
            _warn(warnings, "UnclassifiableEntity",
                  f"unknown prefix {prefix!r}; anchored at ContentEntity", raw_type_name)
            return name, CoreKind.ContentEntity
        if kind is CoreKind.Media:
            kind = MEDIA_REFINEMENTS.get(suffix, kind)
        return name, _core_match(name, kind) or kind

    if raw_type_name in WORDPRESS_BUILTINS:
        return WORDPRESS_BUILTINS[raw_type_name]
    name = upper_camel(raw_type_name)
    if not is_identifier(name):
        raise UnclassifiableEntity(f"{raw_type_name!r} gives no usable class name")
    kind = CoreKind.Taxonomy if taxonomy else CoreKind.ContentType
    return name, _core_match(name, kind) or kind


def is_core_match(name, kind):
    return name in CORE_CLASSES and CoreKind(name) is kind


def _collision_suffix(platform, raw, taxonomy):
    if platform is Platform.Drupal:
        return upper_camel(raw.partition("--")[0]) or "Entity"
    return "Taxonomy" if taxonomy else "Post"


@dataclass(frozen=True)
class RawRelationship:
    name: str
    target: str  # raw type name of the target
    multiplicity: Multiplicity
    link: Optional[str] = None


@dataclass(frozen=True)
class RawEntity:
    raw_name: str
    endpoint_path: Optional[str]
    attributes: tuple = ()  # (name, AttributeType) pairs in document order
    relationships: tuple = ()
    taxonomy: bool = False


@dataclass
class _Names:
    taken: set = field(default_factory=lambda: set(CORE_CLASSES))

    def claim(self, name, suffix, raw, warnings):
        if name not in self.taken:
            self.taken.add(name)
            return name
        candidate = name + suffix
        n = 2
        while candidate in self.taken:
            candidate = f"{name}{suffix}{n}"
            n += 1
        _warn(warnings, "NameCollision", f"{name!r} already taken; using {candidate!r}", raw)
        self.taken.add(candidate)
        return candidate


def _sort_key(platform, entity):
    builtin = platform is Platform.WordPress and entity.raw_name in WORDPRESS_BUILTINS
    return (not builtin, entity.raw_name)


def assemble_model(platform, entities, *, site_name="", host="", base_path="", warnings=None):
    """Build a validated model extending the core model from raw entities."""
    platform = Platform.parse(platform)
    if warnings is None:
        warnings = []
    names = _Names()
    mapping = {}  # raw name -> class name
    pending = []  # (entity, class name, kind)

    for entity in sorted(entities, key=lambda e: _sort_key(platform, e)):
        if entity.raw_name in mapping:
            _warn(warnings, "DuplicateEntity", "entity declared twice; ignored", entity.raw_name)
            continue
        try:
            name, kind = classify_entity(platform, entity.raw_name,
                                         taxonomy=entity.taxonomy, warnings=warnings)
        except UnclassifiableEntity as exc:
            _warn(warnings, "UnclassifiableEntity", f"{exc}; skipped", entity.raw_name)
            continue
        if is_core_match(name, kind):
            mapping[entity.raw_name] = name
            continue
        name = names.claim(name, _collision_suffix(platform, entity.raw_name, entity.taxonomy),
                           entity.raw_name, warnings)
        mapping[entity.raw_name] = name
        pending.append((entity, name, kind))

    unresolved = sorted({
        r.target for entity, _, _ in pending for r in entity.relationships
        if r.target not in mapping
    })
    placeholders = []
    for raw in unresolved:
        try:
            name, kind = classify_entity(platform, raw)
        except UnclassifiableEntity:
            name, kind = upper_camel(raw), None
            if not is_identifier(name):
                name = "Unresolved"
        if kind is not None and is_core_match(name, kind):
            mapping[raw] = name
            continue
        name = names.claim(name, "Placeholder", raw, warnings)
        mapping[raw] = name
        placeholders.append(CmsClass(name, CoreKind.ContentEntity))
        _warn(warnings, "UnresolvedTarget",
              f"relationship target {raw!r} was not discovered; placeholder {name!r} created", raw)

    model = core_model(site_name, host, base_path, platform)
    for entity, name, kind in pending:
        attributes, seen = [], set()
        for attr_name, attr_type in entity.attributes:
            if not is_identifier(attr_name):
                _warn(warnings, "InvalidIdentifier",
                      f"attribute {attr_name!r} is not an identifier; skipped", entity.raw_name)
                continue
            if attr_name in seen:
                continue
            seen.add(attr_name)
            attributes.append(CmsAttribute(attr_name, AttributeType(attr_type)))
        relationships, rel_seen = [], set()
        for r in entity.relationships:
            if not is_identifier(r.name) or r.name in rel_seen:
                _warn(warnings, "InvalidIdentifier",
                      f"relationship {r.name!r} invalid or repeated; skipped", entity.raw_name)
                continue
            rel_seen.add(r.name)
            relationships.append(CmsRelationship(r.name, mapping[r.target], r.multiplicity, r.link))
        model = add_class(model, CmsClass(name, kind, False, entity.endpoint_path,
                                          attributes, relationships))
    for placeholder in placeholders:
        model = add_class(model, placeholder)
    return validate(model)
