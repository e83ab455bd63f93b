"""The core CMS model and the extension mechanism built on top of it.

The core model is plain data: a :class:`CmsModel` whose classes all carry
``is_core=True``.  Discovered entities are added as extension classes that
anchor to one of the extendable core kinds.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import (
    DuplicateClassName,
    NonExtendableKind,
    UnknownClass,
    ValidationFailed,
)
from .names import is_identifier


class CoreKind(str, Enum):
    ContentEntity = "ContentEntity"
    ContentType = "ContentType"
    Comment = "Comment"
    Taxonomy = "Taxonomy"
    Tag = "Tag"
    Category = "Category"
    Media = "Media"
    Image = "Image"
    Video = "Video"
    Audio = "Audio"
    Block = "Block"
    User = "User"
    Role = "Role"
    Permission = "Permission"
    GeneralPermission = "GeneralPermission"
    SpecificPermission = "SpecificPermission"

    def __str__(self):
        return self.value


class AttributeType(str, Enum):
    Text = "Text"
    Integer = "Integer"
    Float = "Float"
    Boolean = "Boolean"
    DateTime = "DateTime"
    Unknown = "Unknown"

    def __str__(self):
        return self.value


class Multiplicity(str, Enum):
    One = "One"
    Many = "Many"

    def __str__(self):
        return self.value


class Platform(str, Enum):
    Drupal = "Drupal"
    WordPress = "WordPress"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).lower():
                return member
        raise ValueError(f"unknown platform {value!r}")


PARENT = {
    CoreKind.ContentType: CoreKind.ContentEntity,
    CoreKind.Comment: CoreKind.ContentEntity,
    CoreKind.Taxonomy: CoreKind.ContentEntity,
    CoreKind.Media: CoreKind.ContentEntity,
    CoreKind.Block: CoreKind.ContentEntity,
    CoreKind.User: CoreKind.ContentEntity,
    CoreKind.Tag: CoreKind.Taxonomy,
    CoreKind.Category: CoreKind.Taxonomy,
    CoreKind.Image: CoreKind.Media,
    CoreKind.Video: CoreKind.Media,
    CoreKind.Audio: CoreKind.Media,
    CoreKind.GeneralPermission: CoreKind.Permission,
    CoreKind.SpecificPermission: CoreKind.Permission,
}

EXTENDABLE_KINDS = frozenset({
    CoreKind.ContentType,
    CoreKind.Taxonomy,
    CoreKind.Media,
    CoreKind.Image,
    CoreKind.Video,
    CoreKind.Audio,
    CoreKind.Block,
    CoreKind.Comment,
    CoreKind.User,
    CoreKind.ContentEntity,
})

CORE_CLASS_NAMES = tuple(k.value for k in CoreKind)

IDENTIFIER_ATTRIBUTE = "id"


def ancestors(kind):
    """Yield ``kind`` and every kind above it, nearest first."""
    while kind is not None:
        yield kind
        kind = PARENT.get(kind)


def descends_from(kind, ancestor):
    return ancestor in ancestors(kind)


@dataclass(frozen=True)
class CmsAttribute:
    name: str
    type: AttributeType = AttributeType.Text
    is_identifier: bool = False

    def __post_init__(self):
        object.__setattr__(self, "type", AttributeType(self.type))


@dataclass(frozen=True)
class CmsRelationship:
    name: str
    target: str
    multiplicity: Multiplicity = Multiplicity.Many
    related_link_template: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "multiplicity", Multiplicity(self.multiplicity))


def identifier_attribute():
    return CmsAttribute(IDENTIFIER_ATTRIBUTE, AttributeType.Text, True)


@dataclass(frozen=True)
class CmsClass:
    """One entity type.

    Extension classes always start with the canonical ``id: Text`` identifier;
    a declared ``id`` of any other type is replaced by it.
    """

    name: str
    core_kind: CoreKind
    is_core: bool = False
    endpoint_path: Optional[str] = None
    attributes: tuple = ()
    relationships: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "core_kind", CoreKind(self.core_kind))
        attributes = tuple(self.attributes)
        if not self.is_core:
            attributes = (identifier_attribute(),) + tuple(
                a for a in attributes if a.name != IDENTIFIER_ATTRIBUTE
            )
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "relationships", tuple(self.relationships))

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


@dataclass(frozen=True)
class CmsModel:
    site_name: str = ""
    host: str = ""
    base_path: str = ""
    platform: Platform = Platform.Drupal
    classes: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "platform", Platform.parse(self.platform))
        object.__setattr__(
            self, "classes", tuple(sorted(self.classes, key=lambda c: c.name))
        )

    def __getitem__(self, name):
        for c in self.classes:
            if c.name == name:
                return c
        raise UnknownClass(name)

    def __contains__(self, name):
        return any(c.name == name for c in self.classes)

    def get(self, name, default=None):
        try:
            return self[name]
        except UnknownClass:
            return default

    @property
    def names(self):
        return [c.name for c in self.classes]

    @property
    def extensions(self):
        return [c for c in self.classes if not c.is_core]

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _core_class(kind):
    if kind is CoreKind.ContentEntity:
        attrs = (
            identifier_attribute(),
            CmsAttribute("lastUpdated", AttributeType.DateTime),
        )
    else:
        attrs = (CmsAttribute("name", AttributeType.Text),)
    return CmsClass(kind.value, kind, is_core=True, attributes=attrs)


CORE_CLASSES = {kind.value: _core_class(kind) for kind in CoreKind}


def core_model(site_name="", host="", base_path="", platform=Platform.Drupal):
    """The fixed core model: one class per :class:`CoreKind`, no extensions."""
    return CmsModel(site_name, host, base_path, platform, tuple(CORE_CLASSES.values()))


def add_class(model, cls):
    """Return a copy of ``model`` that also contains the extension ``cls``."""
    if cls.name in model:
        raise DuplicateClassName(cls.name)
    if cls.is_core:
        raise NonExtendableKind(f"{cls.name}: core classes cannot be added")
    if cls.core_kind not in EXTENDABLE_KINDS:
        raise NonExtendableKind(f"{cls.name}: {cls.core_kind} cannot be extended")
    return model.replace(classes=model.classes + (cls,))


def resolve_kind(model, class_name):
    return model[class_name].core_kind


def validate(model):
    """Check every model invariant, raising :class:`ValidationFailed` on the first breach."""
    seen = set()
    for c in model.classes:
        path = f"classes[{c.name}]"
        if not is_identifier(c.name):
            raise ValidationFailed(f"invalid class name {c.name!r}", path)
        if c.name in seen:
            raise ValidationFailed("duplicate class name", path)
        seen.add(c.name)
        if c.is_core:
            if CORE_CLASSES.get(c.name) != c:
                raise ValidationFailed("core class altered or unknown", path)
            continue
        if c.core_kind not in EXTENDABLE_KINDS:
            raise ValidationFailed(f"{c.core_kind} is not extendable", path + ".coreKind")
        if c.attribute(IDENTIFIER_ATTRIBUTE) != identifier_attribute():
            raise ValidationFailed("missing canonical id attribute", path + ".attributes")
        names = set()
        for i, a in enumerate(c.attributes):
            if not is_identifier(a.name) or a.name in names:
                raise ValidationFailed(f"bad or duplicate attribute {a.name!r}",
                                       f"{path}.attributes[{i}]")
            if a.is_identifier and a.name != IDENTIFIER_ATTRIBUTE:
                raise ValidationFailed("only id may be an identifier",
                                       f"{path}.attributes[{i}]")
            names.add(a.name)
        rel_names = set()
        for i, r in enumerate(c.relationships):
            if not is_identifier(r.name) or r.name in rel_names:
                raise ValidationFailed(f"bad or duplicate relationship {r.name!r}",
                                       f"{path}.relationships[{i}]")
            rel_names.add(r.name)
    missing = set(CORE_CLASS_NAMES) - seen
    if missing:
        raise ValidationFailed(f"missing core classes {sorted(missing)}", "classes")
    for c in model.classes:
        for i, r in enumerate(c.relationships):
            if r.target not in seen:
                raise ValidationFailed(f"unresolved target {r.target!r}",
                                       f"classes[{c.name}].relationships[{i}].target")
    return model
