"""Random mock sites and random queries for round-trip and differential tests.

Every generated entity comes with the class name and kind a correct
discovery should assign to it.  Those expectations are computed here from
the word lists, without going through the classification code, so they can
serve as an independent check of it.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from ..drivers.query import Direction, Filter, FilterOp, Page, SearchQuery, Sorter
from ..metamodel import AttributeType, CoreKind, Multiplicity, Platform
from .definition import (
    AttributeDef,
    EntityDef,
    MockSiteDefinition,
    RelationshipDef,
    SeedRecord,
    parse_datetime,
)

MAX_ENTITIES = 15
MAX_ATTRIBUTES = 10
MAX_RELATIONSHIPS = 5
MAX_CONTENT = 200

# Lowercase words whose capitalised concatenation never equals a core class name.
NOUNS = [
    "article", "story", "episode", "recipe", "event", "venue", "product", "review", "gallery",
    "course", "lesson", "award", "sponsor", "banner", "promo", "season", "author", "topic",
    "report", "poll", "quiz", "job", "notice", "office", "team", "match", "league", "book",
]
QUALIFIERS = ["news", "video", "daily", "live", "local", "feature", "archive", "guest", "kids"]

ATTRIBUTE_WORDS = [
    "title", "content", "summary", "likes", "rating", "price", "score", "published", "startDate",
    "featured", "visible", "slug", "subtitle", "weight", "views", "location", "category",
    "headline", "teaser", "duration", "level", "color", "code", "capacity",
]
RELATIONSHIP_WORDS = [
    "related", "parent", "owner", "sponsors", "items", "attachments", "hero", "mentions", "sources",
    "followUps", "partOf", "siblings",
]

DRUPAL_PREFIXES = [
    ("node", CoreKind.ContentType),
    ("taxonomy_term", CoreKind.Taxonomy),
    ("taxonomy", CoreKind.Taxonomy),
    ("media", CoreKind.Media),
    ("block_content", CoreKind.Block),
    ("block", CoreKind.Block),
    ("comment", CoreKind.Comment),
    ("user", CoreKind.User),
]

# Platform built-ins: raw name -> (expected class name, kind, core match?)
DRUPAL_BUILTINS = {
    "user--user": ("User", CoreKind.User, True),
    "comment--comment": ("Comment", CoreKind.Comment, True),
    "taxonomy_term--tag": ("Tag", CoreKind.Tag, True),
    "taxonomy--category": ("Category", CoreKind.Category, True),
    "media--image": ("Image", CoreKind.Image, True),
    "media--video": ("Video", CoreKind.Video, True),
}
WORDPRESS_BUILTINS = {
    "posts": ("Post", CoreKind.ContentType, False),
    "pages": ("Page", CoreKind.ContentType, False),
    "users": ("User", CoreKind.User, True),
    "comments": ("Comment", CoreKind.Comment, True),
    "tags": ("Tag", CoreKind.Tag, True),
    "categories": ("Category", CoreKind.Category, True),
    "media": ("Media", CoreKind.Media, True),
}

TEXT_POOL = ["alpha", "Alpha", "beta", "news flash", "breaking news", "gamma ray", "", "x",
             "100%", "a&b", "tom's", "zeta", "ünïcode", "a=b"]
_EPOCH = datetime(2020, 1, 1, tzinfo=timezone.utc)


@dataclass
class Expectation:
    """What discovery should make of one generated entity."""

    raw_name: str
    class_name: str
    core_kind: CoreKind
    core_match: bool = False


@dataclass
class RandomSite:
    definition: MockSiteDefinition
    expected: dict = field(default_factory=dict)  # raw name -> Expectation


def _capitalized(words):
    return "".join(w[:1].upper() + w[1:] for w in words)


def _random_value(rng, attr_type):
    if rng.random() < 0.12:
        return None
    if attr_type is AttributeType.Text:
        return rng.choice(TEXT_POOL) if rng.random() < 0.7 else "".join(
            rng.choice(string.ascii_letters + " ") for _ in range(rng.randint(0, 8)))
    if attr_type is AttributeType.Integer:
        return rng.randint(-5, 30)
    if attr_type is AttributeType.Float:
        return rng.choice([0.0, 0.5, -1.25, 2.0, 3.75, 1e-05, 12345.678, 7.1])
    if attr_type is AttributeType.Boolean:
        return rng.random() < 0.5
    if attr_type is AttributeType.DateTime:
        dt = _EPOCH + timedelta(hours=rng.randint(0, 40) * 6)
        if rng.random() < 0.2:
            return dt.astimezone(timezone(timedelta(hours=2))).isoformat()
        return dt.isoformat().replace("+00:00", "Z")
    return rng.choice(["free", 3, 1.5, True])


def _custom_names(rng, platform, count, taken):
    out = []
    attempts = 0
    while len(out) < count and attempts < 200:
        attempts += 1
        words = [rng.choice(NOUNS)]
        if rng.random() < 0.6:
            words.insert(0, rng.choice(QUALIFIERS))
        class_name = _capitalized(words)
        if class_name in taken:
            continue
        if platform is Platform.Drupal:
            prefix, kind = rng.choice(DRUPAL_PREFIXES[:5])
            raw = f"{prefix}--{'_'.join(words)}"
            taxonomy = False
        else:
            raw = rng.choice(["_", "-"]).join(words)
            taxonomy = rng.random() < 0.25
            kind = CoreKind.Taxonomy if taxonomy else CoreKind.ContentType
        taken.add(class_name)
        out.append((raw, Expectation(raw, class_name, kind), taxonomy))
    return out


def random_site(seed=None, platform=None, rng=None, with_auth=False):
    """Generate a valid random :class:`MockSiteDefinition` plus naming expectations."""
    rng = rng or random.Random(seed)
    platform = Platform.parse(platform) if platform else rng.choice(list(Platform))
    builtins = DRUPAL_BUILTINS if platform is Platform.Drupal else WORDPRESS_BUILTINS

    n_entities = rng.randint(0, MAX_ENTITIES)
    n_builtin = min(n_entities, rng.randint(0, 3))
    chosen = rng.sample(sorted(builtins), n_builtin)
    taken = {builtins[b][0] for b in chosen}
    entries = [(b, Expectation(b, *builtins[b]), False) for b in chosen]
    entries += _custom_names(rng, platform, n_entities - n_builtin, taken)
    rng.shuffle(entries)

    raws = [raw for raw, _, _ in entries]
    extra_targets = [b for b in sorted(builtins) if b not in raws]
    schema = []
    for raw, _, taxonomy in entries:
        names = rng.sample(ATTRIBUTE_WORDS, rng.randint(0, MAX_ATTRIBUTES))
        attributes = [
            AttributeDef(n, rng.choices(
                [AttributeType.Text, AttributeType.Integer, AttributeType.Float,
                 AttributeType.Boolean, AttributeType.DateTime, AttributeType.Unknown],
                weights=[5, 3, 2, 2, 2, 1])[0])
            for n in names
        ]
        relationships = []
        pool = raws + extra_targets[:1]
        for rname in rng.sample(RELATIONSHIP_WORDS, rng.randint(0, MAX_RELATIONSHIPS)):
            if not pool:
                break
            relationships.append(RelationshipDef(
                rname, rng.choice(pool), rng.choice([Multiplicity.One, Multiplicity.Many])))
        schema.append(EntityDef(raw, attributes, relationships, taxonomy))

    definition = MockSiteDefinition(
        site_name=rng.choice(["", "Site", "Random CMS", "Demo Site"]),
        platform=platform,
        host=rng.choice(["example.com", "cms.example.org", "localhost"]),
        schema=schema,
        auth=("editor", "s3cret-" + str(rng.randint(0, 999))) if with_auth else None,
    )
    _populate(rng, definition)
    return RandomSite(definition, {raw: exp for raw, exp, _ in entries})


def _populate(rng, definition):
    budget = rng.randint(0, MAX_CONTENT)
    if not definition.schema:
        return
    share = max(1, budget // len(definition.schema))
    ids_by_type = {}
    for entity in definition.schema:
        count = min(budget, rng.randint(0, share * 2))
        budget -= count
        ids = rng.sample(range(1000), count)
        ids_by_type[entity.raw_name] = [
            (str(i) if definition.platform is Platform.WordPress or rng.random() < 0.5
             else f"r{i}") for i in ids
        ]
    for entity in definition.schema:
        for rid in ids_by_type[entity.raw_name]:
            attrs = {a.name: _random_value(rng, a.type) for a in entity.attributes
                     if rng.random() < 0.9}
            rels = {}
            for r in entity.relationships:
                targets = ids_by_type.get(r.target, [])
                if r.multiplicity is Multiplicity.Many:
                    rels[r.name] = rng.sample(targets, min(len(targets), rng.randint(0, 3)))
                else:
                    rels[r.name] = rng.choice(targets) if targets and rng.random() < 0.8 else None
            stamp = _EPOCH + timedelta(minutes=rng.randint(0, 10 ** 5))
            definition.content.append(SeedRecord(
                rid, entity.raw_name, attrs, rels, stamp.isoformat().replace("+00:00", "Z")))


# -- queries ------------------------------------------------------------------------

_ORDERED = (AttributeType.Integer, AttributeType.Float, AttributeType.DateTime)


def _queryable(entity):
    return [AttributeDef("id", AttributeType.Text)] + [
        a for a in entity.attributes if a.type is not AttributeType.Unknown
    ]


def _filter_value(rng, definition, entity, attr):
    seen = [r.id if attr.name == "id" else r.attributes.get(attr.name)
            for r in definition.records(entity.raw_name)]
    seen = [v for v in seen if v is not None]
    value = rng.choice(seen) if seen and rng.random() < 0.7 else _random_value(rng, attr.type)
    while value is None:
        value = _random_value(rng, attr.type)
    if attr.type is AttributeType.DateTime:
        return parse_datetime(value)
    return value


def random_query(rng, definition, entity, wordpress_only=None):
    """A random valid query over ``entity``.

    When the site is a WordPress one (or ``wordpress_only`` is set) only the
    subset that dialect can express is produced.
    """
    if wordpress_only is None:
        wordpress_only = definition.platform is Platform.WordPress
    fields = _queryable(entity)
    filters = []
    for _ in range(rng.choices([0, 1, 2, 3], weights=[3, 4, 2, 1])[0]):
        attr = rng.choice(fields)
        if wordpress_only:
            if attr.type is AttributeType.Text and attr.name in ("title", "content") and not any(
                f.op is FilterOp.Contains for f in filters
            ) and rng.random() < 0.5:
                op = FilterOp.Contains
            else:
                op = FilterOp.Eq
        else:
            ops = [FilterOp.Eq, FilterOp.Ne]
            if attr.type in _ORDERED:
                ops += [FilterOp.Gt, FilterOp.Lt]
            if attr.type is AttributeType.Text:
                ops.append(FilterOp.Contains)
            op = rng.choice(ops)
        value = _filter_value(rng, definition, entity, attr)
        if op is FilterOp.Contains:
            value = value[rng.randint(0, len(value)):][: rng.randint(0, 4)] if value else "a"
        filters.append(Filter(attr.name, op, value))
    max_sorters = 1 if wordpress_only else 2
    sort_fields = rng.sample(fields, min(len(fields), rng.randint(0, max_sorters)))
    sorters = [Sorter(a.name, rng.choice(list(Direction))) for a in sort_fields]
    page = Page(rng.randint(1, 50), rng.choice([0, 0, 1, 2, 5, 10, 30]))
    return SearchQuery(tuple(filters), tuple(sorters), page)
