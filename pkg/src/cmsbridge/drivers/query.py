"""Canonical, platform-independent search queries and their wire encodings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime
from decimal import Decimal
from enum import Enum
from urllib.parse import quote

from ..errors import (
    DuplicateSortField,
    InvalidFilter,
    InvalidPage,
    UnsupportedFilter,
    UnsupportedSort,
)
from ..metamodel import Platform
from ..names import is_identifier

DEFAULT_LIMIT = 20


class FilterOp(str, Enum):
    Eq = "Eq"
    Ne = "Ne"
    Gt = "Gt"
    Lt = "Lt"
    Contains = "Contains"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).lower():
                return member
        raise InvalidFilter(f"unknown operator {value!r}")


class Direction(str, Enum):
    Asc = "Asc"
    Desc = "Desc"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value.lower() == str(value).lower():
                return member
        raise InvalidFilter(f"unknown sort direction {value!r}")


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


@dataclass(frozen=True)
class Filter:
    field: str
    op: FilterOp
    value: object

    def __post_init__(self):
        object.__setattr__(self, "op", FilterOp.parse(self.op))
        if not is_identifier(self.field):
            raise InvalidFilter(f"filter field must be an identifier, got {self.field!r}")
        v = self.value
        if not isinstance(v, (str, int, float, bool, datetime)):
            raise InvalidFilter(f"filter value must be a scalar, got {type(v).__name__}")
        if isinstance(v, float) and not math.isfinite(v):
            raise InvalidFilter("filter value must be finite")
        if self.op in (FilterOp.Gt, FilterOp.Lt) and not (
            _is_number(v) or isinstance(v, datetime)
        ):
            raise InvalidFilter(f"{self.op.value} needs a numeric or date-time value")
        if self.op is FilterOp.Contains and not isinstance(v, str):
            raise InvalidFilter("Contains needs a text value")


@dataclass(frozen=True)
class Sorter:
    field: str
    direction: Direction = Direction.Asc

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction.parse(self.direction))
        if not is_identifier(self.field):
            raise InvalidFilter(f"sort field must be an identifier, got {self.field!r}")


@dataclass(frozen=True)
class Page:
    limit: int = DEFAULT_LIMIT
    offset: int = 0

    def __post_init__(self):
        if isinstance(self.limit, bool) or not isinstance(self.limit, int) or self.limit < 1:
            raise InvalidPage(f"limit must be a positive integer, got {self.limit!r}")
        if isinstance(self.offset, bool) or not isinstance(self.offset, int) or self.offset < 0:
            raise InvalidPage(f"offset must be a non-negative integer, got {self.offset!r}")


@dataclass(frozen=True)
class SearchQuery:
    filters: tuple = ()
    sorters: tuple = ()
    page: Page = field(default_factory=Page)

    def __post_init__(self):
        object.__setattr__(self, "filters", tuple(self.filters))
        object.__setattr__(self, "sorters", tuple(self.sorters))
        fields = [s.field for s in self.sorters]
        if len(set(fields)) != len(fields):
            raise DuplicateSortField(f"more than one sorter per field in {fields}")


class SearchQueryBuilder:
    """Chainable builder; ``build()`` snapshots the accumulated state.

    >>> q = SearchQueryBuilder().where("likes", "Gt", 10).order_by("title", "Desc").build()
    >>> len(q.filters), len(q.sorters)
    (1, 1)
    """

    def __init__(self):
        self._filters = []
        self._sorters = []
        self._page = Page()

    def where(self, field_or_filter, op=None, value=None):
        if isinstance(field_or_filter, Filter):
            flt = field_or_filter
        else:
            flt = Filter(field_or_filter, op, value)
        self._filters.append(flt)
        return self

    def order_by(self, field_or_sorter, direction=Direction.Asc):
        if isinstance(field_or_sorter, Sorter):
            sorter = field_or_sorter
        else:
            sorter = Sorter(field_or_sorter, direction)
        if any(s.field == sorter.field for s in self._sorters):
            raise DuplicateSortField(sorter.field)
        self._sorters.append(sorter)
        return self

    def page(self, limit, offset=0):
        self._page = Page(limit, offset)
        return self

    def build(self):
        return SearchQuery(tuple(self._filters), tuple(self._sorters), self._page)


def query_builder():
    return SearchQueryBuilder()


def format_scalar(value):
    """Serialize a filter value: ``true``/``false``, minimal decimals, ISO date-times."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value == 0:
            return "0"
        text = format(Decimal(repr(value)), "f")
        if "." in text:
            text = text.rstrip("0").rstrip(".")
        return text
    if isinstance(value, datetime):
        return value.isoformat()
    return str(value)


def _enc(text):
    return quote(text, safe="")


DRUPAL_OPERATORS = {
    FilterOp.Eq: "=",
    FilterOp.Ne: "<>",
    FilterOp.Gt: ">",
    FilterOp.Lt: "<",
    FilterOp.Contains: "CONTAINS",
}

# Query parameters the WordPress dialect already uses; an Eq filter on one of
# these names would be ambiguous.
WORDPRESS_RESERVED_PARAMS = frozenset({
    "search", "search_columns", "orderby", "order", "per_page", "offset",
    "page", "include", "exclude", "context", "_fields", "_embed",
})

WORDPRESS_SEARCH_COLUMNS = {"title": "post_title", "content": "post_content"}


def _drupal_query(query):
    parts = []
    for i, f in enumerate(query.filters):
        prefix = f"filter[{i}][condition]"
        parts.append(f"{prefix}[path]={_enc(f.field)}")
        parts.append(f"{prefix}[operator]={DRUPAL_OPERATORS[f.op]}")
        parts.append(f"{prefix}[value]={_enc(format_scalar(f.value))}")
    if query.sorters:
        keys = ",".join(
            ("-" if s.direction is Direction.Desc else "") + _enc(s.field)
            for s in query.sorters
        )
        parts.append(f"sort={keys}")
    parts.append(f"page[limit]={query.page.limit}")
    parts.append(f"page[offset]={query.page.offset}")
    return "&".join(parts)


def _wordpress_query(query):
    parts = []
    searched = False
    for f in query.filters:
        if f.op is FilterOp.Eq:
            if f.field in WORDPRESS_RESERVED_PARAMS:
                raise UnsupportedFilter(f"WordPress cannot filter on reserved name {f.field!r}")
            parts.append(f"{_enc(f.field)}={_enc(format_scalar(f.value))}")
        elif f.op is FilterOp.Contains and f.field in WORDPRESS_SEARCH_COLUMNS:
            if searched:
                raise UnsupportedFilter("WordPress supports a single search term")
            searched = True
            parts.append(f"search={_enc(f.value)}")
            parts.append(f"search_columns={WORDPRESS_SEARCH_COLUMNS[f.field]}")
        else:
            raise UnsupportedFilter(f"WordPress cannot express {f.op.value} on {f.field!r}")
    if len(query.sorters) > 1:
        raise UnsupportedSort("WordPress orders by a single field")
    for s in query.sorters:
        parts.append(f"orderby={_enc(s.field)}")
        parts.append(f"order={'desc' if s.direction is Direction.Desc else 'asc'}")
    parts.append(f"per_page={query.page.limit}")
    parts.append(f"offset={query.page.offset}")
    return "&".join(parts)


def to_query_string(platform, query):
    platform = Platform.parse(platform)
    if platform is Platform.Drupal:
        return _drupal_query(query)
    return _wordpress_query(query)
