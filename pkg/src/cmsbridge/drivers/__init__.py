"""Platform drivers: the static half of the generated middleware."""

from ..metamodel import Platform
from .base import CORE_ENDPOINTS, Driver, GenericResource, core_endpoint
from .drupal import DrupalDriver
from .query import (
    Direction,
    Filter,
    FilterOp,
    Page,
    SearchQuery,
    SearchQueryBuilder,
    Sorter,
    format_scalar,
    query_builder,
    to_query_string,
)
from .wordpress import WordPressDriver

DRIVERS = {Platform.Drupal: DrupalDriver, Platform.WordPress: WordPressDriver}


def driver_for(platform, base_url, credentials=None, model=None, **kwargs):
    from ..http import NO_CREDENTIALS

    cls = DRIVERS[Platform.parse(platform)]
    return cls(base_url, credentials or NO_CREDENTIALS, model=model, **kwargs)


def get_by_id(driver, cls, resource_id):
    return driver.get_by_id(cls, resource_id)


def search(driver, cls, query=None):
    return driver.search(cls, query)


def update(driver, resource, changed_attributes):
    return driver.update(resource, changed_attributes)


def follow_link(driver, resource, relationship_name):
    return driver.follow_link(resource, relationship_name)


__all__ = [
    "CORE_ENDPOINTS", "DRIVERS", "Direction", "Driver", "DrupalDriver", "Filter", "FilterOp",
    "GenericResource", "Page", "SearchQuery", "SearchQueryBuilder", "Sorter", "WordPressDriver",
    "core_endpoint", "driver_for", "follow_link", "format_scalar", "get_by_id", "query_builder",
    "search", "to_query_string", "update",
]
