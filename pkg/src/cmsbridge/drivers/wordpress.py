"""REST/HAL driver for WordPress."""

from ..errors import MalformedPayload
from ..metamodel import Platform
from .base import Driver, GenericResource, parse_timestamp

_BOOKKEEPING = {"id", "type", "modified", "_links", "_embedded"}
_NON_RELATION_LINKS = {"self", "collection", "about", "curies"}


def _first_href(entries):
    if isinstance(entries, list) and entries and isinstance(entries[0], dict):
        href = entries[0].get("href")
        return href if isinstance(href, str) else None
    return None


class WordPressDriver(Driver):
    platform = Platform.WordPress

    def _resource(self, obj, type_name):
        if not isinstance(obj, dict) or obj.get("id") in (None, ""):
            raise MalformedPayload("record needs an id")
        hal = obj.get("_links") or {}
        links = {
            name: _first_href(entries)
            for name, entries in hal.items()
            if name not in _NON_RELATION_LINKS and _first_href(entries)
        }
        attributes = {
            k: v for k, v in obj.items() if k not in _BOOKKEEPING and k not in links
        }
        return GenericResource(
            id=str(obj["id"]),
            type_name=self._type_name(obj.get("type"), type_name),
            attributes=attributes,
            related_links=links,
            last_updated=parse_timestamp(obj.get("modified")),
            raw_type=obj.get("type"),
            self_link=_first_href(hal.get("self")),
        )

    def _parse_single(self, payload, type_name):
        return self._resource(payload, type_name)

    def _parse_many(self, payload, type_name):
        if not isinstance(payload, list):
            raise MalformedPayload("collection response must be an array")
        return [self._resource(obj, type_name) for obj in payload]

    def _parse_related(self, payload, type_name):
        if payload is None:
            return []
        if isinstance(payload, dict):
            return [self._resource(payload, type_name)]
        return self._parse_many(payload, type_name)

    def _update_request(self, resource, changed):
        return "POST", changed
