"""JSON:API driver for Drupal."""

from ..errors import MalformedPayload
from ..metamodel import Platform
from .base import Driver, GenericResource, parse_timestamp


def _href(link):
    if isinstance(link, dict):
        link = link.get("href")
    return link if isinstance(link, str) else None


class DrupalDriver(Driver):
    platform = Platform.Drupal
    accept = "application/vnd.api+json"
    content_type = "application/vnd.api+json"

    def _resource(self, obj, type_name):
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), str):
            raise MalformedPayload("resource object needs a string id")
        attributes = dict(obj.get("attributes") or {})
        changed = attributes.pop("changed", None)
        links = {}
        for name, rel in (obj.get("relationships") or {}).items():
            href = _href((rel or {}).get("links", {}).get("related"))
            if href:
                links[name] = href
        return GenericResource(
            id=obj["id"],
            type_name=self._type_name(obj.get("type"), type_name),
            attributes=attributes,
            related_links=links,
            last_updated=parse_timestamp(changed),
            raw_type=obj.get("type"),
            self_link=_href((obj.get("links") or {}).get("self")),
        )

    def _data(self, payload):
        if not isinstance(payload, dict) or "data" not in payload:
            raise MalformedPayload("JSON:API document without 'data'")
        return payload["data"]

    def _parse_single(self, payload, type_name):
        return self._resource(self._data(payload), type_name)

    def _parse_many(self, payload, type_name):
        data = self._data(payload)
        if not isinstance(data, list):
            raise MalformedPayload("collection 'data' must be an array")
        return [self._resource(obj, type_name) for obj in data]

    def _parse_related(self, payload, type_name):
        data = self._data(payload)
        if data is None:
            return []
        if isinstance(data, dict):
            return [self._resource(data, type_name)]
        return [self._resource(obj, type_name) for obj in data]

    def _update_request(self, resource, changed):
        body = {"data": {"type": resource.raw_type, "id": resource.id, "attributes": changed}}
        return "PATCH", body
