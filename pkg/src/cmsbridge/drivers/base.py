"""Driver interface and the resource value it hands to generated code."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime
from types import MappingProxyType
from typing import Mapping, Optional

from .. import http
from ..classify import classify_entity
from ..errors import (
    DriverError,
    MalformedPayload,
    NoEndpoint,
    NoSuchRelationship,
    NotFound,
    UnclassifiableEntity,
    ValidationRejected,
)
from ..metamodel import Platform
from .query import SearchQuery, to_query_string


def parse_timestamp(value):
    if value is None:
        return None
    text = str(value)
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        return datetime.fromisoformat(text)
    except ValueError:
        raise MalformedPayload(f"bad timestamp {value!r}") from None


@dataclass(frozen=True)
class GenericResource:
    """One content record as the driver sees it, independent of the platform.

    ``raw_type`` and ``self_link`` carry the platform's own type name and
    canonical URL so that updates can be addressed without the model.
    """

    id: str
    type_name: str
    attributes: Mapping = field(default_factory=dict)
    related_links: Mapping = field(default_factory=dict)
    last_updated: Optional[datetime] = None
    raw_type: Optional[str] = None
    self_link: Optional[str] = None

    def __post_init__(self):
        if not self.id:
            raise MalformedPayload("resource without id")
        object.__setattr__(self, "attributes", MappingProxyType(dict(self.attributes)))
        object.__setattr__(self, "related_links", MappingProxyType(dict(self.related_links)))


# Core classes carry no endpoint in the model; these conventional locations
# make them reachable anyway.  Paths are relative to the model's base path.
CORE_ENDPOINTS = {
    Platform.Drupal: {"User": "/user/user", "Comment": "/comment/comment"},
    Platform.WordPress: {
        "User": "/wp/v2/users",
        "Comment": "/wp/v2/comments",
        "Tag": "/wp/v2/tags",
        "Category": "/wp/v2/categories",
        "Media": "/wp/v2/media",
    },
}


def core_endpoint(platform, base_path, class_name):
    suffix = CORE_ENDPOINTS[Platform.parse(platform)].get(class_name)
    if suffix is None:
        return None
    return base_path.rstrip("/") + suffix


class Driver:
    """Base class for platform drivers.

    The driver is the only runtime component that knows a platform's URLs,
    query dialect and payload shapes.  ``model`` is optional; when given it
    names the targets of navigation and locates core-class endpoints.
    """

    platform: Platform
    accept = "application/json"
    content_type = "application/json"

    def __init__(self, base_url, credentials=http.NO_CREDENTIALS, model=None,
                 timeout=http.DEFAULT_TIMEOUT):
        self.base_url = base_url.rstrip("/")
        self.credentials = credentials
        self.model = model
        self.timeout = timeout

    def __repr__(self):
        return f"{type(self).__name__}({self.base_url!r})"

    # -- transport ---------------------------------------------------------------

    def _call(self, method, path_or_url, body=None):
        url = http.resolve(self.base_url, path_or_url)
        response = http.send(method, url, self.credentials, body=body, accept=self.accept,
                             content_type=self.content_type, timeout=self.timeout)
        if response.status == 404:
            raise NotFound(f"{method} {url}")
        if 400 <= response.status < 500:
            raise ValidationRejected(response.status, response.text)
        if response.status >= 300:
            raise DriverError(f"{method} {url}: HTTP {response.status}")
        try:
            return json.loads(response.text) if response.text else None
        except ValueError:
            raise MalformedPayload(f"{method} {url}: body is not JSON") from None

    def endpoint(self, cls):
        if cls.endpoint_path:
            return cls.endpoint_path
        if cls.is_core and self.model is not None:
            path = core_endpoint(self.platform, self.model.base_path, cls.name)
            if path:
                return path
        raise NoEndpoint(f"{cls.name} has no endpoint")

    # -- operations --------------------------------------------------------------

    def get_by_id(self, cls, resource_id):
        payload = self._call("GET", f"{self.endpoint(cls)}/{resource_id}")
        return self._parse_single(payload, cls.name)

    def search(self, cls, query=None):
        query = query or SearchQuery()
        qs = to_query_string(self.platform, query)
        payload = self._call("GET", f"{self.endpoint(cls)}?{qs}")
        return self._parse_many(payload, cls.name)[: query.page.limit]

    def update(self, resource, changed_attributes):
        url = resource.self_link
        if url is None:
            if self.model is None:
                raise NoEndpoint(f"cannot address {resource.type_name} {resource.id}")
            url = f"{self.endpoint(self.model[resource.type_name])}/{resource.id}"
        method, body = self._update_request(resource, dict(changed_attributes))
        return self._parse_single(self._call(method, url, body), resource.type_name)

    def follow_link(self, resource, relationship_name):
        """Fetch the targets of one relationship with exactly one request."""
        link = resource.related_links.get(relationship_name)
        if link is None:
            raise NoSuchRelationship(f"{resource.type_name} has no link {relationship_name!r}")
        target = None
        if self.model is not None and resource.type_name in self.model:
            rel = self.model[resource.type_name].relationship(relationship_name)
            target = rel.target if rel is not None else None
        return self._parse_related(self._call("GET", link), target)

    def _type_name(self, raw_type, fallback):
        if fallback is not None:
            return fallback
        try:
            return classify_entity(self.platform, raw_type)[0]
        except (UnclassifiableEntity, TypeError):
            return raw_type

    # -- platform hooks ----------------------------------------------------------

    def _parse_single(self, payload, type_name):
        raise NotImplementedError

    def _parse_many(self, payload, type_name):
        raise NotImplementedError

    def _parse_related(self, payload, type_name):
        raise NotImplementedError

    def _update_request(self, resource, changed):
        raise NotImplementedError
