"""Runtime support for generated middleware.

Generated record classes subclass :class:`Record` and generated site
managers subclass :class:`SiteManager`.  Everything platform-specific stays
behind the driver selected from the embedded model, so generated modules
only ever call the small API defined here.
"""

from __future__ import annotations

import os
import threading
from importlib import resources

from .drivers import driver_for, query_builder
from .drivers.base import parse_timestamp
from .http import NO_CREDENTIALS, SiteCredentials
from .metamodel import AttributeType, Multiplicity
from .modelio import load_model

BASE_URL_ENV = "CMSBRIDGE_BASE_URL"
USER_ENV = "CMSBRIDGE_USER"
SECRET_ENV = "CMSBRIDGE_SECRET"


def credentials_from_env(user_var=USER_ENV, secret_var=SECRET_ENV):
    """Basic credentials from the environment, or ``None`` when no user is set."""
    user = os.environ.get(user_var)
    if not user:
        return None
    return SiteCredentials.basic(user, os.environ.get(secret_var, ""))


def coerce(attr_type, value):
    """Convert a wire scalar to the Python type of ``attr_type``; ``None`` passes through."""
    if value is None:
        return None
    attr_type = AttributeType(attr_type)
    if attr_type is AttributeType.Integer and not isinstance(value, bool):
        return int(value)
    if attr_type is AttributeType.Float and not isinstance(value, bool):
        return float(value)
    if attr_type is AttributeType.DateTime:
        return parse_timestamp(value)
    if attr_type is AttributeType.Text:
        return str(value)
    return value


def _wire(value):
    if hasattr(value, "isoformat"):
        return value.isoformat()
    return value


class Record:
    """A typed view over one GenericResource.

    Setters only stage changes; :meth:`save` sends them in one update.
    """

    CLASS_NAME = None
    ATTRIBUTES = {}  # attribute name -> AttributeType value
    RELATIONSHIPS = {}  # relationship name -> (target class, multiplicity)

    def __init__(self, manager, resource):
        self._manager = manager
        self._resource = resource
        self._staged = {}

    def __repr__(self):
        return f"{type(self).__name__}(id={self.id!r})"

    def __eq__(self, other):
        return (isinstance(other, Record) and self.type_name == other.type_name
                and self.id == other.id)

    def __hash__(self):
        return hash((self.type_name, self.id))

    @property
    def id(self):
        return self._resource.id

    @property
    def type_name(self):
        return self.CLASS_NAME or self._resource.type_name

    @property
    def resource(self):
        return self._resource

    @property
    def last_updated(self):
        return self._resource.last_updated

    @property
    def pending_changes(self):
        return dict(self._staged)

    def get(self, name):
        """Raw access to any attribute, declared or not."""
        if name in self._staged:
            return self._staged[name]
        return self._resource.attributes.get(name)

    def _get(self, name):
        if name == "id":
            return self.id
        if name == "lastUpdated" and name not in self._resource.attributes:
            return self.last_updated
        return coerce(self.ATTRIBUTES.get(name, AttributeType.Unknown), self.get(name))

    def _set(self, name, value):
        self._staged[name] = value
        return self

    def save(self):
        """Send staged changes (possibly none) as one update and refresh this record."""
        changes = {k: _wire(v) for k, v in self._staged.items()}
        self._resource = self._manager.driver.update(self._resource, changes)
        self._staged.clear()
        return self

    def refresh(self):
        self._resource = self._manager.driver.get_by_id(
            self._manager.model[self.type_name], self.id)
        self._staged.clear()
        return self

    def _follow(self, name):
        target, multiplicity = self.RELATIONSHIPS.get(name, (None, Multiplicity.Many))
        found = self._manager.driver.follow_link(self._resource, name)
        records = [self._manager.wrap(target or r.type_name, r) for r in found]
        if Multiplicity(multiplicity) is Multiplicity.One:
            return records[0] if records else None
        return records


class SiteManager:
    """Entry point of a generated client: one instance per base URL.

    Subclasses set ``MODEL_PACKAGE`` (where ``model.json`` lives) and
    ``RECORD_TYPES`` (class name -> generated record class).
    """

    MODEL_PACKAGE = None
    MODEL_FILE = "model.json"
    RECORD_TYPES = {}

    _instances = {}
    _lock = threading.Lock()

    def __init__(self, base_url, credentials=None):
        self.base_url = base_url.rstrip("/")
        self.model = self.load_model()
        self.driver = driver_for(self.model.platform, self.base_url,
                                 credentials or NO_CREDENTIALS, model=self.model)
        self._untyped = {}

    def __repr__(self):
        return f"{type(self).__name__}({self.base_url!r})"

    @classmethod
    def load_model(cls):
        text = resources.files(cls.MODEL_PACKAGE).joinpath(cls.MODEL_FILE).read_text("utf-8")
        return load_model(text)

    @classmethod
    def getInstance(cls, base_url=None, credentials=None):
        """Return the manager for ``base_url``, creating it on first use.

        Without an argument the URL comes from the ``CMSBRIDGE_BASE_URL``
        environment variable.  ``credentials`` only matter on first use.
        """
        base_url = base_url or os.environ.get(BASE_URL_ENV)
        if not base_url:
            raise ValueError(f"no base URL given and {BASE_URL_ENV} is not set")
        key = (cls, base_url.rstrip("/"))
        with cls._lock:
            instance = SiteManager._instances.get(key)
            if instance is None:
                instance = cls(base_url, credentials)
                SiteManager._instances[key] = instance
            return instance

    @classmethod
    def reset_instances(cls):
        with cls._lock:
            for key in [k for k in SiteManager._instances if issubclass(k[0], cls)]:
                del SiteManager._instances[key]

    def getSearchQueryBuilder(self):
        return query_builder()

    def wrap(self, class_name, resource):
        record_type = self.RECORD_TYPES.get(class_name)
        if record_type is None:
            record_type = self._untyped.get(class_name)
        if record_type is None:
            # core and placeholder classes get an untyped record; use get(name)
            record_type = type(class_name or "Record", (Record,), {"CLASS_NAME": class_name})
            self._untyped[class_name] = record_type
        return record_type(self, resource)

    def _get_by_id(self, class_name, resource_id):
        resource = self.driver.get_by_id(self.model[class_name], resource_id)
        return self.wrap(class_name, resource)

    def _search(self, class_name, query=None):
        found = self.driver.search(self.model[class_name], query)
        return [self.wrap(class_name, r) for r in found]
