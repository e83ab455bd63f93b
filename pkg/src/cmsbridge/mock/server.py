"""In-process HTTP server emulating a Drupal (JSON:API) or WordPress (HAL) site."""

from __future__ import annotations

import base64
import copy
import errno
import functools
import json
import logging
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import unquote, urlsplit

from ..drivers.query import DRUPAL_OPERATORS, WORDPRESS_SEARCH_COLUMNS
from ..errors import PortInUse
from ..metamodel import AttributeType, Multiplicity, Platform
from .definition import (
    RESERVED_NAMES,
    endpoint_path,
    now_iso,
    parse_datetime,
    validate_definition,
    value_conforms,
)
from .wire import (
    drupal_openapi,
    render_record,
    wordpress_index,
    wordpress_options,
    wordpress_taxonomies,
)

log = logging.getLogger(__name__)

_OPERATORS = {symbol: op.value for op, symbol in DRUPAL_OPERATORS.items()}
_COLUMNS = {column: name for name, column in WORDPRESS_SEARCH_COLUMNS.items()}


@dataclass(frozen=True)
class RequestLogEntry:
    method: str
    path: str
    query_string: str
    auth_present: bool
    timestamp: float


class BadRequest(Exception):
    pass


# -- query-string evaluation ---------------------------------------------------------
# Deliberately written apart from definition.brute_force_query: the two are
# compared against each other in the differential tests.

def _split_query(query_string):
    pairs = []
    for part in query_string.split("&") if query_string else []:
        key, sep, value = part.partition("=")
        if not sep:
            raise BadRequest(f"parameter without value: {part!r}")
        pairs.append((unquote(key), value))  # values stay encoded until their syntax is known
    return pairs


def _coerce(attr_type, text):
    try:
        if attr_type is AttributeType.Text:
            return text
        if attr_type is AttributeType.Integer:
            try:
                return int(text)
            except ValueError:
                return float(text)
        if attr_type is AttributeType.Float:
            return float(text)
        if attr_type is AttributeType.Boolean:
            return {"true": True, "false": False}[text]
        if attr_type is AttributeType.DateTime:
            return parse_datetime(text)
    except (ValueError, KeyError):
        pass
    raise BadRequest(f"{text!r} is not a valid {attr_type.value}")


def _attr_type(entity, name):
    if name == "id":
        return AttributeType.Text
    attr = entity.attribute(name)
    if attr is None or attr.type is AttributeType.Unknown:
        raise BadRequest(f"unknown or untyped field {name!r}")
    return attr.type


def _parse_drupal(entity, pairs):
    conditions, sort, limit, offset = {}, [], 20, 0
    for key, value in pairs:
        if key.startswith("filter["):
            parts = key[len("filter["):].rstrip("]").split("][")
            if len(parts) != 3 or parts[1] != "condition" or not parts[0].isdigit():
                raise BadRequest(f"bad filter key {key!r}")
            conditions.setdefault(int(parts[0]), {})[parts[2]] = value
        elif key == "sort":
            for token in value.split(","):
                desc = token.startswith("-")
                sort.append((unquote(token[1:] if desc else token), desc))
        elif key == "page[limit]":
            limit = int(value)
        elif key == "page[offset]":
            offset = int(value)
        else:
            raise BadRequest(f"unsupported parameter {key!r}")
    filters = []
    for index in sorted(conditions):
        cond = conditions[index]
        try:
            path, operator, raw = (unquote(cond["path"]), unquote(cond["operator"]),
                                  unquote(cond["value"]))
        except KeyError:
            raise BadRequest(f"incomplete filter {index}") from None
        if operator not in _OPERATORS:
            raise BadRequest(f"unknown operator {operator!r}")
        filters.append((path, _OPERATORS[operator], raw))
    return filters, sort, limit, offset


def _parse_wordpress(entity, pairs):
    filters, sort, limit, offset = [], [], 10, 0
    search, column, orderby, order = None, None, None, "asc"
    for key, value in pairs:
        value = unquote(value)
        if key == "search":
            search = value
        elif key == "search_columns":
            column = value
        elif key == "orderby":
            orderby = value
        elif key == "order":
            if value not in ("asc", "desc"):
                raise BadRequest(f"bad order {value!r}")
            order = value
        elif key == "per_page":
            limit = int(value)
        elif key == "offset":
            offset = int(value)
        elif key in RESERVED_NAMES and key != "id":
            raise BadRequest(f"unsupported parameter {key!r}")
        else:
            filters.append((key, "Eq", value))
    if search is not None:
        if column not in _COLUMNS:
            raise BadRequest("search needs search_columns=post_title or post_content")
        filters.append((_COLUMNS[column], "Contains", search))
    if orderby is not None:
        sort.append((orderby, order == "desc"))
    return filters, sort, limit, offset


def _compare(a, b):
    if a is None or b is None:
        return (a is not None) - (b is not None)
    return (a > b) - (a < b)


def evaluate(platform, entity, records, query_string):
    pairs = _split_query(query_string)
    try:
        if platform is Platform.Drupal:
            filters, sort, limit, offset = _parse_drupal(entity, pairs)
        else:
            filters, sort, limit, offset = _parse_wordpress(entity, pairs)
    except ValueError as exc:
        raise BadRequest(str(exc)) from None
    if limit < 1 or offset < 0:
        raise BadRequest("bad page")

    def value_of(record, name, attr_type):
        value = record.id if name == "id" else record.attributes.get(name)
        if value is not None and attr_type is AttributeType.DateTime:
            value = parse_datetime(value)
        return value

    tests = []
    for name, op, raw in filters:
        attr_type = _attr_type(entity, name)
        if op in ("Gt", "Lt") and attr_type not in (
            AttributeType.Integer, AttributeType.Float, AttributeType.DateTime
        ):
            raise BadRequest(f"{op} needs an ordered field")
        if op == "Contains" and attr_type is not AttributeType.Text:
            raise BadRequest("Contains needs a text field")
        tests.append((name, attr_type, op, _coerce(attr_type, raw)))

    def matches(record):
        for name, attr_type, op, wanted in tests:
            value = value_of(record, name, attr_type)
            if op == "Ne":
                if value is not None and value == wanted:
                    return False
            elif value is None:
                return False
            elif op == "Eq" and value != wanted:
                return False
            elif op == "Gt" and not value > wanted:
                return False
            elif op == "Lt" and not value < wanted:
                return False
            elif op == "Contains" and wanted not in value:
                return False
        return True

    keys = [(name, _attr_type(entity, name), desc) for name, desc in sort]

    def order(a, b):
        for name, attr_type, desc in keys:
            c = _compare(value_of(a, name, attr_type), value_of(b, name, attr_type))
            if c:
                return -c if desc else c
        return (a.id > b.id) - (a.id < b.id)

    selected = sorted(filter(matches, records), key=functools.cmp_to_key(order))
    return selected[offset:offset + limit]


# -- server ----------------------------------------------------------------------------

class _Store:
    """Mutable copy of the seed content; writes are serialized per entity type."""

    def __init__(self, definition):
        self.records = {}
        self.locks = {}
        for e in definition.schema:
            self.records[e.raw_name] = {}
            self.locks[e.raw_name] = threading.Lock()
        for rec in definition.content:
            self.records[rec.type][rec.id] = copy.deepcopy(rec)

    def all(self, raw):
        with self.locks[raw]:
            return list(self.records[raw].values())

    def get(self, raw, record_id):
        with self.locks[raw]:
            return self.records[raw].get(record_id)


class MockCms:
    """Handle on a running mock site.  Use as a context manager or call :meth:`stop`."""

    def __init__(self, definition, host="127.0.0.1", port=0, log_requests=False):
        self.definition = validate_definition(copy.deepcopy(definition))
        self.platform = self.definition.platform
        self.store = _Store(self.definition)
        self.log_requests = log_requests
        self._log = []
        self._log_lock = threading.Lock()
        self._routes = sorted(
            ((endpoint_path(self.definition, e), e) for e in self.definition.schema),
            key=lambda item: -len(item[0]),
        )
        handler = functools.partial(_Handler, self)
        try:
            self.httpd = ThreadingHTTPServer((host, port), handler)
        except OSError as exc:
            if exc.errno == errno.EADDRINUSE:
                raise PortInUse(f"{host}:{port} is in use") from None
            raise
        self.httpd.daemon_threads = True
        self.host, self.port = self.httpd.server_address[:2]
        self.url = f"http://{self.host}:{self.port}"
        self._thread = None

    # lifecycle
    def start(self):
        self._thread = threading.Thread(target=self.httpd.serve_forever, args=(0.05,),
                                        daemon=True)
        self._thread.start()
        return self

    def serve_forever(self):
        self.httpd.serve_forever()

    def stop(self):
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self):
        if self._thread is None:
            self.start()
        return self

    def __exit__(self, *exc):
        self.stop()

    # request log
    @property
    def requests(self):
        with self._log_lock:
            return list(self._log)

    def clear_log(self):
        with self._log_lock:
            self._log.clear()

    def _record(self, entry):
        with self._log_lock:
            self._log.append(entry)
        if self.log_requests:
            log.info("%s %s%s", entry.method, entry.path,
                     "?" + entry.query_string if entry.query_string else "")

    def record(self, raw, record_id):
        """Current state of one seed record (after any updates)."""
        return copy.deepcopy(self.store.get(raw, record_id))

    # routing helpers
    def route(self, path):
        for prefix, entity in self._routes:
            if path == prefix:
                return entity, []
            if path.startswith(prefix + "/"):
                return entity, [unquote(p) for p in path[len(prefix) + 1:].split("/")]
        return None, None


def serve(definition, port=0, host="127.0.0.1", log_requests=False):
    """Start a mock site in a background thread and return its :class:`MockCms` handle."""
    return MockCms(definition, host, port, log_requests).start()


class _Handler(BaseHTTPRequestHandler):
    server_version = "cmsbridge-mock/1"

    def __init__(self, site, *args, **kwargs):
        self.site = site
        super().__init__(*args, **kwargs)

    def log_message(self, format, *args):
        pass

    # plumbing
    def _send(self, status, payload, content_type=None, headers=None):
        if content_type is None:
            content_type = ("application/vnd.api+json" if self.site.platform is Platform.Drupal
                            else "application/json")
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for key, value in (headers or {}).items():
            self.send_header(key, value)
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status, message):
        if self.site.platform is Platform.Drupal:
            payload = {"errors": [{"status": str(status), "title": self.responses.get(
                status, ("Error",))[0], "detail": message}]}
        else:
            payload = {"code": f"rest_error_{status}", "message": message,
                       "data": {"status": status}}
        headers = {"WWW-Authenticate": 'Basic realm="mock"'} if status == 401 else None
        self._send(status, payload, headers=headers)

    def _authorized(self):
        header = self.headers.get("Authorization")
        expected = self.site.definition.auth
        if expected is None:
            return True
        if not header or not header.startswith("Basic "):
            return False
        try:
            decoded = base64.b64decode(header[6:]).decode("utf-8")
        except (ValueError, UnicodeDecodeError):
            return False
        return decoded == f"{expected[0]}:{expected[1]}"

    def _origin(self):
        return f"http://{self.headers.get('Host') or f'{self.site.host}:{self.site.port}'}"

    def _body(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            return json.loads(raw or b"null")
        except ValueError:
            raise BadRequest("body is not JSON") from None

    def _dispatch(self, method):
        parts = urlsplit(self.path)
        self.site._record(RequestLogEntry(method, parts.path, parts.query,
                                          "Authorization" in self.headers, time.time()))
        if not self._authorized():
            return self._error(401, "authentication required")
        try:
            self._handle(method, parts.path, parts.query)
        except BadRequest as exc:
            self._error(400, str(exc))

    def do_GET(self):
        self._dispatch("GET")

    def do_OPTIONS(self):
        self._dispatch("OPTIONS")

    def do_PATCH(self):
        self._dispatch("PATCH")

    def do_POST(self):
        self._dispatch("POST")

    def do_PUT(self):
        self._dispatch("PUT")

    def do_DELETE(self):
        self._dispatch("DELETE")

    # routes
    def _handle(self, method, path, query):
        site = self.site
        definition = site.definition
        drupal = site.platform is Platform.Drupal
        if drupal and path == "/openapi.json":
            if method != "GET":
                return self._error(405, "method not allowed")
            return self._send(200, drupal_openapi(definition), "application/json")
        if not drupal:
            base = definition.base_path.rstrip("/")
            if path in (base, base + "/"):
                if method != "GET":
                    return self._error(405, "method not allowed")
                return self._send(200, wordpress_index(definition))
            if path == base + "/wp/v2/taxonomies":
                return self._send(200, wordpress_taxonomies(definition))

        entity, rest = site.route(path)
        if entity is None:
            return self._error(404, f"no route for {path}")
        origin = self._origin()
        raw = entity.raw_name

        if not rest:
            if method == "OPTIONS" and not drupal:
                return self._send(200, wordpress_options(definition, entity))
            if method != "GET":
                return self._error(405, "method not allowed")
            page = evaluate(site.platform, entity, site.store.all(raw), query)
            items = [render_record(site.platform, origin, definition, entity, r) for r in page]
            if drupal:
                return self._send(200, {"jsonapi": {"version": "1.0"}, "data": items,
                                        "links": {"self": {"href": f"{origin}{path}"}}})
            return self._send(200, items)

        record = site.store.get(raw, rest[0])
        if record is None:
            return self._error(404, f"no {raw} with id {rest[0]!r}")

        if len(rest) == 1:
            if method == "GET":
                return self._send_record(origin, entity, record)
            if (drupal and method == "PATCH") or (not drupal and method in ("POST", "PUT", "PATCH")):
                return self._update(origin, entity, record, self._body())
            return self._error(405, "method not allowed")

        if len(rest) == 2 and method == "GET":
            rel = entity.relationship(rest[1])
            if rel is None:
                return self._error(404, f"{raw} has no relationship {rest[1]!r}")
            target = definition.entity(rel.target)
            value = record.relationships.get(rel.name)
            ids = (value or []) if rel.multiplicity is Multiplicity.Many else (
                [] if value is None else [value])
            found = [site.store.get(rel.target, i) for i in ids] if target else []
            items = [render_record(site.platform, origin, definition, target, r)
                     for r in found if r is not None]
            if rel.multiplicity is Multiplicity.One:
                items = items[0] if items else None
            return self._send(200, {"data": items} if drupal else items)
        return self._error(404, f"no route for {path}")

    def _send_record(self, origin, entity, record):
        rendered = render_record(self.site.platform, origin, self.site.definition, entity, record)
        if self.site.platform is Platform.Drupal:
            return self._send(200, {"jsonapi": {"version": "1.0"}, "data": rendered,
                                    "links": {"self": rendered["links"]["self"]}})
        return self._send(200, rendered)

    def _update(self, origin, entity, record, body):
        if self.site.platform is Platform.Drupal:
            data = body.get("data") if isinstance(body, dict) else None
            if not isinstance(data, dict):
                raise BadRequest("body needs a 'data' object")
            if data.get("type") != entity.raw_name or data.get("id") != record.id:
                return self._error(409, "type or id does not match the target resource")
            changes = data.get("attributes", {})
        else:
            changes = body
        if not isinstance(changes, dict):
            raise BadRequest("attributes must be an object")
        for name, value in changes.items():
            attr = entity.attribute(name)
            if attr is None:
                return self._error(422 if self.site.platform is Platform.Drupal else 400,
                                   f"{entity.raw_name} has no attribute {name!r}")
            if not value_conforms(attr.type, value):
                return self._error(422 if self.site.platform is Platform.Drupal else 400,
                                   f"{value!r} is not a valid {attr.type.value} for {name!r}")
        store = self.site.store
        with store.locks[entity.raw_name]:
            current = store.records[entity.raw_name][record.id]
            updated = copy.deepcopy(current)
            updated.attributes.update(changes)
            updated.last_updated = now_iso()
            store.records[entity.raw_name][record.id] = updated
        return self._send_record(origin, entity, updated)
