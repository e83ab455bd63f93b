import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from cmsbridge.mock import induce_model, journal_site, serve

GOLDEN = Path(__file__).parent / "golden"


class StaticSite:
    """Serves fixed JSON documents by path; anything else is a 404."""

    def __init__(self, routes, status=None):
        self.routes = routes
        self.status = status or {}
        self.seen = []
        site = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _reply(self):
                path = self.path.split("?")[0]
                site.seen.append((self.command, path, self.headers.get("Authorization")))
                key = (self.command, path) if (self.command, path) in site.routes else path
                if key not in site.routes:
                    self.send_response(site.status.get(path, 404))
                    self.end_headers()
                    return
                body = site.routes[key]
                if not isinstance(body, (str, bytes)):
                    body = json.dumps(body)
                if isinstance(body, str):
                    body = body.encode("utf-8")
                self.send_response(site.status.get(path, 200))
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            do_GET = do_OPTIONS = _reply

        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self.httpd.server_address[1]}"
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    def close(self):
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture
def static_site():
    sites = []

    def make(routes, status=None):
        site = StaticSite(routes, status)
        sites.append(site)
        return site

    yield make
    for s in sites:
        s.close()


@pytest.fixture
def journal_definition():
    return journal_site("Drupal")


@pytest.fixture
def journal_model(journal_definition):
    return induce_model(journal_definition)


@pytest.fixture
def journal_mock(journal_definition):
    with serve(journal_definition) as site:
        yield site


@pytest.fixture
def journal_wp_mock():
    with serve(journal_site("WordPress")) as site:
        yield site


def load_golden(name):
    return (GOLDEN / name).read_text(encoding="utf-8")


def _golden_value(value):
    if isinstance(value, dict) and "datetime" in value:
        from datetime import datetime
        return datetime.fromisoformat(value["datetime"])
    return value


def golden_query(spec):
    """Build a SearchQuery from the compact form used in golden/query_strings.json."""
    from cmsbridge.drivers import Filter, Page, SearchQuery, Sorter

    filters = tuple(Filter(f, op, _golden_value(v)) for f, op, v in spec.get("filters", []))
    sorters = tuple(Sorter(f, d) for f, d in spec.get("sorters", []))
    page = Page(*spec["page"]) if "page" in spec else Page()
    return SearchQuery(filters, sorters, page)


def golden_query_cases():
    data = json.loads(load_golden("query_strings.json"))
    return data["cases"], data["errors"]


# -- acceptance reporting -----------------------------------------------------------------
# test_acceptance records one line per criterion; they are printed after the run.

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
