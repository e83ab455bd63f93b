"""Thin HTTP layer shared by discovery and the drivers.

Maps transport failures onto :class:`Unreachable` / :class:`AuthFailed` and
leaves every other status to the caller.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from urllib.parse import urljoin, urlsplit

import requests

from .errors import AuthFailed, Unreachable

DEFAULT_TIMEOUT = 10.0


class AuthScheme(str, Enum):
    None_ = "None"
    Basic = "Basic"


@dataclass(frozen=True)
class SiteCredentials:
    username: str = ""
    secret: str = ""
    scheme: AuthScheme = AuthScheme.None_

    def __post_init__(self):
        object.__setattr__(self, "scheme", AuthScheme(self.scheme))
        if self.scheme is AuthScheme.None_ and (self.username or self.secret):
            raise ValueError("credentials without a scheme must be empty")

    def __repr__(self):
        # never leak the secret through logs or tracebacks
        return f"SiteCredentials(username={self.username!r}, scheme={self.scheme.value})"

    @classmethod
    def basic(cls, username, secret):
        return cls(username, secret, AuthScheme.Basic)

    @property
    def auth(self):
        if self.scheme is AuthScheme.Basic:
            return (self.username, self.secret)
        return None


NO_CREDENTIALS = SiteCredentials()


@dataclass
class Response:
    status: int
    text: str
    url: str

    def json(self):
        return json.loads(self.text)


def origin(url):
    parts = urlsplit(url)
    return f"{parts.scheme}://{parts.netloc}"


def resolve(base_url, path_or_url):
    """Absolute URLs pass through; absolute paths are joined to the origin of ``base_url``."""
    if urlsplit(path_or_url).scheme:
        return path_or_url
    return urljoin(origin(base_url) + "/", path_or_url)


def send(method, url, credentials=NO_CREDENTIALS, *, body=None, accept="application/json",
         content_type="application/json", timeout=DEFAULT_TIMEOUT):
    headers = {"Accept": accept}
    data = None
    if body is not None:
        headers["Content-Type"] = content_type
        data = json.dumps(body).encode("utf-8")
    try:
        r = requests.request(method, url, headers=headers, data=data,
                             auth=credentials.auth, timeout=timeout)
    except (requests.ConnectionError, requests.Timeout) as exc:
        raise Unreachable(f"{method} {url}: {exc.__class__.__name__}") from None
    except requests.RequestException as exc:
        raise Unreachable(f"{method} {url}: {exc}") from None
    if r.status_code in (401, 403):
        raise AuthFailed(f"{method} {url}: HTTP {r.status_code}")
    return Response(r.status_code, r.text, url)
