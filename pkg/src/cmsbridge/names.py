"""Identifier helpers used when turning raw CMS names into model and code names."""

import re

IDENTIFIER_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

_SEPARATORS = re.compile(r"[_\-\s.:]+")


def is_identifier(name):
    return isinstance(name, str) and bool(IDENTIFIER_RE.match(name))


def upper_camel(raw):
    """``video_article`` -> ``VideoArticle``; ``videoarticle`` -> ``Videoarticle``.

    Only the first letter of each piece is touched, so ``bannerAds`` becomes
    ``BannerAds`` rather than ``Bannerads``.
    """
    pieces = [p for p in _SEPARATORS.split(raw) if p]
    return "".join(p[0].upper() + p[1:] for p in pieces)


def lower_camel(raw):
    name = upper_camel(raw)
    return name[:1].lower() + name[1:]


def snake_case(name):
    s = re.sub(r"([A-Z]+)([A-Z][a-z])", r"\1_\2", name)
    s = re.sub(r"([a-z0-9])([A-Z])", r"\1_\2", s)
    return _SEPARATORS.sub("_", s).strip("_").lower()
