"""Generate typed client middleware from a CmsModel.

The output is a small Python package: one record module per extension
class, a ``{Site}SiteManager`` with ``get{Class}ById``/``search{Class}``
methods, and the model itself as ``model.json``.  Generated code talks to
:mod:`cmsbridge.runtime` only; all platform knowledge stays in the drivers.
"""

from __future__ import annotations

import builtins
import hashlib
import json
import keyword
import os
from dataclasses import dataclass, field
from importlib import resources
from string import Template

from .drivers.base import CORE_ENDPOINTS
from .errors import IdentifierCollision, InvalidModel, MissingScenarioClasses, ValidationFailed
from .metamodel import CORE_CLASSES, AttributeType, Multiplicity, ancestors, validate
from .modelio import save_model
from .names import is_identifier, snake_case, upper_camel
from .runtime import Record

PYTHON_TYPES = {
    AttributeType.Text: "str",
    AttributeType.Integer: "int",
    AttributeType.Float: "float",
    AttributeType.Boolean: "bool",
    AttributeType.DateTime: "datetime",
    AttributeType.Unknown: "Any",
}

# Names generated modules import or use; a class may not shadow them.
_MODULE_NAMES = {"Record", "SiteManager", "List", "Optional", "Any", "TYPE_CHECKING",
                 "datetime", "annotations"}
# Methods and properties every record already has.
_RECORD_MEMBERS = {name for name in vars(Record) if not name.startswith("__")}


def _reserved_class_name(name):
    return (keyword.iskeyword(name) or keyword.issoftkeyword(name) or name in _MODULE_NAMES
            or name in vars(builtins))


def _reserved_module_name(name):
    return keyword.iskeyword(name) or keyword.issoftkeyword(name) or name in {"__init__", "model"}


@dataclass(frozen=True)
class GeneratedArtifactPlan:
    files: tuple  # ((relative path, content), ...)
    entry_module_name: str
    renames: tuple = field(default=())  # ((context, original, escaped), ...)

    def __post_init__(self):
        paths = [p for p, _ in self.files]
        if len(set(paths)) != len(paths):
            raise IdentifierCollision(f"duplicate output paths in {paths}")

    @property
    def paths(self):
        return [p for p, _ in self.files]

    def content(self, path):
        for p, text in self.files:
            if p == path:
                return text
        raise KeyError(path)

    def manifest(self):
        return {
            "entryModule": self.entry_module_name,
            "files": [
                {"path": p, "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest()}
                for p, text in self.files
            ],
            "renames": [list(r) for r in self.renames],
        }


def _template(name):
    text = resources.files("cmsbridge").joinpath("templates", name).read_text("utf-8")
    return Template(text)


def _cap(name):
    return name[:1].upper() + name[1:]


def _doc_text(text):
    """Make free text (the model's site name) safe inside a generated docstring."""
    kept = "".join(ch if ch.isprintable() and ch not in '\\"' else " " for ch in text)
    return " ".join(kept.split())


def default_site_name(model):
    """``"Journal CMS"`` -> ``"Journal"``; falls back to ``"Cms"``."""
    words = [w for w in model.site_name.replace("-", " ").split() if w.lower() != "cms"]
    name = upper_camel(" ".join(w for w in words if w.replace("_", "").isalnum()))
    if not name or not is_identifier(name):
        name = "Cms"
    return name


class _Names:
    """Python names for everything generated, with reserved-word escaping."""

    def __init__(self, model, manager_name):
        self.renames = []
        self.classes = {}
        self.modules = {}
        seen_classes = {manager_name: "site manager"}
        seen_modules = {snake_case(manager_name): "site manager"}
        for cls in model.extensions:
            py = self._escape("class", cls.name, _reserved_class_name)
            if py in seen_classes:
                raise IdentifierCollision(
                    f"class {cls.name!r} maps to {py!r}, already used by {seen_classes[py]}")
            seen_classes[py] = cls.name
            module = self._escape("module", snake_case(py), _reserved_module_name)
            if module in seen_modules:
                raise IdentifierCollision(
                    f"class {cls.name!r} maps to module {module!r}, already used by "
                    f"{seen_modules[module]}")
            seen_modules[module] = cls.name
            self.classes[cls.name] = py
            self.modules[cls.name] = module

    def _escape(self, context, name, reserved):
        if not reserved(name):
            return name
        escaped = name + "_"
        while reserved(escaped):
            escaped += "_"
        self.renames.append((context, name, escaped))
        return escaped


def _inherited_attributes(cls):
    """Attributes visible on ``cls``: core ancestors first, own declarations win."""
    own = {a.name: a for a in cls.attributes}
    inherited = {}
    for kind in reversed(list(ancestors(cls.core_kind))):
        for a in CORE_CLASSES[kind.value].attributes:
            inherited[a.name] = a
    merged = dict(inherited)
    merged.update(own)
    return merged, set(own)


def _record_source(model, cls, names, site_title):
    attributes, own = _inherited_attributes(cls)
    members = {}

    def claim(method, what):
        if method in members or method in _RECORD_MEMBERS:
            owner = members.get(method, "the Record base class")
            raise IdentifierCollision(f"{cls.name}: {what} maps to {method}(), "
                                      f"already used by {owner}")
        members[method] = what

    methods = []
    for name in sorted(attributes):
        attr = attributes[name]
        py_type = PYTHON_TYPES[attr.type]
        hint = py_type if attr.is_identifier else f"Optional[{py_type}]"
        getter = "get" + _cap(name)
        claim(getter, f"attribute {name!r}")
        methods.append(f"\n    def {getter}(self) -> {hint}:\n"
                       f"        return self._get({name!r})\n")
        if name in own and not attr.is_identifier:
            setter = "set" + _cap(name)
            claim(setter, f"attribute {name!r}")
            methods.append(f"\n    def {setter}(self, value: {hint}) -> {names.classes[cls.name]}:\n"
                           f"        \"\"\"Stage a new {name}; call save() to write it.\"\"\"\n"
                           f"        return self._set({name!r}, value)\n")

    type_imports = []
    for rel in sorted(cls.relationships, key=lambda r: r.name):
        getter = "get" + _cap(rel.name)
        claim(getter, f"relationship {rel.name!r}")
        target = names.classes.get(rel.target)
        target_hint = target or "Record"
        if target and rel.target != cls.name:
            type_imports.append(f"    from .{names.modules[rel.target]} import {target}")
        if rel.multiplicity is Multiplicity.Many:
            hint = f"List[{target_hint}]"
        else:
            hint = f"Optional[{target_hint}]"
        methods.append(f"\n    def {getter}(self) -> {hint}:\n"
                       f"        \"\"\"Related {rel.target} ({rel.multiplicity.value}); "
                       f"one request.\"\"\"\n"
                       f"        return self._follow({rel.name!r})\n")

    imports = ""
    if type_imports:
        imports = "\nif TYPE_CHECKING:\n" + "\n".join(sorted(set(type_imports))) + "\n"
    attribute_table = "".join(
        f"        {n!r}: {attributes[n].type.value!r},\n" for n in sorted(attributes))
    relationship_table = "".join(
        f"        {r.name!r}: ({r.target!r}, {r.multiplicity.value!r}),\n"
        for r in sorted(cls.relationships, key=lambda r: r.name))
    return _template("record.py.tmpl").substitute(
        class_name=cls.name,
        py_name=names.classes[cls.name],
        core_kind=cls.core_kind.value,
        site_title=site_title,
        type_imports=imports,
        attribute_table=attribute_table,
        relationship_table=relationship_table,
        methods="".join(methods),
    )


def queryable_core_classes(model):
    return sorted(name for name in CORE_ENDPOINTS[model.platform] if name in model)


def _manager_source(model, names, manager_name, site_title):
    record_imports = "".join(
        f"from .{names.modules[c.name]} import {names.classes[c.name]}\n"
        for c in sorted(model.extensions, key=lambda c: names.modules[c.name]))
    record_table = "".join(
        f"        {c.name!r}: {names.classes[c.name]},\n" for c in model.extensions)
    methods, seen = [], set()
    entries = [(c.name, names.classes[c.name]) for c in model.extensions]
    entries += [(name, None) for name in queryable_core_classes(model)]
    for class_name, py in sorted(entries):
        hint = py or "Record"
        get_name, search_name = f"get{py or class_name}ById", f"search{py or class_name}"
        if get_name in seen or search_name in seen:
            raise IdentifierCollision(f"{manager_name}: {get_name} generated twice")
        seen.update((get_name, search_name))
        methods.append(
            f"\n    def {get_name}(self, id: str) -> {hint}:\n"
            f"        return self._get_by_id({class_name!r}, id)\n"
            f"\n    def {search_name}(self, query=None) -> List[{hint}]:\n"
            f"        return self._search({class_name!r}, query)\n")
    return _template("site_manager.py.tmpl").substitute(
        manager_name=manager_name,
        site_title=site_title,
        record_imports=record_imports,
        record_table=record_table,
        methods="".join(methods),
    )


def _check_site_name(site_name):
    if not is_identifier(site_name):
        raise InvalidModel(f"site name must be an identifier, got {site_name!r}")
    return site_name[:1].upper() + site_name[1:]


def generate(model, site_name=None, scenario=False):
    """Build the :class:`GeneratedArtifactPlan` for ``model``.  Pure and deterministic."""
    try:
        validate(model)
    except ValidationFailed as exc:
        raise InvalidModel(str(exc)) from None
    site = _check_site_name(site_name or default_site_name(model))
    manager_name = f"{site}SiteManager"
    package = f"{snake_case(site)}_middleware"
    names = _Names(model, manager_name)
    site_title = _doc_text(model.site_name) or site

    files = []
    for cls in model.extensions:
        files.append((f"{package}/{names.modules[cls.name]}.py",
                      _record_source(model, cls, names, site_title)))
    manager_module = snake_case(manager_name)
    files.append((f"{package}/{manager_module}.py",
                  _manager_source(model, names, manager_name, site_title)))
    files.append((f"{package}/model.json", save_model(model)))

    imports = [f"from .{manager_module} import {manager_name}"]
    exports = [manager_name]
    for cls in model.extensions:
        imports.append(f"from .{names.modules[cls.name]} import {names.classes[cls.name]}")
        exports.append(names.classes[cls.name])
    files.append((f"{package}/__init__.py", _template("package_init.py.tmpl").substitute(
        site_title=site_title,
        platform=model.platform.value,
        imports="\n".join(sorted(imports)) + "\n",
        exports="".join(f"    {e!r},\n" for e in sorted(exports)),
    )))
    if scenario:
        files.append(("scenario.py", render_integration_scenario(model, site)))
    files = [(p, t.rstrip("\n") + "\n" if p.endswith(".py") else t) for p, t in files]
    files.sort(key=lambda item: item[0])
    return GeneratedArtifactPlan(tuple(files), package, tuple(names.renames))


def render_integration_scenario(model, site_name=None):
    """Source of a runnable script: feed search, like the first video, related news."""
    missing = [n for n in ("VideoArticle", "NewsArticle") if n not in model]
    if missing:
        raise MissingScenarioClasses(f"model lacks {', '.join(missing)}")
    video = model["VideoArticle"]
    related = [r for r in video.relationships if r.target == "NewsArticle"]
    if not related:
        raise MissingScenarioClasses("VideoArticle has no relationship to NewsArticle")
    rel = next((r for r in related if r.name == "relatedArticles"), related[0])

    likes = video.attribute("likes")
    like = video.attribute("like")
    if likes is not None and likes.type in (AttributeType.Integer, AttributeType.Float):
        like_getter = "getLikes"
        like_body = ('    """Stage one more like when ``liked`` and write it at once."""\n'
                     "    if liked:\n"
                     "        video.setLikes((video.getLikes() or 0) + 1)\n"
                     "    video.save()\n"
                     "    return video")
    elif like is not None and like.type is AttributeType.Boolean:
        like_getter = "getLike"
        like_body = ('    """Stage the like flag and write it at once."""\n'
                     "    video.setLike(liked)\n"
                     "    video.save()\n"
                     "    return video")
    else:
        raise MissingScenarioClasses("VideoArticle needs a numeric 'likes' or boolean 'like'")

    getter = "get" + _cap(rel.name)
    if rel.multiplicity is Multiplicity.Many:
        related_expr = f"firstVideo.{getter}()"
    else:
        related_expr = f"[n for n in [firstVideo.{getter}()] if n is not None]"
    site = _check_site_name(site_name or default_site_name(model))
    return _template("scenario.py.tmpl").substitute(
        site_title=_doc_text(model.site_name) or site,
        package=f"{snake_case(site)}_middleware",
        manager_name=f"{site}SiteManager",
        like_body=like_body,
        like_getter=like_getter,
        related_expr=related_expr,
    )


def write_plan(plan, out_dir):
    """Write every planned file under ``out_dir`` plus ``MANIFEST.json``; returns the paths."""
    written = []
    for rel_path, text in plan.files:
        path = os.path.join(out_dir, *rel_path.split("/"))
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)
    manifest = os.path.join(out_dir, "MANIFEST.json")
    with open(manifest, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(plan.manifest(), indent=2, sort_keys=True) + "\n")
    written.append(manifest)
    return written
