import ast
import importlib
import json
import re
import sys

import pytest
from hypothesis import HealthCheck, given, settings

from cmsbridge.codegen import (
    default_site_name,
    generate,
    render_integration_scenario,
    write_plan,
)
from cmsbridge.errors import IdentifierCollision, InvalidModel, MissingScenarioClasses
from cmsbridge.metamodel import (
    AttributeType,
    CmsAttribute,
    CmsClass,
    CmsRelationship,
    CoreKind,
    Multiplicity,
    add_class,
    core_model,
)
from cmsbridge.modelio import load_model
from cmsbridge.runtime import SiteManager

from strategies import models

FORBIDDEN = ["http", "requests", "urllib", "jsonapi", "wp/v2", "filter[", "PATCH", "POST"]


def ext(name, kind=CoreKind.ContentType, attrs=(), rels=(), endpoint="/api/x"):
    return CmsClass(name, kind, False, endpoint,
                    tuple(CmsAttribute(a, t) for a, t in attrs),
                    tuple(CmsRelationship(r, target, m) for r, target, m in rels))


def model_with(*classes, **kw):
    model = core_model(kw.get("site", "Demo CMS"), "h", "/api")
    for c in classes:
        model = add_class(model, c)
    return model


@pytest.fixture
def imported(tmp_path):
    """Write a plan, import its package, and clean up sys.modules afterwards."""
    loaded = []

    def load(plan):
        out = tmp_path / f"gen{len(loaded)}"
        write_plan(plan, out)
        sys.path.insert(0, str(out))
        importlib.invalidate_caches()
        pkg = importlib.import_module(plan.entry_module_name)
        loaded.append((str(out), plan.entry_module_name))
        return pkg, out

    yield load
    for path, name in loaded:
        sys.path.remove(path)
        for mod in [m for m in sys.modules if m == name or m.startswith(name + ".")]:
            del sys.modules[mod]
    SiteManager.reset_instances()


def test_journal_plan_files(journal_model):
    plan = generate(journal_model)
    assert plan.entry_module_name == "journal_middleware"
    assert plan.paths == sorted(plan.paths)
    assert set(plan.paths) == {
        "journal_middleware/__init__.py",
        "journal_middleware/age_rating.py",
        "journal_middleware/banner_ads.py",
        "journal_middleware/journal_site_manager.py",
        "journal_middleware/model.json",
        "journal_middleware/news_article.py",
        "journal_middleware/podcast.py",
        "journal_middleware/video_article.py",
    }
    assert load_model(plan.content("journal_middleware/model.json")) == journal_model
    assert plan.renames == ()


def test_default_site_name(journal_model):
    assert default_site_name(journal_model) == "Journal"
    assert default_site_name(core_model("")) == "Cms"
    assert default_site_name(core_model("my blog")) == "MyBlog"


def test_deterministic(journal_model, tmp_path):
    a, b = generate(journal_model, scenario=True), generate(journal_model, scenario=True)
    assert a == b and a.manifest() == b.manifest()
    write_plan(a, tmp_path / "a")
    write_plan(b, tmp_path / "b")
    assert (tmp_path / "a/MANIFEST.json").read_bytes() == (tmp_path / "b/MANIFEST.json").read_bytes()


def test_manifest(journal_model, tmp_path):
    plan = generate(journal_model)
    write_plan(plan, tmp_path)
    manifest = json.loads((tmp_path / "MANIFEST.json").read_text())
    assert manifest["entryModule"] == "journal_middleware"
    assert [f["path"] for f in manifest["files"]] == plan.paths
    assert all(re.fullmatch(r"[0-9a-f]{64}", f["sha256"]) for f in manifest["files"])


def test_no_platform_knowledge_in_generated_code(journal_model):
    plan = generate(journal_model, scenario=True)
    for path, text in plan.files:
        if not path.endswith(".py"):
            continue
        for token in FORBIDDEN:
            assert token not in text, (path, token)


def test_record_api(journal_model):
    src = generate(journal_model).content("journal_middleware/video_article.py")
    for method in ("getId", "getLastUpdated", "getName", "getTitle", "setTitle", "getLikes",
                   "setLikes", "getRelatedArticles", "getAgeRating", "getVideo"):
        assert f"def {method}(" in src, method
    for absent in ("setId", "setLastUpdated", "setName", "setRelatedArticles"):
        assert f"def {absent}(" not in src
    assert "-> List[NewsArticle]" in src and "-> Optional[AgeRating]" in src
    assert "-> Optional[Record]" in src  # core target Video


def test_manager_api(journal_model):
    src = generate(journal_model).content("journal_middleware/journal_site_manager.py")
    assert "class JournalSiteManager(SiteManager):" in src
    for cls in ("VideoArticle", "NewsArticle", "Podcast", "BannerAds", "AgeRating",
                "User", "Comment"):
        assert f"def get{cls}ById(self, id: str)" in src
        assert f"def search{cls}(self, query=None)" in src


def test_generated_package_runs(journal_model, journal_mock, imported):
    pkg, _ = imported(generate(journal_model))
    site = pkg.JournalSiteManager.getInstance(journal_mock.url)
    assert pkg.JournalSiteManager.getInstance(journal_mock.url + "/") is site
    video = site.getVideoArticleById("v1")
    assert isinstance(video, pkg.VideoArticle)
    assert video.getLikes() == 154 and video.getId() == "v1"
    assert video.getPublished().year >= 2020
    assert video.getLastUpdated() is not None
    news = video.getRelatedArticles()
    assert [n.getId() for n in news] == ["n1", "n5"]
    assert all(isinstance(n, pkg.NewsArticle) for n in news)
    rating = video.getAgeRating()
    assert isinstance(rating, pkg.AgeRating)
    assert video.getAuthor().get("name")

    journal_mock.clear_log()
    video.setLikes(155).setTitle("Edited")
    assert journal_mock.requests == []
    assert video.getLikes() == 155
    video.save()
    assert [r.method for r in journal_mock.requests] == ["PATCH"]
    assert site.getVideoArticleById("v1").getLikes() == 155
    q = site.getSearchQueryBuilder().where("likes", "Gt", 200).order_by("likes").build()
    assert [v.getId() for v in site.searchVideoArticle(q)] == ["v3", "v4"]
    assert [u.id for u in site.searchUser()] == ["u1", "u2", "u3"]


def test_generated_package_wordpress(journal_wp_mock, imported):
    from cmsbridge.mock import induce_model, journal_site

    pkg, _ = imported(generate(induce_model(journal_site("WordPress")), site_name="Blog"))
    site = pkg.BlogSiteManager.getInstance(journal_wp_mock.url)
    feed = site.searchVideoArticle()
    assert len(feed) == 6
    assert [n.getId() for n in site.getVideoArticleById("v1").getRelatedArticles()] == ["n1", "n5"]
    assert site.getMediaById("mi1").id == "mi1"


def test_reserved_words_are_escaped(imported):
    model = model_with(ext("Class", attrs=[("title", AttributeType.Text)]),
                       ext("Record", kind=CoreKind.Block),
                       ext("Import", rels=[("target", "Class", Multiplicity.One)]))
    plan = generate(model)
    assert ("class", "Record", "Record_") in plan.renames
    assert ("module", "class", "class_") in plan.renames
    assert ("module", "import", "import_") in plan.renames
    pkg, _ = imported(plan)
    assert pkg.Record_.CLASS_NAME == "Record"
    assert hasattr(pkg.DemoSiteManager, "getRecord_ById")


@pytest.mark.parametrize("classes", [
    [ext("FooBar"), ext("Foo_bar")],
    [ext("DemoSiteManager")],
    [ext("Thing", rels=[("name", "Thing", Multiplicity.One)])],
    [ext("Thing", attrs=[("a", AttributeType.Text)], rels=[("A", "Thing", Multiplicity.One)])],
])
def test_identifier_collisions(classes):
    with pytest.raises(IdentifierCollision):
        generate(model_with(*classes))


def test_record_member_names_are_safe_attributes():
    # accessors are always prefixed, so these never shadow Record members
    plan = generate(model_with(ext("Thing", attrs=[(n, AttributeType.Text) for n in
                                                    ("save", "resource", "refresh", "get")])))
    assert "def getSave(self)" in plan.content("demo_middleware/thing.py")


def test_core_only_model(imported):
    plan = generate(core_model("Empty"))
    assert plan.paths == ["empty_middleware/__init__.py",
                          "empty_middleware/empty_site_manager.py",
                          "empty_middleware/model.json"]
    pkg, _ = imported(plan)
    assert hasattr(pkg.EmptySiteManager, "getUserById")


def test_invalid_inputs(journal_model):
    with pytest.raises(InvalidModel):
        generate(journal_model, site_name="not valid")
    bad = journal_model.replace(classes=journal_model.classes + (
        ext("Broken", rels=[("x", "Nowhere", Multiplicity.One)]),))
    with pytest.raises(InvalidModel):
        generate(bad)


@pytest.mark.parametrize("model", [
    model_with(ext("VideoArticle", attrs=[("likes", AttributeType.Integer)])),
    model_with(ext("NewsArticle"), ext("VideoArticle", attrs=[("likes", AttributeType.Integer)])),
    model_with(ext("NewsArticle"), ext("VideoArticle", attrs=[("likes", AttributeType.Text)],
                                       rels=[("news", "NewsArticle", Multiplicity.Many)])),
])
def test_missing_scenario_classes(model):
    with pytest.raises(MissingScenarioClasses):
        render_integration_scenario(model)


def test_scenario_with_boolean_like_and_single_relation():
    model = model_with(ext("NewsArticle"), ext("VideoArticle", attrs=[("like", AttributeType.Boolean)],
                                               rels=[("story", "NewsArticle", Multiplicity.One)]))
    src = render_integration_scenario(model)
    compile(src, "scenario.py", "exec")
    assert "video.setLike(liked)" in src and "firstVideo.getStory()" in src


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(models())
def test_random_models_compile(model):
    try:
        plan = generate(model, site_name="Random")
    except IdentifierCollision:
        return
    for path, text in plan.files:
        if path.endswith(".py"):
            compile(text, path, "exec")
    assert load_model(plan.content("random_middleware/model.json")) == model


def test_hostile_site_name_stays_inert(journal_model):
    model = journal_model.replace(site_name='Bad """ \\N{x} \x00 name\nimport os')
    plan = generate(model, site_name="Bad", scenario=True)
    for path, text in plan.files:
        if path.endswith(".py"):
            doc = ast.get_docstring(ast.parse(text))
            assert "Bad" in doc and "import os" in doc, path
