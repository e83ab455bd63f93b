import json
import random
import threading
from urllib.parse import unquote

import pytest
import requests

from cmsbridge.drivers import Filter, Page, SearchQuery, Sorter, driver_for
from cmsbridge.errors import InvalidDefinition, PortInUse, UnknownType
from cmsbridge.metamodel import core_model
from cmsbridge.mock import (
    AttributeDef,
    EntityDef,
    MockCms,
    MockSiteDefinition,
    RelationshipDef,
    SeedRecord,
    brute_force_query,
    copy_definition,
    definition_from_dict,
    definition_to_dict,
    fixture_path,
    induce_model,
    load_definition,
    serve,
)
from cmsbridge.mock.definition import InvalidQuery
from cmsbridge.mock.randomsite import (
    MAX_ATTRIBUTES,
    MAX_CONTENT,
    MAX_ENTITIES,
    MAX_RELATIONSHIPS,
    random_query,
    random_site,
)


def small_site(**changes):
    d = MockSiteDefinition(
        "Tiny", "Drupal",
        schema=[EntityDef("node--story", [AttributeDef("title"), AttributeDef("score", "Integer")],
                          [RelationshipDef("author", "user--user", "One")]),
                EntityDef("user--user", [AttributeDef("name")])],
        content=[SeedRecord("u1", "user--user", {"name": "ann"}),
                 SeedRecord("s1", "node--story", {"title": "a", "score": 3}, {"author": "u1"})],
    )
    return copy_definition(d, **changes)


# -- definitions ---------------------------------------------------------------------------

def test_fixture_files_load():
    for name in ("journal.json", "journal_wordpress.json"):
        d = load_definition(fixture_path(name))
        assert d.site_name == "Journal CMS"
        assert definition_from_dict(definition_to_dict(d)) == d


@pytest.mark.parametrize("mutate", [
    lambda d: d.schema.append(EntityDef("node--story")),
    lambda d: d.schema[0].attributes.append(AttributeDef("id")),
    lambda d: d.schema[0].attributes.append(AttributeDef("bad name")),
    lambda d: d.schema[0].relationships.append(RelationshipDef("title", "user--user")),
    lambda d: d.schema.append(EntityDef("nodestory")),
    lambda d: d.content.append(SeedRecord("s2", "node--nope")),
    lambda d: d.content.append(SeedRecord("s1", "node--story")),
    lambda d: d.content.append(SeedRecord("a/b", "node--story")),
    lambda d: d.content.append(SeedRecord("s2", "node--story", {"score": "high"})),
    lambda d: d.content.append(SeedRecord("s2", "node--story", {"score": True})),
    lambda d: d.content.append(SeedRecord("s2", "node--story", {"colour": "red"})),
    lambda d: d.content.append(SeedRecord("s2", "node--story", {}, {"author": "u9"})),
    lambda d: d.content.append(SeedRecord("s2", "node--story", {}, {"author": ["u1"]})),
    lambda d: d.content.append(SeedRecord("s2", "node--story", {}, {}, "yesterday")),
    lambda d: setattr(d, "host", ""),
    lambda d: setattr(d, "base_path", "api"),
])
def test_invalid_definitions(mutate):
    d = small_site()
    mutate(d)
    with pytest.raises(InvalidDefinition):
        induce_model(d)


def test_wordpress_definition_rules():
    d = MockSiteDefinition("W", "WordPress", schema=[EntityDef("types")])
    with pytest.raises(InvalidDefinition):
        induce_model(d)
    with pytest.raises(InvalidDefinition):
        induce_model(MockSiteDefinition("W", "WordPress", base_path="/api"))


@pytest.mark.parametrize("data", [
    [], {"version": "mocksite/2"}, {"version": "mocksite/1"},
    {"version": "mocksite/1", "siteName": "x", "platform": "Joomla"},
])
def test_malformed_definition_documents(data):
    with pytest.raises(InvalidDefinition):
        definition_from_dict(data)


def test_load_definition_not_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    with pytest.raises(InvalidDefinition):
        load_definition(p)


@pytest.mark.parametrize("platform", ["Drupal", "WordPress"])
def test_empty_schema_induces_core_model(platform):
    d = MockSiteDefinition("Empty", platform, host="h.example")
    assert induce_model(d) == core_model("Empty", "h.example", d.base_path, platform)


# -- reference semantics -----------------------------------------------------------------------

def ids(definition, query, raw="node--video_article"):
    return brute_force_query(definition, raw, query)


def test_brute_force_examples(journal_definition):
    d = journal_definition
    assert ids(d, SearchQuery((Filter("likes", "Gt", 100),), (Sorter("likes"),))) == [
        "v1", "v3", "v4"]
    assert ids(d, SearchQuery(sorters=(Sorter("likes", "Desc"),), page=Page(2, 0))) == ["v4", "v3"]
    assert ids(d, SearchQuery((Filter("likes", "Lt", 100), Filter("likes", "Ne", 12)))) == [
        "v2", "v6"]
    assert ids(d, SearchQuery(page=Page(20, 6))) == []


def test_null_semantics():
    d = small_site()
    d.content.append(SeedRecord("s0", "node--story", {"title": "b"}))
    assert ids(d, SearchQuery((Filter("score", "Ne", 3),)), "node--story") == ["s0"]
    assert ids(d, SearchQuery((Filter("score", "Lt", 99),)), "node--story") == ["s1"]
    assert ids(d, SearchQuery(sorters=(Sorter("score"),)), "node--story") == ["s0", "s1"]
    assert ids(d, SearchQuery(sorters=(Sorter("score", "Desc"),)), "node--story") == ["s1", "s0"]


def test_contains_is_case_sensitive():
    d = small_site()
    d.content.append(SeedRecord("s2", "node--story", {"title": "Alpha"}))
    d.content.append(SeedRecord("s3", "node--story", {"title": "alphabet"}))
    assert ids(d, SearchQuery((Filter("title", "Contains", "lpha"),)), "node--story") == [
        "s2", "s3"]
    assert ids(d, SearchQuery((Filter("title", "Contains", "Al"),)), "node--story") == ["s2"]


def test_ties_break_by_id():
    d = small_site()
    for rid in ("s9", "s5", "s7"):
        d.content.append(SeedRecord(rid, "node--story", {"title": "t", "score": 1}))
    assert ids(d, SearchQuery(sorters=(Sorter("score"),)), "node--story") == [
        "s5", "s7", "s9", "s1"]


def test_invalid_reference_queries():
    d = small_site()
    with pytest.raises(InvalidQuery):
        ids(d, SearchQuery((Filter("nope", "Eq", 1),)), "node--story")
    with pytest.raises(InvalidQuery):
        ids(d, SearchQuery((Filter("title", "Gt", 1),)), "node--story")
    with pytest.raises(UnknownType):
        ids(d, SearchQuery(), "node--nope")


# -- the server ------------------------------------------------------------------------------------

def test_auth_enforced(journal_definition):
    d = copy_definition(journal_definition, auth=("editor", "pa55"))
    with serve(d) as site:
        url = site.url + "/jsonapi/node/video_article/v1"
        assert requests.get(url, timeout=5).status_code == 401
        assert requests.get(url, auth=("editor", "nope"), timeout=5).status_code == 401
        assert requests.get(url, auth=("editor", "pa55"), timeout=5).status_code == 200
        assert [r.auth_present for r in site.requests] == [False, True, True]


def test_request_log(journal_mock):
    requests.get(journal_mock.url + "/jsonapi/node/video_article?page[limit]=2", timeout=5)
    entry = journal_mock.requests[-1]
    assert (entry.method, entry.path, unquote(entry.query_string)) == (
        "GET", "/jsonapi/node/video_article", "page[limit]=2")
    journal_mock.clear_log()
    assert journal_mock.requests == []


def test_bad_query_is_400(journal_mock):
    base = journal_mock.url + "/jsonapi/node/video_article"
    assert requests.get(base + "?sort=nope", timeout=5).status_code == 400
    assert requests.get(base + "?page[limit]=x", timeout=5).status_code == 400
    assert requests.get(base + "/missing", timeout=5).status_code == 404
    assert requests.get(journal_mock.url + "/elsewhere", timeout=5).status_code == 404


def test_collection_shapes(journal_mock, journal_wp_mock):
    body = requests.get(journal_mock.url + "/jsonapi/node/video_article", timeout=5).json()
    assert len(body["data"]) == 6 and body["data"][0]["type"] == "node--video_article"
    items = requests.get(journal_wp_mock.url + "/wp-json/wp/v2/video_article", timeout=5).json()
    assert isinstance(items, list) and len(items) == 6
    opts = requests.options(journal_wp_mock.url + "/wp-json/wp/v2/video_article", timeout=5)
    assert "likes" in opts.json()["schema"]["properties"]


def test_updates_do_not_touch_definition(journal_definition):
    with serve(journal_definition) as site:
        r = requests.patch(site.url + "/jsonapi/node/video_article/v1", json={"data": {
            "type": "node--video_article", "id": "v1", "attributes": {"likes": 1}}}, timeout=5)
        assert r.status_code == 200
        assert site.record("node--video_article", "v1").attributes["likes"] == 1
    assert journal_definition.records("node--video_article")[0].attributes["likes"] == 154


def test_concurrent_requests(journal_definition, journal_model):
    with serve(journal_definition) as site:
        driver = driver_for("Drupal", site.url, model=journal_model)
        cls = journal_model["VideoArticle"]
        errors = []

        def worker(n):
            try:
                for _ in range(10):
                    res = driver.get_by_id(cls, "v5")
                    driver.update(res, {"title": f"t{n}"})
                    driver.search(cls, SearchQuery(sorters=(Sorter("likes"),)))
            except Exception as exc:  # noqa: BLE001 - surfaced below
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=(n,)) for n in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []
        assert site.record("node--video_article", "v5").attributes["title"].startswith("t")
        assert len(site.requests) == 8 * 30


def test_port_in_use(journal_mock, journal_definition):
    with pytest.raises(PortInUse):
        MockCms(journal_definition, port=journal_mock.port)


# -- random sites ------------------------------------------------------------------------------------

def test_random_site_bounds():
    for seed in range(40):
        d = random_site(seed).definition
        assert len(d.schema) <= MAX_ENTITIES and len(d.content) <= MAX_CONTENT
        for e in d.schema:
            assert len(e.attributes) <= MAX_ATTRIBUTES
            assert len(e.relationships) <= MAX_RELATIONSHIPS
        induce_model(d)
        assert json.loads(json.dumps(definition_to_dict(d)))


@pytest.mark.parametrize("seed", range(12))
def test_server_matches_reference(seed):
    site_spec = random_site(seed)
    d = site_spec.definition
    model = induce_model(d)
    rng = random.Random(seed)
    with serve(d) as site:
        driver = driver_for(d.platform, site.url, model=model)
        for e in d.schema:
            cls = model[site_spec.expected[e.raw_name].class_name]
            if cls.endpoint_path is None:
                continue
            for _ in range(5):
                q = random_query(rng, d, e)
                assert [r.id for r in driver.search(cls, q)] == brute_force_query(d, e.raw_name, q)
